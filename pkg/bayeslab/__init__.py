#
# Copyright 2026, bayeslab contributors.
# All Rights Reserved
#
# Licensed under the Apache License, Version 2.0 (the "License")
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
#
from bayeslab_core import __version__
import bayeslab_core._logutil


def enable_logging(level='INFO'):
    """
    Attach a stream handler to the ``bayeslab`` logger.

    The library itself never installs handlers; this is the one switch
    for scripts that want the log lines the command line tool prints.
    """
    return bayeslab_core._logutil.configure(level)
