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

import logging
import os

ROOT_LOGGER = 'bayeslab'
LOG_LEVEL_ENV = 'BAYESLAB_DEBUG_LOG_LEVEL'
LOG_FORMAT = '%(asctime)s : %(message)s : %(levelname)s -%(name)s'
DATE_FORMAT = '%d%m%Y %I:%M:%S %p'


def get_logger(subsys):
    return logging.getLogger(ROOT_LOGGER + '.' + subsys)


def configure(val=None):
    """
    Attach a stream handler to the ``bayeslab`` logger.

    :param val: a level name such as ``'DEBUG'``; falls back to the
        ``BAYESLAB_DEBUG_LOG_LEVEL`` environment variable. Nothing is
        installed when neither is set.
    :return: the root ``bayeslab`` logger
    """
    root = logging.getLogger(ROOT_LOGGER)
    level = val or os.environ.get(LOG_LEVEL_ENV)
    if not level:
        return root
    if any(getattr(h, '_bayeslab', False) for h in root.handlers):
        root.setLevel(logging.getLevelName(level))
        return root
    ch = logging.StreamHandler()
    ch._bayeslab = True
    ch.setLevel(logging.getLevelName(level))
    ch.setFormatter(logging.Formatter(LOG_FORMAT, datefmt=DATE_FORMAT))
    root.addHandler(ch)
    root.setLevel(logging.getLevelName(level))
    root.info('Initializing bayeslab logging. level={0}'.format(level))
    return root
