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
import json
import logging
import math
import os
import shutil
import tempfile

import numpy as np
from deepdiff import DeepDiff
from testfixtures import LogCapture

from bayeslab.game import TypeDistribution
from bayeslab.instance import bundled, load_document, load_instance
from bayeslab import normal_form

try:
    import unittest2 as unittest
except ImportError:
    import unittest

from typing import *

loglevel = os.environ.get("BAYESLAB_DEBUG_LOG_LEVEL")
if loglevel:
    ch = logging.StreamHandler()
    ch.setLevel(logging.getLevelName(loglevel))
    formatter = logging.Formatter('%(asctime)s : %(message)s : %(levelname)s -%(name)s', datefmt='%d%m%Y %I:%M:%S %p')
    ch.setFormatter(formatter)
    logging.getLogger().addHandler(ch)

E_FACTOR = math.e / (math.e - 1.0)

MINIMAL_DOCUMENT = {
    "family": "normal-form",
    "name": "minimal",
    "players": [{"types": ["t"], "actions": {"t": ["stay"]}, "payoffs": {"t": {"stay": 1.0}}}],
}


class LabTestCase(unittest.TestCase):
    class CaptureContext(LogCapture):
        def __init__(self, *args, **kwargs):
            self.records = []
            kwargs['attributes'] = (lambda r: self.records.append(r))
            super(LabTestCase.CaptureContext, self).__init__(*args, **kwargs)

        @property
        def output(self):
            return map(str, self.records)

    def __init__(self, *args, **kwargs):
        super(LabTestCase, self).__init__(*args, **kwargs)
        self.maxDiff = None

    def deepDiffComparator(self, expected, actual):
        self.assertEqual({}, DeepDiff(expected, actual, ignore_order=True, significant_digits=5,
                                      ignore_numeric_type_changes=True, ignore_type_subclasses=True,
                                      ignore_string_type_changes=True))

    def rng(self, seed=0):
        # type: (int) -> np.random.Generator
        return np.random.default_rng(seed)

    def bundled(self, name):
        return load_instance(bundled(name))

    def document(self, name):
        with open(bundled(name), 'r', encoding='utf-8') as f:
            return json.load(f)

    def load(self, document):
        return load_document(document, source='<test>')

    def tempdir(self):
        # type: (...) -> str
        path = tempfile.mkdtemp(prefix='bayeslab-')
        self.addCleanup(shutil.rmtree, path, True)
        return path

    def write_json(self, document, name='doc.json', directory=None):
        # type: (Any, str, Optional[str]) -> str
        path = os.path.join(directory or self.tempdir(), name)
        with open(path, 'w', encoding='utf-8') as f:
            json.dump(document, f)
        return path

    def coordination(self, high=2.0, low=1.0):
        return normal_form.coordination_game(high, low).to_game()

    def uncertain_single_player(self):
        """
        One player, two equiprobable types; 'x' pays 1/0 and 'y' 0/1.
        """
        return normal_form.single_player({'a': {'x': 1.0, 'y': 0.0}, 'b': {'x': 0.0, 'y': 1.0}}).to_game()

    def singleton(self, type_id):
        return TypeDistribution.singleton(type_id)
