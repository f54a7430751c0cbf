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
import copy
import os

from parameterized import parameterized

from bayeslab.exceptions import InputException, SchemaViolationException, InvariantViolationException, \
    UnnormalizedProbabilityException
from bayeslab.greedy import SetBid
from bayeslab.instance import load_document, load_instance, read_json, bundled_instances, dump_instance, \
    self_audit, validate_document, family_schema, FAMILIES
from bayeslab_core import Objective
from bayeslab_tests.base import LabTestCase, MINIMAL_DOCUMENT


class LoadTest(LabTestCase):
    def test_minimal_document(self):
        loaded = self.load(MINIMAL_DOCUMENT)
        self.assertEqual('minimal', loaded.name)
        self.assertEqual('normal-form', loaded.family)
        self.assertEqual(1, loaded.game.n)
        self.assertIs(Objective.UTILITY, loaded.game.objective)

    def test_name_defaults_to_file_name(self):
        document = copy.deepcopy(MINIMAL_DOCUMENT)
        del document['name']
        path = self.write_json(document, name='lonely.json')
        self.assertEqual('lonely', load_instance(path).name)

    def test_unnormalized_probabilities(self):
        document = copy.deepcopy(MINIMAL_DOCUMENT)
        player = document['players'][0]
        player.update({'types': ['t', 'u'], 'probabilities': [0.5, 0.4],
                       'actions': {'t': ['stay'], 'u': ['stay']},
                       'payoffs': {'t': {'stay': 1.0}, 'u': {'stay': 0.0}}})
        with self.assertRaises(UnnormalizedProbabilityException) as cm:
            self.load(document)
        self.assertEqual('/players/0/probabilities', cm.exception.path)

    def test_bidder_probabilities_path(self):
        document = self.document('greedy-auction')
        document['bidders'][1]['probabilities'] = [0.5, 0.6]
        with self.assertRaises(UnnormalizedProbabilityException) as cm:
            self.load(document)
        self.assertEqual('/bidders/1/probabilities', cm.exception.path)

    def test_missing_payoff_table(self):
        document = copy.deepcopy(MINIMAL_DOCUMENT)
        document['players'][0]['payoffs'] = {}
        with self.assertRaises(InvariantViolationException) as cm:
            self.load(document)
        self.assertEqual('/players/0/payoffs/t', cm.exception.path)

    def test_model_invariants_are_wrapped(self):
        document = self.document('item-auction')
        document['items'] = document['items'] + 1
        with self.assertRaises(InvariantViolationException) as cm:
            self.load(document)
        self.assertIsNotNone(cm.exception.path)
        self.assertEqual(2, cm.exception.EXIT_CODE)

    def test_additive_greedy_valuation(self):
        document = self.document('greedy-auction')
        document['valuations']['both'] = {'kind': 'additive', 'values': [1.0, 1.0]}
        loaded = self.load(document)
        self.assertEqual(SetBid.additive_closure([1.0, 1.0]), loaded.model.valuations['both'])

    def test_congestion_paths_from_ends(self):
        loaded = self.bundled('congestion')
        self.assertEqual(((0,), (1,)), tuple(tuple(p) for p in loaded.model.paths[1]))

    def test_congestion_without_ends(self):
        document = self.document('congestion')
        for edge in document['edges']:
            del edge['ends']
        with self.assertRaises(InvariantViolationException) as cm:
            self.load(document)
        self.assertEqual('/edges', cm.exception.path)


class SchemaTest(LabTestCase):
    @parameterized.expand([
        ("no family", {}, '/'),
        ("unknown family", {"family": "chess"}, '/family'),
        ("no players", {"family": "normal-form"}, '/'),
    ])
    def test_violation_path(self, _, document, path):
        with self.assertRaises(SchemaViolationException) as cm:
            validate_document(document)
        self.assertEqual(path, cm.exception.path)

    def test_nested_violation(self):
        document = copy.deepcopy(MINIMAL_DOCUMENT)
        document['players'][0]['payoffs']['t']['stay'] = 'lots'
        with self.assertRaises(SchemaViolationException) as cm:
            self.load(document)
        self.assertEqual('/players/0/payoffs/t/stay', cm.exception.path)

    def test_schema_violation_is_an_input_problem(self):
        self.assertRaises(InputException, self.load, [])

    def test_family_schemas(self):
        for family in FAMILIES:
            self.assertEqual('object', family_schema(family)['type'])


class ReadTest(LabTestCase):
    def test_invalid_json(self):
        path = os.path.join(self.tempdir(), 'broken.json')
        with open(path, 'w', encoding='utf-8') as f:
            f.write('{"family": ')
        with self.assertRaises(InputException) as cm:
            read_json(path)
        self.assertEqual(path, cm.exception.path)

    def test_missing_file(self):
        self.assertRaises(InputException, load_instance, os.path.join(self.tempdir(), 'nothing.json'))


class BundledTest(LabTestCase):
    def test_every_bundled_instance_loads(self):
        paths = bundled_instances()
        self.assertEqual(len(FAMILIES), len(paths))
        for path in paths:
            loaded = load_instance(path)
            verdict = self_audit(loaded)
            self.assertTrue(verdict.passed, verdict.witness)
            self.assertEqual(loaded.family, verdict.parameters['family'])
            self.assertGreater(verdict.checked, 0)

    def test_dump_reloads(self):
        for path in bundled_instances():
            loaded = load_instance(path)
            document = dump_instance(loaded)
            again = self.load(document)
            self.assertEqual(loaded.family, again.family)
            self.assertEqual(loaded.game.n, again.game.n)
            self.deepDiffComparator(document, dump_instance(again))


if __name__ == '__main__':
    import unittest
    unittest.main()
