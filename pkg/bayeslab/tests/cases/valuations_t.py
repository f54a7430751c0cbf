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
import math

from parameterized import parameterized

from bayeslab.exceptions import InvalidArgumentException
from bayeslab.valuations import XOSValuation, TableValuation, to_mask, to_items, submasks, additive, \
    unit_demand, beta_fsubadditive, is_subadditive, is_submodular, harmonic_bound, random_xos, \
    random_subadditive_table, optimal_allocation
from bayeslab_tests.base import LabTestCase


class ItemSetTest(LabTestCase):
    def test_masks(self):
        self.assertEqual(0b101, to_mask((0, 2)))
        self.assertEqual((0, 2), to_items(0b101))
        self.assertEqual((), to_items(0))

    def test_submasks(self):
        self.assertEqual([5, 4, 1], list(submasks(5)))
        self.assertEqual([], list(submasks(0)))


class XOSValuationTest(LabTestCase):
    def test_value(self):
        val = unit_demand([3.0, 1.0, 2.0])
        self.assertEqual(3.0, val.value((0, 2)))
        self.assertEqual(2.0, val.value((1, 2)))
        self.assertEqual(0.0, val.value(()))

    def test_supporting_additive(self):
        val = XOSValuation(2, [[1.0, 1.0], [3.0, 0.0]])
        self.assertEqual((3.0, 0.0), val.supporting_additive((0, 1)))
        self.assertEqual((0.0, 1.0), val.supporting_additive((1,)))

    def test_supporting_additive_ties_go_to_first_clause(self):
        val = XOSValuation(2, [[1.0, 1.0], [2.0, 0.0]])
        self.assertEqual((1.0, 1.0), val.supporting_additive((0, 1)))

    @parameterized.expand([
        ("no clauses", 2, []),
        ("short clause", 2, [[1.0]]),
        ("negative", 2, [[1.0, -1.0]]),
        ("too many items", 17, [[1.0] * 17]),
    ])
    def test_rejects(self, _, m, clauses):
        self.assertRaises(InvalidArgumentException, XOSValuation, m, clauses)

    def test_out_of_range_item(self):
        self.assertRaises(InvalidArgumentException, additive([1.0, 1.0]).value, (2,))


class TableValuationTest(LabTestCase):
    @parameterized.expand([
        ("length", 2, [0.0, 1.0, 1.0]),
        ("nonzero empty set", 1, [1.0, 2.0]),
        ("not monotone", 2, [0.0, 2.0, 1.0, 1.5]),
    ])
    def test_rejects(self, _, m, values):
        self.assertRaises(InvalidArgumentException, TableValuation, m, values)

    def test_to_table_of_xos(self):
        table = unit_demand([1.0, 2.0]).to_table()
        self.assertEqual((0.0, 1.0, 2.0, 2.0), table.values)


class BetaTest(LabTestCase):
    def test_xos_tables_have_beta_one(self):
        rng = self.rng(7)
        for _ in range(20):
            val = random_xos(rng, 3, clauses=2)
            self.assertAlmostEqual(1.0, beta_fsubadditive(val), delta=1e-9)

    def test_known_table_exceeds_log_bound(self):
        m = 4
        full = (1 << m) - 1
        val = TableValuation.from_function(m, lambda items: 2.0 if to_mask(items) == full else
                                           (1.0 if items else 0.0))
        self.assertTrue(is_subadditive(val))
        beta = beta_fsubadditive(val)
        self.assertAlmostEqual(1.5, beta, places=6)
        self.assertGreater(beta, math.log(m))
        self.assertLessEqual(beta, harmonic_bound(m))

    def test_subadditive_tables_respect_harmonic_bound(self):
        rng = self.rng(11)
        for _ in range(3):
            val = random_subadditive_table(rng, 4)
            self.assertTrue(is_subadditive(val))
            self.assertLessEqual(beta_fsubadditive(val), harmonic_bound(4) + 1e-9)

    def test_complements_are_not_subadditive(self):
        val = TableValuation(2, [0.0, 1.0, 1.0, 3.0])
        self.assertFalse(is_subadditive(val))
        self.assertFalse(is_submodular(val))
        self.assertAlmostEqual(1.5, beta_fsubadditive(val), places=6)

    def test_additive_is_submodular(self):
        self.assertTrue(is_submodular(additive([1.0, 2.0, 0.5])))
        self.assertTrue(is_subadditive(additive([1.0, 2.0, 0.5])))


class OptimalAllocationTest(LabTestCase):
    def test_unit_demand_pair(self):
        sets, value = optimal_allocation([unit_demand([2.0, 1.0]), unit_demand([2.0, 1.0])], 2)
        self.assertEqual(((0,), (1,)), sets)
        self.assertEqual(3.0, value)

    def test_complementary_bidder_takes_both(self):
        sets, value = optimal_allocation([TableValuation(2, [0.0, 1.0, 1.0, 5.0]), additive([2.0, 2.0])], 2)
        self.assertEqual(((0, 1), ()), sets)
        self.assertEqual(5.0, value)


if __name__ == '__main__':
    import unittest
    unittest.main()
