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
from parameterized import parameterized

from bayeslab.equilibrium import enumerate_pure_bne
from bayeslab.exceptions import InvalidArgumentException, WrongVariantException
from bayeslab.game import TypeDistribution
from bayeslab.item_auctions import ItemAuction, Pricing, DeviationKind, bid_grid, allocate_and_price, \
    half_bid_deviation, randomized_deviation_expected_utility, monte_carlo_deviation_utility, \
    check_fp_semi_smoothness, check_pure_nash_optimality, certified_lambda, certificate_slack, \
    random_xos_auction, random_table_auction, unit_demand_auction, additive_auction, RANDOMIZED_FACTOR, \
    SELLER_ACTION, deviation_for
from bayeslab.smoothness import Variant, certify, check_domination
from bayeslab.valuations import beta_fsubadditive, unit_demand
from bayeslab_tests.base import LabTestCase


class AllocationTest(LabTestCase):
    def setUp(self):
        super(AllocationTest, self).setUp()
        self.first = unit_demand_auction([[1.0, 1.0], [1.0, 1.0]], step=0.5)
        self.second = unit_demand_auction([[1.0, 1.0], [1.0, 1.0]], step=0.5, pricing=Pricing.SECOND_PRICE)

    def test_bid_grid(self):
        self.assertEqual((0.0, 0.25, 0.5, 0.75, 1.0), bid_grid(0.25, 1.0))

    def test_first_price_ties_to_lowest_index(self):
        outcome = allocate_and_price(self.first, ((1.0, 0.0), (1.0, 0.5)))
        self.assertEqual((0, 1), outcome.winners)
        self.assertEqual((1.0, 0.5), outcome.prices)
        self.assertEqual(1.5, outcome.revenue)

    def test_second_price(self):
        outcome = allocate_and_price(self.second, ((1.0, 0.0), (0.5, 0.5)))
        self.assertEqual((0, 1), outcome.winners)
        self.assertEqual((0.5, 0.0), outcome.prices)

    def test_utilities(self):
        game = self.first.to_game()
        t = ('u0', 'u1', 'seller')
        a = ((1.0, 0.0), (0.0, 0.5), SELLER_ACTION)
        self.assertEqual(0.0, game.payoff(0, 'u0', a))
        self.assertEqual(0.5, game.payoff(1, 'u1', a))
        self.assertEqual(1.5, game.payoff(2, 'seller', a))
        self.assertEqual(2.0, game.welfare(t, a))

    def test_second_price_caps_bids_by_default(self):
        auction = additive_auction([[0.5, 1.0]], step=0.5, pricing=Pricing.SECOND_PRICE)
        self.assertTrue(auction.overbidding_restricted)
        self.assertEqual({(0.0, 0.0), (0.0, 0.5), (0.0, 1.0), (0.5, 0.0), (0.5, 0.5), (0.5, 1.0)},
                         set(auction.bids_for('a0')))

    def test_rejects_values_above_grid(self):
        self.assertRaises(InvalidArgumentException, ItemAuction, 1, Pricing.FIRST_PRICE, (0.0, 0.5),
                          [TypeDistribution.singleton('x')], {'x': unit_demand([1.0])})

    def test_rejects_unknown_valuation(self):
        self.assertRaises(InvalidArgumentException, ItemAuction, 1, Pricing.FIRST_PRICE, (0.0, 1.0),
                          [TypeDistribution.singleton('y')], {'x': unit_demand([1.0])})


class DeviationTest(LabTestCase):
    def test_half_bid(self):
        auction = unit_demand_auction([[2.0, 1.0], [2.0, 1.0]], step=0.25)
        t = ('u0', 'u1', 'seller')
        self.assertEqual((1.0, 0.0), half_bid_deviation(auction, t, 0))
        self.assertEqual((0.0, 0.5), half_bid_deviation(auction, t, 1))

    def test_half_bid_snaps_down(self):
        auction = unit_demand_auction([[1.5]], step=0.5)
        self.assertEqual((0.5,), half_bid_deviation(auction, ('u0', 'seller'), 0))

    def test_randomized_closed_form(self):
        auction = unit_demand_auction([[2.0, 1.0], [2.0, 1.0]], step=0.25)
        t = ('u0', 'u1', 'seller')
        bids = ((0.0, 0.0), (0.5, 0.25))
        self.assertAlmostEqual(2.0 * RANDOMIZED_FACTOR - 0.5,
                               randomized_deviation_expected_utility(auction, t, 0, bids))
        self.assertAlmostEqual(max(0.0, RANDOMIZED_FACTOR - 0.0),
                               randomized_deviation_expected_utility(auction, t, 1, bids))

    def test_randomized_needs_first_price(self):
        auction = unit_demand_auction([[1.0]], step=0.5, pricing=Pricing.SECOND_PRICE)
        self.assertRaises(WrongVariantException, randomized_deviation_expected_utility, auction,
                          ('u0', 'seller'), 0, ((0.0,),))

    def test_closed_form_matches_monte_carlo(self):
        rng = self.rng(2026)
        for k in range(50):
            a_j = float(rng.uniform(0.5, 3.0))
            p_j = float(rng.uniform(0.0, a_j))
            mean, se = monte_carlo_deviation_utility(a_j, p_j, self.rng(k), samples=10 ** 6)
            expected = max(0.0, a_j * RANDOMIZED_FACTOR - p_j)
            self.assertLessEqual(abs(mean - expected), 5.0 * se + 1e-12, (a_j, p_j))

    def test_certified_lambda(self):
        self.assertEqual(0.5, certified_lambda(DeviationKind.HALF))
        self.assertEqual(0.25, certified_lambda(DeviationKind.HALF, beta=2.0))
        self.assertAlmostEqual(RANDOMIZED_FACTOR / 1.5, certified_lambda(DeviationKind.RANDOMIZED, 1.5))

    def test_certificate_slack_takes_the_larger_count(self):
        wide = unit_demand_auction([[1.0, 1.0, 1.0], [1.0, 1.0, 1.0]], step=0.25)
        crowded = additive_auction([[1.0], [1.0], [1.0]], step=0.5)
        self.assertEqual(0.75, certificate_slack(wide, DeviationKind.HALF))
        self.assertEqual(1.5, certificate_slack(crowded, DeviationKind.HALF))
        self.assertEqual(0.0, certificate_slack(crowded, DeviationKind.RANDOMIZED))


class SemiSmoothnessTest(LabTestCase):
    def test_xos_instances_half_and_randomized(self):
        rng = self.rng(3)
        for _ in range(20):
            auction = random_xos_auction(rng, 2, 2, types=2)
            half = check_fp_semi_smoothness(auction, 0.5, DeviationKind.HALF)
            self.assertTrue(half.passed, half.witness)
            self.assertEqual(certificate_slack(auction, DeviationKind.HALF), half.slack)
            randomized = check_fp_semi_smoothness(auction, RANDOMIZED_FACTOR, DeviationKind.RANDOMIZED)
            self.assertTrue(randomized.passed, randomized.witness)
            self.assertEqual(0.0, randomized.slack)

    def test_lambda_too_large_fails(self):
        auction = unit_demand_auction([[2.0, 2.0], [2.0, 2.0]], step=0.25)
        verdict = check_fp_semi_smoothness(auction, 0.99)
        self.assertFalse(verdict.passed)
        self.assertLess(verdict.worst_margin, -verdict.slack)
        self.assertTrue(check_fp_semi_smoothness(auction, 0.5).passed)

    def test_beta_scaled_lambda_on_tables(self):
        rng = self.rng(5)
        for _ in range(5):
            auction = random_table_auction(rng, 2, 2)
            beta = max(beta_fsubadditive(v) for v in auction.valuations.values())
            lam = certified_lambda(DeviationKind.RANDOMIZED, beta)
            verdict = check_fp_semi_smoothness(auction, lam, DeviationKind.RANDOMIZED)
            self.assertTrue(verdict.passed, (beta, verdict.witness))

    def test_second_price_is_refused(self):
        auction = unit_demand_auction([[1.0]], step=0.5, pricing=Pricing.SECOND_PRICE)
        self.assertRaises(WrongVariantException, check_fp_semi_smoothness, auction, 0.5)

    def test_bundled_instance(self):
        auction = self.bundled('item-auction').model
        self.assertTrue(check_fp_semi_smoothness(auction, 0.5).passed)


class EquilibriumDominationTest(LabTestCase):
    @parameterized.expand([
        ("one item, two types", 2, 1, 2, 4),
        ("two items, one type", 2, 2, 1, 4),
        ("three bidders", 3, 1, 1, 2),
        ("two items, two types", 2, 2, 2, 1),
    ])
    def test_equilibria_respect_the_certificates(self, _, n, m, types, count):
        rng = self.rng(3)
        for _ in range(count):
            auction = random_xos_auction(rng, n, m, types=types)
            game = auction.to_game()
            epsilon = game.default_epsilon
            equilibria = enumerate_pure_bne(game, epsilon)
            for kind in DeviationKind:
                cert = certify(game, Variant.SEMI, certified_lambda(kind), 0.0, deviation_for(auction, kind),
                               slack=certificate_slack(auction, kind))
                self.assertTrue(cert.passed, cert.verdict.witness)
                verdict = check_domination(game, cert, equilibria, epsilon)
                self.assertTrue(verdict.passed, verdict.witness)
                self.assertEqual(len(equilibria), verdict.checked)


class PureNashOptimalityTest(LabTestCase):
    def test_complete_information_first_price(self):
        for values in ([[1.0, 0.5], [0.5, 1.0]], [[1.0, 1.0], [0.5, 0.5]]):
            auction = unit_demand_auction(values, step=0.5)
            verdict = check_pure_nash_optimality(auction)
            self.assertTrue(verdict.passed, verdict.witness)
            self.assertEqual(1.0, verdict.slack)

    def test_needs_complete_information(self):
        auction = random_xos_auction(self.rng(1), 2, 1, types=2)
        self.assertRaises(WrongVariantException, check_pure_nash_optimality, auction)


if __name__ == '__main__':
    import unittest
    unittest.main()
