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

from bayeslab.equilibrium import enumerate_pure_bne
from bayeslab.exceptions import InvalidArgumentException
from bayeslab.greedy import SetBid, GreedyMechanism, GreedyAuction, run_greedy, critical_value, \
    approximation_factor, check_payment_fact, check_payment_fact_all, certified_c, check_greedy_smoothness, \
    single_minded_auction, random_single_minded_auction, resolve_c, SingleMindedHalfDeviation, EMPTY_BID, \
    UNRESTRICTED, OUTSIDE_SCOPE
from bayeslab.smoothness import SmoothnessCertificate, Variant, check_domination
from bayeslab_core import Marker
from bayeslab_tests.base import LabTestCase

BLOCKING = (((0, 1), 2.0), ((0,), 1.5), ((1,), 1.5))


class SetBidTest(LabTestCase):
    def test_value(self):
        val = SetBid(2, [((0,), 1.0), ((0, 1), 3.0)])
        self.assertEqual(3.0, val.value((0, 1)))
        self.assertEqual(1.0, val.value((0,)))
        self.assertEqual(0.0, val.value((1,)))

    def test_duplicate_sets_keep_the_larger_value(self):
        val = SetBid(2, [((1, 0), 1.0), ((0, 1), 2.0)])
        self.assertEqual((((0, 1), 2.0),), val.entries)

    def test_additive_closure(self):
        val = SetBid.additive_closure([1.0, 2.0])
        self.assertEqual(3.0, val.value((0, 1)))
        self.assertEqual(((0,), (0, 1), (1,)), val.sets())

    @parameterized.expand([
        ("empty set", 2, [((), 1.0)]),
        ("negative", 2, [((0,), -1.0)]),
        ("unknown item", 2, [((2,), 1.0)]),
    ])
    def test_rejects(self, _, m, entries):
        self.assertRaises(InvalidArgumentException, SetBid, m, entries)


class GreedyMechanismTest(LabTestCase):
    def setUp(self):
        super(GreedyMechanismTest, self).setUp()
        self.mech = GreedyMechanism(m=2, grid=[0.0, 0.5, 1.0, 1.5, 2.0])

    def test_highest_value_first(self):
        outcome = run_greedy(self.mech, BLOCKING)
        self.assertEqual(((0, 1), (), ()), outcome.allocation)
        self.assertEqual((2.0, 0.0, 0.0), outcome.payments)
        self.assertEqual(2.0, outcome.revenue)

    def test_zero_priority_pairs_are_allocated(self):
        outcome = run_greedy(self.mech, (((0,), 1.0), EMPTY_BID))
        self.assertEqual(((0,), (1,)), outcome.allocation)
        self.assertEqual((1.0, 0.0), outcome.payments)

    def test_unrestricted_feasibility(self):
        mech = GreedyMechanism(m=2, feasibility=UNRESTRICTED)
        outcome = run_greedy(mech, (((0, 1), 1.0), ((0, 1), 1.0)))
        self.assertEqual(((0, 1), (0, 1)), outcome.allocation)

    def test_critical_grid_extends_past_the_bid_grid(self):
        self.assertEqual(4.5, self.mech.critical_grid[-1])

    def test_critical_value_breaks_ties_by_index(self):
        mech = GreedyMechanism(m=1, grid=[0.0, 1.0, 2.0])
        bids = (((0,), 1.0), ((0,), 2.0))
        self.assertEqual(2.0, critical_value(mech, 0, (0,), bids).value)
        self.assertEqual(2.0, critical_value(mech, 1, (0,), (((0,), 1.0), EMPTY_BID)).value)
        self.assertEqual(0.0, critical_value(mech, 0, (), bids).value)

    def test_blocked_set_has_infinite_critical_value(self):
        mech = GreedyMechanism(m=1, feasibility=[[[0], []], [[], []]], grid=[0.0, 1.0])
        th = critical_value(mech, 1, (0,), (((0,), 1.0), ((0,), 1.0)))
        self.assertTrue(math.isinf(th.value))
        self.assertIs(Marker.INFINITE, th.marker)
        self.assertFalse(th.flagged)

    def test_approximation_factor(self):
        audit = approximation_factor(self.mech, [BLOCKING])
        self.assertEqual(1.5, audit.factor)
        self.assertIs(Marker.FINITE, audit.marker)
        self.assertLessEqual(audit.factor, certified_c(self.mech))

    def test_payment_fact(self):
        alternative = ((), (0,), (1,))
        verdict = check_payment_fact(self.mech, BLOCKING, alternative, certified_c(self.mech))
        self.assertEqual([0.0, 2.5, 2.5], verdict.witness['critical_values'])
        self.assertEqual(1.5, verdict.slack)
        self.assertTrue(verdict.passed)
        self.assertFalse(check_payment_fact(self.mech, BLOCKING, alternative, 1.0).passed)

    def test_payment_fact_fails_at_unit_factor(self):
        verdict = check_payment_fact(self.mech, BLOCKING, ((), (0,), (1,)), 1.0)
        self.assertFalse(verdict.passed)
        self.assertEqual(-3.0, verdict.worst_margin)
        self.assertEqual([(), (0,), (1,)], verdict.witness['alternative'])
        self.assertEqual([0.0, 2.5, 2.5], verdict.witness['critical_values'])
        self.assertEqual(2.0, verdict.witness['revenue'])
        self.assertEqual({'c': 1.0, 'c_source': 'supplied'}, dict(verdict.parameters))
        self.assertIn(OUTSIDE_SCOPE, verdict.flags)

    def test_payment_fact_rejects_infeasible_alternative(self):
        self.assertRaises(InvalidArgumentException, check_payment_fact, self.mech, BLOCKING,
                          ((0,), (0,), ()), 2.0)

    def test_payment_fact_over_every_profile(self):
        auction = single_minded_auction([((0, 1), 2.0), ((0,), 1.0), ((1,), 1.0)], m=2, step=1.0)
        verdict = check_payment_fact_all(auction.mechanism, auction.bid_profiles(), certified_c(auction.mechanism))
        self.assertTrue(verdict.passed, verdict.witness)
        self.assertGreater(verdict.checked, 27)

    @parameterized.expand([
        ("priority", dict(priority='largest-first')),
        ("grid without zero", dict(grid=[1.0, 2.0])),
        ("feasibility name", dict(feasibility='anything')),
        ("not downward closed", dict(feasibility=[[[0], [1]]])),
    ])
    def test_rejects(self, _, kwargs):
        self.assertRaises(InvalidArgumentException, GreedyMechanism, 2, **kwargs)

    def test_audit_rejects_decreasing_priority(self):
        mech = GreedyMechanism(m=1, priority=lambda i, items, value: -value)
        self.assertRaises(InvalidArgumentException, mech.audit_priority, 1)


class GreedyAuctionTest(LabTestCase):
    def test_bids(self):
        auction = single_minded_auction([((0,), 1.0)], m=1, step=0.5)
        self.assertEqual((EMPTY_BID, ((0,), 0.5), ((0,), 1.0)), auction.bids_for(0))

    def test_custom_priority_is_audited(self):
        mech = GreedyMechanism(m=1, priority=lambda i, items, value: -value)
        self.assertRaises(InvalidArgumentException, GreedyAuction, mech,
                          [self.singleton('x')], {'x': SetBid.single_minded(1, (0,), 1.0)})

    def test_bundled_instance_is_smooth(self):
        auction = self.bundled('greedy-auction').model
        c = certified_c(auction.mechanism)
        self.assertTrue(check_greedy_smoothness(auction, c).passed)
        self.assertTrue(check_greedy_smoothness(auction, c, randomized=True).passed)

    def test_random_instances_are_smooth(self):
        rng = self.rng(13)
        for _ in range(10):
            auction = random_single_minded_auction(rng, 2, 2)
            half = check_greedy_smoothness(auction)
            self.assertTrue(half.passed, half.witness)
            self.assertEqual([auction.seller], half.parameters['K'])
            self.assertEqual('certified', half.parameters['c_source'])
            self.assertEqual(certified_c(auction.mechanism), half.parameters['c'])
            randomized = check_greedy_smoothness(auction, randomized=True)
            self.assertTrue(randomized.passed, randomized.witness)

    def test_rejects_small_factor(self):
        auction = single_minded_auction([((0,), 1.0)], m=1)
        self.assertRaises(InvalidArgumentException, check_greedy_smoothness, auction, 0.5)


class ApproximationFactorSourceTest(LabTestCase):
    def test_sources(self):
        mech = GreedyMechanism(m=2, grid=[0.0, 0.5, 1.0, 1.5, 2.0])
        self.assertEqual((2.0, 'certified'), resolve_c(mech, 'certified'))
        self.assertEqual((1.5, 'measured'), resolve_c(mech, 'measured', [BLOCKING]))
        self.assertEqual((3.0, 'supplied'), resolve_c(mech, 3))
        self.assertRaises(InvalidArgumentException, resolve_c, mech, 'guessed')

    def test_contested_bundle_is_outside_the_fact_at_measured_c(self):
        auction = single_minded_auction([((0, 1), 2.0), ((0, 1), 2.0)], m=2)
        mech = auction.mechanism
        c, source = resolve_c(mech, 'measured', auction.bid_profiles())
        self.assertEqual((1.0, 'measured'), (c, source))
        verdict = check_payment_fact(mech, (((0, 1), 2.0), ((0, 1), 2.0)), ((0,), (1,)), c, c_source=source)
        self.assertFalse(verdict.passed)
        self.assertEqual([2.0, 2.5], verdict.witness['critical_values'])
        self.assertEqual(-2.5, verdict.worst_margin)
        self.assertEqual('measured', verdict.parameters['c_source'])
        self.assertIn(OUTSIDE_SCOPE, verdict.flags)
        whole = check_payment_fact_all(mech, auction.bid_profiles(), 'measured')
        self.assertFalse(whole.passed)
        self.assertIn(OUTSIDE_SCOPE, whole.flags)
        self.assertEqual({'c': 1.0, 'c_source': 'measured'}, dict(whole.parameters))

    @parameterized.expand([
        ("value", 'value'),
        ("value per item", 'value-per-item'),
    ])
    def test_measured_factor_on_random_instances(self, _, priority):
        rng = self.rng(21)
        outside = 0
        for _ in range(10):
            auction = random_single_minded_auction(rng, 2, 2, priority=priority)
            c, _source = resolve_c(auction.mechanism, 'measured', auction.bid_profiles())
            self.assertGreaterEqual(c, 1.0)
            self.assertLessEqual(c, certified_c(auction.mechanism))
            fact = check_payment_fact_all(auction.mechanism, auction.bid_profiles(), 'measured')
            self.assertEqual({'c': c, 'c_source': 'measured'}, dict(fact.parameters))
            if not fact.passed:
                self.assertIn(OUTSIDE_SCOPE, fact.flags)
                outside += 1
            smooth = check_greedy_smoothness(auction, 'measured')
            self.assertEqual('measured', smooth.parameters['c_source'])
            self.assertEqual(c - 1.0, smooth.parameters['mu'])
        if priority == 'value':
            # two bidders contesting overlapping sets leave the value greedy with c = 1
            self.assertGreater(outside, 0)


class GreedyEquilibriumTest(LabTestCase):
    @parameterized.expand([
        ("value", 'value'),
        ("value per item", 'value-per-item'),
    ])
    def test_equilibria_respect_the_certificate(self, _, priority):
        rng = self.rng(31)
        for _ in range(10):
            auction = random_single_minded_auction(rng, 2, 2, priority=priority)
            game = auction.to_game()
            epsilon = game.default_epsilon
            verdict = check_greedy_smoothness(auction)
            if priority == 'value':
                self.assertTrue(verdict.passed, verdict.witness)
            if not verdict.passed:
                continue
            cert = SmoothnessCertificate(variant=Variant.RELAXED, lam=0.5, mu=verdict.parameters['c'] - 1.0,
                                         objective=game.objective, verdict=verdict,
                                         deviation=SingleMindedHalfDeviation(auction), K=[auction.seller])
            self.assertEqual(2.0 * certified_c(auction.mechanism), cert.bound)
            domination = check_domination(game, cert, enumerate_pure_bne(game, epsilon), epsilon)
            self.assertTrue(domination.passed, domination.witness)


if __name__ == '__main__':
    import unittest
    unittest.main()
