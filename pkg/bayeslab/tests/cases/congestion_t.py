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

from bayeslab.congestion import Polynomial, CongestionInstance, DelayClass, player_cost, social_cost, \
    simple_paths, check_pointwise_condition, best_delay_parameters, delay_class_of, \
    check_universal_smoothness_congestion, parallel_links, random_instance
from bayeslab.exceptions import InvalidArgumentException, InvalidActionException
from bayeslab.equilibrium import enumerate_pure_bne
from bayeslab.game import TypeDistribution
from bayeslab.smoothness import SmoothnessCertificate, Variant, check_domination
from bayeslab_core import Marker, Objective
from bayeslab_tests.base import LabTestCase

LINEAR = Polynomial.monomial(1)


class PolynomialTest(LabTestCase):
    def test_trailing_zeros_are_dropped(self):
        delay = Polynomial([1.0, 2.0, 0.0])
        self.assertEqual((1.0, 2.0), delay.coefficients)
        self.assertEqual(1, delay.degree)
        self.assertEqual(7.0, delay(3.0))
        self.assertFalse(delay.homogeneous)
        self.assertTrue(LINEAR.homogeneous)

    def test_rejects_negative_coefficients(self):
        self.assertRaises(InvalidArgumentException, Polynomial, [1.0, -1.0])


class CongestionInstanceTest(LabTestCase):
    def setUp(self):
        super(CongestionInstanceTest, self).setUp()
        self.inst = parallel_links([LINEAR, LINEAR],
                                   [TypeDistribution.singleton(1.0), TypeDistribution.singleton(2.0)])

    def test_costs(self):
        a = ((1.0, (0,)), (2.0, (0,)))
        self.assertEqual(3.0, player_cost(self.inst, 0, 1.0, a))
        self.assertEqual(6.0, player_cost(self.inst, 1, 2.0, a))
        self.assertEqual(9.0, social_cost(self.inst, a))
        game = self.inst.to_game()
        self.assertIs(Objective.COST, game.objective)
        self.assertEqual(9.0, game.welfare((1.0, 2.0), a))

    def test_rate_must_be_the_weight(self):
        a = ((1.0, (0,)), (2.0, (1,)))
        self.assertRaises(InvalidActionException, player_cost, self.inst, 0, 2.0, a)

    def test_path_must_be_allowed(self):
        a = ((1.0, (0, 1)), (2.0, (1,)))
        self.assertRaises(InvalidActionException, player_cost, self.inst, 0, 1.0, a)

    def test_rejects_nonpositive_weights(self):
        self.assertRaises(InvalidArgumentException, parallel_links, [LINEAR], [TypeDistribution.singleton(0.0)])

    def test_rejects_unknown_edge(self):
        self.assertRaises(InvalidArgumentException, CongestionInstance, [LINEAR], [[(1,)]],
                          [TypeDistribution.singleton(1.0)])


class SimplePathsTest(LabTestCase):
    def test_paths(self):
        edges = [('s', 'a'), ('a', 't'), ('s', 't')]
        self.assertEqual(((0, 1), (2,)), simple_paths(edges, 's', 't'))
        self.assertEqual((), simple_paths(edges, 't', 's'))
        self.assertEqual(((0, 1), (2,)), simple_paths(edges, 't', 's', directed=False))

    def test_unknown_node(self):
        self.assertEqual((), simple_paths([('s', 't')], 's', 'x'))

    def test_edge_limit(self):
        edges = [(k, k + 1) for k in range(9)]
        self.assertRaises(InvalidArgumentException, simple_paths, edges, 0, 9)


class DelayClassTest(LabTestCase):
    def test_affine_bound(self):
        cert = best_delay_parameters(DelayClass(1))
        self.assertIs(Marker.FINITE, cert.marker)
        self.assertAlmostEqual((3.0 + math.sqrt(5.0)) / 2.0, cert.bound, places=4)
        self.assertTrue(all(v.passed for v in cert.verify()))

    def test_constant_delays(self):
        cert = best_delay_parameters(DelayClass(0))
        self.assertEqual((1.0, 0.0, 1.0), (cert.lam, cert.mu, cert.bound))

    def test_quadratic_bound_exceeds_affine(self):
        self.assertGreater(best_delay_parameters(DelayClass(2)).bound, best_delay_parameters(DelayClass(1)).bound)

    def test_pointwise_failure(self):
        verdict = check_pointwise_condition(LINEAR, 1.0, 0.0)
        self.assertFalse(verdict.passed)
        self.assertLess(verdict.worst_margin, 0.0)

    def test_degree_limit(self):
        self.assertRaises(InvalidArgumentException, DelayClass, 5)

    def test_as_dict(self):
        self.deepDiffComparator({'degree': 0, 'monomials_only': False, 'lambda': 1.0, 'mu': 0.0, 'bound': 1.0,
                                 'marker': 'finite'},
                                best_delay_parameters(DelayClass(0)).as_dict())


class UniversalSmoothnessTest(LabTestCase):
    def test_bundled_instance(self):
        inst = self.bundled('congestion').model
        cert = best_delay_parameters(delay_class_of(inst))
        self.assertTrue(check_universal_smoothness_congestion(inst, cert.lam, cert.mu).passed)

    def test_random_instances_dominate_their_equilibria(self):
        rng = self.rng(17)
        for _ in range(10):
            inst = random_instance(rng, 2, 2)
            cert = best_delay_parameters(delay_class_of(inst))
            verdict = check_universal_smoothness_congestion(inst, cert.lam, cert.mu)
            self.assertTrue(verdict.passed, verdict.witness)
            game = inst.to_game()
            certificate = SmoothnessCertificate(variant=Variant.UNIVERSAL, lam=cert.lam, mu=cert.mu,
                                                objective=game.objective, verdict=verdict)
            domination = check_domination(game, certificate, enumerate_pure_bne(game, 0.0), 0.0)
            self.assertTrue(domination.passed, domination.witness)

    def test_social_cost_is_the_sum_of_player_costs(self):
        rng = self.rng(29)
        for _ in range(10):
            inst = random_instance(rng, 3, 3, degree=2)
            game = inst.to_game()
            for t, _p in game.type_profiles():
                for a in game.action_profiles(t):
                    total = math.fsum(player_cost(inst, i, t[i], a) for i in range(inst.n))
                    self.assertAlmostEqual(social_cost(inst, a), total, places=9)

    def test_without_mu_fails(self):
        inst = parallel_links([LINEAR, LINEAR], [TypeDistribution.singleton(1.0)] * 2)
        verdict = check_universal_smoothness_congestion(inst, 1.0, 0.0)
        self.assertFalse(verdict.passed)
        self.assertAlmostEqual(-2.0, verdict.worst_margin)


if __name__ == '__main__':
    import unittest
    unittest.main()
