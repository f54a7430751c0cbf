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
import warnings

from parameterized import parameterized

from bayeslab import normal_form
from bayeslab.equilibrium import enumerate_pure_bne
from bayeslab.exceptions import InvalidArgumentException, WrongVariantException, CertificateFailedException
from bayeslab.smoothness import Variant, OptimalDeviation, ProfileDeviation, check, check_plain, check_semi, \
    check_relaxed, check_universal, certify, poa_bound, best_parameters, check_domination
from bayeslab_core import Marker, Objective, INFINITY
from bayeslab_tests.base import LabTestCase


class PoaBoundTest(LabTestCase):
    @parameterized.expand([
        ("utility", 0.5, 1.0, Objective.UTILITY, 4.0),
        ("cost", 2.0, 0.5, Objective.COST, 4.0),
        ("unbounded cost", 1.0, 1.0, Objective.COST, INFINITY),
    ])
    def test_bound(self, _, lam, mu, objective, expected):
        self.assertEqual(expected, poa_bound(lam, mu, objective))

    def test_rejects_nonpositive_lambda(self):
        self.assertRaises(InvalidArgumentException, poa_bound, 0.0, 1.0)


class CheckTest(LabTestCase):
    def setUp(self):
        super(CheckTest, self).setUp()
        self.game = self.coordination()

    def test_plain_passes(self):
        verdict = check_plain(self.game, 0.5, 1.0)
        self.assertTrue(verdict.passed)
        self.assertEqual(16, verdict.checked)
        self.assertAlmostEqual(0.0, verdict.worst_margin)

    def test_plain_fails_with_witness(self):
        verdict = check_plain(self.game, 1.0, 1.0)
        self.assertFalse(verdict.passed)
        self.assertEqual({'t', 'a', 'a_dev', 'deviation_side', 'benchmark', 'charged', 'margin'},
                         set(verdict.witness))
        self.assertEqual(verdict.worst_margin, verdict.witness['margin'])

    def test_failure_raises_on_request(self):
        passing = check_plain(self.game, 0.5, 1.0)
        self.assertIs(passing, passing.raise_for_failure())
        with self.assertRaises(CertificateFailedException) as cm:
            check_plain(self.game, 1.0, 1.0).raise_for_failure()
        self.assertEqual(1, cm.exception.EXIT_CODE)
        self.assertIn('margin', cm.exception.witness)

    def test_universal_matches_plain_on_complete_information(self):
        self.assertTrue(check_universal(self.game, 0.5, 1.0).passed)
        self.assertFalse(check_universal(self.game, 1.0, 1.0).passed)

    def test_semi_with_optimal_deviation(self):
        verdict = check_semi(self.game, 0.5, 1.0, OptimalDeviation())
        self.assertTrue(verdict.passed)
        self.assertEqual('optimal', verdict.parameters['deviation'])

    def test_semi_with_profile_deviation(self):
        deviation = ProfileDeviation({('t', 't'): ('B', 'B')})
        self.assertTrue(check_semi(self.game, 0.25, 1.0, deviation).passed)

    def test_relaxed_records_K(self):
        verdict = check_relaxed(self.game, 0.5, 1.0, OptimalDeviation(), [0, 1])
        self.assertTrue(verdict.passed)
        self.assertEqual([0, 1], verdict.parameters['K'])

    def test_dispatch(self):
        self.assertTrue(check(self.game, Variant.PLAIN, 0.5, 1.0).passed)
        self.assertTrue(check(self.game, 'semi', 0.5, 1.0, OptimalDeviation()).passed)

    def test_plain_needs_constant_strategy_space(self):
        game = normal_form.single_player({'a': {'x': 1.0}, 'b': {'y': 1.0}}).to_game()
        self.assertRaises(WrongVariantException, check_plain, game, 1.0, 0.0)
        self.assertTrue(check_universal(game, 1.0, 0.0).passed)

    def test_semi_needs_deviation(self):
        self.assertRaises(InvalidArgumentException, check, self.game, Variant.SEMI, 0.5, 1.0)

    def test_relaxed_rejects_unknown_players(self):
        self.assertRaises(InvalidArgumentException, check_relaxed, self.game, 0.5, 1.0, OptimalDeviation(), [5])

    @parameterized.expand([
        ("lambda", 0.0, 1.0),
        ("utility mu", 1.0, -1.0),
    ])
    def test_rejects_parameters(self, _, lam, mu):
        self.assertRaises(InvalidArgumentException, check_plain, self.game, lam, mu)

    def test_cost_mu_range(self):
        game = normal_form.complete_information([('x', 'y')], lambda i, a: 1.0, Objective.COST).to_game()
        self.assertRaises(InvalidArgumentException, check_plain, game, 1.0, 1.0)

    def test_collect_margins(self):
        verdict = check_plain(self.game, 0.5, 1.0, collect_margins=True)
        self.assertEqual(16, len(verdict.margins))
        self.assertEqual(verdict.worst_margin, min(m for _, m in verdict.margins))

    def test_thread_count_does_not_change_the_verdict(self):
        one = check_plain(self.game, 1.0, 1.0, threads=1)
        many = check_plain(self.game, 1.0, 1.0, threads=5)
        self.assertEqual(one.as_json(), many.as_json())

    def test_sampling_above_max_tuples(self):
        verdict = check_plain(self.game, 0.5, 1.0, max_tuples=4, samples=10, seed=3)
        self.assertTrue(verdict.sampled)
        self.assertEqual(('sampled',), verdict.flags)
        self.assertEqual(10, verdict.checked)
        again = check_plain(self.game, 0.5, 1.0, max_tuples=4, samples=10, seed=3, threads=3)
        self.assertEqual(verdict.as_json(), again.as_json())

    def test_certificate(self):
        cert = certify(self.game, Variant.PLAIN, 0.5, 1.0)
        self.assertTrue(cert.passed)
        self.assertEqual(4.0, cert.bound)
        document = cert.as_dict()
        self.assertEqual('plain', document['variant'])
        self.assertEqual(4.0, document['bound'])
        self.assertIsNone(document['deviation'])


class ParameterSearchTest(LabTestCase):
    def test_coordination(self):
        search = best_parameters(self.coordination(), Variant.PLAIN)
        self.assertIs(Marker.FINITE, search.marker)
        self.assertAlmostEqual(4.0, search.bound, places=6)
        self.assertAlmostEqual(0.5, search.lam, places=6)
        self.assertAlmostEqual(1.0, search.mu, places=6)
        self.assertTrue(search.verdict.passed)
        self.assertIn('margin', search.binding)

    def test_search_is_volatile(self):
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter('always')
            best_parameters(self.coordination(), Variant.PLAIN)
        self.assertTrue(any(issubclass(w.category, FutureWarning) for w in caught))

    def test_no_pair_found(self):
        game = normal_form.complete_information([('x', 'y')], lambda i, a: 0.0).to_game()
        search = best_parameters(game, Variant.PLAIN)
        self.assertIs(Marker.NONE_FOUND, search.marker)
        self.assertIsNone(search.lam)

    def test_as_dict(self):
        document = best_parameters(self.coordination(), Variant.PLAIN).as_dict()
        self.assertEqual('finite', document['marker'])
        self.assertTrue(document['verdict']['passed'])


class DominationTest(LabTestCase):
    def setUp(self):
        super(DominationTest, self).setUp()
        self.game = self.coordination()
        self.equilibria = enumerate_pure_bne(self.game, 0.0)

    def test_bound_dominates_equilibria(self):
        cert = certify(self.game, Variant.PLAIN, 0.5, 1.0)
        verdict = check_domination(self.game, cert, self.equilibria, 0.0)
        self.assertTrue(verdict.passed)
        self.assertEqual(2, verdict.checked)
        self.assertEqual(4.0, verdict.parameters['expected_optimum'])
        self.assertAlmostEqual(2.0, verdict.worst_margin)

    def test_failed_certificate_is_refused(self):
        cert = certify(self.game, Variant.PLAIN, 1.0, 1.0)
        self.assertFalse(cert.passed)
        self.assertRaises(InvalidArgumentException, check_domination, self.game, cert, self.equilibria, 0.0)

    def test_relaxed_audit_skips_negative_payoffs(self):
        game = normal_form.complete_information([('x',), ('x',)], lambda i, a: -1.0 if i == 1 else 3.0).to_game()
        cert = certify(game, Variant.RELAXED, 1.0, 0.0, OptimalDeviation(), [0])
        self.assertTrue(cert.passed)
        verdict = check_domination(game, cert, enumerate_pure_bne(game, 0.0), 0.0)
        self.assertEqual(1, verdict.parameters['skipped'])
        self.assertEqual(('ir-audit-skipped',), verdict.flags)
        self.assertTrue(math.isfinite(verdict.worst_margin))

    def test_relaxed_audit_covers_charged_players(self):
        game = normal_form.complete_information([('x',), ('x',)], lambda i, a: -1.0 if i == 0 else 3.0).to_game()
        cert = certify(game, Variant.RELAXED, 1.0, 0.0, OptimalDeviation(), [0])
        self.assertTrue(cert.passed)
        verdict = check_domination(game, cert, enumerate_pure_bne(game, 0.0), 0.0)
        self.assertEqual(1, verdict.parameters['skipped'])
        self.assertEqual(0, verdict.checked)
        self.assertEqual(('ir-audit-skipped',), verdict.flags)


if __name__ == '__main__':
    import unittest
    unittest.main()
