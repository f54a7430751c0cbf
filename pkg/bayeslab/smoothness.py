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
"""
Verifiers for the four (lambda, mu)-smoothness variants.

Every verifier walks a finite tuple space, computes for each tuple the
deviation side ``L``, the benchmark welfare ``B`` and the charged welfare
``C``, and reports the smallest margin

  utility games:  L - lambda B + mu C
  cost games:     lambda B + mu C - L

A margin below ``-(slack + tolerance)`` fails the check.
"""
import enum
import math
from abc import ABCMeta, abstractmethod

import attr
import numpy as np
from attr.validators import instance_of as io

from bayeslab.exceptions import InvalidArgumentException, InvalidActionException, WrongVariantException
from bayeslab.game import BayesianGame, StrategyProfile, optimal_profile, replace, \
    expected_welfare, expected_optimal_welfare, expected_payoffs
from bayeslab.result import Verdict, scan_margins
from bayeslab_core import Objective, Marker, INFINITY, JSON, to_jsonable
from bayeslab_core._logutil import get_logger
from bayeslab_core.options import forward_args
from bayeslab_core.supportability import volatile
from bayeslab_core.tuples import TupleSpace, partitioned

from typing import *

log = get_logger('smoothness')


class Variant(enum.Enum):
    PLAIN = 'plain'
    SEMI = 'semi'
    RELAXED = 'relaxed'
    UNIVERSAL = 'universal'


class Deviation(metaclass=ABCMeta):
    """
    A deviation map: for type profile ``t`` and current profile ``a``, the
    payoff player ``i`` gets by switching to its deviation action.

    Randomized deviations return the deviator's expected payoff directly.
    """
    name = 'deviation'

    @abstractmethod
    def deviator_utility(self,
                         game,  # type: BayesianGame
                         t,  # type: Tuple[Any, ...]
                         a,  # type: Tuple[Any, ...]
                         i  # type: int
                         ):
        # type: (...) -> float
        pass

    def equilibrium_slack(self, game):
        # type: (BayesianGame) -> float
        """
        Extra regret a grid equilibrium may have against this deviation
        when the deviation is not itself a grid action.
        """
        return 0.0


class ProfileDeviation(Deviation):
    """
    Deviation given by an explicit map from type profiles to action profiles.
    """
    name = 'profile'

    def __init__(self, mapping):
        # type: (Union[Callable[[Tuple[Any, ...]], Tuple[Any, ...]], Mapping[Tuple[Any, ...], Tuple[Any, ...]]]) -> None
        self._mapping = mapping
        self._resolved = {}

    def _target(self, game, t):
        if callable(self._mapping):
            return self._mapping(t)
        return self._mapping[t]

    def profile(self, game, t):
        # type: (BayesianGame, Tuple[Any, ...]) -> Tuple[Any, ...]
        if t not in self._resolved:
            target = tuple(self._target(game, t))
            if not game.contains(t, target):
                raise InvalidActionException.pyexc("deviation profile is outside A(t)", obj=(t, target))
            self._resolved[t] = target
        return self._resolved[t]

    def deviator_utility(self, game, t, a, i):
        return game.payoff(i, t[i], replace(a, i, self.profile(game, t)[i]))


class OptimalDeviation(ProfileDeviation):
    """
    Every player switches to its action in the optimal profile Opt(t).
    """
    name = 'optimal'

    def __init__(self):
        super(OptimalDeviation, self).__init__(None)

    def _target(self, game, t):
        return optimal_profile(game, t)[0]


def _check_parameters(lam, mu, objective):
    # type: (float, float, Objective) -> None
    if not lam > 0:
        raise InvalidArgumentException.pyexc("lambda must be positive", obj=lam)
    if objective is Objective.UTILITY and not mu > -1:
        raise InvalidArgumentException.pyexc("mu must exceed -1 for utility games", obj=mu)
    if objective is Objective.COST and not 0 <= mu < 1:
        raise InvalidArgumentException.pyexc("mu must lie in [0, 1) for cost games", obj=mu)


def margin_of(objective, lam, mu, lhs, benchmark, charged):
    # type: (Objective, float, float, float, float, float) -> float
    if objective is Objective.UTILITY:
        return lhs - lam * benchmark + mu * charged
    return lam * benchmark + mu * charged - lhs


class SmoothnessInequality(object):
    """
    The tuple space and the (L, B, C) terms of one smoothness variant on one
    game.
    """

    def __init__(self,
                 game,  # type: BayesianGame
                 variant,  # type: Variant
                 deviation=None,  # type: Optional[Deviation]
                 K=None  # type: Optional[Iterable[int]]
                 ):
        self.game = game
        self.variant = Variant(variant)
        self.deviation = deviation
        self.K = frozenset(K) if K is not None else frozenset(range(game.n))
        if self.variant is Variant.PLAIN and not game.constant_strategy_space:
            raise WrongVariantException("plain smoothness needs a constant strategy space; use universal")
        if self.variant in (Variant.SEMI, Variant.RELAXED) and deviation is None:
            raise InvalidArgumentException("semi and relaxed smoothness need a deviation map")
        if not all(0 <= i < game.n for i in self.K):
            raise InvalidArgumentException.pyexc("K names unknown players", obj=sorted(self.K))

        n = game.n
        self._actions = {}
        blocks = []
        profiles = [t for t, _ in game.type_profiles()]
        for t in profiles:
            self._actions[t] = [game.actions_of(i, t[i]) for i in range(n)]
        if self.variant is Variant.UNIVERSAL:
            for t in profiles:
                for w in profiles:
                    blocks.append(((t, w), [len(s) for s in self._actions[t] + self._actions[w]]))
        elif self.variant is Variant.PLAIN:
            for t in profiles:
                sizes = [len(s) for s in self._actions[t]]
                blocks.append(((t, t), sizes + sizes))
        else:
            for t in profiles:
                blocks.append(((t, None), [len(s) for s in self._actions[t]]))
        self.space = TupleSpace(blocks)

    def decode(self, index):
        # type: (int) -> Dict[str, Any]
        (t, w), digits = self.space.decode(index)
        n = self.game.n
        a = tuple(self._actions[t][i][digits[i]] for i in range(n))
        if w is None:
            return {'t': t, 'a': a}
        b = tuple(self._actions[w][i][digits[n + i]] for i in range(n))
        if self.variant is Variant.PLAIN:
            return {'t': t, 'a': a, 'a_dev': b}
        return {'t': t, 'w': w, 'a': a, 'b': b}

    def terms(self, index):
        # type: (int) -> Tuple[float, float, float]
        game = self.game
        tup = self.decode(index)
        t, a = tup['t'], tup['a']
        if self.variant is Variant.PLAIN:
            dev = tup['a_dev']
            lhs = math.fsum(game.payoff(i, t[i], replace(a, i, dev[i])) for i in range(game.n))
            return lhs, game.welfare(t, dev), game.welfare(t, a)
        if self.variant is Variant.UNIVERSAL:
            w, b = tup['w'], tup['b']
            lhs = math.fsum(game.payoff(i, w[i], replace(a, i, b[i])) for i in range(game.n))
            return lhs, game.welfare(w, b), game.welfare(t, a)
        lhs = math.fsum(self.deviation.deviator_utility(game, t, a, i) for i in range(game.n))
        benchmark = optimal_profile(game, t)[1]
        if self.variant is Variant.RELAXED:
            charged = math.fsum(game.payoff(i, t[i], a) for i in sorted(self.K))
        else:
            charged = game.welfare(t, a)
        return lhs, benchmark, charged

    def witness(self, index, lam, mu):
        # type: (int, float, float) -> Dict[str, Any]
        tup = self.decode(index)
        lhs, benchmark, charged = self.terms(index)
        tup.update({'deviation_side': lhs, 'benchmark': benchmark, 'charged': charged,
                    'margin': margin_of(self.game.objective, lam, mu, lhs, benchmark, charged)})
        return tup

    def collect(self, options):
        # type: (Mapping[str, Any]) -> Tuple[Sequence[int], np.ndarray, bool]
        """
        All (L, B, C) rows as an array, one row per visited index.
        """
        indices, sampled = self.space.indices(options['max_tuples'], options['samples'], options['seed'])

        def work(chunk):
            return [self.terms(index) for index in chunk]

        rows = []
        for part in partitioned(indices, work, options['threads']):
            rows.extend(part)
        return indices, np.array(rows, dtype=float).reshape(-1, 3), sampled


def _label(variant, lam, mu):
    return "{0}-smoothness(lambda={1!r}, mu={2!r})".format(Variant(variant).value, lam, mu)


def _verify(inequality, lam, mu, options):
    # type: (SmoothnessInequality, float, float, Mapping[str, Any]) -> Verdict
    game = inequality.game
    _check_parameters(lam, mu, game.objective)
    indices, sampled = inequality.space.indices(options['max_tuples'], options['samples'], options['seed'])
    parameters = {'variant': inequality.variant.value, 'lambda': lam, 'mu': mu,
                  'objective': game.objective.value}
    if inequality.deviation is not None:
        parameters['deviation'] = inequality.deviation.name
    if inequality.variant is Variant.RELAXED:
        parameters['K'] = sorted(inequality.K)
    verdict = scan_margins(_label(inequality.variant, lam, mu), indices,
                           lambda index: margin_of(game.objective, lam, mu, *inequality.terms(index)),
                           lambda index: inequality.witness(index, lam, mu),
                           options, sampled=sampled, parameters=parameters,
                           flags=('sampled',) if sampled else ())
    if verdict.passed:
        log.info("%s passed over %d tuples, worst margin %r", verdict.label, verdict.checked,
                 verdict.worst_margin)
    else:
        log.warning("%s FAILED, worst margin %r at %r", verdict.label, verdict.worst_margin,
                    to_jsonable(verdict.witness))
    return verdict


def check_plain(game, lam, mu, *options, **kwargs):
    # type: (BayesianGame, float, float, Any, Any) -> Verdict
    """
    For all t, a, a': sum_i u_i(a'_i, a_-i) >= lam SW(a') - mu SW(a)
    (reversed for costs).

    :raise: :exc:`~bayeslab.exceptions.WrongVariantException` when action
        sets depend on types
    """
    return _verify(SmoothnessInequality(game, Variant.PLAIN), lam, mu, forward_args(kwargs, *options))


def check_semi(game, lam, mu, deviation, *options, **kwargs):
    # type: (BayesianGame, float, float, Deviation, Any, Any) -> Verdict
    """
    For all t, a: sum_i u_i(a'_i(t), a_-i) >= lam SW(Opt(t)) - mu SW(a),
    with a'(t) given by ``deviation``.
    """
    return _verify(SmoothnessInequality(game, Variant.SEMI, deviation), lam, mu,
                   forward_args(kwargs, *options))


def check_relaxed(game, lam, mu, deviation, K, *options, **kwargs):
    # type: (BayesianGame, float, float, Deviation, Iterable[int], Any, Any) -> Verdict
    """
    As :func:`check_semi`, but the mu term only charges the payoffs of the
    fixed player subset ``K``.
    """
    return _verify(SmoothnessInequality(game, Variant.RELAXED, deviation, K), lam, mu,
                   forward_args(kwargs, *options))


def check_universal(game, lam, mu, *options, **kwargs):
    # type: (BayesianGame, float, float, Any, Any) -> Verdict
    """
    For all t, w, a in A(t), b in A(w):
    sum_i u_i^{w_i}(b_i, a_-i) >= lam sum_i u_i^{w_i}(b) - mu sum_i u_i^{t_i}(a),
    with ``<=`` and ``+ mu`` for cost games.
    """
    return _verify(SmoothnessInequality(game, Variant.UNIVERSAL), lam, mu, forward_args(kwargs, *options))


def check(game, variant, lam, mu, deviation=None, K=None, *options, **kwargs):
    # type: (BayesianGame, Variant, float, float, Optional[Deviation], Optional[Iterable[int]], Any, Any) -> Verdict
    return _verify(SmoothnessInequality(game, variant, deviation, K), lam, mu, forward_args(kwargs, *options))


def poa_bound(lam, mu, objective=Objective.UTILITY):
    # type: (float, float, Objective) -> float
    """
    (1 + mu) / lam for utility games, lam / (1 - mu) for cost games.
    Cost games with mu >= 1 are unbounded and yield infinity.
    """
    if not lam > 0:
        raise InvalidArgumentException.pyexc("lambda must be positive", obj=lam)
    if Objective(objective) is Objective.UTILITY:
        return (1.0 + mu) / lam
    if mu >= 1:
        return INFINITY
    return lam / (1.0 - mu)


@attr.s(frozen=True)
class SmoothnessCertificate(object):
    variant = attr.ib(converter=Variant)  # type: Variant
    lam = attr.ib(converter=float)  # type: float
    mu = attr.ib(converter=float)  # type: float
    objective = attr.ib(validator=io(Objective))  # type: Objective
    verdict = attr.ib(validator=io(Verdict))  # type: Verdict
    deviation = attr.ib(default=None, eq=False, repr=False)  # type: Optional[Deviation]
    K = attr.ib(default=None, converter=attr.converters.optional(frozenset))  # type: Optional[FrozenSet[int]]
    equilibrium_slack = attr.ib(default=0.0, converter=float)  # type: float

    @property
    def passed(self):
        # type: (...) -> bool
        return self.verdict.passed

    @property
    def bound(self):
        # type: (...) -> float
        return poa_bound(self.lam, self.mu, self.objective)

    @property
    def slack(self):
        # type: (...) -> float
        return self.verdict.slack

    def as_dict(self):
        # type: (...) -> Dict[str, JSON]
        return {'variant': self.variant.value,
                'lambda': self.lam,
                'mu': self.mu,
                'objective': self.objective.value,
                'deviation': None if self.deviation is None else self.deviation.name,
                'K': None if self.K is None else sorted(self.K),
                'bound': to_jsonable(self.bound),
                'equilibrium_slack': self.equilibrium_slack,
                'verdict': self.verdict.as_dict()}


def certify(game, variant, lam, mu, deviation=None, K=None, *options, **kwargs):
    # type: (BayesianGame, Variant, float, float, Optional[Deviation], Optional[Iterable[int]], Any, Any) -> SmoothnessCertificate
    verdict = check(game, variant, lam, mu, deviation, K, *options, **kwargs)
    return SmoothnessCertificate(variant=variant, lam=lam, mu=mu, objective=game.objective, verdict=verdict,
                                 deviation=deviation, K=K,
                                 equilibrium_slack=deviation.equilibrium_slack(game) if deviation else 0.0)


@attr.s(frozen=True)
class ParameterSearch(object):
    lam = attr.ib()  # type: Optional[float]
    mu = attr.ib()  # type: Optional[float]
    bound = attr.ib()  # type: Optional[float]
    marker = attr.ib(validator=io(Marker))  # type: Marker
    verdict = attr.ib(default=None)  # type: Optional[Verdict]
    binding = attr.ib(default=None)  # type: Any

    def as_dict(self):
        # type: (...) -> Dict[str, JSON]
        return {'lambda': self.lam, 'mu': self.mu, 'bound': to_jsonable(self.bound),
                'marker': self.marker.value,
                'verdict': None if self.verdict is None else self.verdict.as_dict(),
                'binding': to_jsonable(self.binding)}


def _best_lambda(objective, rows, mu, slack):
    # type: (Objective, np.ndarray, float, float) -> Tuple[Optional[float], Optional[int]]
    """
    The extreme admissible lambda for a fixed mu, and the binding row.
    """
    lhs, benchmark, charged = rows[:, 0], rows[:, 1], rows[:, 2]
    pos, neg, zero = benchmark > 0, benchmark < 0, benchmark == 0
    if objective is Objective.UTILITY:
        rhs = lhs + mu * charged + slack
        if np.any(rhs[zero] < 0) or not np.any(pos):
            return None, None
        ratios = np.where(pos, rhs / np.where(pos, benchmark, 1.0), INFINITY)
        binding = int(np.argmin(ratios))
        upper = float(ratios[binding])
        lower = float(np.max(rhs[neg] / benchmark[neg])) if np.any(neg) else 0.0
        if upper <= 0 or upper < lower:
            return None, None
        return upper, binding
    need = lhs - mu * charged - slack
    if np.any(need[zero] > 0) or not np.any(pos):
        return None, None
    ratios = np.where(pos, need / np.where(pos, benchmark, 1.0), -INFINITY)
    binding = int(np.argmax(ratios))
    lower = max(float(ratios[binding]), 1e-12)
    upper = float(np.min(need[neg] / benchmark[neg])) if np.any(neg) else INFINITY
    if lower > upper:
        return None, None
    return lower, binding


@volatile
def best_parameters(game, variant, deviation=None, K=None, *options, **kwargs):
    # type: (BayesianGame, Variant, Optional[Deviation], Optional[Iterable[int]], Any, Any) -> ParameterSearch
    """
    Minimize the PoA bound over (lambda, mu).

    For each mu on a grid the best lambda follows exactly from the collected
    tuples; the grid is refined around the best mu until the bound moves by
    less than ``bound_tolerance``. The winning pair is re-validated by the
    corresponding check. ``mu`` ranges over [0, mu_max] for utility games
    and [0, 0.99] for cost games.
    """
    final = forward_args(kwargs, *options)
    inequality = SmoothnessInequality(game, variant, deviation, K)
    indices, rows, sampled = inequality.collect(final)
    objective = game.objective
    slack = float(final['slack'])
    mu_high = float(final['mu_max']) if objective is Objective.UTILITY else 0.99

    def evaluate(mu):
        lam, binding = _best_lambda(objective, rows, mu, slack)
        if lam is None:
            return INFINITY, None, None
        return poa_bound(lam, mu, objective), lam, binding

    grid = np.linspace(0.0, mu_high, int(final['mu_points']))
    results = [(evaluate(float(mu)), float(mu)) for mu in grid]
    best_k = min(range(len(results)), key=lambda k: (results[k][0][0], k))
    (bound, lam, binding), mu = results[best_k]
    spacing = grid[1] - grid[0] if len(grid) > 1 else 0.0
    for _ in range(int(final['refinements'])):
        if not math.isfinite(bound) or spacing <= 0:
            break
        lo, hi = max(0.0, mu - spacing), min(mu_high, mu + spacing)
        finer = np.linspace(lo, hi, 21)
        spacing = finer[1] - finer[0]
        candidates = [(evaluate(float(x)), float(x)) for x in finer]
        k = min(range(len(candidates)), key=lambda k: (candidates[k][0][0], k))
        improvement = bound - candidates[k][0][0]
        if improvement > 0:
            (bound, lam, binding), mu = candidates[k]
        if improvement < final['bound_tolerance']:
            break

    if lam is None:
        log.warning("no (lambda, mu) pair passes on the searched domain")
        return ParameterSearch(lam=None, mu=None, bound=None, marker=Marker.NONE_FOUND)
    verdict = _verify(inequality, lam, mu, final)
    if not verdict.passed:
        return ParameterSearch(lam=None, mu=None, bound=None, marker=Marker.NONE_FOUND, verdict=verdict)
    return ParameterSearch(lam=lam, mu=mu, bound=bound,
                           marker=Marker.FINITE if math.isfinite(bound) else Marker.UNBOUNDED,
                           verdict=verdict, binding=inequality.witness(indices[binding], lam, mu))


def check_domination(game,  # type: BayesianGame
                     certificate,  # type: SmoothnessCertificate
                     equilibria,  # type: Sequence[StrategyProfile]
                     epsilon,  # type: float
                     *options,  # type: Any
                     **kwargs  # type: Any
                     ):
    # type: (...) -> Verdict
    """
    Check that each equilibrium's measured welfare respects the
    certificate's PoA bound:

      utility:  (1 + mu) E[SW(s)] + n eps + slack >= lam E[OPT]
      cost:     lam E[OPT] + mu E[C(s)] + n eps + slack >= E[C(s)]

    where slack is the certificate's per-type-profile slack plus its
    equilibrium slack. Relaxed certificates need every player's expected
    payoff nonnegative, those in K included; equilibria failing that audit
    are skipped with a warning.
    """
    final = forward_args(kwargs, *options)
    if not certificate.passed:
        raise InvalidArgumentException("domination needs a passing certificate")
    tolerance = final['tolerance']
    optimum = expected_optimal_welfare(game)
    slack = certificate.slack + certificate.equilibrium_slack
    lam, mu = certificate.lam, certificate.mu
    worst, witness, checked, skipped = INFINITY, None, 0, 0
    for k, s in enumerate(equilibria):
        if certificate.variant is Variant.RELAXED:
            payoffs = expected_payoffs(game, s)
            if any(p < -tolerance for p in payoffs):
                log.warning("equilibrium %d fails the individual rationality audit; domination skipped", k)
                skipped += 1
                continue
        welfare = expected_welfare(game, s)
        if game.objective is Objective.UTILITY:
            margin = (1.0 + mu) * welfare + game.n * epsilon + slack - lam * optimum
        else:
            margin = lam * optimum + mu * welfare + game.n * epsilon + slack - welfare
        checked += 1
        if margin < worst:
            worst, witness = margin, {'equilibrium': k, 'expected_welfare': welfare}
    passed = worst >= -tolerance
    flags = ('ir-audit-skipped',) if skipped else ()
    verdict = Verdict(label='domination', passed=bool(passed),
                      worst_margin=worst if checked else 0.0, witness=witness,
                      checked=checked, slack=slack,
                      parameters={'bound': certificate.bound, 'expected_optimum': optimum,
                                  'epsilon': epsilon, 'variant': certificate.variant.value,
                                  'lambda': lam, 'mu': mu, 'skipped': skipped},
                      flags=flags)
    if not passed:
        log.warning("domination FAILED with margin %r at %r", worst, witness)
    return verdict
