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
Pure Bayes-Nash equilibria: verification, enumeration, best-response
dynamics and the measured price of anarchy.
"""
import itertools
import math
from concurrent.futures import ThreadPoolExecutor

import attr
import numpy as np
from attr.validators import instance_of as io

from bayeslab.exceptions import InvalidArgumentException, WrongVariantException, GuardExceededException
from bayeslab.game import BayesianGame, StrategyProfile, replace, expected_welfare, \
    expected_optimal_welfare, optimal_profile
from bayeslab.result import Verdict
from bayeslab_core import Objective, Marker, INFINITY, JSON, to_jsonable
from bayeslab_core._logutil import get_logger
from bayeslab_core.options import forward_args
from bayeslab_core.tuples import TupleSpace, partitioned

from typing import *

log = get_logger('equilibrium')


def interim_utility(game, s, i, t_i, action=None):
    # type: (BayesianGame, StrategyProfile, int, Any, Any) -> float
    """
    E over t_-i of u_i^{t_i}(action, s_-i(t_-i)); ``action`` defaults to
    s_i(t_i). Types are independent, so conditioning on t_i leaves the
    opponents' distribution unchanged.
    """
    own = s.action(i, t_i) if action is None else action
    return math.fsum(p * game.payoff(i, t_i, replace(s.play(replace(t, i, t_i)), i, own))
                     for t, p in game.opponent_profiles(i))


@attr.s(frozen=True)
class RegretReport(object):
    passed = attr.ib(validator=io(bool))  # type: bool
    regret = attr.ib(converter=float)  # type: float
    epsilon = attr.ib(converter=float)  # type: float
    witness = attr.ib(default=None)  # type: Any

    def __bool__(self):
        return self.passed

    def as_dict(self):
        # type: (...) -> Dict[str, JSON]
        return {'passed': self.passed, 'regret': self.regret, 'epsilon': self.epsilon,
                'witness': to_jsonable(self.witness)}


def _regret(game, s, i, t_i):
    # type: (BayesianGame, StrategyProfile, int, Any) -> Tuple[float, Any]
    current = interim_utility(game, s, i, t_i)
    best, best_action = current, None
    for action in game.actions_of(i, t_i):
        value = interim_utility(game, s, i, t_i, action)
        if game.objective.better(value, best):
            best, best_action = value, action
    gap = best - current if game.objective is Objective.UTILITY else current - best
    return gap, best_action


def is_pure_bne(game, s, epsilon=0.0, *options, **kwargs):
    # type: (BayesianGame, StrategyProfile, float, Any, Any) -> RegretReport
    """
    No type of any player gains more than ``epsilon`` in interim payoff by
    switching actions.
    """
    final = forward_args(kwargs, *options)
    if epsilon < 0:
        raise InvalidArgumentException.pyexc("epsilon must be nonnegative", obj=epsilon)
    s.validate(game)
    worst, witness = 0.0, None
    for i, dist in enumerate(game.type_dists):
        for t_i in dist.support:
            gap, action = _regret(game, s, i, t_i)
            if gap > worst:
                worst, witness = gap, {'player': i, 'type': t_i, 'action': s.action(i, t_i), 'better': action}
    return RegretReport(passed=bool(worst <= epsilon + final['tolerance']), regret=worst, epsilon=epsilon,
                        witness=witness)


def _variables(game):
    # type: (BayesianGame) -> List[Tuple[int, Any]]
    return [(i, t_i) for i, dist in enumerate(game.type_dists) for t_i in dist.support]


def strategy_space_size(game):
    # type: (BayesianGame) -> int
    size = 1
    for i, t_i in _variables(game):
        size *= len(game.actions_of(i, t_i))
    return size


_CACHE_LIMIT = 1 << 16


def enumerate_pure_bne(game, epsilon=0.0, *options, **kwargs):
    # type: (BayesianGame, float, Any, Any) -> List[StrategyProfile]
    """
    Every pure strategy profile that is an ``epsilon``-BNE, in
    lexicographic order over (player, type, action).

    The player with the most strategies is left free. For each strategy
    profile of the others, the free player's interim ``epsilon``-best
    responses are computed once per type, and only their products are
    checked against the remaining players. Interim payoffs of a type are
    cached against the opponents' strategies.

    :raise: :exc:`~bayeslab.exceptions.GuardExceededException` when the
        number of strategy profiles of the players other than the free one
        exceeds ``max_profiles``
    """
    final = forward_args(kwargs, *options)
    if epsilon < 0:
        raise InvalidArgumentException.pyexc("epsilon must be nonnegative", obj=epsilon)
    n = game.n
    supports = [d.support for d in game.type_dists]
    menus = [[game.actions_of(i, t_i) for t_i in supports[i]] for i in range(n)]
    position = [{t_i: k for k, t_i in enumerate(supports[i])} for i in range(n)]
    own_spaces = [TupleSpace([(i, [len(m) for m in menus[i]])]) for i in range(n)]
    free = max(range(n), key=lambda i: (own_spaces[i].size, i))
    others = [i for i in range(n) if i != free]
    # players without a choice anywhere cannot deviate
    checked = [i for i in others if any(len(m) > 1 for m in menus[i])]
    outer = TupleSpace([(None, [own_spaces[i].size for i in others])])
    if outer.size > final['max_profiles']:
        raise GuardExceededException.pyexc("too many strategy profiles to enumerate", size=outer.size,
                                           limit=final['max_profiles'])
    log.debug("enumerating %d strategy profiles with player %d left free", outer.size, free)
    rows = [[(tuple(None if j == i else position[j][t[j]] for j in range(n)), p)
             for t, p in game.opponent_profiles(i)] for i in range(n)]
    bound = epsilon + final['tolerance']
    utility = game.objective is Objective.UTILITY

    def payoffs(i, k, strategies):
        # one interim payoff per action of i's k-th type; strategies[i] is ignored
        plays = [(tuple(None if j == i else menus[j][pos[j]][strategies[j][pos[j]]] for j in range(n)), p)
                 for pos, p in rows[i]]
        t_i = supports[i][k]
        return [math.fsum(p * game.payoff(i, t_i, replace(play, i, a)) for play, p in plays)
                for a in menus[i][k]]

    def best_of(values):
        return max(values) if utility else min(values)

    def regret(best, value):
        return best - value if utility else value - best

    def index_of(strategies):
        index = 0
        for i in range(n):
            for k, d in enumerate(strategies[i]):
                index = index * len(menus[i][k]) + d
        return index

    def profile_of(strategies):
        return StrategyProfile([{supports[i][k]: menus[i][k][d] for k, d in enumerate(strategies[i])}
                                for i in range(n)])

    def work(chunk):
        cache = {}
        found = []
        for index in chunk:
            _, digits = outer.decode(index)
            strategies = [None] * n  # type: List[Any]
            for i, d in zip(others, digits):
                strategies[i] = own_spaces[i].decode(d)[1]
            responses = []
            for k in range(len(supports[free])):
                values = payoffs(free, k, strategies)
                best = best_of(values)
                responses.append([a for a, v in enumerate(values) if regret(best, v) <= bound])
            for choice in itertools.product(*responses):
                strategies[free] = choice
                stable = True
                for i in checked:
                    rest = tuple(strategies[j] for j in range(n) if j != i)
                    for k in range(len(supports[i])):
                        key = (i, k, rest)
                        if key not in cache:
                            if len(cache) >= _CACHE_LIMIT:
                                cache.clear()
                            values = payoffs(i, k, strategies)
                            cache[key] = (best_of(values), values)
                        best, values = cache[key]
                        if regret(best, values[strategies[i][k]]) > bound:
                            stable = False
                            break
                    if not stable:
                        break
                if stable:
                    found.append((index_of(strategies), profile_of(strategies)))
        return found

    merged = []
    for part in partitioned(range(outer.size), work, final['threads']):
        merged.extend(part)
    merged.sort(key=lambda entry: entry[0])
    result = [s for _, s in merged]
    log.info("found %d pure %r-BNE among %d profiles", len(result), epsilon, strategy_space_size(game))
    return result


def pure_nash_equilibria(game, epsilon=0.0, *options, **kwargs):
    # type: (BayesianGame, float, Any, Any) -> List[Tuple[Any, ...]]
    """
    Action profiles of the pure equilibria of a complete-information game.
    """
    _require_singletons(game)
    t = tuple(d.support[0] for d in game.type_dists)
    return [s.play(t) for s in enumerate_pure_bne(game, epsilon, *options, **kwargs)]


def _require_singletons(game):
    if any(len(d) != 1 for d in game.type_dists):
        raise WrongVariantException("complete information needs singleton type spaces")


@attr.s(frozen=True)
class DynamicsResult(object):
    profile = attr.ib(validator=io(StrategyProfile))  # type: StrategyProfile
    converged = attr.ib(validator=io(bool))  # type: bool
    rounds = attr.ib(validator=io(int))  # type: int

    def as_dict(self):
        # type: (...) -> Dict[str, JSON]
        return {'profile': self.profile.as_dict(), 'converged': self.converged, 'rounds': self.rounds}


def best_response_dynamics(game, start=None, max_rounds=100, *options, **kwargs):
    # type: (BayesianGame, Optional[StrategyProfile], int, Any, Any) -> DynamicsResult
    """
    Round-robin over (player, type): switch to the first interim best
    response whenever it strictly improves on the current action. Stops
    after a round without switches or after ``max_rounds`` rounds.
    """
    final = forward_args(kwargs, *options)
    s = (start or StrategyProfile.first_actions(game)).validate(game)
    for rounds in range(1, max_rounds + 1):
        changed = False
        for i, t_i in _variables(game):
            current = interim_utility(game, s, i, t_i)
            best, best_action = current, None
            for action in game.actions_of(i, t_i):
                value = interim_utility(game, s, i, t_i, action)
                if game.objective.better(value, best):
                    best, best_action = value, action
            if best_action is not None and abs(best - current) > final['tolerance']:
                s = s.with_choice(i, t_i, best_action)
                changed = True
        if not changed:
            return DynamicsResult(s, True, rounds)
    log.info("best-response dynamics did not converge in %d rounds", max_rounds)
    return DynamicsResult(s, False, max_rounds)


def random_profile(game, rng):
    # type: (BayesianGame, np.random.Generator) -> StrategyProfile
    choices = []
    for i, dist in enumerate(game.type_dists):
        row = {}
        for t_i in dist.support:
            actions = game.actions_of(i, t_i)
            row[t_i] = actions[int(rng.integers(len(actions)))]
        choices.append(row)
    return StrategyProfile(choices)


def multi_start_dynamics(game, starts=4, max_rounds=100, *options, **kwargs):
    # type: (BayesianGame, Union[int, Sequence[StrategyProfile]], int, Any, Any) -> List[DynamicsResult]
    """
    Independent dynamics runs, concurrently over ``threads`` workers.
    An integer ``starts`` draws that many random starting profiles, the
    k-th from the generator seeded with (seed, k).
    """
    final = forward_args(kwargs, *options)
    if isinstance(starts, int):
        starts = [random_profile(game, np.random.default_rng([final['seed'], k])) for k in range(starts)]
    with ThreadPoolExecutor(max_workers=max(1, final['threads'])) as pool:
        return list(pool.map(lambda s: best_response_dynamics(game, s, max_rounds, final), starts))


@attr.s(frozen=True)
class PoaResult(object):
    poa = attr.ib()  # type: Optional[float]
    marker = attr.ib(validator=io(Marker))  # type: Marker
    epsilon = attr.ib(converter=float)  # type: float
    expected_optimum = attr.ib(converter=float)  # type: float
    worst = attr.ib(default=None)  # type: Optional[StrategyProfile]
    worst_welfare = attr.ib(default=None)  # type: Optional[float]
    equilibria = attr.ib(default=(), converter=tuple, repr=False)  # type: Tuple[StrategyProfile, ...]
    rows = attr.ib(default=(), converter=tuple, repr=False)  # type: Tuple[Dict[str, Any], ...]

    def as_dict(self):
        # type: (...) -> Dict[str, JSON]
        return {'poa': to_jsonable(self.poa), 'marker': self.marker.value, 'epsilon': self.epsilon,
                'expected_optimum': self.expected_optimum, 'worst_welfare': to_jsonable(self.worst_welfare),
                'worst': None if self.worst is None else self.worst.as_dict(),
                'equilibria': len(self.equilibria)}


def _ratio(game, optimum, welfare):
    # type: (BayesianGame, float, float) -> Tuple[float, Marker]
    numerator, denominator = (optimum, welfare) if game.objective is Objective.UTILITY else (welfare, optimum)
    if denominator <= 0.0:
        if numerator <= 0.0:
            return 1.0, Marker.FINITE
        return INFINITY, Marker.INFINITE
    return numerator / denominator, Marker.FINITE


def bayes_nash_poa(game, epsilon=None, equilibria=None, *options, **kwargs):
    # type: (BayesianGame, Optional[float], Optional[Sequence[StrategyProfile]], Any, Any) -> PoaResult
    """
    Expected optimal welfare over the expected welfare of the worst
    ``epsilon``-BNE (worst cost over optimal cost for cost games).
    ``epsilon`` defaults to the family's discretization slack.
    """
    epsilon = game.default_epsilon if epsilon is None else float(epsilon)
    if equilibria is None:
        equilibria = enumerate_pure_bne(game, epsilon, *options, **kwargs)
    optimum = expected_optimal_welfare(game, *options, **kwargs)
    if not equilibria:
        log.warning("no pure %r-BNE found", epsilon)
        return PoaResult(poa=None, marker=Marker.NONE_FOUND, epsilon=epsilon, expected_optimum=optimum)
    rows, worst, worst_welfare = [], None, None
    for k, s in enumerate(equilibria):
        welfare = expected_welfare(game, s)
        ratio, _ = _ratio(game, optimum, welfare)
        rows.append({'equilibrium': k, 'expected_welfare': welfare, 'ratio': ratio})
        if worst is None or game.objective.better(worst_welfare, welfare):
            worst, worst_welfare = s, welfare
    poa, marker = _ratio(game, optimum, worst_welfare)
    log.info("measured PoA %r over %d equilibria at epsilon %r", poa, len(equilibria), epsilon)
    return PoaResult(poa=poa, marker=marker, epsilon=epsilon, expected_optimum=optimum, worst=worst,
                     worst_welfare=worst_welfare, equilibria=equilibria, rows=rows)


def epsilon_ladder(game, steps=4, base=None):
    # type: (BayesianGame, int, Optional[float]) -> Tuple[float, ...]
    """
    (0, slack, 2 slack, ...) with ``steps`` nonzero rungs; just (0,) when
    the family has no discretization slack.
    """
    slack = game.default_epsilon if base is None else float(base)
    if slack <= 0:
        return (0.0,)
    return tuple(k * slack for k in range(steps + 1))


def equilibria_on_ladder(game, steps=4, *options, **kwargs):
    # type: (BayesianGame, int, Any, Any) -> Tuple[float, List[StrategyProfile]]
    """
    Equilibria at the first rung of :func:`epsilon_ladder` that has any.
    """
    ladder = epsilon_ladder(game, steps)
    for epsilon in ladder:
        found = enumerate_pure_bne(game, epsilon, *options, **kwargs)
        if found:
            return epsilon, found
        log.info("no pure %r-BNE; moving up the ladder", epsilon)
    return ladder[-1], []


def complete_information_poa(game, *options, **kwargs):
    # type: (BayesianGame, Any, Any) -> PoaResult
    """
    Pure Nash PoA of a complete-information game, by direct enumeration of
    action profiles and unilateral deviations.
    """
    _require_singletons(game)
    final = forward_args(kwargs, *options)
    t = tuple(d.support[0] for d in game.type_dists)
    _, optimum = optimal_profile(game, t, final)
    found, worst, worst_welfare = [], None, None
    for a in game.action_profiles(t):
        stable = True
        for i in range(game.n):
            current = game.payoff(i, t[i], a)
            for b in game.actions_of(i, t[i]):
                value = game.payoff(i, t[i], replace(a, i, b))
                gap = value - current if game.objective is Objective.UTILITY else current - value
                if gap > final['tolerance']:
                    stable = False
                    break
            if not stable:
                break
        if stable:
            s = StrategyProfile.constant(game, a)
            found.append(s)
            welfare = game.welfare(t, a)
            if worst is None or game.objective.better(worst_welfare, welfare):
                worst, worst_welfare = s, welfare
    if not found:
        return PoaResult(poa=None, marker=Marker.NONE_FOUND, epsilon=0.0, expected_optimum=optimum)
    poa, marker = _ratio(game, optimum, worst_welfare)
    return PoaResult(poa=poa, marker=marker, epsilon=0.0, expected_optimum=optimum, worst=worst,
                     worst_welfare=worst_welfare, equilibria=found)


def check_misalignment(game, s, epsilon=None, *options, **kwargs):
    # type: (BayesianGame, StrategyProfile, Optional[float], Any, Any) -> Verdict
    """
    E_t E_w[SW^w(s(t))] <= E_t[SW^t(s(t))] + n epsilon at an
    ``epsilon``-BNE (reversed for cost games).

    The inequality follows from each type being free to play as another
    type, so it needs a constant strategy space; on other games it is
    evaluated anyway and the verdict is flagged.

    :raise: :exc:`~bayeslab.exceptions.InvalidArgumentException` if ``s``
        is not an ``epsilon``-BNE
    """
    final = forward_args(kwargs, *options)
    epsilon = game.default_epsilon if epsilon is None else float(epsilon)
    report = is_pure_bne(game, s, epsilon, final)
    if not report.passed:
        raise InvalidArgumentException.pyexc("misalignment is only claimed at an epsilon-BNE",
                                             obj=report.as_dict())
    profiles = game.type_profiles()
    cross = math.fsum(p * q * game.welfare(w, s.play(t)) for t, p in profiles for w, q in profiles)
    own = expected_welfare(game, s)
    if game.objective is Objective.UTILITY:
        margin = own + game.n * epsilon - cross
    else:
        margin = cross + game.n * epsilon - own
    flags = () if game.constant_strategy_space else ('variable-strategy-space',)
    passed = margin >= -final['tolerance']
    if not passed:
        log.warning("misalignment inequality FAILED with margin %r%s", margin,
                    " on a variable strategy space" if flags else "")
    return Verdict(label='misalignment', passed=bool(passed), worst_margin=margin,
                   witness={'cross': cross, 'own': own}, checked=len(profiles) ** 2,
                   parameters={'epsilon': epsilon}, flags=flags)
