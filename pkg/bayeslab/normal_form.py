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
Bayesian games given by explicit payoff tables.
"""
import itertools

import attr
from attr.validators import instance_of as io
from pyrsistent import pmap, PMap

from bayeslab.exceptions import InvalidArgumentException
from bayeslab.game import BayesianGame, TypeDistribution
from bayeslab_core import Objective

from typing import *


def _tables(payoffs):
    return pmap({key: pmap({tuple(profile): float(value) for profile, value in table.items()})
                 for key, table in payoffs.items()})


@attr.s(frozen=True, eq=False)
class NormalFormGame(object):
    """
    ``payoffs[(i, t_i)]`` maps every action profile reachable when player
    ``i`` has type ``t_i`` to that player's payoff.
    """
    type_dists = attr.ib(converter=tuple)  # type: Tuple[TypeDistribution, ...]
    action_sets = attr.ib(converter=pmap)  # type: PMap
    payoffs = attr.ib(converter=_tables)  # type: PMap
    objective = attr.ib(default=Objective.UTILITY, validator=io(Objective))  # type: Objective
    _cache = attr.ib(factory=dict, init=False, repr=False)  # type: Dict[Any, Any]

    def to_game(self):
        # type: (...) -> BayesianGame
        if 'game' in self._cache:
            return self._cache['game']
        payoffs = self.payoffs

        def evaluator(i, t_i, a):
            return payoffs[(i, t_i)][tuple(a)]

        game = BayesianGame(type_dists=self.type_dists, action_sets=self.action_sets, evaluator=evaluator,
                            objective=self.objective, family='normal-form')
        for t, _ in game.type_profiles():
            for a in game.action_profiles(t):
                for i, t_i in enumerate(t):
                    if a not in payoffs.get((i, t_i), {}):
                        raise InvalidArgumentException.pyexc(
                            "player {0} type {1!r} has no payoff for {2!r}".format(i, t_i, a))
        self._cache['game'] = game
        return game


def complete_information(actions, payoff, objective=Objective.UTILITY):
    # type: (Sequence[Sequence[Any]], Callable[[int, Tuple[Any, ...]], float], Objective) -> NormalFormGame
    """
    One type per player (named ``"t"``); ``payoff(i, a)`` fills the table.
    """
    n = len(actions)
    action_sets = {(i, 't'): tuple(actions[i]) for i in range(n)}
    payoffs = {(i, 't'): {a: payoff(i, a) for a in itertools.product(*actions)} for i in range(n)}
    return NormalFormGame(type_dists=[TypeDistribution.singleton('t')] * n, action_sets=action_sets,
                          payoffs=payoffs, objective=objective)


def single_player(table, probabilities=None):
    # type: (Mapping[Any, Mapping[Any, float]], Optional[Sequence[float]]) -> NormalFormGame
    """
    ``table[type][action]`` is the lone player's payoff.
    """
    support = tuple(table)
    dist = TypeDistribution.uniform(support) if probabilities is None else TypeDistribution(support, probabilities)
    return NormalFormGame(type_dists=[dist],
                          action_sets={(0, t): tuple(table[t]) for t in support},
                          payoffs={(0, t): {(action,): value for action, value in table[t].items()}
                                   for t in support})


def identical_interest(actions, welfare):
    # type: (Sequence[Sequence[Any]], Callable[[Tuple[Any, ...]], float]) -> NormalFormGame
    """
    Every player receives welfare(a) / n.
    """
    n = len(actions)
    return complete_information(actions, lambda i, a: welfare(a) / n)


def matching_pennies():
    # type: (...) -> NormalFormGame
    """
    Player 0 wants to match, player 1 to mismatch; no pure equilibrium.
    """
    return complete_information([('H', 'T'), ('H', 'T')],
                                lambda i, a: float((a[0] == a[1]) == (i == 0)))


def coordination_game(high=2.0, low=1.0):
    # type: (float, float) -> NormalFormGame
    return complete_information([('A', 'B'), ('A', 'B')],
                                lambda i, a: (high if a[0] == 'A' else low) if a[0] == a[1] else 0.0)


def prisoners_dilemma():
    # type: (...) -> NormalFormGame
    """
    Defection ('D') is dominant.
    """
    table = {('C', 'C'): (3.0, 3.0), ('C', 'D'): (0.0, 4.0), ('D', 'C'): (4.0, 0.0), ('D', 'D'): (1.0, 1.0)}
    return complete_information([('C', 'D'), ('C', 'D')], lambda i, a: table[a][i])
