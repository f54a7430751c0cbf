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
import itertools
import math

import attr
from attr.validators import instance_of as io
from pyrsistent import pmap, PMap

from bayeslab.exceptions import InvalidArgumentException, InvalidProfileException, \
    UnnormalizedProbabilityException, GuardExceededException
from bayeslab_core import Objective, JSON, to_jsonable
from bayeslab_core._logutil import get_logger
from bayeslab_core.options import forward_args

from typing import *

log = get_logger('game')

PROBABILITY_TOLERANCE = 1e-12
RENORMALIZE_TOLERANCE = 1e-9

TypeId = Hashable
Action = Hashable
TypeProfile = Tuple[TypeId, ...]
ActionProfile = Tuple[Action, ...]
Evaluator = Callable[[int, TypeId, ActionProfile], float]


def _check_distribution(instance, attribute, probabilities):
    support = instance.support
    if len(support) == 0:
        raise InvalidArgumentException("type distribution has an empty support")
    if len(support) != len(probabilities):
        raise InvalidArgumentException.pyexc(
            "support and probabilities differ in length", obj=(support, probabilities))
    if len(set(support)) != len(support):
        raise InvalidArgumentException.pyexc("support entries must be distinct", obj=support)
    if any(p < 0 or math.isnan(p) for p in probabilities):
        raise InvalidArgumentException.pyexc("probabilities must be nonnegative", obj=probabilities)
    total = math.fsum(probabilities)
    if abs(total - 1.0) > PROBABILITY_TOLERANCE:
        raise UnnormalizedProbabilityException.pyexc(
            "probabilities sum to {0!r}".format(total), obj=probabilities)


@attr.s(frozen=True)
class TypeDistribution(object):
    """
    An independent, finite distribution over one player's types.
    """
    support = attr.ib(converter=tuple)  # type: Tuple[TypeId, ...]
    probabilities = attr.ib(converter=lambda ps: tuple(float(p) for p in ps),
                            validator=_check_distribution)  # type: Tuple[float, ...]

    @classmethod
    def singleton(cls, type_id):
        # type: (TypeId) -> TypeDistribution
        return cls((type_id,), (1.0,))

    @classmethod
    def uniform(cls, support):
        # type: (Sequence[TypeId]) -> TypeDistribution
        support = tuple(support)
        return cls(support, [1.0 / len(support)] * len(support))

    @classmethod
    def normalized(cls,
                   support,  # type: Sequence[TypeId]
                   probabilities,  # type: Sequence[float]
                   path=None  # type: str
                   ):
        # type: (...) -> TypeDistribution
        """
        Build a distribution from hand-written probabilities.

        Sums within 1e-12 of one are taken as they are; sums within 1e-9 are
        renormalized with a warning; anything further off is rejected.
        """
        probabilities = [float(p) for p in probabilities]
        total = math.fsum(probabilities)
        deviation = abs(total - 1.0)
        if deviation > RENORMALIZE_TOLERANCE:
            raise UnnormalizedProbabilityException.pyexc(
                "probabilities sum to {0!r}, beyond tolerance {1!r}".format(total, RENORMALIZE_TOLERANCE),
                obj=probabilities, path=path)
        if deviation > PROBABILITY_TOLERANCE:
            log.warning("renormalizing probabilities at %s: sum was %r", path, total)
            probabilities = [p / total for p in probabilities]
        return cls(support, probabilities)

    def __len__(self):
        return len(self.support)

    def items(self):
        # type: (...) -> Iterator[Tuple[TypeId, float]]
        return zip(self.support, self.probabilities)

    def probability(self, type_id):
        # type: (TypeId) -> float
        try:
            return self.probabilities[self.support.index(type_id)]
        except ValueError:
            return 0.0


def _sorted_action_sets(action_sets):
    # type: (Mapping[Tuple[int, TypeId], Iterable[Action]]) -> PMap
    return pmap({key: tuple(sorted(set(actions))) for key, actions in action_sets.items()})


@attr.s(frozen=True, eq=False)
class BayesianGame(object):
    """
    A finite Bayesian game with independent types.

    ``action_sets`` maps ``(player, type)`` to that type's actions; a game
    whose sets ignore the type has a constant strategy space. ``evaluator``
    is the raw payoff oracle ``(player, own type, action profile) -> float``:
    a utility under :attr:`Objective.UTILITY`, a cost under
    :attr:`Objective.COST`. Every "welfare" quantity of a cost game is the
    corresponding social cost.

    ``optimizer``, when given, maps a type profile to an optimal
    ``(action profile, welfare)`` pair and replaces exhaustive search for
    families that know their optimum in closed form.
    """
    type_dists = attr.ib(converter=tuple)  # type: Tuple[TypeDistribution, ...]
    action_sets = attr.ib(converter=_sorted_action_sets)  # type: PMap
    evaluator = attr.ib()  # type: Evaluator
    objective = attr.ib(default=Objective.UTILITY, validator=io(Objective))  # type: Objective
    family = attr.ib(default='normal-form', validator=io(str))  # type: str
    default_epsilon = attr.ib(default=0.0, converter=float)  # type: float
    optimizer = attr.ib(default=None)  # type: Optional[Callable[[TypeProfile], Tuple[ActionProfile, float]]]
    metadata = attr.ib(default=pmap(), converter=pmap)  # type: PMap
    _memo = attr.ib(factory=dict, init=False, repr=False)  # type: Dict[Any, Any]

    def __attrs_post_init__(self):
        if not self.type_dists:
            raise InvalidArgumentException("a game needs at least one player")
        for i, dist in enumerate(self.type_dists):
            if not isinstance(dist, TypeDistribution):
                raise InvalidArgumentException.pyexc("player {0} has no TypeDistribution".format(i), obj=dist)
            for t_i in dist.support:
                actions = self.action_sets.get((i, t_i))
                if not actions:
                    raise InvalidArgumentException.pyexc(
                        "player {0} type {1!r} has no actions".format(i, t_i))

    @property
    def n(self):
        # type: (...) -> int
        return len(self.type_dists)

    def actions_of(self, i, t_i):
        # type: (int, TypeId) -> Tuple[Action, ...]
        try:
            return self.action_sets[(i, t_i)]
        except KeyError:
            raise InvalidArgumentException.pyexc(
                "no action set for player {0} type {1!r}".format(i, t_i))

    @property
    def constant_strategy_space(self):
        # type: (...) -> bool
        for i, dist in enumerate(self.type_dists):
            sets = {self.action_sets[(i, t_i)] for t_i in dist.support}
            if len(sets) > 1:
                return False
        return True

    def type_profiles(self):
        # type: (...) -> Tuple[Tuple[TypeProfile, float], ...]
        """
        Every type profile with its probability, in lexicographic order of
        the declared supports.
        """
        key = ('type_profiles',)
        if key not in self._memo:
            rows = []
            for combo in itertools.product(*(tuple(d.items()) for d in self.type_dists)):
                t = tuple(c[0] for c in combo)
                p = 1.0
                for c in combo:
                    p *= c[1]
                rows.append((t, p))
            self._memo[key] = tuple(rows)
        return self._memo[key]

    def opponent_profiles(self, i):
        # type: (int) -> Tuple[Tuple[TypeProfile, float], ...]
        """
        Profiles of everyone but ``i`` with their probabilities. Under
        independence this is also the conditional distribution given any
        type of ``i``. The entry at position ``i`` is ``None``.
        """
        key = ('opponents', i)
        if key not in self._memo:
            dists = [((None, 1.0),) if j == i else tuple(d.items())
                     for j, d in enumerate(self.type_dists)]
            rows = []
            for combo in itertools.product(*dists):
                p = 1.0
                for c in combo:
                    p *= c[1]
                rows.append((tuple(c[0] for c in combo), p))
            self._memo[key] = tuple(rows)
        return self._memo[key]

    def action_profiles(self, t):
        # type: (TypeProfile) -> Iterator[ActionProfile]
        return itertools.product(*(self.actions_of(i, t_i) for i, t_i in enumerate(t)))

    def action_space_size(self, t):
        # type: (TypeProfile) -> int
        size = 1
        for i, t_i in enumerate(t):
            size *= len(self.actions_of(i, t_i))
        return size

    def payoff(self, i, t_i, a):
        # type: (int, TypeId, ActionProfile) -> float
        """
        Unchecked evaluation of the payoff oracle.
        """
        return self.evaluator(i, t_i, a)

    def utility(self, i, t_i, a):
        # type: (int, TypeId, ActionProfile) -> float
        """
        Player ``i``'s utility (or cost) at ``a``; ``a_i`` must be available
        to type ``t_i``.
        """
        if a[i] not in self.actions_of(i, t_i):
            raise InvalidProfileException.pyexc(
                "action {0!r} is not available to player {1} with type {2!r}".format(a[i], i, t_i))
        return self.evaluator(i, t_i, a)

    def welfare(self, t, a):
        # type: (TypeProfile, ActionProfile) -> float
        """
        Unchecked sum of payoffs.
        """
        return math.fsum(self.evaluator(i, t_i, a) for i, t_i in enumerate(t))

    def contains(self, t, a):
        # type: (TypeProfile, ActionProfile) -> bool
        return len(a) == self.n and all(a[i] in self.actions_of(i, t_i) for i, t_i in enumerate(t))


@attr.s(frozen=True)
class StrategyProfile(object):
    """
    Per player, a mapping from each of their types to an action.
    """
    choices = attr.ib(converter=lambda cs: tuple(pmap(c) for c in cs))  # type: Tuple[PMap, ...]

    @classmethod
    def constant(cls, game, actions):
        # type: (BayesianGame, Sequence[Action]) -> StrategyProfile
        return cls([{t_i: actions[i] for t_i in dist.support} for i, dist in enumerate(game.type_dists)])

    @classmethod
    def first_actions(cls, game):
        # type: (BayesianGame) -> StrategyProfile
        return cls([{t_i: game.actions_of(i, t_i)[0] for t_i in dist.support}
                    for i, dist in enumerate(game.type_dists)])

    def action(self, i, t_i):
        # type: (int, TypeId) -> Action
        return self.choices[i][t_i]

    def play(self, t):
        # type: (TypeProfile) -> ActionProfile
        return tuple(self.choices[i][t_i] for i, t_i in enumerate(t))

    def with_choice(self, i, t_i, action):
        # type: (int, TypeId, Action) -> StrategyProfile
        return StrategyProfile(self.choices[:i] + (self.choices[i].set(t_i, action),) + self.choices[i + 1:])

    def validate(self, game):
        # type: (BayesianGame) -> StrategyProfile
        if len(self.choices) != game.n:
            raise InvalidProfileException("strategy profile has the wrong number of players")
        for i, dist in enumerate(game.type_dists):
            for t_i in dist.support:
                if t_i not in self.choices[i]:
                    raise InvalidProfileException.pyexc(
                        "player {0} has no action for type {1!r}".format(i, t_i))
                if self.choices[i][t_i] not in game.actions_of(i, t_i):
                    raise InvalidProfileException.pyexc(
                        "player {0} type {1!r} plays an unavailable action".format(i, t_i),
                        obj=self.choices[i][t_i])
        return self

    def as_dict(self):
        # type: (...) -> Dict[str, JSON]
        return {'strategies': [to_jsonable(c) for c in self.choices]}


def replace(a, i, action):
    # type: (ActionProfile, int, Action) -> ActionProfile
    return a[:i] + (action,) + a[i + 1:]


def social_welfare(game, t, a):
    # type: (BayesianGame, TypeProfile, ActionProfile) -> float
    """
    Sum of payoffs at ``a`` under type profile ``t``; for a cost game this
    is the social cost.

    :raise: :exc:`~bayeslab.exceptions.InvalidProfileException` if ``a`` is
        not in A(t)
    """
    if len(t) != game.n or not game.contains(t, a):
        raise InvalidProfileException.pyexc("action profile is outside A(t)", obj=(t, a))
    return game.welfare(t, a)


def optimal_profile(game,  # type: BayesianGame
                    t,  # type: TypeProfile
                    *options,  # type: Any
                    **kwargs  # type: Any
                    ):
    # type: (...) -> Tuple[ActionProfile, float]
    """
    Welfare-optimal (or cost-minimal) action profile for type profile ``t``.

    Enumeration is in lexicographic order of the sorted action sets and only
    a strict improvement replaces the incumbent, so ties go to the
    lexicographically first profile. Families may supply a closed-form
    ``optimizer``; pass ``exhaustive=True`` to ignore it.

    :raise: :exc:`~bayeslab.exceptions.GuardExceededException` when A(t) is
        larger than ``max_profiles``
    """
    final = forward_args(kwargs, *options)
    exhaustive = bool(final.get('exhaustive', False))
    key = ('opt', tuple(t), exhaustive)
    if key in game._memo:
        return game._memo[key]
    if game.optimizer is not None and not exhaustive:
        result = game.optimizer(tuple(t))
    else:
        size = game.action_space_size(t)
        if size > final['max_profiles']:
            raise GuardExceededException.pyexc(
                "action profile space too large for exhaustive optimum", size=size,
                limit=final['max_profiles'])
        best, best_value = None, None
        for a in game.action_profiles(t):
            value = game.welfare(t, a)
            if best is None or game.objective.better(value, best_value):
                best, best_value = a, value
        result = (best, best_value)
    game._memo[key] = result
    return result


def expected_welfare(game, s):
    # type: (BayesianGame, StrategyProfile) -> float
    """
    E_t[SW^t(s(t))] under independent types (expected social cost for cost
    games).
    """
    return math.fsum(p * game.welfare(t, s.play(t)) for t, p in game.type_profiles())


def expected_optimal_welfare(game, *options, **kwargs):
    # type: (BayesianGame, Any, Any) -> float
    return math.fsum(p * optimal_profile(game, t, *options, **kwargs)[1]
                     for t, p in game.type_profiles())


def expected_payoffs(game, s):
    # type: (BayesianGame, StrategyProfile) -> Tuple[float, ...]
    """
    Per-player ex-ante expected payoff of ``s``.
    """
    return tuple(math.fsum(p * game.payoff(i, t[i], s.play(t)) for t, p in game.type_profiles())
                 for i in range(game.n))
