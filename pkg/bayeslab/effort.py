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
Effort markets: players split a private budget across projects, and each
project's concave value is shared in proportion to ability-weighted effort.

A player's type is an :class:`EffortType` (abilities, budget); an action is
``(abilities, efforts)`` and always declares the true abilities.
"""
import bisect
import itertools
import math

import attr
import numpy as np
from attr.validators import instance_of as io

from bayeslab.exceptions import InvalidArgumentException, InvalidActionException
from bayeslab.game import BayesianGame, TypeDistribution
from bayeslab.result import Verdict
from bayeslab.smoothness import check_universal
from bayeslab_core import Objective
from bayeslab_core._logutil import get_logger

from typing import *

log = get_logger('effort')

CONCAVITY_TOLERANCE = 1e-12
BUDGET_TOLERANCE = 1e-12

Efforts = Tuple[float, ...]
Action = Tuple[Tuple[float, ...], Efforts]


def _floats(values):
    return tuple(float(v) for v in values)


def _check_breakpoints(instance, attribute, values):
    xs = instance.breakpoints
    if len(xs) < 2 or len(xs) != len(values):
        raise InvalidArgumentException.pyexc("a value function needs matching breakpoints and values",
                                             obj=(xs, values))
    if xs[0] != 0.0 or values[0] != 0.0:
        raise InvalidArgumentException("value functions start at V(0) = 0")
    if any(b <= a for a, b in zip(xs, xs[1:])):
        raise InvalidArgumentException.pyexc("breakpoints must increase strictly", obj=xs)
    slopes = [(v1 - v0) / (x1 - x0) for x0, x1, v0, v1 in zip(xs, xs[1:], values, values[1:])]
    if any(s < -CONCAVITY_TOLERANCE for s in slopes):
        raise InvalidArgumentException.pyexc("value function must be nondecreasing", obj=slopes)
    if any(b > a + CONCAVITY_TOLERANCE for a, b in zip(slopes, slopes[1:])):
        raise InvalidArgumentException.pyexc("value function must be concave", obj=slopes)


@attr.s(frozen=True)
class PiecewiseLinear(object):
    """
    Concave nondecreasing piecewise-linear function through the given
    breakpoints; the last slope continues beyond the last breakpoint.
    """
    breakpoints = attr.ib(converter=_floats)  # type: Tuple[float, ...]
    values = attr.ib(converter=_floats, validator=_check_breakpoints)  # type: Tuple[float, ...]

    @classmethod
    def linear(cls, slope=1.0):
        # type: (float) -> PiecewiseLinear
        return cls((0.0, 1.0), (0.0, slope))

    @classmethod
    def capped(cls, cap, slope=1.0):
        # type: (float, float) -> PiecewiseLinear
        """
        min(slope x, cap).
        """
        knee = cap / slope
        return cls((0.0, knee, knee + 1.0), (0.0, cap, cap))

    @classmethod
    def from_function(cls, fn, high, pieces=16):
        # type: (Callable[[float], float], float, int) -> PiecewiseLinear
        """
        Chord interpolation of a concave ``fn`` at ``pieces + 1`` equally
        spaced points of [0, high].
        """
        xs = np.linspace(0.0, high, pieces + 1)
        return cls(xs.tolist(), [0.0] + [float(fn(x)) for x in xs[1:]])

    @property
    def slopes(self):
        # type: (...) -> Tuple[float, ...]
        xs, vs = self.breakpoints, self.values
        return tuple((v1 - v0) / (x1 - x0) for x0, x1, v0, v1 in zip(xs, xs[1:], vs, vs[1:]))

    def __call__(self, x):
        # type: (float) -> float
        xs = self.breakpoints
        k = bisect.bisect_right(xs, x) - 1
        k = min(max(k, 0), len(xs) - 2)
        return self.values[k] + self.slopes[k] * (x - xs[k])


def check_average_value_decreasing(value):
    # type: (PiecewiseLinear) -> bool
    """
    V(x) / x is nonincreasing over the positive breakpoints.
    """
    averages = [v / x for x, v in zip(value.breakpoints[1:], value.values[1:])]
    return all(b <= a + CONCAVITY_TOLERANCE for a, b in zip(averages, averages[1:]))


@attr.s(frozen=True, order=True)
class EffortType(object):
    abilities = attr.ib(converter=_floats)  # type: Tuple[float, ...]
    budget = attr.ib(converter=float)  # type: float

    def __attrs_post_init__(self):
        if any(a < 0 or math.isnan(a) for a in self.abilities):
            raise InvalidArgumentException.pyexc("abilities must be nonnegative", obj=self.abilities)
        if not self.budget > 0:
            raise InvalidArgumentException.pyexc("budget must be positive", obj=self.budget)


def effort_vectors(m, budget, delta):
    # type: (int, float, float) -> Tuple[Efforts, ...]
    """
    Effort vectors on the delta grid within the budget, plus the vertices
    putting the whole budget on one project.
    """
    top = int(math.floor(budget / delta + 1e-9))
    found = set()
    for levels in itertools.product(range(top + 1), repeat=m):
        efforts = tuple(k * delta for k in levels)
        if math.fsum(efforts) <= budget + BUDGET_TOLERANCE:
            found.add(efforts)
    for j in range(m):
        found.add(tuple(budget if k == j else 0.0 for k in range(m)))
    return tuple(sorted(found))


@attr.s(frozen=True, eq=False)
class EffortInstance(object):
    """
    ``values[j]`` is project j's value function, ``types[i]`` player i's
    distribution over :class:`EffortType` and ``delta`` the effort step.
    """
    values = attr.ib(converter=tuple)  # type: Tuple[PiecewiseLinear, ...]
    types = attr.ib(converter=tuple)  # type: Tuple[TypeDistribution, ...]
    delta = attr.ib(converter=float)  # type: float
    _cache = attr.ib(factory=dict, init=False, repr=False)  # type: Dict[Any, Any]

    def __attrs_post_init__(self):
        if not self.values:
            raise InvalidArgumentException("an effort market needs a project")
        if not self.delta > 0:
            raise InvalidArgumentException.pyexc("effort step must be positive", obj=self.delta)
        for i, dist in enumerate(self.types):
            for t in dist.support:
                if not isinstance(t, EffortType) or len(t.abilities) != self.m:
                    raise InvalidArgumentException.pyexc(
                        "player {0} has a type that does not match {1} projects".format(i, self.m), obj=t)

    @property
    def n(self):
        # type: (...) -> int
        return len(self.types)

    @property
    def m(self):
        # type: (...) -> int
        return len(self.values)

    def actions_of(self, t):
        # type: (EffortType) -> Tuple[Action, ...]
        key = ('actions', t)
        if key not in self._cache:
            self._cache[key] = tuple((t.abilities, x) for x in effort_vectors(self.m, t.budget, self.delta))
        return self._cache[key]

    def totals(self, a):
        # type: (Sequence[Action]) -> List[float]
        return [math.fsum(abilities[j] * efforts[j] for abilities, efforts in a) for j in range(self.m)]

    def shares(self, a):
        # type: (Sequence[Action]) -> List[List[float]]
        """
        shares[i][j]: player i's part of project j's value.
        """
        totals = self.totals(a)
        rows = []
        for abilities, efforts in a:
            row = []
            for j, total in enumerate(totals):
                weighted = abilities[j] * efforts[j]
                row.append(0.0 if weighted == 0.0 or total == 0.0 else weighted * self.values[j](total) / total)
            rows.append(row)
        return rows

    def to_game(self):
        # type: (...) -> BayesianGame
        if 'game' in self._cache:
            return self._cache['game']

        def evaluator(i, t_i, a):
            return math.fsum(self.shares(a)[i])

        action_sets = {(i, t): self.actions_of(t) for i, dist in enumerate(self.types) for t in dist.support}
        game = BayesianGame(type_dists=self.types,
                            action_sets=action_sets,
                            evaluator=evaluator,
                            objective=Objective.UTILITY,
                            family='effort',
                            metadata={'projects': self.m, 'delta': self.delta})
        self._cache['game'] = game
        return game


def _check_action(inst, i, t_i, action):
    abilities, efforts = action
    if tuple(abilities) != t_i.abilities:
        raise InvalidActionException.pyexc("player {0} must declare its true abilities".format(i), obj=abilities)
    if any(x < 0 for x in efforts) or math.fsum(efforts) > t_i.budget + BUDGET_TOLERANCE:
        raise InvalidActionException.pyexc("player {0} exceeds its budget {1!r}".format(i, t_i.budget),
                                           obj=efforts)


def effort_utility(inst, i, t_i, a):
    # type: (EffortInstance, int, EffortType, Sequence[Action]) -> float
    """
    sum_j a_ij x_ij V_j(S_j) / S_j with S_j = sum_k a_kj x_kj; a term is 0
    when a_ij x_ij = 0 or S_j = 0.

    :raise: :exc:`~bayeslab.exceptions.InvalidActionException` on a budget
        overrun or a misdeclared ability
    """
    _check_action(inst, i, t_i, a[i])
    return math.fsum(inst.shares(a)[i])


def effort_social_welfare(inst, t, a):
    # type: (EffortInstance, Sequence[EffortType], Sequence[Action]) -> float
    """
    sum_j V_j(S_j).
    """
    for i, t_i in enumerate(t):
        _check_action(inst, i, t_i, a[i])
    return math.fsum(value(total) for value, total in zip(inst.values, inst.totals(a)))


def check_universal_11_smoothness(inst, *options, **kwargs):
    # type: (EffortInstance, Any, Any) -> Verdict
    """
    Universal (1, 1)-smoothness; tuple spaces above ``max_tuples`` are
    sampled with the configured seed.
    """
    return check_universal(inst.to_game(), 1.0, 1.0, *options, **kwargs)


def random_instance(rng,  # type: np.random.Generator
                    n,  # type: int
                    m,  # type: int
                    types=2,  # type: int
                    delta=0.5,  # type: float
                    budget=1.0  # type: float
                    ):
    # type: (...) -> EffortInstance
    """
    Capped-linear projects min(x, c_j) and equiprobable types with
    abilities from {0.5, 1, 1.5, 2}.
    """
    levels = (0.5, 1.0, 1.5, 2.0)
    if not 1 <= types <= len(levels) ** m:
        raise InvalidArgumentException.pyexc(
            "{0} distinct types need {0} ability vectors; {1} items allow {2}".format(types, m, len(levels) ** m),
            obj=types)
    values = [PiecewiseLinear.capped(float(rng.integers(1, 4))) for _ in range(m)]
    dists = []
    for _ in range(n):
        support = set()
        while len(support) < types:
            abilities = tuple(float(x) for x in rng.choice(levels, size=m))
            support.add(EffortType(abilities, budget))
        dists.append(TypeDistribution.uniform(sorted(support)))
    return EffortInstance(values=values, types=dists, delta=delta)
