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
Combinatorial valuations over item sets.

Items are numbered ``0 .. m-1``. A set of items is passed either as an
iterable of item numbers or, internally, as a bitmask with bit ``j`` set for
item ``j``.
"""
import functools
import itertools
import math

import attr
import numpy as np
from attr.validators import instance_of as io
from scipy.optimize import linprog

from bayeslab.exceptions import InvalidArgumentException
from bayeslab_core import INFINITY, TOLERANCE
from bayeslab_core._logutil import get_logger

from typing import *

log = get_logger('valuations')

MAX_ITEMS = 16

ItemSet = Tuple[int, ...]


def to_mask(items):
    # type: (Iterable[int]) -> int
    mask = 0
    for j in items:
        mask |= 1 << int(j)
    return mask


def to_items(mask):
    # type: (int) -> ItemSet
    items = []
    j = 0
    while mask:
        if mask & 1:
            items.append(j)
        mask >>= 1
        j += 1
    return tuple(items)


def submasks(mask):
    # type: (int) -> Iterator[int]
    """
    Nonempty submasks of ``mask`` in decreasing numeric order.
    """
    sub = mask
    while sub:
        yield sub
        sub = (sub - 1) & mask


def _check_items(m, items):
    # type: (int, ItemSet) -> ItemSet
    items = tuple(sorted(set(int(j) for j in items)))
    if items and (items[0] < 0 or items[-1] >= m):
        raise InvalidArgumentException.pyexc("item set outside [0, {0})".format(m), obj=items)
    return items


def _clause_matrix(clauses):
    return tuple(tuple(float(x) for x in clause) for clause in clauses)


def _check_clauses(instance, attribute, clauses):
    if not clauses:
        raise InvalidArgumentException("an XOS valuation needs at least one clause")
    for clause in clauses:
        if len(clause) != instance.m:
            raise InvalidArgumentException.pyexc("clause length differs from item count", obj=clause)
        if any(x < 0 or math.isnan(x) for x in clause):
            raise InvalidArgumentException.pyexc("clause entries must be nonnegative", obj=clause)


def _check_m(instance, attribute, m):
    if m < 1 or m > MAX_ITEMS:
        raise InvalidArgumentException.pyexc("item count must lie in [1, {0}]".format(MAX_ITEMS), obj=m)


@attr.s(frozen=True)
class XOSValuation(object):
    """
    Maximum over additive clauses: v(S) = max_c sum_{j in S} c_j.
    """
    m = attr.ib(validator=[io(int), _check_m])  # type: int
    clauses = attr.ib(converter=_clause_matrix, validator=_check_clauses)  # type: Tuple[Tuple[float, ...], ...]

    def _clause_values(self, items):
        return [math.fsum(clause[j] for j in items) for clause in self.clauses]

    def value(self, items):
        # type: (Iterable[int]) -> float
        items = _check_items(self.m, items)
        if not items:
            return 0.0
        return max(self._clause_values(items))

    def value_of_mask(self, mask):
        # type: (int) -> float
        return self.value(to_items(mask))

    def supporting_additive(self, items):
        # type: (Iterable[int]) -> Tuple[float, ...]
        """
        The maximizing clause on ``items`` with entries outside ``items``
        zeroed. Ties go to the lowest clause index.
        """
        items = _check_items(self.m, items)
        if not items:
            raise InvalidArgumentException("supporting additive vector needs a nonempty set")
        values = self._clause_values(items)
        best = 0
        for k in range(1, len(values)):
            if values[k] > values[best]:
                best = k
        chosen = set(items)
        return tuple(x if j in chosen else 0.0 for j, x in enumerate(self.clauses[best]))

    def singleton_values(self):
        # type: (...) -> Tuple[float, ...]
        return tuple(self.value((j,)) for j in range(self.m))

    def to_table(self):
        # type: (...) -> TableValuation
        return TableValuation(self.m, [self.value_of_mask(mask) for mask in range(1 << self.m)])


def _values_vector(values):
    return tuple(float(v) for v in values)


def _check_table(instance, attribute, values):
    m = instance.m
    if len(values) != 1 << m:
        raise InvalidArgumentException.pyexc("a table on {0} items needs {1} values".format(m, 1 << m),
                                             obj=len(values))
    if values[0] != 0.0:
        raise InvalidArgumentException.pyexc("v(empty set) must be 0", obj=values[0])
    for mask, v in enumerate(values):
        if v < 0 or math.isnan(v):
            raise InvalidArgumentException.pyexc("values must be nonnegative", obj=to_items(mask))
        for j in range(m):
            if not mask & (1 << j) and values[mask | (1 << j)] < v - 1e-12:
                raise InvalidArgumentException.pyexc(
                    "valuation is not monotone", obj=(to_items(mask), to_items(mask | (1 << j))))


@attr.s(frozen=True)
class TableValuation(object):
    """
    Explicit monotone valuation with one value per bitmask.
    """
    m = attr.ib(validator=[io(int), _check_m])  # type: int
    values = attr.ib(converter=_values_vector, validator=_check_table)  # type: Tuple[float, ...]

    @classmethod
    def from_function(cls, m, fn):
        # type: (int, Callable[[ItemSet], float]) -> TableValuation
        return cls(m, [fn(to_items(mask)) for mask in range(1 << m)])

    def value(self, items):
        # type: (Iterable[int]) -> float
        return self.values[to_mask(_check_items(self.m, items))]

    def value_of_mask(self, mask):
        # type: (int) -> float
        return self.values[mask]

    def supporting_additive(self, items):
        # type: (Iterable[int]) -> Tuple[float, ...]
        """
        An additive vector supported on ``items`` that maximizes a(S)
        subject to a(T) <= v(T) for every T inside S.
        """
        items = _check_items(self.m, items)
        if not items:
            raise InvalidArgumentException("supporting additive vector needs a nonempty set")
        return _max_dominated_additive(self, to_mask(items))

    def singleton_values(self):
        # type: (...) -> Tuple[float, ...]
        return tuple(self.values[1 << j] for j in range(self.m))

    def to_table(self):
        # type: (...) -> TableValuation
        return self


Valuation = Union[XOSValuation, TableValuation]


@functools.lru_cache(maxsize=4096)
def _max_dominated_additive(val, mask):
    # type: (TableValuation, int) -> Tuple[float, ...]
    items = to_items(mask)
    k = len(items)
    rows, bounds = [], []
    for sub in submasks(mask):
        rows.append([1.0 if sub & (1 << j) else 0.0 for j in items])
        bounds.append(val.values[sub])
    res = linprog(c=-np.ones(k), A_ub=np.array(rows), b_ub=np.array(bounds),
                  bounds=[(0, None)] * k, method='highs')
    if res.status != 0:
        raise InvalidArgumentException.pyexc("supporting additive program did not solve",
                                             obj=res.message)
    x = np.clip(res.x, 0.0, None)
    # scale into the feasible region so every a(T) <= v(T) holds exactly
    scale = 1.0
    for row, bound in zip(rows, bounds):
        load = math.fsum(xj for xj, r in zip(x, row) if r)
        if load > bound:
            scale = min(scale, bound / load if load > 0 else 0.0)
    vector = [0.0] * val.m
    for j, xj in zip(items, x):
        vector[j] = float(xj) * scale
    return tuple(vector)


def beta_fsubadditive(val):
    # type: (Valuation) -> float
    """
    Smallest beta >= 1 for which ``val`` is beta-fractionally subadditive.

    Per nonempty set S a linear program finds the largest a(S) over additive
    vectors dominated by ``val`` on every subset of S; the set's factor is
    v(S) / a*(S) and the result is the maximum over sets, or infinity when
    some v(S) > 0 has a*(S) = 0.
    """
    table = val.to_table()
    beta = 1.0
    for mask in range(1, 1 << table.m):
        v = table.values[mask]
        if v <= 0.0:
            continue
        best = math.fsum(_max_dominated_additive(table, mask))
        if best <= TOLERANCE * max(1.0, v):
            return INFINITY
        beta = max(beta, v / best)
    return beta


def is_subadditive(val, tolerance=1e-12):
    # type: (Valuation, float) -> bool
    """
    v(S u T) <= v(S) + v(T) for all S, T. Monotone valuations only need the
    check on disjoint pairs.
    """
    table = val.to_table()
    values = np.array(table.values)
    masks = np.arange(1 << table.m)
    for s in range(1, 1 << table.m):
        others = masks[(masks & s) == 0]
        if np.any(values[s | others] > values[s] + values[others] + tolerance):
            return False
    return True


def is_submodular(val, tolerance=1e-12):
    # type: (Valuation, float) -> bool
    """
    Diminishing marginal values: v(S+j) - v(S) >= v(S+j+k) - v(S+k).
    """
    table = val.to_table()
    values = np.array(table.values)
    masks = np.arange(1 << table.m)
    for j, k in itertools.permutations(range(table.m), 2):
        bj, bk = 1 << j, 1 << k
        base = masks[(masks & (bj | bk)) == 0]
        lhs = values[base | bj] - values[base]
        rhs = values[base | bj | bk] - values[base | bk]
        if np.any(rhs > lhs + tolerance):
            return False
    return True


def harmonic_bound(m):
    # type: (int) -> float
    return math.fsum(1.0 / k for k in range(1, m + 1))


def additive(values):
    # type: (Sequence[float]) -> XOSValuation
    return XOSValuation(len(values), [values])


def unit_demand(values):
    # type: (Sequence[float]) -> XOSValuation
    m = len(values)
    return XOSValuation(m, [[values[j] if k == j else 0.0 for k in range(m)] for j in range(m)])


def random_xos(rng,  # type: np.random.Generator
               m,  # type: int
               clauses=2,  # type: int
               step=0.25,  # type: float
               high=1.0  # type: float
               ):
    # type: (...) -> XOSValuation
    """
    Clause entries drawn uniformly from the grid {0, step, ..., high}.
    """
    levels = int(round(high / step))
    matrix = rng.integers(0, levels + 1, size=(clauses, m)) * step
    return XOSValuation(m, matrix.tolist())


def random_subadditive_table(rng,  # type: np.random.Generator
                             m,  # type: int
                             step=0.25,  # type: float
                             high=1.0  # type: float
                             ):
    # type: (...) -> TableValuation
    """
    Subadditive closure of a random monotone table.

    Raw values per set are drawn on the grid up to ``high * |S|``, made
    monotone by taking the maximum over subsets, then closed under
    c(S) = min(c(S), c(A) + c(S \\ A)) in order of increasing set size. The
    closure keeps monotonicity.
    """
    size = 1 << m
    raw = [0.0] * size
    for mask in range(1, size):
        levels = int(round(high * bin(mask).count('1') / step))
        raw[mask] = float(rng.integers(1, levels + 1)) * step
    order = sorted(range(1, size), key=lambda s: (bin(s).count('1'), s))
    for mask in order:
        for j in to_items(mask):
            raw[mask] = max(raw[mask], raw[mask & ~(1 << j)])
    closed = list(raw)
    for mask in order:
        for sub in submasks(mask):
            if sub != mask:
                closed[mask] = min(closed[mask], closed[sub] + closed[mask & ~sub])
    return TableValuation(m, closed)


def optimal_allocation(valuations, m):
    # type: (Sequence[Valuation], int) -> Tuple[Tuple[ItemSet, ...], float]
    """
    Exhaustive welfare-maximizing assignment of the ``m`` items.

    Assignments are enumerated in lexicographic order of the owner vector
    and only strict improvements replace the incumbent.
    """
    n = len(valuations)
    best, best_value = None, None
    for owners in itertools.product(range(n), repeat=m):
        masks = [0] * n
        for j, owner in enumerate(owners):
            masks[owner] |= 1 << j
        value = math.fsum(valuations[i].value_of_mask(masks[i]) for i in range(n))
        if best is None or value > best_value:
            best, best_value = masks, value
    return tuple(to_items(mask) for mask in best), best_value
