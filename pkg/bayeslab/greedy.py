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
Greedy first-price combinatorial mechanisms.

A bid is single-minded: ``(items, x)`` offers ``x`` for any set containing
``items``; ``((), 0.0)`` is the empty bid. The mechanism repeatedly picks
the feasible (player, set) pair of highest priority, allocates it and
removes the player. Winners pay their bid on the allocated set.
"""
import functools
import itertools
import math

import attr
import numpy as np
from attr.validators import instance_of as io
from pyrsistent import pmap, PMap

from bayeslab.exceptions import InvalidArgumentException
from bayeslab.game import BayesianGame, TypeDistribution, optimal_profile, replace
from bayeslab.result import Verdict
from bayeslab.smoothness import Deviation, check_relaxed
from bayeslab.valuations import to_mask, to_items, _check_items, MAX_ITEMS
from bayeslab_core import Objective, Marker, INFINITY, JSON, to_jsonable
from bayeslab_core._logutil import get_logger
from bayeslab_core.options import forward_args

from typing import *

log = get_logger('greedy')

SELLER_TYPE = 'seller'
SELLER_ACTION = 'sell'
EMPTY_BID = ((), 0.0)
RANDOMIZED_FACTOR = 1.0 - 1.0 / math.e
OUTSIDE_SCOPE = 'outside-payment-fact-scope'

DISJOINT = 'disjoint-sets'
UNRESTRICTED = 'unrestricted'

ItemSet = Tuple[int, ...]
Bid = Tuple[ItemSet, float]
BidProfile = Tuple[Bid, ...]

PRIORITIES = pmap({
    'value': lambda i, items, value: value,
    'value-per-item': lambda i, items, value: value / len(items),
    'value-per-sqrt-size': lambda i, items, value: value / math.sqrt(len(items)),
})  # type: PMap


def _entries(entries):
    merged = {}
    for items, value in entries:
        items = tuple(sorted(set(int(j) for j in items)))
        merged[items] = max(float(value), merged.get(items, 0.0))
    return tuple(sorted(merged.items()))


@attr.s(frozen=True)
class SetBid(object):
    """
    XOR valuation over explicit sets: v(T) is the largest entry value whose
    set is contained in T.
    """
    m = attr.ib(validator=io(int))  # type: int
    entries = attr.ib(converter=_entries)  # type: Tuple[Tuple[ItemSet, float], ...]

    def __attrs_post_init__(self):
        if not 1 <= self.m <= MAX_ITEMS:
            raise InvalidArgumentException.pyexc("item count must lie in [1, {0}]".format(MAX_ITEMS), obj=self.m)
        for items, value in self.entries:
            _check_items(self.m, items)
            if not items:
                raise InvalidArgumentException("set bids need nonempty sets")
            if value < 0 or math.isnan(value):
                raise InvalidArgumentException.pyexc("set values must be nonnegative", obj=value)

    @classmethod
    def single_minded(cls, m, items, value):
        # type: (int, Iterable[int], float) -> SetBid
        return cls(m, [(tuple(items), value)])

    @classmethod
    def additive_closure(cls, values):
        # type: (Sequence[float]) -> SetBid
        """
        One entry per nonempty set, valued additively.
        """
        m = len(values)
        return cls(m, [(to_items(mask), math.fsum(values[j] for j in to_items(mask)))
                       for mask in range(1, 1 << m)])

    def sets(self):
        # type: (...) -> Tuple[ItemSet, ...]
        return tuple(items for items, _ in self.entries)

    def value_of_mask(self, mask):
        # type: (int) -> float
        best = 0.0
        for items, value in self.entries:
            need = to_mask(items)
            if mask & need == need and value > best:
                best = value
        return best

    def value(self, items):
        # type: (Iterable[int]) -> float
        return self.value_of_mask(to_mask(_check_items(self.m, items)))


def bid_value(bid, mask):
    # type: (Bid, int) -> float
    """
    b_i(T) for a single-minded bid.
    """
    items, x = bid
    if not items:
        return 0.0
    need = to_mask(items)
    return float(x) if mask & need == need else 0.0


def _feasibility(value):
    if isinstance(value, str):
        if value not in (DISJOINT, UNRESTRICTED):
            raise InvalidArgumentException.pyexc("unknown feasibility generator", obj=value)
        return value
    family = tuple(sorted(set(tuple(to_mask(s) for s in alloc) for alloc in value)))
    if not family:
        raise InvalidArgumentException("feasibility family is empty")
    return family


def _check_family(instance, attribute, family):
    if isinstance(family, str):
        return
    members = set(family)
    for alloc in family:
        if any(mask >> instance.m for mask in alloc):
            raise InvalidArgumentException.pyexc("feasible allocation uses unknown items", obj=alloc)
        for k in range(len(alloc)):
            shrunk = alloc[:k] + (0,) + alloc[k + 1:]
            if shrunk not in members:
                raise InvalidArgumentException.pyexc(
                    "feasibility family must stay feasible when a player is dropped",
                    obj=[to_items(x) for x in alloc])


def _grid(values):
    return tuple(sorted(set(float(v) for v in values)))


@attr.s(frozen=True)
class GreedyOutcome(object):
    allocation = attr.ib(converter=tuple)  # type: Tuple[ItemSet, ...]
    payments = attr.ib(converter=tuple)  # type: Tuple[float, ...]

    @property
    def revenue(self):
        # type: (...) -> float
        return math.fsum(self.payments)

    def mask_of(self, i):
        # type: (int) -> int
        return to_mask(self.allocation[i])


@attr.s(frozen=True)
class CriticalValue(object):
    value = attr.ib(converter=float)  # type: float
    flagged = attr.ib(default=False)  # type: bool

    @property
    def marker(self):
        # type: (...) -> Marker
        return Marker.FINITE if math.isfinite(self.value) else Marker.INFINITE


@attr.s(frozen=True, eq=False)
class GreedyMechanism(object):
    """
    Priority function, feasibility family and bid grid.

    ``priority`` is one of the built-in names or a callable
    ``(player, items, value) -> float`` that must be nondecreasing in
    ``value``. ``feasibility`` is ``"disjoint-sets"``, ``"unrestricted"`` or
    an explicit list of allocation vectors (one item list per player).
    """
    m = attr.ib(validator=io(int))  # type: int
    priority = attr.ib(default='value')  # type: Union[str, Callable[[int, ItemSet, float], float]]
    feasibility = attr.ib(default=DISJOINT, converter=_feasibility,
                          validator=_check_family)  # type: Union[str, Tuple[Tuple[int, ...], ...]]
    grid = attr.ib(default=(0.0, 1.0), converter=_grid)  # type: Tuple[float, ...]
    _cache = attr.ib(factory=dict, init=False, repr=False)  # type: Dict[Any, Any]

    def __attrs_post_init__(self):
        if not 1 <= self.m <= MAX_ITEMS:
            raise InvalidArgumentException.pyexc("item count must lie in [1, {0}]".format(MAX_ITEMS), obj=self.m)
        if isinstance(self.priority, str) and self.priority not in PRIORITIES:
            raise InvalidArgumentException.pyexc("unknown priority", obj=self.priority)
        if not self.grid or self.grid[0] != 0.0 or len(self.grid) < 2:
            raise InvalidArgumentException.pyexc("bid grid must start at 0 and hold a positive value",
                                                 obj=self.grid)

    @property
    def priority_name(self):
        # type: (...) -> str
        return self.priority if isinstance(self.priority, str) else getattr(self.priority, '__name__', 'custom')

    @property
    def rank(self):
        # type: (...) -> Callable[[int, ItemSet, float], float]
        return PRIORITIES[self.priority] if isinstance(self.priority, str) else self.priority

    @property
    def grid_step(self):
        # type: (...) -> float
        return min(b - a for a, b in zip(self.grid, self.grid[1:]))

    @property
    def candidate_masks(self):
        # type: (...) -> Tuple[int, ...]
        """
        Nonempty item sets in shortlex order.
        """
        if 'masks' not in self._cache:
            self._cache['masks'] = tuple(sorted(range(1, 1 << self.m),
                                                key=lambda mask: (bin(mask).count('1'), to_items(mask))))
        return self._cache['masks']

    @property
    def critical_grid(self):
        # type: (...) -> Tuple[float, ...]
        """
        The bid grid extended in grid steps up to m times its maximum plus a
        step, so that critical values above the largest bid can be found.
        """
        if 'critical_grid' not in self._cache:
            step = self.grid_step
            top = self.m * self.grid[-1] + step
            levels = int(math.ceil(top / step - 1e-9))
            self._cache['critical_grid'] = _grid(self.grid + tuple(k * step for k in range(levels + 1)))
        return self._cache['critical_grid']

    def audit_priority(self, n):
        # type: (int) -> None
        """
        :raise: :exc:`~bayeslab.exceptions.InvalidArgumentException` if the
            priority decreases in the bid value somewhere on the grid
        """
        rank = self.rank
        grid = self.critical_grid
        for i in range(n):
            for mask in self.candidate_masks:
                items = to_items(mask)
                previous = None
                for x in grid:
                    r = rank(i, items, x)
                    if previous is not None and r < previous:
                        raise InvalidArgumentException.pyexc(
                            "priority is not monotone in the bid value", obj=(i, items, x))
                    previous = r

    def allows(self, alloc, i, mask):
        # type: (Sequence[Optional[int]], int, int) -> bool
        if self.feasibility == UNRESTRICTED:
            return True
        if self.feasibility == DISJOINT:
            taken = 0
            for other in alloc:
                if other:
                    taken |= other
            return not taken & mask
        for candidate in self.feasibility:
            if len(candidate) == len(alloc) and candidate[i] == mask and \
                    all(a is None or a == c for a, c in zip(alloc, candidate)):
                return True
        return False

    def feasible(self, masks):
        # type: (Sequence[int]) -> bool
        if self.feasibility == UNRESTRICTED:
            return True
        if self.feasibility == DISJOINT:
            taken = 0
            for mask in masks:
                if taken & mask:
                    return False
                taken |= mask
            return True
        return tuple(masks) in set(self.feasibility)


def run_greedy(mech, bids):
    # type: (GreedyMechanism, BidProfile) -> GreedyOutcome
    """
    Allocate by repeatedly taking the feasible (player, set) pair of
    highest priority; ties go to the lowest player, then the shortlex-first
    set. Pairs of zero priority are still allocated. Each winner pays its
    bid on the allocated set.
    """
    n = len(bids)
    rank = mech.rank
    alloc = [None] * n  # type: List[Optional[int]]
    remaining = list(range(n))
    while remaining:
        best = None
        for i in remaining:
            for mask in mech.candidate_masks:
                if not mech.allows(alloc, i, mask):
                    continue
                r = rank(i, to_items(mask), bid_value(bids[i], mask))
                if best is None or r > best[0]:
                    best = (r, i, mask)
        if best is None:
            break
        _, i, mask = best
        alloc[i] = mask
        remaining.remove(i)
    masks = [a or 0 for a in alloc]
    return GreedyOutcome(allocation=[to_items(mask) for mask in masks],
                         payments=[bid_value(bids[i], masks[i]) for i in range(n)])


_cached_greedy = functools.lru_cache(maxsize=1 << 16)(run_greedy)


def wins(mech, bids, i, items, x):
    # type: (GreedyMechanism, BidProfile, int, ItemSet, float) -> bool
    need = to_mask(items)
    outcome = _cached_greedy(mech, replace(tuple(bids), i, (tuple(items), float(x))))
    return outcome.mask_of(i) & need == need


def critical_value(mech, i, items, bids):
    # type: (GreedyMechanism, int, Iterable[int], BidProfile) -> CriticalValue
    """
    Smallest value on the critical grid with which a single-minded bid on
    ``items`` wins a superset of ``items`` against the other bids.

    Binary search relies on a win indicator that is monotone in the bid;
    if the bracket found does not check out the grid is scanned linearly
    and the result is flagged. Infinity means no grid value wins.
    """
    items = tuple(sorted(items))
    if not items:
        return CriticalValue(0.0)
    bids = tuple(bids)
    key = ('critical', i, items, bids[:i] + bids[i + 1:])
    if key in mech._cache:
        return mech._cache[key]
    grid = mech.critical_grid
    result = None
    if wins(mech, bids, i, items, grid[-1]):
        lo, hi = 0, len(grid) - 1
        while lo < hi:
            mid = (lo + hi) // 2
            if wins(mech, bids, i, items, grid[mid]):
                hi = mid
            else:
                lo = mid + 1
        if lo == 0 or not wins(mech, bids, i, items, grid[lo - 1]):
            result = CriticalValue(grid[lo])
    if result is None:
        indicator = [wins(mech, bids, i, items, x) for x in grid]
        flagged = any(a and not b for a, b in zip(indicator, indicator[1:]))
        first = next((x for x, won in zip(grid, indicator) if won), INFINITY)
        if flagged:
            log.warning("win indicator of player %d on %r is not monotone; critical value by linear scan",
                        i, items)
        result = CriticalValue(first, flagged)
    mech._cache[key] = result
    return result


def _best_allocation(mech, options):
    # type: (GreedyMechanism, Sequence[Sequence[Tuple[int, float]]]) -> Tuple[Tuple[int, ...], float]
    best, best_value = None, None
    for combo in itertools.product(*options):
        masks = tuple(mask for mask, _ in combo)
        if not mech.feasible(masks):
            continue
        value = math.fsum(v for _, v in combo)
        if best is None or value > best_value:
            best, best_value = masks, value
    if best is None:
        return tuple(0 for _ in options), 0.0
    return best, best_value


def optimal_set_allocation(mech, valuations):
    # type: (GreedyMechanism, Sequence[SetBid]) -> Tuple[Tuple[ItemSet, ...], float]
    """
    Welfare-optimal feasible allocation; each player receives nothing or one
    of its valuation's sets.
    """
    options = [[(0, 0.0)] + [(to_mask(items), value) for items, value in val.entries] for val in valuations]
    masks, value = _best_allocation(mech, options)
    return tuple(to_items(mask) for mask in masks), value


def optimal_bid_allocation(mech, bids):
    # type: (GreedyMechanism, BidProfile) -> Tuple[Tuple[ItemSet, ...], float]
    """
    Feasible allocation maximizing the declared value sum under ``bids``.
    """
    options = [[(0, 0.0)] + ([(to_mask(items), float(x))] if items else []) for items, x in bids]
    masks, value = _best_allocation(mech, options)
    return tuple(to_items(mask) for mask in masks), value


@attr.s(frozen=True)
class ApproximationAudit(object):
    factor = attr.ib(converter=float)  # type: float
    marker = attr.ib(validator=io(Marker))  # type: Marker
    witness = attr.ib(default=None)  # type: Optional[BidProfile]
    checked = attr.ib(default=0)  # type: int

    def as_dict(self):
        # type: (...) -> Dict[str, JSON]
        return {'factor': to_jsonable(self.factor), 'marker': self.marker.value,
                'witness': to_jsonable(self.witness), 'checked': self.checked}


def approximation_factor(mech, profiles):
    # type: (GreedyMechanism, Iterable[BidProfile]) -> ApproximationAudit
    """
    Largest ratio of the optimal declared value to the greedy's declared
    value over ``profiles``; a lower bound on the mechanism's true factor.
    """
    worst, witness, checked = 1.0, None, 0
    for bids in profiles:
        bids = tuple(bids)
        checked += 1
        _, optimum = optimal_bid_allocation(mech, bids)
        achieved = _cached_greedy(mech, bids).revenue
        if optimum <= 0.0:
            continue
        if achieved <= 0.0:
            return ApproximationAudit(INFINITY, Marker.INFINITE, bids, checked)
        ratio = optimum / achieved
        if ratio > worst:
            worst, witness = ratio, bids
    return ApproximationAudit(worst, Marker.FINITE, witness, checked)


def resolve_c(mech, c, profiles=()):
    # type: (GreedyMechanism, Any, Iterable[BidProfile]) -> Tuple[float, str]
    """
    The approximation factor and where it came from: ``'certified'`` takes
    :func:`certified_c`, ``'measured'`` the :func:`approximation_factor`
    over ``profiles``, and a number is used as supplied.
    """
    if isinstance(c, str):
        if c == 'certified':
            return certified_c(mech), 'certified'
        if c == 'measured':
            audit = approximation_factor(mech, profiles)
            log.info("measured approximation factor %r over %d bid profiles", audit.factor, audit.checked)
            return audit.factor, 'measured'
        raise InvalidArgumentException.pyexc("unknown approximation factor source", obj=c)
    return float(c), 'supplied'


def check_payment_fact(mech, bids, alternative, c, *options, **kwargs):
    # type: (GreedyMechanism, BidProfile, Sequence[Iterable[int]], Any, Any, Any) -> Verdict
    """
    Sum over players of the critical value of their set in
    ``alternative`` is at most ``c`` times the greedy's revenue under
    ``bids``. The default slack is one grid step per player.

    A failure marks the mechanism as outside the fact's scope and is
    flagged ``outside-payment-fact-scope``.
    """
    c_source = kwargs.pop('c_source', None)
    final = forward_args(kwargs, *options)
    bids = tuple(bids)
    n = len(bids)
    if not mech.feasible([to_mask(s) for s in alternative]):
        raise InvalidArgumentException.pyexc("alternative allocation is not feasible",
                                             obj=[tuple(s) for s in alternative])
    c, source = resolve_c(mech, c, [bids])
    explicit = kwargs.get('slack') is not None or any(o and 'slack' in o for o in options)
    slack = float(final['slack']) if explicit else n * mech.grid_step
    thresholds = [critical_value(mech, i, alternative[i], bids) for i in range(n)]
    lhs = math.fsum(th.value for th in thresholds)
    revenue = _cached_greedy(mech, bids).revenue
    margin = c * revenue - lhs
    passed = margin >= -(slack + final['tolerance'])
    flags = ('non-monotone',) if any(th.flagged for th in thresholds) else ()
    if not passed:
        flags += (OUTSIDE_SCOPE,)
    return Verdict(label='payment-fact(c={0!r})'.format(c), passed=bool(passed), worst_margin=margin,
                   witness={'bids': bids, 'alternative': [tuple(s) for s in alternative],
                            'critical_values': [th.value for th in thresholds], 'revenue': revenue},
                   checked=1, slack=slack, parameters={'c': c, 'c_source': c_source or source}, flags=flags)


def feasible_allocations(mech, n):
    # type: (GreedyMechanism, int) -> Iterator[Tuple[ItemSet, ...]]
    """
    Every feasible allocation vector for ``n`` players, empty sets included.
    """
    if isinstance(mech.feasibility, tuple):
        for alloc in mech.feasibility:
            if len(alloc) == n:
                yield tuple(to_items(mask) for mask in alloc)
        return
    for masks in itertools.product(range(1 << mech.m), repeat=n):
        if mech.feasible(masks):
            yield tuple(to_items(mask) for mask in masks)


def check_payment_fact_all(mech, profiles, c, *options, **kwargs):
    # type: (GreedyMechanism, Iterable[BidProfile], Any, Any, Any) -> Verdict
    """
    :func:`check_payment_fact` over every profile and every feasible
    alternative allocation; the verdict keeps the worst case. With
    ``c='measured'`` the factor is measured over the same profiles.
    """
    if isinstance(c, str) and c == 'measured':
        profiles = tuple(tuple(b) for b in profiles)
    c, source = resolve_c(mech, c, profiles)
    worst = None
    checked = 0
    flags = set()
    alternatives = None
    for bids in profiles:
        bids = tuple(bids)
        if alternatives is None:
            alternatives = tuple(feasible_allocations(mech, len(bids)))
        for alternative in alternatives:
            verdict = check_payment_fact(mech, bids, alternative, c, *options, c_source=source, **kwargs)
            checked += 1
            flags.update(verdict.flags)
            if worst is None or verdict.worst_margin < worst.worst_margin:
                worst = verdict
    if worst is None:
        return Verdict(label='payment-fact(c={0!r})'.format(c), passed=True, worst_margin=INFINITY,
                       parameters={'c': c, 'c_source': source})
    if not worst.passed:
        log.warning("payment fact FAILED for %s c=%r at %r; mechanism is outside the fact's scope",
                    source, c, to_jsonable(worst.witness))
    return attr.evolve(worst, checked=checked, flags=tuple(sorted(flags)))


@attr.s(frozen=True, eq=False)
class GreedyAuction(object):
    """
    A greedy mechanism played by bidders with private :class:`SetBid`
    valuations. A bidder may bid on any set some type of theirs values,
    with any grid value, or submit the empty bid.
    """
    mechanism = attr.ib(validator=io(GreedyMechanism))  # type: GreedyMechanism
    bidder_types = attr.ib(converter=tuple)  # type: Tuple[TypeDistribution, ...]
    valuations = attr.ib(converter=pmap)  # type: PMap
    _cache = attr.ib(factory=dict, init=False, repr=False)  # type: Dict[Any, Any]

    def __attrs_post_init__(self):
        if not self.bidder_types:
            raise InvalidArgumentException("an auction needs at least one bidder")
        for i, dist in enumerate(self.bidder_types):
            for label in dist.support:
                if label not in self.valuations:
                    raise InvalidArgumentException.pyexc(
                        "bidder {0} refers to unknown valuation {1!r}".format(i, label))
        for label, val in self.valuations.items():
            if val.m != self.m:
                raise InvalidArgumentException.pyexc(
                    "valuation {0!r} is over {1} items, mechanism has {2}".format(label, val.m, self.m))
        if not isinstance(self.mechanism.priority, str):
            self.mechanism.audit_priority(self.n)

    @property
    def n(self):
        # type: (...) -> int
        return len(self.bidder_types)

    @property
    def m(self):
        # type: (...) -> int
        return self.mechanism.m

    @property
    def seller(self):
        # type: (...) -> int
        return self.n

    @property
    def grid_step(self):
        # type: (...) -> float
        return self.mechanism.grid_step

    def bids_for(self, i):
        # type: (int) -> Tuple[Bid, ...]
        """
        Bidder i's actions: the empty bid plus every positive grid value on
        every set valued by one of i's types.
        """
        key = ('bids', i)
        if key not in self._cache:
            sets = sorted({items for label in self.bidder_types[i].support
                           for items in self.valuations[label].sets()})
            positive = [x for x in self.mechanism.grid if x > 0]
            self._cache[key] = (EMPTY_BID,) + tuple((items, x) for items in sets for x in positive)
        return self._cache[key]

    def bid_profiles(self):
        # type: (...) -> Iterator[BidProfile]
        return itertools.product(*(self.bids_for(i) for i in range(self.n)))

    def optimal_sets(self, t):
        # type: (Sequence[Any]) -> Tuple[Tuple[ItemSet, ...], float]
        key = ('opt', tuple(t[:self.n]))
        if key not in self._cache:
            self._cache[key] = optimal_set_allocation(self.mechanism,
                                                      [self.valuations[t[i]] for i in range(self.n)])
        return self._cache[key]

    def snap_down(self, x):
        # type: (float) -> float
        return max(b for b in self.mechanism.grid if b <= x + 1e-12)

    def to_game(self):
        # type: (...) -> BayesianGame
        if 'game' in self._cache:
            return self._cache['game']
        n, mech = self.n, self.mechanism

        def evaluator(i, t_i, a):
            outcome = _cached_greedy(mech, tuple(a[:n]))
            if i == n:
                return outcome.revenue
            return self.valuations[t_i].value_of_mask(outcome.mask_of(i)) - outcome.payments[i]

        action_sets = {}
        for i, dist in enumerate(self.bidder_types):
            for label in dist.support:
                action_sets[(i, label)] = self.bids_for(i)
        action_sets[(n, SELLER_TYPE)] = (SELLER_ACTION,)

        def optimizer(t):
            return self._realize_optimum(self._cache['game'], t)

        game = BayesianGame(type_dists=self.bidder_types + (TypeDistribution.singleton(SELLER_TYPE),),
                            action_sets=action_sets,
                            evaluator=evaluator,
                            objective=Objective.UTILITY,
                            family='greedy-auction',
                            default_epsilon=self.grid_step,
                            optimizer=optimizer,
                            metadata={'priority': mech.priority_name, 'items': self.m,
                                      'grid_step': self.grid_step})
        self._cache['game'] = game
        return game

    def _realize_optimum(self, game, t):
        # type: (BayesianGame, Sequence[Any]) -> Tuple[Tuple[Any, ...], float]
        sets, value = self.optimal_sets(t)
        top = self.mechanism.grid[-1]
        profile = tuple((items, top) if items else EMPTY_BID for items in sets) + (SELLER_ACTION,)
        if game.contains(tuple(t), profile):
            welfare = game.welfare(tuple(t), profile)
            if abs(welfare - value) <= 1e-9:
                return profile, welfare
        return optimal_profile(game, tuple(t), exhaustive=True)


class SingleMindedHalfDeviation(Deviation):
    """
    Bid half the value of one's optimal set, snapped down to the grid,
    single-mindedly on that set.
    """
    name = 'single-minded-half'

    def __init__(self, auction):
        # type: (GreedyAuction) -> None
        self.auction = auction

    def bid(self, t, i):
        # type: (Sequence[Any], int) -> Bid
        sets, _ = self.auction.optimal_sets(t)
        items = sets[i]
        if not items:
            return EMPTY_BID
        x = self.auction.snap_down(self.auction.valuations[t[i]].value(items) / 2.0)
        return (items, x) if x > 0 else EMPTY_BID

    def deviator_utility(self, game, t, a, i):
        if i == self.auction.seller:
            return game.payoff(i, t[i], a)
        return game.payoff(i, t[i], replace(a, i, self.bid(t, i)))


class SingleMindedRandomizedDeviation(Deviation):
    """
    Random single-minded bid on one's optimal set with density 1/(a - b) on
    [0, a (1 - 1/e)], a being the set's value. Its winning utility is
    counted in closed form against the critical value: max(0, a (1 - 1/e) - theta).
    """
    name = 'single-minded-randomized'

    def __init__(self, auction):
        # type: (GreedyAuction) -> None
        self.auction = auction

    def deviator_utility(self, game, t, a, i):
        auction = self.auction
        if i == auction.seller:
            return game.payoff(i, t[i], a)
        sets, _ = auction.optimal_sets(t)
        items = sets[i]
        if not items:
            return 0.0
        value = auction.valuations[t[i]].value(items)
        theta = critical_value(auction.mechanism, i, items, tuple(a[:auction.n])).value
        return max(0.0, value * RANDOMIZED_FACTOR - theta)

    def equilibrium_slack(self, game):
        return self.auction.n * self.auction.grid_step


def certified_c(mech):
    # type: (GreedyMechanism) -> float
    """
    Approximation factor the built-in priorities guarantee for
    single-minded bids: the number of items.
    """
    return float(mech.m)


def check_greedy_smoothness(auction, c='certified', randomized=False, *options, **kwargs):
    # type: (GreedyAuction, Any, bool, Any, Any) -> Verdict
    """
    Relaxed smoothness with K = {seller}: (1/2, c - 1) for the half-value
    single-minded deviation, (1 - 1/e, c - 1) for the randomized one. The
    default slack is one grid step per bidder.

    ``c`` is resolved by :func:`resolve_c` over the auction's bid profiles;
    the verdict records it under ``c`` and ``c_source``.
    """
    c, source = resolve_c(auction.mechanism, c, auction.bid_profiles())
    if c < 1:
        raise InvalidArgumentException.pyexc("approximation factor must be at least 1", obj=c)
    if kwargs.get('slack') is None and not any(o and 'slack' in o for o in options):
        kwargs['slack'] = auction.n * auction.grid_step
    if randomized:
        deviation, lam = SingleMindedRandomizedDeviation(auction), RANDOMIZED_FACTOR
    else:
        deviation, lam = SingleMindedHalfDeviation(auction), 0.5
    verdict = check_relaxed(auction.to_game(), lam, c - 1.0, deviation, [auction.seller], *options, **kwargs)
    return attr.evolve(verdict, parameters=verdict.parameters.update({'c': c, 'c_source': source}))


def single_minded_auction(wants,  # type: Sequence[Tuple[Iterable[int], float]]
                          m,  # type: int
                          step=0.5,  # type: float
                          high=None,  # type: Optional[float]
                          priority='value',  # type: Any
                          feasibility=DISJOINT  # type: Any
                          ):
    # type: (...) -> GreedyAuction
    """
    Complete-information auction: bidder i wants ``wants[i] = (items, value)``.
    """
    high = max(v for _, v in wants) if high is None else high
    levels = int(round(high / step))
    mech = GreedyMechanism(m=m, priority=priority, feasibility=feasibility,
                           grid=[k * step for k in range(levels + 1)])
    valuations = {'sm{0}'.format(i): SetBid.single_minded(m, items, value)
                  for i, (items, value) in enumerate(wants)}
    return GreedyAuction(mechanism=mech,
                         bidder_types=[TypeDistribution.singleton('sm{0}'.format(i)) for i in range(len(wants))],
                         valuations=valuations)


def random_single_minded_auction(rng,  # type: np.random.Generator
                                 n,  # type: int
                                 m,  # type: int
                                 types=1,  # type: int
                                 step=0.5,  # type: float
                                 high=2.0,  # type: float
                                 priority='value'  # type: Any
                                 ):
    # type: (...) -> GreedyAuction
    """
    Bidders with ``types`` equiprobable single-minded types; sets uniform
    over nonempty sets, values uniform over positive grid points.
    """
    levels = int(round(high / step))
    mech = GreedyMechanism(m=m, priority=priority, feasibility=DISJOINT,
                           grid=[k * step for k in range(levels + 1)])
    valuations, dists = {}, []
    for i in range(n):
        labels = []
        for k in range(types):
            label = 'g{0}.{1}'.format(i, k)
            mask = int(rng.integers(1, 1 << m))
            valuations[label] = SetBid.single_minded(m, to_items(mask), float(rng.integers(1, levels + 1)) * step)
            labels.append(label)
        dists.append(TypeDistribution.uniform(labels))
    return GreedyAuction(mechanism=mech, bidder_types=dists, valuations=valuations)
