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
Simultaneous single-item auctions (item bidding) with combinatorial bidders.

Bidders ``0 .. n-1`` submit one grid bid per item; the seller is player
``n`` with the single type ``"seller"``, the single action ``"sell"`` and
utility equal to the revenue.
"""
import bisect
import enum
import functools
import itertools
import math

import attr
import numpy as np
from attr.validators import instance_of as io
from pyrsistent import pmap, PMap

from bayeslab.exceptions import InvalidArgumentException, WrongVariantException
from bayeslab.game import BayesianGame, TypeDistribution, optimal_profile, replace
from bayeslab.result import Verdict
from bayeslab.smoothness import Deviation, check_semi
from bayeslab.valuations import Valuation, optimal_allocation, to_mask, unit_demand, additive, \
    random_xos, random_subadditive_table
from bayeslab_core import Objective
from bayeslab_core._logutil import get_logger
from bayeslab_core.options import forward_args

from typing import *

log = get_logger('item_auctions')

SELLER_TYPE = 'seller'
SELLER_ACTION = 'sell'
RANDOMIZED_FACTOR = 1.0 - 1.0 / math.e

BidVector = Tuple[float, ...]
BidProfile = Tuple[BidVector, ...]


class Pricing(enum.Enum):
    FIRST_PRICE = 'first-price'
    SECOND_PRICE = 'second-price'


class DeviationKind(enum.Enum):
    HALF = 'half'
    RANDOMIZED = 'randomized'


def bid_grid(step, high):
    # type: (float, float) -> Tuple[float, ...]
    """
    The grid {0, step, 2 step, ..., high}.
    """
    levels = int(round(high / step))
    return tuple(k * step for k in range(levels + 1))


def _grid(values):
    return tuple(sorted(set(float(v) for v in values)))


def _check_grid(instance, attribute, grid):
    if not grid or grid[0] != 0.0:
        raise InvalidArgumentException.pyexc("bid grid must be nonnegative and contain 0", obj=grid)


@attr.s(frozen=True)
class Outcome(object):
    winners = attr.ib(converter=tuple)  # type: Tuple[int, ...]
    prices = attr.ib(converter=tuple)  # type: Tuple[float, ...]

    def won_by(self, i):
        # type: (int) -> Tuple[int, ...]
        return tuple(j for j, w in enumerate(self.winners) if w == i)

    def mask_of(self, i):
        # type: (int) -> int
        return to_mask(self.won_by(i))

    @property
    def revenue(self):
        # type: (...) -> float
        return math.fsum(self.prices)


@attr.s(frozen=True, eq=False)
class ItemAuction(object):
    """
    Per-item first- or second-price auctions on a shared bid grid.

    ``bidder_types`` holds one distribution per bidder over valuation labels
    and ``valuations`` maps each label to its valuation. Under second-price
    pricing ``no_overbidding`` (on unless switched off) restricts every bid
    on item j to at most v({j}).
    """
    m = attr.ib(validator=io(int))  # type: int
    pricing = attr.ib(validator=io(Pricing))  # type: Pricing
    grid = attr.ib(converter=_grid, validator=_check_grid)  # type: Tuple[float, ...]
    bidder_types = attr.ib(converter=tuple)  # type: Tuple[TypeDistribution, ...]
    valuations = attr.ib(converter=pmap)  # type: PMap
    no_overbidding = attr.ib(default=None)  # type: Optional[bool]
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
                    "valuation {0!r} is over {1} items, auction has {2}".format(label, val.m, self.m))
            if max(val.singleton_values()) > self.grid[-1] + 1e-12:
                raise InvalidArgumentException.pyexc(
                    "valuation {0!r} has item values above the grid maximum".format(label))

    @property
    def n(self):
        # type: (...) -> int
        return len(self.bidder_types)

    @property
    def seller(self):
        # type: (...) -> int
        return self.n

    @property
    def grid_step(self):
        # type: (...) -> float
        if len(self.grid) < 2:
            return 0.0
        return min(b - a for a, b in zip(self.grid, self.grid[1:]))

    @property
    def overbidding_restricted(self):
        # type: (...) -> bool
        if self.no_overbidding is None:
            return self.pricing is Pricing.SECOND_PRICE
        return bool(self.no_overbidding)

    def valuation_profile(self, t):
        # type: (Sequence[Any]) -> Tuple[Valuation, ...]
        return tuple(self.valuations[t[i]] for i in range(self.n))

    def bids_for(self, label):
        # type: (Any) -> Tuple[BidVector, ...]
        key = ('bids', label)
        if key not in self._cache:
            if self.overbidding_restricted:
                caps = self.valuations[label].singleton_values()
                per_item = [tuple(b for b in self.grid if b <= caps[j] + 1e-12) for j in range(self.m)]
            else:
                per_item = [self.grid] * self.m
            self._cache[key] = tuple(itertools.product(*per_item))
        return self._cache[key]

    def snap_down(self, x):
        # type: (float) -> float
        """
        Largest grid value not above ``x``.
        """
        k = bisect.bisect_right(self.grid, x + 1e-12) - 1
        return self.grid[max(k, 0)]

    def optimal_bundles(self, t):
        # type: (Sequence[Any]) -> Tuple[Tuple[Tuple[int, ...], ...], float]
        key = ('opt', tuple(t[:self.n]))
        if key not in self._cache:
            self._cache[key] = optimal_allocation(self.valuation_profile(t), self.m)
        return self._cache[key]

    def to_game(self):
        # type: (...) -> BayesianGame
        if 'game' in self._cache:
            return self._cache['game']
        n = self.n
        outcome = functools.lru_cache(maxsize=1 << 16)(lambda bids: allocate_and_price(self, bids))

        def evaluator(i, t_i, a):
            result = outcome(tuple(a[:n]))
            if i == n:
                return result.revenue
            won = result.won_by(i)
            return self.valuations[t_i].value_of_mask(to_mask(won)) - math.fsum(result.prices[j] for j in won)

        action_sets = {}
        for i, dist in enumerate(self.bidder_types):
            for label in dist.support:
                action_sets[(i, label)] = self.bids_for(label)
        action_sets[(n, SELLER_TYPE)] = (SELLER_ACTION,)

        def optimizer(t):
            return self._realize_optimum(self._cache['game'], t)

        game = BayesianGame(type_dists=self.bidder_types + (TypeDistribution.singleton(SELLER_TYPE),),
                            action_sets=action_sets,
                            evaluator=evaluator,
                            objective=Objective.UTILITY,
                            family='item-auction',
                            default_epsilon=self.grid_step,
                            optimizer=optimizer,
                            metadata={'pricing': self.pricing.value, 'items': self.m,
                                      'grid_step': self.grid_step})
        self._cache['game'] = game
        return game

    def _realize_optimum(self, game, t):
        # type: (BayesianGame, Sequence[Any]) -> Tuple[Tuple[Any, ...], float]
        bundles, _ = self.optimal_bundles(t)
        positive = [b for b in self.grid if b > 0]
        if positive:
            low = positive[0]
            bids = []
            for i, bundle in enumerate(bundles):
                bids.append(tuple(low if j in bundle else 0.0 for j in range(self.m)))
            profile = tuple(bids) + (SELLER_ACTION,)
            if game.contains(tuple(t), profile):
                return profile, game.welfare(tuple(t), profile)
        return optimal_profile(game, tuple(t), exhaustive=True)


def allocate_and_price(auction, bids):
    # type: (ItemAuction, BidProfile) -> Outcome
    """
    Each item goes to its highest bidder, ties to the lowest index. The
    price is the winning bid under first price and the highest losing bid
    under second price.
    """
    winners, prices = [], []
    for j in range(auction.m):
        column = [b[j] for b in bids]
        winner = 0
        for k in range(1, len(column)):
            if column[k] > column[winner]:
                winner = k
        if auction.pricing is Pricing.FIRST_PRICE:
            price = column[winner]
        else:
            others = [column[k] for k in range(len(column)) if k != winner]
            price = max(others) if others else 0.0
        winners.append(winner)
        prices.append(float(price))
    return Outcome(winners, prices)


def half_bid_deviation(auction, t, i):
    # type: (ItemAuction, Sequence[Any], int) -> BidVector
    """
    Bid half the supporting additive value on each item of i's optimal
    bundle, snapped down to the grid; zero elsewhere.
    """
    bundles, _ = auction.optimal_bundles(t)
    bundle = bundles[i]
    if not bundle:
        return tuple(0.0 for _ in range(auction.m))
    support = auction.valuations[t[i]].supporting_additive(bundle)
    return tuple(auction.snap_down(support[j] / 2.0) if j in bundle else 0.0 for j in range(auction.m))


def competing_bids(auction, bids, i):
    # type: (ItemAuction, BidProfile, int) -> Tuple[float, ...]
    return tuple(max([bids[k][j] for k in range(auction.n) if k != i] or [0.0])
                 for j in range(auction.m))


def randomized_deviation_expected_utility(auction, t, i, bids):
    # type: (ItemAuction, Sequence[Any], int, BidProfile) -> float
    """
    Expected utility of bidding on each item j of i's optimal bundle a
    random amount with density 1/(a_j - b) on [0, a_j (1 - 1/e)].

    The closed form is the sum over the bundle of
    max(0, a_j (1 - 1/e) - p_j), with p_j the highest competing bid.
    """
    if auction.pricing is not Pricing.FIRST_PRICE:
        raise WrongVariantException("the randomized deviation is defined for first-price auctions")
    bundles, _ = auction.optimal_bundles(t)
    bundle = bundles[i]
    if not bundle:
        return 0.0
    support = auction.valuations[t[i]].supporting_additive(bundle)
    thresholds = competing_bids(auction, bids, i)
    return math.fsum(max(0.0, support[j] * RANDOMIZED_FACTOR - thresholds[j]) for j in bundle)


def sample_randomized_bids(a_j, rng, size):
    # type: (float, np.random.Generator, int) -> np.ndarray
    """
    Inverse-CDF draws from the density 1/(a_j - b) on [0, a_j (1 - 1/e)].
    """
    return a_j * (1.0 - np.exp(-rng.random(size)))


def monte_carlo_deviation_utility(a_j, threshold, rng, samples=10 ** 6):
    # type: (float, float, np.random.Generator, int) -> Tuple[float, float]
    """
    Sample mean and standard error of (a_j - b) 1[b > threshold].
    """
    b = sample_randomized_bids(a_j, rng, samples)
    gains = np.where(b > threshold, a_j - b, 0.0)
    return float(gains.mean()), float(gains.std(ddof=1) / math.sqrt(samples))


class HalfBidDeviation(Deviation):
    name = DeviationKind.HALF.value

    def __init__(self, auction):
        # type: (ItemAuction) -> None
        self.auction = auction

    def deviator_utility(self, game, t, a, i):
        if i == self.auction.seller:
            return game.payoff(i, t[i], a)
        return game.payoff(i, t[i], replace(a, i, half_bid_deviation(self.auction, t, i)))


class RandomizedDeviation(Deviation):
    name = DeviationKind.RANDOMIZED.value

    def __init__(self, auction):
        # type: (ItemAuction) -> None
        self.auction = auction

    def deviator_utility(self, game, t, a, i):
        if i == self.auction.seller:
            return game.payoff(i, t[i], a)
        return randomized_deviation_expected_utility(self.auction, t, i, tuple(a[:self.auction.n]))

    def equilibrium_slack(self, game):
        # random bids are off the grid; each bidder may lose up to two steps per item
        return 2.0 * self.auction.n * self.auction.m * self.auction.grid_step


def deviation_for(auction, kind):
    # type: (ItemAuction, DeviationKind) -> Deviation
    if DeviationKind(kind) is DeviationKind.HALF:
        return HalfBidDeviation(auction)
    return RandomizedDeviation(auction)


def certificate_slack(auction, kind):
    # type: (ItemAuction, DeviationKind) -> float
    """
    Grid slack of the first-price semi-smoothness check. Half bids are
    snapped down to the grid, which costs under one step for each item of
    the optimal allocation and for each deviating bidder; the larger of
    the two counts bounds the total. The randomized deviation is evaluated
    in closed form and needs none.
    """
    if DeviationKind(kind) is DeviationKind.HALF:
        return max(auction.n, auction.m) * auction.grid_step
    return 0.0


def certified_lambda(kind, beta=1.0):
    # type: (DeviationKind, float) -> float
    if DeviationKind(kind) is DeviationKind.HALF:
        return 0.5 / beta
    return RANDOMIZED_FACTOR / beta


def check_fp_semi_smoothness(auction,  # type: ItemAuction
                             lam,  # type: float
                             deviation=DeviationKind.HALF,  # type: DeviationKind
                             *options,  # type: Any
                             **kwargs  # type: Any
                             ):
    # type: (...) -> Verdict
    """
    Verify that revenue plus the deviators' utilities covers ``lam`` times
    the optimal welfare, for every type profile and grid bid profile.

    The default slack is one grid step per bidder or item, whichever count
    is larger, for the half-bid deviation (bids are snapped down to the
    grid) and zero for the randomized deviation (evaluated in closed form).
    """
    if auction.pricing is not Pricing.FIRST_PRICE:
        raise WrongVariantException("semi-smoothness certificates are checked for first-price auctions only")
    kind = DeviationKind(deviation)
    if kwargs.get('slack') is None and not any(o and 'slack' in o for o in options):
        kwargs['slack'] = certificate_slack(auction, kind)
    return check_semi(auction.to_game(), lam, 0.0, deviation_for(auction, kind), *options, **kwargs)


def check_pure_nash_optimality(auction, *options, **kwargs):
    # type: (ItemAuction, Any, Any) -> Verdict
    """
    On a complete-information first-price auction, every exact pure Nash
    equilibrium on the grid has welfare at least the optimum minus one grid
    step per bidder or item.
    """
    from bayeslab.equilibrium import pure_nash_equilibria

    if auction.pricing is not Pricing.FIRST_PRICE:
        raise WrongVariantException("pure Nash optimality applies to first-price auctions")
    if any(len(d) != 1 for d in auction.bidder_types):
        raise WrongVariantException("pure Nash optimality needs singleton type spaces")
    final = forward_args(kwargs, *options)
    game = auction.to_game()
    t = tuple(d.support[0] for d in game.type_dists)
    _, best = optimal_profile(game, t)
    slack = max(auction.n, auction.m) * auction.grid_step
    equilibria = pure_nash_equilibria(game, 0.0, *options, **kwargs)
    worst, witness = None, None
    for a in equilibria:
        margin = game.welfare(t, a) - best
        if worst is None or margin < worst:
            worst, witness = margin, a
    passed = worst is None or worst >= -(slack + final['tolerance'])
    return Verdict(label='pure-nash-optimality', passed=bool(passed),
                   worst_margin=0.0 if worst is None else worst,
                   witness=None if witness is None else {'t': t, 'a': witness},
                   checked=len(equilibria), slack=slack,
                   parameters={'optimum': best})


def random_xos_auction(rng,  # type: np.random.Generator
                       n,  # type: int
                       m,  # type: int
                       types=2,  # type: int
                       step=0.25,  # type: float
                       high=1.0,  # type: float
                       clauses=2,  # type: int
                       pricing=Pricing.FIRST_PRICE  # type: Pricing
                       ):
    # type: (...) -> ItemAuction
    """
    Bidders with ``types`` equiprobable XOS types drawn on the value grid.
    The bid grid extends one step above ``high``.
    """
    valuations, dists = {}, []
    for i in range(n):
        labels = []
        for k in range(types):
            label = 'v{0}.{1}'.format(i, k)
            valuations[label] = random_xos(rng, m, clauses=clauses, step=step, high=high)
            labels.append(label)
        dists.append(TypeDistribution.uniform(labels))
    return ItemAuction(m=m, pricing=pricing, grid=bid_grid(step, high + step),
                       bidder_types=dists, valuations=valuations)


def random_table_auction(rng,  # type: np.random.Generator
                         n,  # type: int
                         m,  # type: int
                         types=1,  # type: int
                         step=0.25,  # type: float
                         high=1.0  # type: float
                         ):
    # type: (...) -> ItemAuction
    """
    First-price auction with subadditive table bidders.
    """
    valuations, dists = {}, []
    for i in range(n):
        labels = []
        for k in range(types):
            label = 's{0}.{1}'.format(i, k)
            valuations[label] = random_subadditive_table(rng, m, step=step, high=high)
            labels.append(label)
        dists.append(TypeDistribution.uniform(labels))
    return ItemAuction(m=m, pricing=Pricing.FIRST_PRICE, grid=bid_grid(step, high + step),
                       bidder_types=dists, valuations=valuations)


def unit_demand_auction(values,  # type: Sequence[Sequence[float]]
                        step=0.25,  # type: float
                        pricing=Pricing.FIRST_PRICE  # type: Pricing
                        ):
    # type: (...) -> ItemAuction
    """
    Complete-information auction; ``values[i][j]`` is bidder i's value for item j.
    """
    high = max(max(row) for row in values)
    valuations = {'u{0}'.format(i): unit_demand(row) for i, row in enumerate(values)}
    dists = [TypeDistribution.singleton('u{0}'.format(i)) for i in range(len(values))]
    return ItemAuction(m=len(values[0]), pricing=pricing, grid=bid_grid(step, high),
                       bidder_types=dists, valuations=valuations)


def additive_auction(values, step=0.25, pricing=Pricing.FIRST_PRICE):
    # type: (Sequence[Sequence[float]], float, Pricing) -> ItemAuction
    high = max(max(row) for row in values)
    valuations = {'a{0}'.format(i): additive(row) for i, row in enumerate(values)}
    dists = [TypeDistribution.singleton('a{0}'.format(i)) for i in range(len(values))]
    return ItemAuction(m=len(values[0]), pricing=pricing, grid=bid_grid(step, high),
                       bidder_types=dists, valuations=valuations)
