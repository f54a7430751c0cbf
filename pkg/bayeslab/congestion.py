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
Weighted congestion games whose player weights are private types.

An action is ``(rate, path)``; a player of weight ``w`` must route its
whole demand, so its actions are ``(w, p)`` for each of its allowed paths.
"""
import math

import attr
import networkx as nx
import numpy as np
from attr.validators import instance_of as io
from scipy.optimize import minimize_scalar

from bayeslab.exceptions import InvalidArgumentException, InvalidActionException
from bayeslab.game import BayesianGame, TypeDistribution
from bayeslab.result import Verdict
from bayeslab.smoothness import check_universal, poa_bound
from bayeslab_core import Objective, Marker, INFINITY, JSON, to_jsonable
from bayeslab_core._logutil import get_logger
from bayeslab_core.options import forward_args

from typing import *

log = get_logger('congestion')

MAX_PATH_EDGES = 8
MAX_DEGREE = 4
LAMBDA_INFLATION = 1e-9

Path = Tuple[int, ...]
Action = Tuple[float, Path]


def _coefficients(values):
    coefficients = [float(c) for c in values]
    while len(coefficients) > 1 and coefficients[-1] == 0.0:
        coefficients.pop()
    return tuple(coefficients)


def _check_coefficients(instance, attribute, coefficients):
    if not coefficients:
        raise InvalidArgumentException("a delay needs at least one coefficient")
    if any(c < 0 or math.isnan(c) for c in coefficients):
        raise InvalidArgumentException.pyexc("delay coefficients must be nonnegative", obj=coefficients)


@attr.s(frozen=True)
class Polynomial(object):
    """
    l(x) = sum_k coefficients[k] x^k with nonnegative coefficients.
    """
    coefficients = attr.ib(converter=_coefficients, validator=_check_coefficients)  # type: Tuple[float, ...]

    @classmethod
    def monomial(cls, degree, scale=1.0):
        # type: (int, float) -> Polynomial
        return cls([0.0] * degree + [scale])

    @classmethod
    def constant(cls, value):
        # type: (float) -> Polynomial
        return cls([value])

    @property
    def degree(self):
        # type: (...) -> int
        return len(self.coefficients) - 1

    def terms(self):
        # type: (...) -> List[Tuple[int, float]]
        return [(k, c) for k, c in enumerate(self.coefficients) if c > 0]

    @property
    def homogeneous(self):
        # type: (...) -> bool
        return len(self.terms()) <= 1

    def __call__(self, x):
        # type: (float) -> float
        return math.fsum(c * x ** k for k, c in enumerate(self.coefficients))


def _paths(per_player):
    return tuple(tuple(sorted(set(tuple(sorted(set(int(e) for e in path))) for path in paths)))
                 for paths in per_player)


@attr.s(frozen=True, eq=False)
class CongestionInstance(object):
    """
    ``delays[e]`` is edge e's delay, ``paths[i]`` player i's allowed edge
    sets and ``weights[i]`` the distribution of player i's weight.
    """
    delays = attr.ib(converter=tuple)  # type: Tuple[Polynomial, ...]
    paths = attr.ib(converter=_paths)  # type: Tuple[Tuple[Path, ...], ...]
    weights = attr.ib(converter=tuple)  # type: Tuple[TypeDistribution, ...]
    _cache = attr.ib(factory=dict, init=False, repr=False)  # type: Dict[Any, Any]

    def __attrs_post_init__(self):
        if len(self.paths) != len(self.weights):
            raise InvalidArgumentException("every player needs paths and a weight distribution")
        for e, delay in enumerate(self.delays):
            if not isinstance(delay, Polynomial):
                raise InvalidArgumentException.pyexc("edge {0} has no polynomial delay".format(e), obj=delay)
        for i, paths in enumerate(self.paths):
            if not paths:
                raise InvalidArgumentException.pyexc("player {0} has no paths".format(i))
            for path in paths:
                if not path:
                    raise InvalidArgumentException.pyexc("player {0} has an empty path".format(i))
                if path[0] < 0 or path[-1] >= len(self.delays):
                    raise InvalidArgumentException.pyexc("path uses an unknown edge", obj=path)
        for i, dist in enumerate(self.weights):
            if any(not w > 0 for w in dist.support):
                raise InvalidArgumentException.pyexc("player {0} weights must be positive".format(i),
                                                     obj=dist.support)

    @property
    def n(self):
        # type: (...) -> int
        return len(self.paths)

    def actions_of(self, i, w):
        # type: (int, float) -> Tuple[Action, ...]
        return tuple((float(w), path) for path in self.paths[i])

    def loads(self, a):
        # type: (Sequence[Action]) -> List[float]
        x = [0.0] * len(self.delays)
        for rate, path in a:
            for e in path:
                x[e] += rate
        return x

    def to_game(self):
        # type: (...) -> BayesianGame
        if 'game' in self._cache:
            return self._cache['game']

        def evaluator(i, w_i, a):
            x = self.loads(a)
            return math.fsum(w_i * self.delays[e](x[e]) for e in a[i][1])

        action_sets = {(i, w): self.actions_of(i, w)
                       for i, dist in enumerate(self.weights) for w in dist.support}
        game = BayesianGame(type_dists=self.weights,
                            action_sets=action_sets,
                            evaluator=evaluator,
                            objective=Objective.COST,
                            family='congestion',
                            metadata={'edges': len(self.delays),
                                      'degree': max(d.degree for d in self.delays) if self.delays else 0})
        self._cache['game'] = game
        return game


def player_cost(inst, i, w_i, a):
    # type: (CongestionInstance, int, float, Sequence[Action]) -> float
    """
    sum over e in p_i of w_i l_e(x_e(a)).

    :raise: :exc:`~bayeslab.exceptions.InvalidActionException` when a
        player's rate is not its weight or its path is not allowed
    """
    rate, path = a[i]
    if rate != w_i:
        raise InvalidActionException.pyexc("player {0} routes {1!r} but has weight {2!r}".format(i, rate, w_i))
    if tuple(path) not in inst.paths[i]:
        raise InvalidActionException.pyexc("player {0} uses a path outside its list".format(i), obj=path)
    x = inst.loads(a)
    return math.fsum(w_i * inst.delays[e](x[e]) for e in path)


def social_cost(inst, a):
    # type: (CongestionInstance, Sequence[Action]) -> float
    """
    sum_e x_e l_e(x_e); equals the sum of player costs.
    """
    x = inst.loads(a)
    return math.fsum(load * delay(load) for load, delay in zip(x, inst.delays) if load > 0)


def simple_paths(edges, source, target, directed=True):
    # type: (Sequence[Tuple[Any, Any]], Any, Any, bool) -> Tuple[Path, ...]
    """
    Every simple source-target path of a small multigraph, as a sorted tuple
    of edge indices into ``edges``.
    """
    if len(edges) > MAX_PATH_EDGES:
        raise InvalidArgumentException.pyexc("path generation is limited to {0} edges".format(MAX_PATH_EDGES),
                                             obj=len(edges))
    graph = nx.MultiDiGraph() if directed else nx.MultiGraph()
    for index, (u, v) in enumerate(edges):
        graph.add_edge(u, v, key=index)
    if source not in graph or target not in graph:
        return ()
    found = set()
    for path in nx.all_simple_edge_paths(graph, source, target):
        found.add(tuple(sorted(edge[2] for edge in path)))
    return tuple(sorted(found))


def _ratio_grid():
    # type: (...) -> np.ndarray
    return np.unique(np.concatenate([np.linspace(0.0, 20.0, 4001), np.geomspace(20.0, 1e4, 2001)]))


def _load_grid(high=10.0, points=41):
    # type: (float, int) -> np.ndarray
    return np.linspace(0.0, high, points)


def check_pointwise_condition(delay,  # type: Polynomial
                              lam,  # type: float
                              mu,  # type: float
                              domain=None,  # type: Optional[Sequence[float]]
                              *options,  # type: Any
                              **kwargs  # type: Any
                              ):
    # type: (...) -> Verdict
    """
    x* l(x + x*) <= lam x* l(x*) + mu x l(x).

    Checked on every (x, x*) pair of ``domain`` (default: 41 loads in
    [0, 10]) and, per monomial term c x^k of the delay, exactly in the
    ratio r = x / x*: (1 + r)^k <= lam + mu r^(k+1) on a dense grid up to
    r = 1e4. A polynomial with nonnegative coefficients passes when all its
    monomials do.
    """
    final = forward_args(kwargs, *options)
    if not lam > 0:
        raise InvalidArgumentException.pyexc("lambda must be positive", obj=lam)
    if not 0 <= mu < 1:
        log.warning("mu=%r is outside [0, 1); the cost bound is not finite", mu)
    loads = np.asarray(_load_grid() if domain is None else domain, dtype=float)
    x, xs = np.meshgrid(loads, loads, indexing='ij')
    coefficients = np.array(delay.coefficients)

    def poly(values):
        return sum(c * values ** k for k, c in enumerate(coefficients))

    grid_margin = lam * xs * poly(xs) + mu * x * poly(x) - xs * poly(x + xs)
    flat = int(np.argmin(grid_margin))
    worst = float(grid_margin.flat[flat])
    witness = {'kind': 'grid', 'x': float(x.flat[flat]), 'x_star': float(xs.flat[flat])}

    ratios = _ratio_grid()
    for k, c in delay.terms():
        term_margin = c * (lam + mu * ratios ** (k + 1) - (1.0 + ratios) ** k)
        index = int(np.argmin(term_margin))
        if term_margin[index] < worst:
            worst = float(term_margin[index])
            witness = {'kind': 'ratio', 'degree': k, 'r': float(ratios[index])}

    passed = worst >= -(final['slack'] + final['tolerance'])
    if not passed:
        log.warning("pointwise condition FAILED for (%r, %r) at %r", lam, mu, witness)
    return Verdict(label='pointwise(lambda={0!r}, mu={1!r})'.format(lam, mu), passed=bool(passed),
                   worst_margin=worst, witness=witness, checked=int(grid_margin.size + len(ratios) * len(delay.terms())),
                   slack=final['slack'], parameters={'lambda': lam, 'mu': mu, 'coefficients': delay.coefficients})


@attr.s(frozen=True)
class DelayClass(object):
    """
    Polynomial delays of degree at most ``degree`` with nonnegative
    coefficients, or only the monomial of that degree.
    """
    degree = attr.ib(validator=io(int))  # type: int
    monomials_only = attr.ib(default=False)  # type: bool

    def __attrs_post_init__(self):
        if not 0 <= self.degree <= MAX_DEGREE:
            raise InvalidArgumentException.pyexc("delay degree must lie in [0, {0}]".format(MAX_DEGREE),
                                                 obj=self.degree)

    def degrees(self):
        # type: (...) -> Tuple[int, ...]
        return (self.degree,) if self.monomials_only else tuple(range(self.degree + 1))

    def extremal_delays(self):
        # type: (...) -> Tuple[Polynomial, ...]
        return tuple(Polynomial.monomial(k) for k in self.degrees())


def _sup_excess(k, mu):
    # type: (int, float) -> float
    """
    sup over r >= 0 of (1 + r)^k - mu r^(k+1).
    """
    if k == 0:
        return 1.0
    if mu <= 0:
        return INFINITY
    ratios = np.geomspace(1e-6, 1e7, 2001)
    values = (1.0 + ratios) ** k - mu * ratios ** (k + 1)
    index = int(np.argmax(values))
    lo = ratios[max(index - 1, 0)]
    hi = ratios[min(index + 1, len(ratios) - 1)]
    res = minimize_scalar(lambda r: -((1.0 + r) ** k - mu * r ** (k + 1)), bounds=(lo, hi), method='bounded',
                          options={'xatol': 1e-12})
    return max(float(values[index]), float(-res.fun), 1.0)


def lambda_for(delay_class, mu):
    # type: (DelayClass, float) -> float
    return max(_sup_excess(k, mu) for k in delay_class.degrees())


@attr.s(frozen=True)
class DelayClassCertificate(object):
    delay_class = attr.ib(validator=io(DelayClass))  # type: DelayClass
    lam = attr.ib()  # type: Optional[float]
    mu = attr.ib()  # type: Optional[float]
    bound = attr.ib()  # type: float
    marker = attr.ib(validator=io(Marker))  # type: Marker

    def verify(self, domain=None, *options, **kwargs):
        # type: (Optional[Sequence[float]], Any, Any) -> List[Verdict]
        if self.lam is None:
            raise InvalidArgumentException("an unbounded certificate has no parameters to verify")
        return [check_pointwise_condition(delay, self.lam, self.mu, domain, *options, **kwargs)
                for delay in self.delay_class.extremal_delays()]

    def as_dict(self):
        # type: (...) -> Dict[str, JSON]
        return {'degree': self.delay_class.degree, 'monomials_only': self.delay_class.monomials_only,
                'lambda': self.lam, 'mu': self.mu, 'bound': to_jsonable(self.bound),
                'marker': self.marker.value}


def best_delay_parameters(delay_class):
    # type: (DelayClass) -> DelayClassCertificate
    """
    Minimize lam / (1 - mu) over mu in (0, 1), with lam(mu) the smallest
    value passing the pointwise condition for every delay in the class.
    The returned lam is inflated by 1e-9 so exact checks pass.
    """
    if max(delay_class.degrees()) == 0:
        return DelayClassCertificate(delay_class, 1.0, 0.0, 1.0, Marker.FINITE)

    def objective(mu):
        lam = lambda_for(delay_class, mu)
        return poa_bound(lam, mu, Objective.COST) if math.isfinite(lam) else INFINITY

    grid = np.linspace(1e-3, 0.999, 999)
    values = [objective(float(mu)) for mu in grid]
    index = int(np.argmin(values))
    if not math.isfinite(values[index]):
        log.warning("no mu in (0, 1) bounds the delay class of degree %d", delay_class.degree)
        return DelayClassCertificate(delay_class, None, None, INFINITY, Marker.UNBOUNDED)
    lo = float(grid[max(index - 1, 0)])
    hi = float(grid[min(index + 1, len(grid) - 1)])
    res = minimize_scalar(objective, bounds=(lo, hi), method='bounded', options={'xatol': 1e-10})
    mu = float(res.x) if res.fun <= values[index] else float(grid[index])
    lam = lambda_for(delay_class, mu) + LAMBDA_INFLATION
    bound = poa_bound(lam, mu, Objective.COST)
    log.info("delay class degree %d: lambda=%r mu=%r bound=%r", delay_class.degree, lam, mu, bound)
    return DelayClassCertificate(delay_class, lam, mu, bound, Marker.FINITE)


def delay_class_of(inst):
    # type: (CongestionInstance) -> DelayClass
    return DelayClass(max(d.degree for d in inst.delays))


def check_universal_smoothness_congestion(inst, lam, mu, *options, **kwargs):
    # type: (CongestionInstance, float, float, Any, Any) -> Verdict
    """
    sum_i c_i^{w_i}(b_i, a_-i) <= lam sum_i c_i^{w_i}(b) + mu sum_i c_i^{t_i}(a)
    for all type profiles t, w and all a in A(t), b in A(w).
    """
    return check_universal(inst.to_game(), lam, mu, *options, **kwargs)


def parallel_links(delays, weights):
    # type: (Sequence[Polynomial], Sequence[TypeDistribution]) -> CongestionInstance
    """
    Every player may use any single link.
    """
    links = tuple((e,) for e in range(len(delays)))
    return CongestionInstance(delays=delays, paths=[links] * len(weights), weights=weights)


def random_instance(rng,  # type: np.random.Generator
                    n,  # type: int
                    edges,  # type: int
                    degree=1,  # type: int
                    weight_types=2  # type: int
                    ):
    # type: (...) -> CongestionInstance
    """
    Parallel links with random monomial-sum delays of the given degree and
    equiprobable weights drawn from {1, 2, 3}.
    """
    delays = []
    for _ in range(edges):
        coefficients = [0.0] * degree + [float(rng.integers(1, 4))]
        if degree > 0:
            coefficients[0] = float(rng.integers(0, 3))
        delays.append(Polynomial(coefficients))
    weights = []
    for _ in range(n):
        support = sorted(set(float(w) for w in rng.choice([1, 2, 3], size=weight_types, replace=False)))
        weights.append(TypeDistribution.uniform(support))
    return parallel_links(delays, weights)
