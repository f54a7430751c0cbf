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
Run-specs and reports.

A run-spec lists verbs to execute, in order, against one loaded instance.
Steps run sequentially; a step that raises ends the run with the
exception recorded in the report and its exit code. Reports carry no
timing and no thread count, so identical inputs and seed give identical
bytes.
"""
import csv
import io
import json
import os

import attr
from pyrsistent import pmap

from bayeslab import equilibrium, greedy, item_auctions
from bayeslab.congestion import best_delay_parameters, delay_class_of
from bayeslab.exceptions import LabException, InputException, InvalidArgumentException
from bayeslab.game import StrategyProfile
from bayeslab.instance import LoadedInstance, load_instance, read_json, self_audit, validate_document
from bayeslab.smoothness import Variant, OptimalDeviation, SmoothnessCertificate, certify, best_parameters, \
    check_domination
from bayeslab_core import JSON, to_jsonable
from bayeslab_core._logutil import get_logger
from bayeslab_core.options import SearchOptions, forward_args

from typing import *

log = get_logger('pipeline')

SCHEMA_VERSION = 1

VERBS = ('self-audit', 'smooth-check', 'smooth-search', 'bne-check', 'bne-enumerate', 'bne-dynamics',
         'poa', 'misalignment', 'domination')

EXIT_OK = 0
EXIT_FAILED = 1

nonnegative = {"type": "number", "minimum": 0}
count = {"type": "integer", "minimum": 1}

step_schema = {
    "type": "object",
    "properties": {
        "verb": {"enum": list(VERBS)},
        "variant": {"enum": [v.value for v in Variant]},
        "lambda": {"type": "number", "exclusiveMinimum": True, "minimum": 0},
        "mu": nonnegative,
        "deviation": {"type": "string"},
        "K": {"type": "array", "items": {"type": "integer", "minimum": 0}},
        "slack": nonnegative,
        "epsilon": nonnegative,
        "collect_margins": {"type": "boolean"},
        "profile": {"type": "array", "items": {"type": "array"}},
        "starts": count,
        "max_rounds": count,
        "c": {"oneOf": [{"enum": ["certified", "measured"]}, {"type": "number", "minimum": 1}]}},
    "required": ["verb"]}

RUNSPEC_SCHEMA = {
    "$schema": "http://json-schema.org/draft-04/schema#",
    "type": "object",
    "properties": {
        "schema_version": {"enum": [SCHEMA_VERSION]},
        "instance": {"type": "string"},
        "seed": {"type": "integer", "minimum": 0},
        "threads": count,
        "epsilon": {"type": ["number", "null"], "minimum": 0},
        "max_tuples": count,
        "max_profiles": count,
        "samples": count,
        "csv": {"type": "boolean"},
        "steps": {"type": "array", "items": step_schema}},
    "required": ["steps"]}

DEFAULT_VARIANTS = pmap({
    'normal-form': Variant.PLAIN,
    'item-auction': Variant.SEMI,
    'greedy-auction': Variant.RELAXED,
    'congestion': Variant.UNIVERSAL,
    'effort': Variant.UNIVERSAL,
})


@attr.s(frozen=True)
class RunSpec(object):
    steps = attr.ib(converter=lambda steps: tuple(pmap(s) for s in steps))  # type: Tuple[PMap, ...]
    seed = attr.ib(default=0)  # type: int
    epsilon = attr.ib(default=None)  # type: Optional[float]
    csv = attr.ib(default=True)  # type: bool
    instance = attr.ib(default=None)  # type: Optional[str]
    limits = attr.ib(default=pmap(), converter=pmap)  # type: PMap

    @classmethod
    def from_document(cls, document):
        # type: (Any) -> RunSpec
        validate_document(document, RUNSPEC_SCHEMA)
        return cls(steps=document['steps'], seed=document.get('seed', 0), epsilon=document.get('epsilon'),
                   csv=document.get('csv', True), instance=document.get('instance'),
                   limits={k: document[k] for k in ('max_tuples', 'max_profiles', 'samples', 'threads')
                           if k in document})

    @classmethod
    def single(cls, verb, **step):
        # type: (str, Any) -> RunSpec
        step['verb'] = verb
        return cls.from_document({'steps': [{k: v for k, v in step.items() if v is not None}]})


def load_runspec(path):
    # type: (str) -> RunSpec
    return RunSpec.from_document(read_json(path))


@attr.s
class Report(object):
    document = attr.ib()  # type: Dict[str, JSON]
    tables = attr.ib(factory=dict)  # type: Dict[str, Tuple[Sequence[str], List[Sequence[Any]]]]

    @property
    def exit_code(self):
        # type: (...) -> int
        return self.document['exit_code']

    def as_json(self):
        # type: (...) -> str
        return json.dumps(self.document, sort_keys=True, indent=2) + '\n'

    def table_text(self, name):
        # type: (str) -> str
        header, rows = self.tables[name]
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator='\n')
        writer.writerow(header)
        for row in rows:
            writer.writerow([to_jsonable(x) for x in row])
        return buf.getvalue()

    def write(self, out_dir):
        # type: (str) -> List[str]
        """
        Write ``report.json`` and one CSV per table into ``out_dir``.
        """
        os.makedirs(out_dir, exist_ok=True)
        written = [os.path.join(out_dir, 'report.json')]
        with open(written[0], 'w', encoding='utf-8', newline='') as f:
            f.write(self.as_json())
        for name in sorted(self.tables):
            path = os.path.join(out_dir, name + '.csv')
            with open(path, 'w', encoding='utf-8', newline='') as f:
                f.write(self.table_text(name))
            written.append(path)
        log.info("wrote %d report files to %s", len(written), out_dir)
        return written


def deviation_named(loaded, name):
    # type: (LoadedInstance, Optional[str]) -> Any
    """
    Resolve a deviation name for the instance's family; ``None`` picks the
    family's default (half bids for auctions, none otherwise).
    """
    model = loaded.model
    if name is None:
        name = {'item-auction': 'half', 'greedy-auction': 'single-minded-half'}.get(loaded.family)
    if name is None:
        return None
    if name == 'optimal':
        return OptimalDeviation()
    if loaded.family == 'item-auction' and name in ('half', 'randomized'):
        return item_auctions.deviation_for(model, item_auctions.DeviationKind(name))
    if loaded.family == 'greedy-auction' and name == 'single-minded-half':
        return greedy.SingleMindedHalfDeviation(model)
    if loaded.family == 'greedy-auction' and name == 'single-minded-randomized':
        return greedy.SingleMindedRandomizedDeviation(model)
    raise InvalidArgumentException.pyexc("unknown deviation for {0}".format(loaded.family), obj=name)


def default_parameters(loaded, deviation, path, c='certified'):
    # type: (LoadedInstance, Any, str, Any) -> Tuple[float, float, Dict[str, Any]]
    """
    Family default (lambda, mu) and any extra verdict parameters. Greedy
    auctions use mu = c - 1 with the certified factor unless the step asks
    for ``"c": "measured"`` or supplies a number.
    """
    model, family = loaded.model, loaded.family
    if family == 'item-auction' and deviation is not None and deviation.name in ('half', 'randomized'):
        return item_auctions.certified_lambda(deviation.name), 0.0, {}
    if family == 'greedy-auction' and deviation is not None:
        lam = greedy.RANDOMIZED_FACTOR if deviation.name == 'single-minded-randomized' else 0.5
        value, source = greedy.resolve_c(model.mechanism, c, model.bid_profiles())
        return lam, value - 1.0, {'c': value, 'c_source': source}
    if family == 'congestion':
        found = best_delay_parameters(delay_class_of(model))
        if found.lam is not None:
            return found.lam, found.mu, {}
    if family == 'effort':
        return 1.0, 1.0, {}
    raise InputException.pyexc("lambda and mu are required here", path=path)


def default_slack(loaded, deviation):
    # type: (LoadedInstance, Any) -> float
    if loaded.family == 'item-auction' and deviation is not None and deviation.name in ('half', 'randomized'):
        return item_auctions.certificate_slack(loaded.model, deviation.name)
    if loaded.family == 'greedy-auction':
        return loaded.model.n * loaded.model.grid_step
    return 0.0


def _profile(loaded, rows, path):
    # type: (LoadedInstance, Sequence[Sequence[Any]], str) -> StrategyProfile
    game = loaded.game
    if len(rows) != game.n:
        raise InputException.pyexc("profile needs one row per player", path=path)
    choices = []
    for i, (dist, row) in enumerate(zip(game.type_dists, rows)):
        if len(row) != len(dist.support):
            raise InputException.pyexc("profile row needs one action per type", path='{0}/{1}'.format(path, i))
        choices.append({t_i: _freeze(action) for t_i, action in zip(dist.support, row)})
    return StrategyProfile(choices)


def _freeze(value):
    if isinstance(value, list):
        return tuple(_freeze(v) for v in value)
    if isinstance(value, int) and not isinstance(value, bool):
        return float(value)
    return value


class _Run(object):
    """
    State carried between the steps of one run.
    """

    def __init__(self, loaded, spec, options):
        # type: (LoadedInstance, RunSpec, Dict[str, Any]) -> None
        self.loaded = loaded
        self.game = loaded.game
        self.spec = spec
        self.options = options
        self.certificates = []  # type: List[SmoothnessCertificate]
        self.equilibria = None  # type: Optional[Tuple[float, List[StrategyProfile]]]
        self.failed = False
        self.tables = {}  # type: Dict[str, Tuple[Sequence[str], List[Sequence[Any]]]]

    def epsilon(self, step):
        # type: (Mapping[str, Any]) -> float
        for value in (step.get('epsilon'), self.spec.epsilon):
            if value is not None:
                return float(value)
        return self.game.default_epsilon

    def step_options(self, step):
        # type: (Mapping[str, Any]) -> Dict[str, Any]
        opts = dict(self.options)
        opts.update({k: step[k] for k in ('slack', 'collect_margins') if k in step})
        return opts

    def need_equilibria(self, epsilon):
        # type: (float) -> List[StrategyProfile]
        if self.equilibria is None or self.equilibria[0] != epsilon:
            self.equilibria = (epsilon, equilibrium.enumerate_pure_bne(self.game, epsilon, self.options))
        return self.equilibria[1]

    def table(self, name, header, rows):
        if self.spec.csv:
            self.tables[name] = (tuple(header), list(rows))

    def smoothness_setup(self, step, path):
        variant = Variant(step.get('variant', DEFAULT_VARIANTS[self.loaded.family].value))
        deviation = deviation_named(self.loaded, step.get('deviation')) \
            if variant in (Variant.SEMI, Variant.RELAXED) else None
        K = step.get('K')
        if K is None and variant is Variant.RELAXED and self.loaded.family == 'greedy-auction':
            K = [self.loaded.model.seller]
        opts = self.step_options(step)
        if step.get('slack') is None:
            opts['slack'] = default_slack(self.loaded, deviation)
        return variant, deviation, K, opts

    def smooth_check(self, step, path):
        variant, deviation, K, opts = self.smoothness_setup(step, path)
        if 'lambda' in step and 'mu' in step:
            lam, mu, extra = float(step['lambda']), float(step['mu']), {}
        else:
            lam, mu, extra = default_parameters(self.loaded, deviation, path, step.get('c', 'certified'))
        certificate = certify(self.game, variant, lam, mu, deviation, K, opts)
        if extra:
            verdict = certificate.verdict
            certificate = attr.evolve(certificate, verdict=attr.evolve(verdict,
                                                                       parameters=verdict.parameters.update(extra)))
        self.certificates.append(certificate)
        if not certificate.passed:
            self.failed = True
        if certificate.verdict.margins is not None:
            self.table('margins-{0}'.format(path.rsplit('/', 1)[-1]), ('index', 'margin'),
                       certificate.verdict.margins)
        return certificate.as_dict()

    def smooth_search(self, step, path):
        variant, deviation, K, opts = self.smoothness_setup(step, path)
        found = best_parameters(self.game, variant, deviation, K, opts)
        if found.verdict is not None and found.verdict.passed:
            self.certificates.append(SmoothnessCertificate(
                variant=variant, lam=found.lam, mu=found.mu, objective=self.game.objective, verdict=found.verdict,
                deviation=deviation, K=K,
                equilibrium_slack=deviation.equilibrium_slack(self.game) if deviation else 0.0))
        return found.as_dict()

    def bne_check(self, step, path):
        if 'profile' not in step:
            raise InputException.pyexc("bne-check needs a profile", path=path)
        s = _profile(self.loaded, step['profile'], path + '/profile')
        return equilibrium.is_pure_bne(self.game, s, self.epsilon(step), self.options).as_dict()

    def bne_enumerate(self, step, path):
        epsilon = self.epsilon(step)
        found = self.need_equilibria(epsilon)
        self.table('equilibria', ('equilibrium', 'expected_welfare'),
                   [(k, equilibrium.expected_welfare(self.game, s)) for k, s in enumerate(found)])
        return {'epsilon': epsilon, 'count': len(found), 'equilibria': [s.as_dict() for s in found]}

    def bne_dynamics(self, step, path):
        runs = equilibrium.multi_start_dynamics(self.game, step.get('starts', 4), step.get('max_rounds', 100),
                                                self.options)
        return {'runs': [r.as_dict() for r in runs], 'converged': sum(r.converged for r in runs)}

    def poa(self, step, path):
        epsilon = self.epsilon(step)
        result = equilibrium.bayes_nash_poa(self.game, epsilon, self.need_equilibria(epsilon), self.options)
        self.table('poa', ('equilibrium', 'expected_welfare', 'ratio'),
                   [(r['equilibrium'], r['expected_welfare'], r['ratio']) for r in result.rows])
        section = result.as_dict()
        if any(c.passed for c in self.certificates):
            section['domination'] = self.dominate(epsilon)
        return section

    def misalignment(self, step, path):
        epsilon = self.epsilon(step)
        verdicts = [equilibrium.check_misalignment(self.game, s, epsilon, self.options)
                    for s in self.need_equilibria(epsilon)]
        if self.game.constant_strategy_space and not all(verdicts):
            self.failed = True
        return {'epsilon': epsilon, 'verdicts': [v.as_dict() for v in verdicts]}

    def domination(self, step, path):
        return {'epsilon': self.epsilon(step), 'verdicts': self.dominate(self.epsilon(step))}

    def dominate(self, epsilon):
        # type: (float) -> List[Dict[str, JSON]]
        equilibria = self.need_equilibria(epsilon)
        verdicts = [check_domination(self.game, c, equilibria, epsilon, self.options)
                    for c in self.certificates if c.passed]
        if not all(verdicts):
            self.failed = True
        return [v.as_dict() for v in verdicts]

    def self_audit(self, step, path):
        verdict = self_audit(self.loaded)
        if not verdict.passed:
            self.failed = True
        return verdict.as_dict()


_HANDLERS = pmap({verb: getattr(_Run, verb.replace('-', '_')) for verb in VERBS})


def _error(e):
    # type: (LabException) -> Dict[str, JSON]
    return {'type': type(e).__name__, 'message': e.message, 'path': e.path, 'size': e.size,
            'limit': e.limit, 'exit_code': e.EXIT_CODE}


def run_pipeline(instance, spec, *options, **kwargs):
    # type: (Union[LoadedInstance, str], Union[RunSpec, Mapping[str, Any], str], Any, Any) -> Report
    """
    Execute the run-spec's steps in order against ``instance``.

    The exit code is 0 when every requested certificate, domination check
    and (on constant strategy spaces) misalignment check passes, 1
    otherwise; a step that raises ends the run with that exception's code.
    """
    if isinstance(spec, str):
        spec = load_runspec(spec)
    elif not isinstance(spec, RunSpec):
        spec = RunSpec.from_document(dict(spec))
    if isinstance(instance, str):
        instance = load_instance(instance)
    opts = forward_args(kwargs, SearchOptions(seed=spec.seed, **spec.limits), *options)
    run = _Run(instance, spec, opts)
    sections, exit_code = [], EXIT_OK
    for k, step in enumerate(spec.steps):
        path = '/steps/{0}'.format(k)
        log.info("step %d: %s", k, step['verb'])
        try:
            sections.append({'verb': step['verb'], 'result': _HANDLERS[step['verb']](run, step, path)})
        except LabException as e:
            log.warning("step %d (%s) refused: %s", k, step['verb'], e)
            sections.append({'verb': step['verb'], 'error': _error(e)})
            exit_code = e.EXIT_CODE
            break
    if exit_code == EXIT_OK and run.failed:
        exit_code = EXIT_FAILED
    document = {
        'schema_version': SCHEMA_VERSION,
        'instance': {'name': instance.name, 'family': instance.family, 'players': instance.game.n,
                     'objective': instance.game.objective.value,
                     'constant_strategy_space': instance.game.constant_strategy_space},
        'settings': {'seed': opts['seed'], 'max_tuples': opts['max_tuples'], 'samples': opts['samples'],
                     'max_profiles': opts['max_profiles'], 'epsilon': spec.epsilon},
        'steps': to_jsonable(sections),
        'exit_code': exit_code,
    }
    return Report(document=document, tables=run.tables)
