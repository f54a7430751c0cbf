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
Instance files: one JSON document describes one game.

Documents are validated against :data:`INSTANCE_SCHEMA` before any builder
runs; builder failures are reported with a JSON pointer into the document.
"""
import json
import math
import os

import attr
import jsonschema

from bayeslab import congestion, effort, greedy, item_auctions, normal_form
from bayeslab.exceptions import LabException, InputException, SchemaViolationException, \
    InvariantViolationException
from bayeslab.game import BayesianGame, TypeDistribution
from bayeslab.result import Verdict
from bayeslab.valuations import XOSValuation, TableValuation, to_items
from bayeslab_core import Objective, JSON
from bayeslab_core._logutil import get_logger

from typing import *

log = get_logger('instance')

BUNDLED_DIR = os.path.join(os.path.dirname(os.path.abspath(__file__)), 'instances')

FAMILIES = ('normal-form', 'item-auction', 'greedy-auction', 'congestion', 'effort')

number = {"type": "number"}
nonnegative = {"type": "number", "minimum": 0}
probabilities_schema = {"type": "array", "items": nonnegative, "minItems": 1}
items_schema = {"type": "array", "items": {"type": "integer", "minimum": 0}}

grid_schema = {"anyOf": [
    {"type": "array", "items": nonnegative, "minItems": 1},
    {"type": "object",
     "properties": {"step": {"type": "number", "exclusiveMinimum": True, "minimum": 0},
                    "max": nonnegative},
     "required": ["step", "max"]}]}

valuation_schema = {"type": "object",
                    "properties": {
                        "kind": {"enum": ["xos", "table", "single-minded", "xor", "additive"]},
                        "clauses": {"type": "array", "items": {"type": "array", "items": nonnegative}},
                        "values": {"anyOf": [{"type": "array", "items": nonnegative},
                                             {"type": "object", "additionalProperties": nonnegative}]},
                        "items": items_schema,
                        "value": nonnegative,
                        "entries": {"type": "array",
                                    "items": {"type": "object",
                                              "properties": {"items": items_schema, "value": nonnegative},
                                              "required": ["items", "value"]}}},
                    "required": ["kind"]}

bidder_schema = {"type": "object",
                 "properties": {"types": {"type": "array", "items": {"type": "string"}, "minItems": 1},
                                "probabilities": probabilities_schema},
                 "required": ["types"]}

normal_form_schema = {
    "properties": {
        "family": {"enum": ["normal-form"]},
        "objective": {"enum": ["utility", "cost"]},
        "players": {"type": "array", "minItems": 1,
                    "items": {"type": "object",
                              "properties": {
                                  "types": {"type": "array", "items": {"type": "string"}, "minItems": 1},
                                  "probabilities": probabilities_schema,
                                  "actions": {"type": "object",
                                              "additionalProperties": {"type": "array",
                                                                       "items": {"type": "string"},
                                                                       "minItems": 1}},
                                  "payoffs": {"type": "object",
                                              "additionalProperties": {"type": "object",
                                                                       "additionalProperties": number}}},
                              "required": ["types", "actions", "payoffs"]}}},
    "required": ["players"]}

item_auction_schema = {
    "properties": {
        "family": {"enum": ["item-auction"]},
        "pricing": {"enum": ["first-price", "second-price"]},
        "items": {"type": "integer", "minimum": 1},
        "grid": grid_schema,
        "no_overbidding": {"type": ["boolean", "null"]},
        "valuations": {"type": "object", "additionalProperties": valuation_schema},
        "bidders": {"type": "array", "items": bidder_schema, "minItems": 1}},
    "required": ["pricing", "items", "grid", "valuations", "bidders"]}

greedy_auction_schema = {
    "properties": {
        "family": {"enum": ["greedy-auction"]},
        "items": {"type": "integer", "minimum": 1},
        "priority": {"enum": sorted(greedy.PRIORITIES)},
        "feasibility": {"anyOf": [{"enum": [greedy.DISJOINT, greedy.UNRESTRICTED]},
                                  {"type": "array", "items": {"type": "array", "items": items_schema},
                                   "minItems": 1}]},
        "grid": grid_schema,
        "valuations": {"type": "object", "additionalProperties": valuation_schema},
        "bidders": {"type": "array", "items": bidder_schema, "minItems": 1}},
    "required": ["items", "grid", "valuations", "bidders"]}

congestion_schema = {
    "properties": {
        "family": {"enum": ["congestion"]},
        "edges": {"type": "array", "minItems": 1,
                  "items": {"type": "object",
                            "properties": {"coefficients": {"type": "array", "items": nonnegative, "minItems": 1},
                                           "ends": {"type": "array", "minItems": 2, "maxItems": 2}},
                            "required": ["coefficients"]}},
        "players": {"type": "array", "minItems": 1,
                    "items": {"type": "object",
                              "properties": {"paths": {"type": "array", "items": items_schema, "minItems": 1},
                                             "source": {}, "target": {},
                                             "weights": {"type": "array",
                                                         "items": {"type": "number", "exclusiveMinimum": True,
                                                                   "minimum": 0},
                                                         "minItems": 1},
                                             "probabilities": probabilities_schema},
                              "required": ["weights"]}}},
    "required": ["edges", "players"]}

project_schema = {"type": "object",
                  "properties": {"kind": {"enum": ["breakpoints", "linear", "capped", "sqrt", "log1p"]},
                                 "breakpoints": {"type": "array", "items": nonnegative},
                                 "values": {"type": "array", "items": nonnegative},
                                 "slope": nonnegative, "cap": nonnegative, "high": nonnegative,
                                 "pieces": {"type": "integer", "minimum": 1}}}

effort_schema = {
    "properties": {
        "family": {"enum": ["effort"]},
        "delta": {"type": "number", "exclusiveMinimum": True, "minimum": 0},
        "projects": {"type": "array", "items": project_schema, "minItems": 1},
        "players": {"type": "array", "minItems": 1,
                    "items": {"type": "object",
                              "properties": {
                                  "types": {"type": "array", "minItems": 1,
                                            "items": {"type": "object",
                                                      "properties": {"abilities": {"type": "array",
                                                                                   "items": nonnegative},
                                                                     "budget": {"type": "number",
                                                                                "exclusiveMinimum": True,
                                                                                "minimum": 0}},
                                                      "required": ["abilities", "budget"]}},
                                  "probabilities": probabilities_schema},
                              "required": ["types"]}}},
    "required": ["delta", "projects", "players"]}

INSTANCE_SCHEMA = {
    "$schema": "http://json-schema.org/draft-04/schema#",
    "type": "object",
    "properties": {"family": {"enum": list(FAMILIES)}, "name": {"type": "string"}},
    "required": ["family"],
}

_FAMILY_SCHEMAS = {'normal-form': normal_form_schema, 'item-auction': item_auction_schema,
                   'greedy-auction': greedy_auction_schema, 'congestion': congestion_schema,
                   'effort': effort_schema}


def family_schema(family):
    # type: (str) -> Dict[str, Any]
    return dict(_FAMILY_SCHEMAS[family], type="object")


@attr.s(frozen=True, eq=False)
class LoadedInstance(object):
    name = attr.ib(validator=attr.validators.instance_of(str))  # type: str
    family = attr.ib(validator=attr.validators.in_(FAMILIES))  # type: str
    model = attr.ib()  # type: Any
    game = attr.ib(validator=attr.validators.instance_of(BayesianGame))  # type: BayesianGame
    document = attr.ib(repr=False)  # type: Dict[str, Any]


def validate_document(document, schema=None):
    # type: (Any, Optional[Dict[str, Any]]) -> None
    """
    :raise: :exc:`~bayeslab.exceptions.SchemaViolationException` for the
        first violation in document order
    """
    schemas = [schema] if schema is not None else [INSTANCE_SCHEMA]
    if schema is None and isinstance(document, dict) and document.get('family') in FAMILIES:
        schemas.append(family_schema(document['family']))
    for current in schemas:
        validator = jsonschema.Draft4Validator(current)
        errors = sorted(validator.iter_errors(document), key=lambda e: [str(p) for p in e.absolute_path])
        if errors:
            error = errors[0]
            raise SchemaViolationException.pyexc(error.message, path=_pointer(error.absolute_path))


def _pointer(parts):
    # type: (Iterable[Any]) -> str
    return '/' + '/'.join(str(p) for p in parts)


def _distribution(support, probabilities, path):
    if probabilities is None:
        return TypeDistribution.uniform(support)
    return TypeDistribution.normalized(support, probabilities, path=path + '/probabilities')


def _grid(spec):
    if isinstance(spec, dict):
        return item_auctions.bid_grid(spec['step'], spec['max'])
    return spec


def _valuation(doc, m, path):
    kind = doc['kind']
    if kind == 'xos':
        return XOSValuation(m, doc['clauses'])
    if kind == 'additive':
        return XOSValuation(m, [doc['values']])
    if kind == 'table':
        values = doc['values']
        if isinstance(values, dict):
            table = [0.0] * (1 << m)
            for key, value in values.items():
                table[int(key)] = value
            values = table
        return TableValuation(m, values)
    if kind == 'single-minded':
        return greedy.SetBid.single_minded(m, doc['items'], doc['value'])
    if kind == 'xor':
        return greedy.SetBid(m, [(e['items'], e['value']) for e in doc['entries']])
    raise InvariantViolationException.pyexc("unknown valuation kind", obj=kind, path=path + '/kind')


def _bidders(document):
    return [_distribution(b['types'], b.get('probabilities'), '/bidders/{0}'.format(i))
            for i, b in enumerate(document['bidders'])]


def _build_normal_form(document):
    type_dists, action_sets, payoffs = [], {}, {}
    for i, player in enumerate(document['players']):
        path = '/players/{0}'.format(i)
        type_dists.append(_distribution(player['types'], player.get('probabilities'), path))
        for t_i in player['types']:
            if t_i not in player['actions']:
                raise InvariantViolationException.pyexc("type has no action list", path=path + '/actions/' + t_i)
            action_sets[(i, t_i)] = tuple(player['actions'][t_i])
            table = player['payoffs'].get(t_i)
            if table is None:
                raise InvariantViolationException.pyexc("type has no payoff table", path=path + '/payoffs/' + t_i)
            payoffs[(i, t_i)] = {tuple(key.split('|')): value for key, value in table.items()}
    model = normal_form.NormalFormGame(type_dists=type_dists, action_sets=action_sets, payoffs=payoffs,
                                       objective=Objective(document.get('objective', 'utility')))
    return model, model.to_game()


def _build_item_auction(document):
    m = document['items']
    valuations = {label: _valuation(doc, m, '/valuations/' + label) for label, doc in document['valuations'].items()}
    if any(not isinstance(v, (XOSValuation, TableValuation)) for v in valuations.values()):
        raise InvariantViolationException.pyexc("item auctions take xos, additive or table valuations",
                                                path='/valuations')
    model = item_auctions.ItemAuction(m=m, pricing=item_auctions.Pricing(document['pricing']),
                                      grid=_grid(document['grid']), bidder_types=_bidders(document),
                                      valuations=valuations, no_overbidding=document.get('no_overbidding'))
    return model, model.to_game()


def _setbid(doc, m, path):
    val = _valuation(doc, m, path)
    if isinstance(val, greedy.SetBid):
        return val
    if doc['kind'] == 'additive':
        return greedy.SetBid.additive_closure(doc['values'])
    raise InvariantViolationException.pyexc("greedy auctions take single-minded, xor or additive valuations",
                                            path=path + '/kind')


def _build_greedy(document):
    m = document['items']
    valuations = {label: _setbid(doc, m, '/valuations/' + label) for label, doc in document['valuations'].items()}
    mech = greedy.GreedyMechanism(m=m, priority=document.get('priority', 'value'),
                                  feasibility=document.get('feasibility', greedy.DISJOINT),
                                  grid=_grid(document['grid']))
    model = greedy.GreedyAuction(mechanism=mech, bidder_types=_bidders(document), valuations=valuations)
    return model, model.to_game()


def _build_congestion(document):
    edges = document['edges']
    delays = [congestion.Polynomial(e['coefficients']) for e in edges]
    paths, weights = [], []
    for i, player in enumerate(document['players']):
        path = '/players/{0}'.format(i)
        if 'paths' in player:
            paths.append(player['paths'])
        elif 'source' in player and 'target' in player:
            if any('ends' not in e for e in edges):
                raise InvariantViolationException.pyexc("path generation needs edge ends", path='/edges')
            found = congestion.simple_paths([tuple(e['ends']) for e in edges], player['source'], player['target'])
            if not found:
                raise InvariantViolationException.pyexc("no path between source and target", path=path)
            paths.append(found)
        else:
            raise InvariantViolationException.pyexc("player needs paths or a source and target", path=path)
        weights.append(_distribution([float(w) for w in player['weights']], player.get('probabilities'), path))
    model = congestion.CongestionInstance(delays=delays, paths=paths, weights=weights)
    return model, model.to_game()


def _project(doc, path):
    kind = doc.get('kind', 'breakpoints')
    try:
        if kind == 'breakpoints':
            return effort.PiecewiseLinear(doc['breakpoints'], doc['values'])
        if kind == 'linear':
            return effort.PiecewiseLinear.linear(doc.get('slope', 1.0))
        if kind == 'capped':
            return effort.PiecewiseLinear.capped(doc['cap'], doc.get('slope', 1.0))
        fn = math.sqrt if kind == 'sqrt' else math.log1p
        return effort.PiecewiseLinear.from_function(fn, doc['high'], doc.get('pieces', 16))
    except KeyError as e:
        raise InvariantViolationException.pyexc("project is missing {0}".format(e), path=path)


def _build_effort(document):
    values = [_project(doc, '/projects/{0}'.format(j)) for j, doc in enumerate(document['projects'])]
    dists = []
    for i, player in enumerate(document['players']):
        support = [effort.EffortType(t['abilities'], t['budget']) for t in player['types']]
        dists.append(_distribution(support, player.get('probabilities'), '/players/{0}'.format(i)))
    model = effort.EffortInstance(values=values, types=dists, delta=document['delta'])
    return model, model.to_game()


_BUILDERS = {'normal-form': _build_normal_form, 'item-auction': _build_item_auction,
             'greedy-auction': _build_greedy, 'congestion': _build_congestion, 'effort': _build_effort}


def load_document(document, source='<document>'):
    # type: (Any, str) -> LoadedInstance
    """
    Validate and build an already parsed instance document.

    :raise: :exc:`~bayeslab.exceptions.SchemaViolationException`,
        :exc:`~bayeslab.exceptions.InvariantViolationException` or
        :exc:`~bayeslab.exceptions.UnnormalizedProbabilityException`, each
        carrying a path into the document
    """
    validate_document(document)
    family = document['family']
    try:
        model, game = _BUILDERS[family](document)
    except InputException:
        raise
    except LabException as e:
        raise InvariantViolationException.pyexc(e.message, inner=e, obj=e.objextra, path=e.path or '/')
    log.info("loaded %s instance %r from %s", family, document.get('name'), source)
    return LoadedInstance(name=document.get('name', os.path.splitext(os.path.basename(source))[0]),
                          family=family, model=model, game=game, document=document)


def read_json(path):
    # type: (str) -> Any
    try:
        with open(path, 'r', encoding='utf-8') as f:
            return json.load(f)
    except ValueError as e:
        raise InputException.pyexc("not valid JSON", inner=e, path=path)
    except OSError as e:
        raise InputException.pyexc("cannot read file", inner=e, path=path)


def load_instance(path):
    # type: (str) -> LoadedInstance
    return load_document(read_json(path), source=path)


def bundled(name):
    # type: (str) -> str
    """
    Path of a bundled example file.
    """
    return os.path.join(BUNDLED_DIR, name if name.endswith('.json') else name + '.json')


def bundled_instances():
    # type: (...) -> List[str]
    return sorted(os.path.join(BUNDLED_DIR, f) for f in os.listdir(BUNDLED_DIR)
                  if f.endswith('.json') and not f.startswith('runspec'))


def _dump_valuation(val):
    if isinstance(val, XOSValuation):
        return {'kind': 'xos', 'clauses': [list(c) for c in val.clauses]}
    if isinstance(val, TableValuation):
        return {'kind': 'table', 'values': list(val.values)}
    return {'kind': 'xor', 'entries': [{'items': list(items), 'value': value} for items, value in val.entries]}


def _dump_bidders(dists):
    return [{'types': list(d.support), 'probabilities': list(d.probabilities)} for d in dists]


def dump_instance(loaded):
    # type: (LoadedInstance) -> Dict[str, JSON]
    """
    Canonical document for a loaded instance; loading it again yields an
    equivalent game.
    """
    model = loaded.model
    doc = {'family': loaded.family, 'name': loaded.name}
    if loaded.family == 'normal-form':
        doc['objective'] = model.objective.value
        players = []
        for i, dist in enumerate(model.type_dists):
            players.append({
                'types': list(dist.support), 'probabilities': list(dist.probabilities),
                'actions': {t: list(loaded.game.actions_of(i, t)) for t in dist.support},
                'payoffs': {t: {'|'.join(a): v for a, v in sorted(model.payoffs[(i, t)].items())}
                            for t in dist.support}})
        doc['players'] = players
    elif loaded.family == 'item-auction':
        doc.update({'pricing': model.pricing.value, 'items': model.m, 'grid': list(model.grid),
                    'no_overbidding': model.no_overbidding,
                    'valuations': {label: _dump_valuation(v) for label, v in sorted(model.valuations.items())},
                    'bidders': _dump_bidders(model.bidder_types)})
    elif loaded.family == 'greedy-auction':
        mech = model.mechanism
        feasibility = mech.feasibility if isinstance(mech.feasibility, str) else \
            [[list(to_items(mask)) for mask in alloc] for alloc in mech.feasibility]
        doc.update({'items': mech.m, 'priority': mech.priority_name, 'feasibility': feasibility,
                    'grid': list(mech.grid),
                    'valuations': {label: _dump_valuation(v) for label, v in sorted(model.valuations.items())},
                    'bidders': _dump_bidders(model.bidder_types)})
    elif loaded.family == 'congestion':
        doc.update({'edges': [{'coefficients': list(d.coefficients)} for d in model.delays],
                    'players': [{'paths': [list(p) for p in paths], 'weights': list(dist.support),
                                 'probabilities': list(dist.probabilities)}
                                for paths, dist in zip(model.paths, model.weights)]})
    else:
        doc.update({'delta': model.delta,
                    'projects': [{'kind': 'breakpoints', 'breakpoints': list(v.breakpoints),
                                  'values': list(v.values)} for v in model.values],
                    'players': [{'types': [{'abilities': list(t.abilities), 'budget': t.budget}
                                           for t in dist.support],
                                 'probabilities': list(dist.probabilities)} for dist in model.types]})
    return doc


def self_audit(loaded, *options, **kwargs):
    # type: (LoadedInstance, Any, Any) -> Verdict
    """
    Evaluate every player's payoff at the first and last action profile of
    every type profile; all must be finite. Cost games also need
    nonnegative costs.
    """
    game = loaded.game
    worst, witness, checked = 0.0, None, 0
    for t, _ in game.type_profiles():
        sets = [game.actions_of(i, t_i) for i, t_i in enumerate(t)]
        for a in {tuple(s[0] for s in sets), tuple(s[-1] for s in sets)}:
            for i, t_i in enumerate(t):
                value = game.payoff(i, t_i, a)
                checked += 1
                bad = not math.isfinite(value) or (game.objective is Objective.COST and value < 0)
                if bad and witness is None:
                    worst, witness = -1.0, {'t': t, 'a': a, 'player': i, 'value': value}
    return Verdict(label='self-audit', passed=witness is None, worst_margin=worst, witness=witness,
                   checked=checked, parameters={'family': loaded.family})
