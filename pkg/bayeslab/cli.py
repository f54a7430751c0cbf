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
The ``lab`` command.

Every subcommand is a one-step run-spec handed to
:func:`bayeslab.pipeline.run_pipeline`; ``lab report`` runs a run-spec
file. The report goes to stdout, and to ``--out`` (or
``$BAYESLAB_OUTPUT_DIR``) together with its CSV tables. The exit status is
the report's exit code, or the exit code of the exception that stopped
loading.
"""
import argparse
import json
import os
import sys

from bayeslab import __version__
from bayeslab.exceptions import LabException, InputException
from bayeslab.instance import load_instance, read_json
from bayeslab.pipeline import RunSpec, load_runspec, run_pipeline
from bayeslab.smoothness import Variant
from bayeslab_core import _logutil

from typing import *

log = _logutil.get_logger('cli')

OUTPUT_DIR_ENV = 'BAYESLAB_OUTPUT_DIR'
THREADS_ENV = 'BAYESLAB_THREADS'


def _common(parser, instance_required=True):
    parser.add_argument('--instance', required=instance_required, help="instance JSON file")
    parser.add_argument('--seed', type=int, default=None, help="sampling and dynamics seed")
    parser.add_argument('--threads', type=int, default=int(os.environ.get(THREADS_ENV, 1)),
                        help="worker threads within a step (default ${0} or 1)".format(THREADS_ENV))
    parser.add_argument('--epsilon', type=float, default=None,
                        help="equilibrium slack (default: the family's grid slack)")
    parser.add_argument('--out', default=os.environ.get(OUTPUT_DIR_ENV),
                        help="directory for report.json and CSV tables (default ${0})".format(OUTPUT_DIR_ENV))
    parser.add_argument('--log-level', default=None, help="logging level name")


def _smoothness(parser):
    parser.add_argument('--variant', choices=[v.value for v in Variant], default=None)
    parser.add_argument('--deviation', default=None, help="deviation name, e.g. half, randomized, optimal")
    parser.add_argument('--K', type=int, nargs='*', default=None, help="charged players of the relaxed variant")
    parser.add_argument('--slack', type=float, default=None)


def _factor(text):
    if text in ('certified', 'measured'):
        return text
    return float(text)


def build_parser():
    # type: (...) -> argparse.ArgumentParser
    parser = argparse.ArgumentParser(prog='lab', description="Smoothness and Bayes-Nash verification lab.")
    parser.add_argument('--version', action='version', version='%(prog)s ' + __version__)
    commands = parser.add_subparsers(dest='command')
    commands.required = True

    smooth = commands.add_parser('smooth', help="smoothness certificates").add_subparsers(dest='action')
    smooth.required = True
    check = smooth.add_parser('check', help="verify one (lambda, mu) certificate")
    _common(check)
    _smoothness(check)
    check.add_argument('--lam', type=float, default=None)
    check.add_argument('--mu', type=float, default=None)
    check.add_argument('--collect-margins', action='store_true', default=None)
    check.add_argument('--c', type=_factor, default=None,
                       help="greedy approximation factor: certified (default), measured or a number")
    search = smooth.add_parser('search', help="search for the best (lambda, mu)")
    _common(search)
    _smoothness(search)

    bne = commands.add_parser('bne', help="pure Bayes-Nash equilibria").add_subparsers(dest='action')
    bne.required = True
    bne_check = bne.add_parser('check', help="regret of one strategy profile")
    _common(bne_check)
    bne_check.add_argument('--profile', required=True,
                           help="JSON file: one list of actions per player, in type order")
    _common(bne.add_parser('enumerate', help="every pure epsilon-BNE"))
    dynamics = bne.add_parser('dynamics', help="best-response dynamics from random starts")
    _common(dynamics)
    dynamics.add_argument('--starts', type=int, default=4)
    dynamics.add_argument('--max-rounds', type=int, default=100)

    _common(commands.add_parser('poa', help="measured Bayes-Nash price of anarchy"))

    report = commands.add_parser('report', help="run a run-spec file")
    _common(report, instance_required=False)
    report.add_argument('--pipeline', required=True, help="run-spec JSON file")
    return parser


def _spec(args):
    # type: (argparse.Namespace) -> RunSpec
    command = (args.command, getattr(args, 'action', None))
    if command == ('smooth', 'check'):
        return RunSpec.single('smooth-check', variant=args.variant, deviation=args.deviation, K=args.K,
                              slack=args.slack, collect_margins=args.collect_margins, c=args.c,
                              **{'lambda': args.lam, 'mu': args.mu})
    if command == ('smooth', 'search'):
        return RunSpec.single('smooth-search', variant=args.variant, deviation=args.deviation, K=args.K,
                              slack=args.slack)
    if command == ('bne', 'check'):
        document = read_json(args.profile)
        rows = document.get('profile') if isinstance(document, dict) else document
        if not isinstance(rows, list):
            raise InputException.pyexc("profile file needs a list of per-player action lists", path=args.profile)
        return RunSpec.single('bne-check', profile=rows, epsilon=args.epsilon)
    if command == ('bne', 'enumerate'):
        return RunSpec.single('bne-enumerate', epsilon=args.epsilon)
    if command == ('bne', 'dynamics'):
        return RunSpec.single('bne-dynamics', starts=args.starts, max_rounds=args.max_rounds)
    if args.command == 'poa':
        return RunSpec.single('poa', epsilon=args.epsilon)
    return load_runspec(args.pipeline)


def _instance_path(args, spec):
    # type: (argparse.Namespace, RunSpec) -> str
    if args.instance:
        return args.instance
    if spec.instance is None:
        raise InputException.pyexc("no instance given on the command line or in the run-spec", path='/instance')
    if os.path.isabs(spec.instance):
        return spec.instance
    return os.path.join(os.path.dirname(os.path.abspath(args.pipeline)), spec.instance)


def run(args, stdout=None):
    # type: (argparse.Namespace, Optional[TextIO]) -> int
    stdout = stdout or sys.stdout
    spec = _spec(args)
    instance = load_instance(_instance_path(args, spec))
    overrides = {'threads': args.threads}
    if args.seed is not None:
        overrides['seed'] = args.seed
    if args.epsilon is not None and args.command == 'report':
        spec = RunSpec(steps=spec.steps, seed=spec.seed, epsilon=args.epsilon, csv=spec.csv,
                       instance=spec.instance, limits=spec.limits)
    report = run_pipeline(instance, spec, overrides)
    stdout.write(report.as_json())
    if args.out:
        report.write(args.out)
    return report.exit_code


def main(argv=None, stdout=None, stderr=None):
    # type: (Optional[Sequence[str]], Optional[TextIO], Optional[TextIO]) -> int
    args = build_parser().parse_args(argv)
    _logutil.configure(args.log_level)
    stderr = stderr or sys.stderr
    try:
        return run(args, stdout)
    except LabException as e:
        log.error("%s", e)
        stderr.write(json.dumps({'error': {'type': type(e).__name__, 'message': e.message, 'path': e.path,
                                           'size': e.size, 'limit': e.limit}},
                                sort_keys=True) + '\n')
        return e.EXIT_CODE


if __name__ == '__main__':
    sys.exit(main())
