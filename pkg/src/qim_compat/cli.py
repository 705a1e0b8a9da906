"""
Command-line interface.

Every subcommand prints one JSON report on stdout carrying the tool version
and seed; logging goes to stderr. Exit codes: 0 compatible (or success),
1 incompatible (or a failed check), 2 unknown, 64 malformed input,
65 numeric validation failure.
"""

import argparse
import logging
import sys
from typing import Dict, List, Optional, Sequence, Tuple

from . import __version__
from .core.causal import do_event, sem_to_witness
from .core.compat import COMPATIBLE, INCOMPATIBLE, decide_general, verify_witness
from .core.formulas import eval_formula, formula_probability
from .core.scoring import SimincOptions, idef, siminc, siminc_upper_bound
from .corpus import run_corpus, write_corpus
from .prob.distributions import probability
from .prob.information import entropy, information_profile
from .utils import serialization
from .utils.constants import (
    DEFAULT_TOL, EXIT_COMPATIBLE, EXIT_DATAERR, EXIT_INCOMPATIBLE, EXIT_UNKNOWN, EXIT_USAGE, SIMINC_PARAMS,
)
from .utils.errors import FormatError, QIMError

logger = logging.getLogger(__name__)


class _Parser(argparse.ArgumentParser):
    """Argument parser that reports usage errors with the malformed-input exit code."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _assignment(text: str) -> Dict[str, str]:
    name, sep, value = text.partition("=")
    if not sep or not name:
        raise argparse.ArgumentTypeError(f"expected NAME=VALUE, got {text!r}")
    return {name: value}


def _noise_size(text: str) -> Dict[str, int]:
    label, sep, size = text.partition("=")
    if not sep or not size.isdigit():
        raise argparse.ArgumentTypeError(f"expected LABEL=SIZE, got {text!r}")
    return {label: int(size)}


def _merge(items: Optional[List[Dict]]) -> Dict:
    merged: Dict = {}
    for item in items or ():
        merged.update(item)
    return merged


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('-v', '--verbose', action='count', default=0, help="-v for INFO, -vv for DEBUG")
    common.add_argument('--tol', type=float, default=None, help="numerical tolerance")
    common.add_argument('--seed', type=int, default=SIMINC_PARAMS['seed'], help="random seed")

    search = argparse.ArgumentParser(add_help=False)
    search.add_argument('--restarts', type=int, default=None, help="random restarts of the search")
    search.add_argument('--max-iters', type=int, default=None, help="iteration cap per restart")
    search.add_argument('--noise-size', type=_noise_size, action='append', metavar='LABEL=SIZE',
                        help="noise-space size of one arc (repeatable)")
    search.add_argument('--workers', type=int, default=1, help="threads running restarts")

    model = argparse.ArgumentParser(add_help=False)
    model.add_argument('-A', '--hypergraph', required=True, help="hypergraph JSON file")
    model.add_argument('-d', '--distribution', required=True, help="distribution JSON file")

    parser = _Parser(prog='qim-compat', description="QIM-compatibility of distributions with hypergraphs")
    parser.add_argument('--version', action='version', version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest='command', required=True, parser_class=_Parser)

    p = sub.add_parser('profile', parents=[common], help="information profile of a distribution")
    p.add_argument('-d', '--distribution', required=True)

    p = sub.add_parser('idef', parents=[common, model], help="information deficiency")
    p.add_argument('--dagger', metavar='EXTENSION',
                   help="score the noise-explicit hypergraph against this extension instead")

    sub.add_parser('siminc', parents=[common, model, search], help="SIMInc search")
    sub.add_parser('compat', parents=[common, model, search], help="three-valued compatibility verdict")

    p = sub.add_parser('verify-witness', parents=[common, model], help="check a witness")
    p.add_argument('-w', '--witness', required=True)

    p = sub.add_parser('sem', help="structural equations models")
    sem = p.add_subparsers(dest='sem_command', required=True, parser_class=_Parser)
    for name, helptext in (('solve', "solutions in one context"), ('arise', "arising distribution"),
                           ('intervene', "intervened model"), ('do-event', "noise settings forcing values"),
                           ('formula', "evaluate a causal formula")):
        q = sem.add_parser(name, parents=[common], help=helptext)
        q.add_argument('-m', '--model', required=True, help="model JSON file")
        if name in ('solve', 'formula'):
            q.add_argument('-u', '--context', help="JSON object of noise values")
        if name in ('intervene', 'do-event'):
            q.add_argument('--set', dest='assignment', type=_assignment, action='append', required=True,
                           metavar='NAME=VALUE')
        if name == 'formula':
            q.add_argument('-f', '--formula', required=True, help="formula JSON file")

    p = sub.add_parser('corpus', parents=[common, search], help="run the golden corpus")
    p.add_argument('--write', metavar='DIR', help="also write the corpus files to DIR")
    return parser


def _configure_logging(verbosity: int) -> None:
    level = logging.WARNING if verbosity <= 0 else logging.INFO if verbosity == 1 else logging.DEBUG
    logging.basicConfig(level=level, stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")


def _options(args) -> SimincOptions:
    return SimincOptions.from_params(
        noise_sizes=_merge(args.noise_size) or None, tol=args.tol, workers=args.workers,
        restarts=args.restarts, max_iters=args.max_iters, seed=args.seed,
    )


def _load_model_inputs(args):
    A = serialization.hypergraph_from_json(serialization.load_json(args.hypergraph))
    d = serialization.distribution_from_json(serialization.load_json(args.distribution))
    return A, d


def _cmd_profile(args) -> Tuple[int, Dict]:
    d = serialization.distribution_from_json(serialization.load_json(args.distribution))
    return EXIT_COMPATIBLE, {'entropy_bits': entropy(d), 'atoms': information_profile(d).as_dict()}


def _cmd_idef(args) -> Tuple[int, Dict]:
    A, d = _load_model_inputs(args)
    if args.dagger:
        nu = serialization.distribution_from_json(serialization.load_json(args.dagger))
        return EXIT_COMPATIBLE, {'idef_dagger_bits': siminc_upper_bound(A, d, nu)}
    return EXIT_COMPATIBLE, {'idef_bits': idef(A, d)}


def _cmd_siminc(args) -> Tuple[int, Dict]:
    A, d = _load_model_inputs(args)
    return EXIT_COMPATIBLE, {'siminc': serialization.siminc_to_json(siminc(A, d, _options(args)))}


def _cmd_compat(args) -> Tuple[int, Dict]:
    A, d = _load_model_inputs(args)
    verdict = decide_general(A, d, _options(args), tol=DEFAULT_TOL if args.tol is None else args.tol)
    code = {COMPATIBLE: EXIT_COMPATIBLE, INCOMPATIBLE: EXIT_INCOMPATIBLE}.get(verdict.status, EXIT_UNKNOWN)
    return code, {'verdict': serialization.verdict_to_json(verdict)}


def _cmd_verify(args) -> Tuple[int, Dict]:
    A, d = _load_model_inputs(args)
    w = serialization.witness_from_json(serialization.load_json(args.witness))
    report = verify_witness(d, A, w, DEFAULT_TOL if args.tol is None else args.tol)
    return (EXIT_COMPATIBLE if report.passed else EXIT_INCOMPATIBLE), {'verification': report.as_dict()}


def _context(args) -> Optional[Dict[str, str]]:
    if not getattr(args, 'context', None):
        return None
    doc = serialization.loads(args.context)
    if not isinstance(doc, dict):
        raise FormatError("--context must be a JSON object")
    return {str(k): str(v) for k, v in doc.items()}


def _cmd_sem(args) -> Tuple[int, Dict]:
    M = serialization.sem_from_json(serialization.load_json(args.model))
    command = args.sem_command
    if command == 'solve':
        u = _context(args)
        if u is None:
            raise FormatError("sem solve needs --context")
        return EXIT_COMPATIBLE, {'variables': list(M.names), 'solutions': [list(s) for s in M.solutions(u)]}
    if command == 'arise':
        witness = sem_to_witness(M)
        return EXIT_COMPATIBLE, {'witness': serialization.witness_to_json(witness)}
    if command == 'intervene':
        return EXIT_COMPATIBLE, {'model': serialization.sem_to_json(M.intervene(_merge(args.assignment)))}
    if command == 'do-event':
        event = do_event(M, _merge(args.assignment))
        noise = M.noise_distribution()
        return EXIT_COMPATIBLE, {'noise_variables': list(event.names),
                                 'settings': [list(s) for s in event.settings()],
                                 'probability': probability(noise, event)}
    phi = serialization.formula_from_json(serialization.load_json(args.formula))
    u = _context(args)
    if u is not None:
        return EXIT_COMPATIBLE, {'holds': eval_formula(M, u, phi)}
    return EXIT_COMPATIBLE, {'probability': formula_probability(M, phi)}


def _cmd_corpus(args) -> Tuple[int, Dict]:
    options = _options(args)
    reports = run_corpus(options=options)
    doc = {'entries': reports, 'passed': all(r['passed'] for r in reports)}
    if args.write:
        doc['written'] = [str(p) for p in write_corpus(args.write)]
    return (EXIT_COMPATIBLE if doc['passed'] else EXIT_INCOMPATIBLE), doc


COMMANDS = {
    'profile': _cmd_profile,
    'idef': _cmd_idef,
    'siminc': _cmd_siminc,
    'compat': _cmd_compat,
    'verify-witness': _cmd_verify,
    'sem': _cmd_sem,
    'corpus': _cmd_corpus,
}


def run(argv: Optional[Sequence[str]] = None, stdout=None) -> int:
    """
    Run one command line and return its exit code.

    Args:
        argv: Arguments without the program name (default: sys.argv[1:])
        stdout: Stream receiving the JSON report (default: sys.stdout)
    """
    stdout = stdout or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    _configure_logging(args.verbose)

    try:
        code, report = COMMANDS[args.command](args)
    except FormatError as exc:
        logger.error("%s", exc)
        return EXIT_USAGE
    except (QIMError, ValueError) as exc:
        logger.error("%s", exc)
        return EXIT_DATAERR

    doc = {'version': __version__, 'command': args.command, 'seed': args.seed}
    doc.update(report)
    stdout.write(serialization.dumps(doc))
    return code


def main() -> None:
    sys.exit(run())


if __name__ == '__main__':
    main()
