"""
weavelab - Main Entry Point
Weaving-frame laboratory: generate frames, certify woven pairs and verify
the weaving identities numerically
"""

import sys
import logging
import argparse
from pathlib import Path
from typing import List, Optional

# Add src directory to path
sys.path.insert(0, str(Path(__file__).parent))

from config import (
    APP_NAME, APP_VERSION, APP_SUBTITLE, LOG_FORMAT, FRAME_KINDS,
    DEFAULT_DIM, DEFAULT_COUNT, DEFAULT_EPSILON, DEFAULT_TRIALS, DEFAULT_MAX_N,
    DEFAULT_WORKERS, EQ_TOL, INEQ_TOL, EXIT_PRECONDITION, SEED_ENV_VAR, get_log_level
)


def setup_logging(verbose: bool = False):
    """Setup logging configuration (stderr; stdout carries JSON/CSV output)"""
    level = logging.DEBUG if verbose else getattr(logging, get_log_level())
    logging.basicConfig(
        level=level,
        format=LOG_FORMAT,
        handlers=[
            logging.StreamHandler(sys.stderr)
        ],
        force=True,
    )


def _add_generator_flags(parser: argparse.ArgumentParser, default_kind: str):
    parser.add_argument('--kind', choices=FRAME_KINDS, default=default_kind,
                        help=f'Frame kind (default: {default_kind})')
    parser.add_argument('--dim', type=int, default=DEFAULT_DIM, help='Dimension d')
    parser.add_argument('--count', type=int, default=DEFAULT_COUNT, help='Number of vectors n')
    parser.add_argument('--seed', type=int, default=None,
                        help=f'Random seed (default: ${SEED_ENV_VAR} or 0)')
    parser.add_argument('--epsilon', type=float, default=DEFAULT_EPSILON,
                        help='Perturbation radius for woven_pair')
    parser.add_argument('--spec', default=None,
                        help='Generator spec JSON (replaces --kind/--dim/--count/--seed/--epsilon)')


def _add_certify_flags(parser: argparse.ArgumentParser):
    parser.add_argument('--max-n', type=int, default=DEFAULT_MAX_N,
                        help='Largest n for exhaustive partition enumeration')
    parser.add_argument('--workers', type=int, default=DEFAULT_WORKERS, help='Thread-pool size')


def _add_verify_flags(parser: argparse.ArgumentParser):
    _add_generator_flags(parser, default_kind='woven_pair')
    _add_certify_flags(parser)
    parser.add_argument('--phi', help='Frame JSON for Phi (overrides the generator flags)')
    parser.add_argument('--psi', help='Frame JSON for Psi (default: Phi)')
    parser.add_argument('--cert', default=None,
                        help='Woven certificate JSON, cross-checked against the recomputed bounds')
    parser.add_argument('--trials', type=int, default=DEFAULT_TRIALS,
                        help='Random unit vectors per partition')
    parser.add_argument('--lambdas', default=None, help='Comma separated lambda grid')
    parser.add_argument('--sigma-mode', default='all', help="'all', 'random' or 'random:K'")
    parser.add_argument('--tol-eq', type=float, default=EQ_TOL, help='Relative equality tolerance')
    parser.add_argument('--tol-ineq', type=float, default=INEQ_TOL, help='Relative inequality tolerance')
    parser.add_argument('--report', default=None, help='Write the JSON report (and a .txt summary) here')
    parser.add_argument('--corrupt-dual', action='store_true',
                        help='Debug: replace the random alternate dual by twice the canonical dual')


def parse_args(argv: Optional[List[str]] = None):
    """Parse command line arguments"""
    parser = argparse.ArgumentParser(prog=APP_NAME, description=f'{APP_NAME} - {APP_SUBTITLE}')
    parser.add_argument('--verbose', '-v', action='store_true', help='Debug logging')
    parser.add_argument('--version', action='version', version=f'{APP_NAME} {APP_VERSION}')
    subparsers = parser.add_subparsers(dest='command', required=True)

    gen_parser = subparsers.add_parser('gen', help='Generate a frame or a certified woven pair')
    _add_generator_flags(gen_parser, default_kind='random')
    gen_parser.add_argument('-o', '--output', default=None,
                            help='Output file (woven_pair: prefix for .phi/.psi/.cert.json)')

    inspect_parser = subparsers.add_parser('inspect', help='Frame bounds and tightness of a frame file')
    inspect_parser.add_argument('path', help='Frame JSON')

    woven_parser = subparsers.add_parser('woven-check', help='Certify two frames as woven')
    woven_parser.add_argument('a', help='Frame JSON for Phi')
    woven_parser.add_argument('b', help='Frame JSON for Psi')
    _add_certify_flags(woven_parser)

    verify_parser = subparsers.add_parser('verify', help='Verify every identity on a woven pair')
    _add_verify_flags(verify_parser)

    sweep_parser = subparsers.add_parser('sweep-lambda', help='CSV of min slack per (lambda, theorem)')
    _add_verify_flags(sweep_parser)
    sweep_parser.add_argument('-o', '--output', default=None, help='CSV file (default: stdout)')

    return parser.parse_args(argv)


def main(argv: Optional[List[str]] = None) -> int:
    """Main application entry point"""
    try:
        args = parse_args(argv)
    except SystemExit as e:
        # argparse exits 2 on usage errors; --help/--version exit 0
        return int(e.code or 0)

    setup_logging(args.verbose)
    logger = logging.getLogger(__name__)
    logger.debug(f"{APP_NAME} v{APP_VERSION}: {args.command}")

    from cli.commands import cmd_gen, cmd_inspect, cmd_woven_check, cmd_verify, cmd_sweep_lambda
    commands = {
        'gen': cmd_gen,
        'inspect': cmd_inspect,
        'woven-check': cmd_woven_check,
        'verify': cmd_verify,
        'sweep-lambda': cmd_sweep_lambda,
    }

    try:
        return commands[args.command](args)
    except Exception as e:
        logger.error(f"Application error: {e}", exc_info=True)
        return EXIT_PRECONDITION


if __name__ == "__main__":
    sys.exit(main())
