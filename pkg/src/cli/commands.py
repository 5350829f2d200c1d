"""
Subcommand implementations. Every cmd_* takes the parsed argparse namespace
and returns an exit code: 0 success, 1 a failed check, 2 a precondition or
input problem.
"""

import json
import logging
import sys
from pathlib import Path
from typing import Dict

from config import (
    DEFAULT_LAMBDA_GRID, EXIT_OK, EXIT_FAILED, EXIT_PRECONDITION,
    get_default_seed, parse_lambda_list, parse_sigma_mode
)
from frames.base import FrameError, GenerationFailed, NotWoven
from frames.generators import GenSpec, generate
from frames.operators import frame_bounds, frame_tightness, is_parseval
from frames.weaving import woven_bounds_bruteforce
from utils.frame_io import frame_to_dict, load_frame, load_gen_spec, save_certificate, save_frame
from utils.report import ReportGenerator
from utils.verifier import VerificationManager, VerificationResult, VerifyConfig

logger = logging.getLogger(__name__)


def _print_json(data: Dict):
    json.dump(data, sys.stdout, indent=2)
    sys.stdout.write('\n')


def _seed(args) -> int:
    return args.seed if getattr(args, 'seed', None) is not None else get_default_seed()


def gen_spec_from_args(args) -> GenSpec:
    """
    A --spec file replaces the individual generator flags

    Raises:
        FrameFileError: if the spec file cannot be read
    """
    if getattr(args, 'spec', None):
        return load_gen_spec(Path(args.spec))
    return GenSpec(kind=args.kind, dim=args.dim, count=args.count,
                   seed=_seed(args), epsilon=args.epsilon)


def cmd_gen(args) -> int:
    """Generate a frame (or a certified woven pair) and write Frame JSON"""
    try:
        spec = gen_spec_from_args(args)
        result = generate(spec)
    except GenerationFailed as e:
        logger.error(f"Generation gave up: {e}")
        return EXIT_PRECONDITION
    except (FrameError, ValueError) as e:
        logger.error(f"Bad generator spec: {e}")
        return EXIT_PRECONDITION

    provenance = {'generator': spec.to_dict()}

    if spec.kind != 'woven_pair':
        if args.output:
            save_frame(result, Path(args.output), provenance)
        else:
            _print_json(frame_to_dict(result, provenance))
        return EXIT_OK

    phi, psi, cert = result
    if args.output:
        prefix = str(args.output)
        save_frame(phi, Path(f"{prefix}.phi.json"), provenance)
        save_frame(psi, Path(f"{prefix}.psi.json"), provenance)
        save_certificate(cert, Path(f"{prefix}.cert.json"))
    else:
        _print_json({
            'phi': frame_to_dict(phi),
            'psi': frame_to_dict(psi),
            'certificate': cert.to_dict(),
            **provenance,
        })
    return EXIT_OK


def cmd_inspect(args) -> int:
    """Print dim, count, frame bounds and tightness of a frame file"""
    try:
        family = load_frame(Path(args.path))
        bounds = frame_bounds(family)
    except FrameError as e:
        logger.error(str(e))
        return EXIT_PRECONDITION

    tight, constant = frame_tightness(family)
    _print_json({
        'dim': family.dim,
        'count': family.n,
        **bounds.to_dict(),
        'tight': tight,
        'tight_constant': constant if tight else None,
        'parseval': is_parseval(family),
    })
    return EXIT_OK


def cmd_woven_check(args) -> int:
    """Certify two frame files as woven by exhaustive enumeration"""
    try:
        phi = load_frame(Path(args.a))
        psi = load_frame(Path(args.b))
        cert = woven_bounds_bruteforce(phi, psi, max_n=args.max_n, workers=args.workers)
    except NotWoven as e:
        logger.error(str(e))
        _print_json({'woven': False, 'witness': e.sigma.to_bits() if e.sigma else None})
        return EXIT_FAILED
    except FrameError as e:
        logger.error(str(e))
        return EXIT_PRECONDITION

    _print_json(cert.to_dict())
    return EXIT_OK


def verify_config_from_args(args) -> VerifyConfig:
    """
    Raises:
        ValueError: on an unparseable flag value
    """
    lambdas = parse_lambda_list(args.lambdas) if args.lambdas is not None else list(DEFAULT_LAMBDA_GRID)
    mode, samples = parse_sigma_mode(args.sigma_mode)
    return VerifyConfig(
        phi_path=Path(args.phi) if args.phi else None,
        psi_path=Path(args.psi) if args.psi else None,
        cert_path=Path(args.cert) if args.cert else None,
        gen=gen_spec_from_args(args),
        trials=args.trials,
        lambda_grid=tuple(lambdas),
        sigma_mode=mode,
        sigma_samples=samples,
        eq_tol=args.tol_eq,
        ineq_tol=args.tol_ineq,
        seed=_seed(args),
        max_n=args.max_n,
        workers=args.workers,
        corrupt_dual=args.corrupt_dual,
        report_path=Path(args.report) if args.report else None,
    )


def _run_verification(args):
    config = verify_config_from_args(args)
    return VerificationManager(config).run()


def _write_reports(result: VerificationResult):
    report_path = result.config.report_path
    if report_path is None:
        return
    ReportGenerator.write_json_report(result, report_path)
    ReportGenerator.generate_summary_report(result, report_path.with_suffix('.txt'))


def _exit_for(result: VerificationResult) -> int:
    if result.passed:
        logger.info("All identity checks passed")
        return EXIT_OK
    first = result.failures[0]
    logger.error(f"{len(result.failures)} record(s) failed; first: {first['theorem']} "
                 f"at sigma={first['sigma']}, lambda={first['lambda']}, trial={first['trial']}")
    return EXIT_FAILED


def cmd_verify(args) -> int:
    """Run every applicable identity over the partitions of a woven pair"""
    try:
        result = _run_verification(args)
    except (FrameError, ValueError) as e:
        logger.error(f"Precondition failed: {e}")
        return EXIT_PRECONDITION

    _write_reports(result)
    _print_json({
        'pass': result.passed,
        'certified': result.certified,
        'partitions': result.partitions,
        'failures': len(result.failures),
        'theorems': result.theorem_summary(),
    })
    return _exit_for(result)


def cmd_sweep_lambda(args) -> int:
    """Tabulate min slack per (lambda, theorem) as CSV"""
    try:
        result = _run_verification(args)
    except (FrameError, ValueError) as e:
        logger.error(f"Precondition failed: {e}")
        return EXIT_PRECONDITION

    _write_reports(result)
    if args.output:
        ReportGenerator.write_sweep_csv(result, Path(args.output))
    else:
        ReportGenerator.sweep_frame(result).to_csv(sys.stdout, index=False)
    return _exit_for(result)
