"""
Verification driver - run every applicable identity check over the partitions
of a woven pair and aggregate the records
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from config import (
    DEFAULT_LAMBDA_GRID, DEFAULT_TRIALS, DEFAULT_MAX_N, DEFAULT_WORKERS, DEFAULT_SEED,
    EQ_TOL, INEQ_TOL, SIGMA_MODES, THEOREM_IDS
)
from frames.base import FrameError, FrameFamily, NoFreedom, PartitionMask, TooLarge
from frames.generators import GenSpec, gen_woven_pair, generate
from frames.weaving import (
    WeavingContext, WovenCertificate, canonical_weaving_dual, random_alternate_dual,
    weaving_context, woven_bounds_bruteforce
)
from identities.base import AltDualContext, IdentityRecord, RecordBatch, alt_dual_context
from identities.checks import BaseCheck, TrialBatch, default_checks
from utils.frame_io import load_certificate, load_frame

logger = logging.getLogger(__name__)


class ConfigError(FrameError):
    """The verification settings are unusable"""
    pass


@dataclass
class VerifyConfig:
    """Everything that determines a verification run"""
    phi_path: Optional[Path] = None
    psi_path: Optional[Path] = None
    cert_path: Optional[Path] = None
    gen: GenSpec = field(default_factory=GenSpec)
    trials: int = DEFAULT_TRIALS
    lambda_grid: Tuple[float, ...] = DEFAULT_LAMBDA_GRID
    sigma_mode: str = 'all'
    sigma_samples: int = 0
    eq_tol: float = EQ_TOL
    ineq_tol: float = INEQ_TOL
    seed: int = DEFAULT_SEED
    max_n: int = DEFAULT_MAX_N
    workers: int = DEFAULT_WORKERS
    corrupt_dual: bool = False
    report_path: Optional[Path] = None

    def validate(self):
        """
        Raises:
            ConfigError: on an unusable setting
        """
        if self.trials < 1:
            raise ConfigError(f"trials must be >= 1, got {self.trials}")
        if not self.lambda_grid:
            raise ConfigError("lambda grid is empty")
        if not all(np.isfinite(lam) for lam in self.lambda_grid):
            raise ConfigError(f"lambda grid must be finite, got {list(self.lambda_grid)}")
        if self.eq_tol <= 0 or self.ineq_tol <= 0:
            raise ConfigError(f"tolerances must be > 0 (eq {self.eq_tol}, ineq {self.ineq_tol})")
        if self.sigma_mode not in SIGMA_MODES:
            raise ConfigError(f"Unknown sigma mode {self.sigma_mode!r}; expected one of {SIGMA_MODES}")
        if self.sigma_mode == 'random' and self.sigma_samples < 1:
            raise ConfigError("random sigma mode needs a sample count >= 1")
        if self.seed < 0:
            raise ConfigError(f"seed must be >= 0, got {self.seed}")
        if self.workers < 1:
            raise ConfigError(f"workers must be >= 1, got {self.workers}")
        if self.psi_path is not None and self.phi_path is None:
            raise ConfigError("--psi given without --phi")

    def to_dict(self) -> Dict:
        return {
            'phi': str(self.phi_path) if self.phi_path else None,
            'psi': str(self.psi_path) if self.psi_path else None,
            'cert': str(self.cert_path) if self.cert_path else None,
            'gen': None if self.phi_path else self.gen.to_dict(),
            'trials': self.trials,
            'lambdas': [float(lam) for lam in self.lambda_grid],
            'sigma_mode': self.sigma_mode,
            'sigma_samples': self.sigma_samples,
            'eq_tol': self.eq_tol,
            'ineq_tol': self.ineq_tol,
            'seed': self.seed,
            'max_n': self.max_n,
            'corrupt_dual': self.corrupt_dual,
        }


@dataclass
class TheoremStats:
    """Running aggregate for one theorem (and optionally one lambda)"""
    count: int = 0
    failed: int = 0
    max_residual: Optional[float] = None
    min_slack: Optional[float] = None

    def add(self, record: IdentityRecord):
        self._fold(1, 0 if record.passed else 1, record.equality_residual, record.slack)

    def add_batch(self, batch: RecordBatch):
        self._fold(
            len(batch),
            int(np.count_nonzero(~batch.passed)),
            None if batch.residuals is None else float(np.max(batch.residuals)),
            None if batch.slacks is None else float(np.min(batch.slacks)),
        )

    def _fold(self, count: int, failed: int, residual: Optional[float], slack: Optional[float]):
        self.count += count
        self.failed += failed
        if residual is not None:
            self.max_residual = residual if self.max_residual is None else max(self.max_residual, residual)
        if slack is not None:
            self.min_slack = slack if self.min_slack is None else min(self.min_slack, slack)

    def merge(self, other: 'TheoremStats'):
        self.count += other.count
        self.failed += other.failed
        for name, pick in (('max_residual', max), ('min_slack', min)):
            mine, theirs = getattr(self, name), getattr(other, name)
            if theirs is not None:
                setattr(self, name, theirs if mine is None else pick(mine, theirs))

    def to_dict(self) -> Dict:
        return {
            'count': self.count,
            'passed': self.count - self.failed,
            'failed': self.failed,
            'max_residual': self.max_residual,
            'min_slack': self.min_slack,
        }


def _theorem_rank(theorem_id: str) -> int:
    return THEOREM_IDS.index(theorem_id) if theorem_id in THEOREM_IDS else len(THEOREM_IDS)


def _failure_key(entry: Dict):
    lam = entry['lambda']
    return (entry['mask'], float('-inf') if lam is None else lam, entry['trial'],
            _theorem_rank(entry['theorem']), entry.get('label', ''))


@dataclass
class PartitionOutcome:
    """Aggregates for one partition; merged in mask order"""
    mask: int
    stats: Dict[Tuple[str, Optional[float]], TheoremStats] = field(default_factory=dict)
    failures: List[Dict] = field(default_factory=list)


@dataclass
class VerificationResult:
    config: VerifyConfig
    phi: FrameFamily
    psi: FrameFamily
    certificate: Optional[WovenCertificate]
    partitions: int
    sigma_complete: bool
    stats: Dict[Tuple[str, Optional[float]], TheoremStats]
    failures: List[Dict]

    @property
    def n(self) -> int:
        return self.phi.n

    @property
    def dim(self) -> int:
        return self.phi.dim

    @property
    def certified(self) -> bool:
        return self.certificate is not None and self.certificate.complete

    @property
    def passed(self) -> bool:
        return not self.failures

    def theorem_summary(self) -> Dict[str, Dict]:
        """Per-theorem aggregate over every lambda, in report order"""
        merged: Dict[str, TheoremStats] = {}
        for (theorem_id, _), stats in self.stats.items():
            merged.setdefault(theorem_id, TheoremStats()).merge(stats)
        ordered = sorted(merged, key=_theorem_rank)
        return {tid: merged[tid].to_dict() for tid in ordered}

    def lambda_rows(self) -> List[Dict]:
        """
        One row per (lambda, theorem); identities without a parameter get a
        single row with lambda None, sorted ahead of the grid
        """
        rows = []
        for (theorem_id, lam), stats in self.stats.items():
            rows.append({
                'lambda': lam,
                'theorem': theorem_id,
                'min_slack': stats.min_slack,
                'max_residual': stats.max_residual,
                'trials': stats.count,
            })
        rows.sort(key=lambda r: (float('-inf') if r['lambda'] is None else r['lambda'],
                                 _theorem_rank(r['theorem'])))
        return rows


def random_unit_vector(rng: np.random.Generator, dim: int) -> np.ndarray:
    """Uniform on the unit sphere of C^d (normalized complex Gaussian)"""
    while True:
        z = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
        norm = np.linalg.norm(z)
        if norm > 0:
            return z / norm


def check_certificate(stored: WovenCertificate, computed: Optional[WovenCertificate],
                      n: int, rtol: float = 1e-9) -> WovenCertificate:
    """
    Reconcile a certificate read from disk with the one computed for the pair

    With nothing computed (n above max_n) the stored certificate is taken
    as given.

    Raises:
        ConfigError: if the stored certificate is for another n or its
            bounds disagree with the computed ones
    """
    if stored.n != n:
        raise ConfigError(f"Certificate is for n={stored.n}, pair has n={n}")
    if computed is None:
        logger.info(f"Using stored certificate A={stored.universal_lower:.6g}, B={stored.universal_upper:.6g}")
        return stored
    for name, mine, theirs in (('A', computed.universal_lower, stored.universal_lower),
                               ('B', computed.universal_upper, stored.universal_upper)):
        if not np.isclose(mine, theirs, rtol=rtol, atol=1e-12):
            raise ConfigError(f"Stored certificate {name}={theirs:.12g} does not match computed {mine:.12g}")
    return computed


def load_pair(config: VerifyConfig) -> Tuple[FrameFamily, FrameFamily, Optional[WovenCertificate]]:
    """
    Frames from files (Psi defaults to Phi) or from the generator spec

    Returns:
        (Phi, Psi, certificate when the generator already produced one)
    """
    if config.phi_path is not None:
        phi = load_frame(config.phi_path)
        psi = load_frame(config.psi_path) if config.psi_path is not None else phi
        return phi, psi, None

    spec = config.gen
    spec.validate()
    if spec.kind == 'woven_pair':
        return gen_woven_pair(spec.dim, spec.count, spec.epsilon, spec.seed, max_n=config.max_n)
    family = generate(spec)
    return family, family, None


class VerificationManager:
    """Manage the verification of every identity over the partitions of a pair"""

    def __init__(self, config: VerifyConfig, checks: Optional[List[BaseCheck]] = None):
        self.config = config
        self.checks = checks if checks is not None else default_checks()

    def select_partitions(self, n: int) -> Tuple[List[int], bool]:
        """
        Returns:
            (ascending mask integers, whether every partition is covered)
        """
        total = 1 << n
        if self.config.sigma_mode == 'all':
            if n > self.config.max_n:
                raise TooLarge(f"n={n} exceeds max_n={self.config.max_n}; use --sigma-mode random")
            return list(range(total)), True

        rng = np.random.default_rng([self.config.seed, 2])
        if total <= self.config.sigma_samples:
            return list(range(total)), True
        if n < 63:
            drawn = rng.integers(0, total, size=self.config.sigma_samples)
            masks = sorted(set(int(m) for m in drawn))
        else:
            bits = rng.integers(0, 2, size=(self.config.sigma_samples, n))
            masks = sorted(set(sum(int(b) << i for i, b in enumerate(row)) for row in bits))
        return masks, False

    def run(self, progress_callback: Optional[Callable[[int, int], None]] = None) -> VerificationResult:
        """
        Certify the pair, then evaluate every applicable check

        Args:
            progress_callback: Called with (partitions done, total)

        Returns:
            VerificationResult

        Raises:
            FrameError: on any precondition failure (bad config, unreadable
                frames, NotWoven, TooLarge, InvalidDual)
        """
        cfg = self.config
        cfg.validate()

        phi, psi, cert = load_pair(cfg)
        if phi.n != psi.n or phi.dim != psi.dim:
            raise ConfigError(f"Phi {phi} and Psi {psi} do not have matching shapes")
        n = phi.n

        if cert is None and n <= cfg.max_n:
            cert = woven_bounds_bruteforce(phi, psi, max_n=cfg.max_n, workers=cfg.workers)
        if cfg.cert_path is not None:
            cert = check_certificate(load_certificate(cfg.cert_path), cert, n)
        if cert is None:
            logger.warning(f"n={n} > max_n={cfg.max_n}: pair is not certified woven")

        masks, complete = self.select_partitions(n)
        if not complete:
            logger.warning(f"Sampling {len(masks)} of 2^{n} partitions: coverage is incomplete")
        logger.info(f"Verifying {len(masks)} partition(s), {cfg.trials} trial(s), "
                    f"lambdas {list(cfg.lambda_grid)}")

        outcomes: List[PartitionOutcome] = []
        total = len(masks)
        if cfg.workers > 1 and total > 1:
            with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
                for idx, outcome in enumerate(pool.map(lambda m: self._verify_partition(phi, psi, m), masks), 1):
                    outcomes.append(outcome)
                    if progress_callback:
                        progress_callback(idx, total)
        else:
            for idx, mask in enumerate(masks, 1):
                outcomes.append(self._verify_partition(phi, psi, mask))
                if progress_callback:
                    progress_callback(idx, total)

        stats: Dict[Tuple[str, Optional[float]], TheoremStats] = {}
        failures: List[Dict] = []
        for outcome in outcomes:
            for key, part in outcome.stats.items():
                stats.setdefault(key, TheoremStats()).merge(part)
            failures.extend(outcome.failures)
        failures.sort(key=_failure_key)

        result = VerificationResult(
            config=cfg,
            phi=phi,
            psi=psi,
            certificate=cert,
            partitions=total,
            sigma_complete=complete,
            stats=stats,
            failures=failures,
        )
        logger.info(f"Verification complete: {sum(s.count for s in stats.values())} records, "
                    f"{len(failures)} failure(s)")
        return result

    def _duals(self, ctx: WeavingContext, dual_seed: int,
               weights: np.ndarray) -> Tuple[List[Tuple[str, AltDualContext]], AltDualContext]:
        canonical = canonical_weaving_dual(ctx)
        duals = [('canonical', alt_dual_context(ctx, canonical))]

        if self.config.corrupt_dual:
            other = canonical.scaled(2.0)
            duals.append(('corrupted', alt_dual_context(ctx, other)))
        else:
            try:
                other = random_alternate_dual(ctx, dual_seed)
                duals.append(('random', alt_dual_context(ctx, other)))
            except NoFreedom:
                other = canonical

        return duals, alt_dual_context(ctx, other, weights)

    def _verify_partition(self, phi: FrameFamily, psi: FrameFamily, mask: int) -> PartitionOutcome:
        cfg = self.config
        sigma = PartitionMask.from_int(mask, phi.n)
        ctx = weaving_context(phi, psi, sigma)

        # per-partition stream: results do not depend on worker count or order
        rng = np.random.default_rng([cfg.seed, mask])
        dual_seed = int(rng.integers(0, 2 ** 32))
        weights = rng.standard_normal(phi.n) + 1j * rng.standard_normal(phi.n)
        duals, weighted = self._duals(ctx, dual_seed, weights)

        checks = [c for c in self.checks if c.can_check(ctx)]
        outcome = PartitionOutcome(mask=mask)

        vectors = np.stack([random_unit_vector(rng, phi.dim) for _ in range(cfg.trials)])
        trials = TrialBatch(ctx=ctx, vectors=vectors, duals=duals, weighted=weighted,
                            check_dual=not cfg.corrupt_dual, eq_tol=cfg.eq_tol, ineq_tol=cfg.ineq_tol)
        for check in checks:
            lambdas: Sequence[Optional[float]] = cfg.lambda_grid if check.uses_lambda else (None,)
            for lam in lambdas:
                for batch in check.run(trials, None if lam is None else float(lam)):
                    self._collect(outcome, batch, mask, vectors)

        return outcome

    @staticmethod
    def _collect(outcome: PartitionOutcome, batch: RecordBatch, mask: int, vectors: np.ndarray):
        key = (batch.theorem_id, batch.lam)
        outcome.stats.setdefault(key, TheoremStats()).add_batch(batch)
        for j in batch.failed_indices:
            entry = batch.record(int(j)).to_dict()
            entry['mask'] = mask
            entry['trial'] = int(j)
            entry['f'] = [[float(z.real), float(z.imag)] for z in vectors[j]]
            outcome.failures.append(entry)
