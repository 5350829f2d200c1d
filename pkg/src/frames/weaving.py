"""
Weavings of two frames: the woven family for a partition, its frame operator
and partial operators, exhaustive woven-ness certification, and duals of a
weaving (canonical and random alternate).
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, List, Optional, Tuple

import numpy as np

from config import (
    PD_TOL, BORDERLINE_FACTOR, DEFAULT_MAX_N, DEFAULT_WORKERS, PARSEVAL_TOL, TIGHT_TOL
)
from frames.base import (
    FrameFamily, PartitionMask, ShapeMismatch, NotWovenAtPartition, NotWoven,
    TooLarge, NoFreedom
)
from frames.linalg import hermitian_eig, psd_apply, fro_norm, is_positive_definite, pd_threshold
from frames.operators import frame_operator, partial_frame_operator

logger = logging.getLogger(__name__)

# Masks evaluated per batch in the brute-force sweep. Fixed so that the
# reduction does not depend on the worker count.
_SWEEP_CHUNK = 1024


def _check_pair(phi: FrameFamily, psi: FrameFamily):
    if phi.n != psi.n or phi.dim != psi.dim:
        raise ShapeMismatch(
            f"Cannot weave {phi.n} vectors in C^{phi.dim} with {psi.n} vectors in C^{psi.dim}"
        )


def weave(phi: FrameFamily, psi: FrameFamily, sigma: PartitionMask) -> FrameFamily:
    """
    The weaving {phi_i}_{i in sigma} u {psi_i}_{i in sigma^c}

    Index positions are preserved: w_i = phi_i if i in sigma else psi_i.
    """
    _check_pair(phi, psi)
    if sigma.n != phi.n:
        raise ShapeMismatch(f"Mask over {sigma.n} indices for families of {phi.n} vectors")
    take_phi = sigma.as_array()[:, None]
    return FrameFamily(np.where(take_phi, phi.vectors, psi.vectors))


@dataclass(frozen=True, eq=False)
class WeavingContext:
    """A weaving with its cached operators; build it with weaving_context()"""
    phi: FrameFamily
    psi: FrameFamily
    sigma: PartitionMask
    woven: FrameFamily
    S_W: np.ndarray
    S_W_sigma: np.ndarray
    S_W_sigma_c: np.ndarray
    S_W_inv: np.ndarray
    S_W_sqrt: np.ndarray
    S_W_inv_sqrt: np.ndarray
    eigenvalues: np.ndarray

    @property
    def n(self) -> int:
        return self.phi.n

    @property
    def dim(self) -> int:
        return self.phi.dim

    @property
    def lower(self) -> float:
        return float(self.eigenvalues[0])

    @property
    def upper(self) -> float:
        return float(self.eigenvalues[-1])

    def is_parseval(self, tol: float = PARSEVAL_TOL) -> bool:
        """S_W = I within tol (Frobenius)"""
        return fro_norm(self.S_W - np.eye(self.dim)) <= tol

    def tightness(self, tol: float = TIGHT_TOL) -> Tuple[bool, float]:
        """(S_W = A I within tol * A, A) with A = trace(S_W)/d"""
        a = float(np.real(np.trace(self.S_W))) / self.dim
        return fro_norm(self.S_W - a * np.eye(self.dim)) <= tol * a, a

    @cached_property
    def dual_rows(self) -> np.ndarray:
        """Rows S_W^{-1} w_i of the canonical dual (read-only)"""
        rows = self.woven.vectors @ self.S_W_inv.T
        rows.setflags(write=False)
        return rows

    @cached_property
    def normalized(self) -> Tuple[np.ndarray, np.ndarray]:
        """normalized_pair(self), computed once (read-only)"""
        p, q = normalized_pair(self)
        p.setflags(write=False)
        q.setflags(write=False)
        return p, q


def weaving_context(phi: FrameFamily, psi: FrameFamily, sigma: PartitionMask,
                    pd_tol: float = PD_TOL) -> WeavingContext:
    """
    Build the weaving at sigma and cache S_W, S_W^sigma, S_W^sigma^c and the
    functional-calculus images of S_W

    Raises:
        ShapeMismatch: if the families or the mask disagree on shape
        NotWovenAtPartition: if this weaving is not a frame
    """
    woven = weave(phi, psi, sigma)
    s_sigma = partial_frame_operator(phi, sigma)
    s_sigma_c = partial_frame_operator(psi, sigma.complement())
    s_w = frame_operator(woven)

    eig = hermitian_eig(s_w)
    w = eig.eigenvalues
    if not is_positive_definite(w, pd_tol):
        smallest = float(w[0]) if w.size else 0.0
        raise NotWovenAtPartition(
            f"Weaving at sigma={sigma} is not a frame "
            f"(lambda_min {smallest:.3e} <= {pd_threshold(w, pd_tol):.3e})",
            sigma=sigma,
        )

    return WeavingContext(
        phi=phi,
        psi=psi,
        sigma=sigma,
        woven=woven,
        S_W=s_w,
        S_W_sigma=s_sigma,
        S_W_sigma_c=s_sigma_c,
        S_W_inv=psd_apply(eig, 'inverse'),
        S_W_sqrt=psd_apply(eig, 'sqrt'),
        S_W_inv_sqrt=psd_apply(eig, 'inv_sqrt'),
        eigenvalues=w,
    )


def normalized_pair(ctx: WeavingContext) -> Tuple[np.ndarray, np.ndarray]:
    """
    P = S_W^{-1/2} S_W^sigma S_W^{-1/2} and Q = S_W^{-1/2} S_W^sigma^c S_W^{-1/2}

    P + Q = I, both Hermitian PSD and commuting.
    """
    r = ctx.S_W_inv_sqrt
    return r @ ctx.S_W_sigma @ r, r @ ctx.S_W_sigma_c @ r


@dataclass(frozen=True)
class WovenCertificate:
    """Universal bounds of a woven pair found by exhaustive enumeration"""
    universal_lower: float
    universal_upper: float
    witness_partition_lower: PartitionMask
    witness_partition_upper: PartitionMask
    partitions_checked: int
    n: int
    borderline: Tuple[PartitionMask, ...] = field(default_factory=tuple)

    @property
    def complete(self) -> bool:
        """Valid only when every one of the 2^n partitions was checked"""
        return self.partitions_checked == (1 << self.n)

    def to_dict(self) -> Dict:
        return {
            'A': self.universal_lower,
            'B': self.universal_upper,
            'witness_lower': self.witness_partition_lower.to_bits(),
            'witness_upper': self.witness_partition_upper.to_bits(),
            'checked': self.partitions_checked,
            'borderline': [m.to_bits() for m in self.borderline],
        }

    @classmethod
    def from_dict(cls, data: Dict) -> 'WovenCertificate':
        lower = PartitionMask.from_bits(data['witness_lower'])
        return cls(
            universal_lower=float(data['A']),
            universal_upper=float(data['B']),
            witness_partition_lower=lower,
            witness_partition_upper=PartitionMask.from_bits(data['witness_upper']),
            partitions_checked=int(data['checked']),
            n=lower.n,
            borderline=tuple(PartitionMask.from_bits(b) for b in data.get('borderline', [])),
        )


@dataclass
class _ChunkResult:
    lower: Tuple[float, int]
    upper: Tuple[float, int]
    first_failure: Optional[int]
    borderline: List[int]


def _sweep_chunk(outer_phi: np.ndarray, outer_psi: np.ndarray, start: int, stop: int,
                 pd_tol: float) -> _ChunkResult:
    n = outer_phi.shape[0]
    masks = np.arange(start, stop, dtype=np.int64)
    member = ((masks[:, None] >> np.arange(n)) & 1).astype(float)

    # S_W for every mask in the chunk: sum over i of the chosen outer product
    s_w = (np.einsum('ki,ijl->kjl', member, outer_phi)
           + np.einsum('ki,ijl->kjl', 1.0 - member, outer_psi))
    s_w = (s_w + np.conj(np.swapaxes(s_w, 1, 2))) / 2
    eig = np.linalg.eigvalsh(s_w)
    lam_min = eig[:, 0]
    lam_max = eig[:, -1]
    thresholds = pd_tol * np.maximum(lam_max, 0.0)

    failing = np.nonzero((lam_min <= thresholds) | (lam_max <= 0.0))[0]
    near = np.nonzero((lam_min > thresholds) & (lam_min <= BORDERLINE_FACTOR * thresholds))[0]

    lo = int(np.argmin(lam_min))
    hi = int(np.argmax(lam_max))
    return _ChunkResult(
        lower=(float(lam_min[lo]), int(masks[lo])),
        upper=(float(lam_max[hi]), int(masks[hi])),
        first_failure=int(masks[failing[0]]) if failing.size else None,
        borderline=[int(masks[k]) for k in near],
    )


def woven_bounds_bruteforce(phi: FrameFamily, psi: FrameFamily, max_n: int = DEFAULT_MAX_N,
                            workers: int = DEFAULT_WORKERS, pd_tol: float = PD_TOL) -> WovenCertificate:
    """
    Certify woven-ness by checking all 2^n weavings

    Args:
        phi: First frame
        psi: Second frame (same n and d)
        max_n: Refuse to enumerate beyond this many indices
        workers: Thread-pool size; the result does not depend on it
        pd_tol: Relative threshold for "is a frame"

    Returns:
        WovenCertificate with A = min lambda_min, B = max lambda_max

    Raises:
        TooLarge: if n > max_n
        NotWoven: with the smallest failing mask as witness
    """
    _check_pair(phi, psi)
    n = phi.n
    if n > max_n:
        raise TooLarge(f"n={n} exceeds max_n={max_n} (2^{n} partitions)")

    total = 1 << n
    logger.info(f"Certifying woven pair: n={n}, d={phi.dim}, {total} partitions")

    outer_phi = np.einsum('ij,ik->ijk', phi.vectors, phi.vectors.conj())
    outer_psi = np.einsum('ij,ik->ijk', psi.vectors, psi.vectors.conj())
    ranges = [(start, min(start + _SWEEP_CHUNK, total)) for start in range(0, total, _SWEEP_CHUNK)]

    if workers > 1 and len(ranges) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda r: _sweep_chunk(outer_phi, outer_psi, r[0], r[1], pd_tol), ranges))
    else:
        results = [_sweep_chunk(outer_phi, outer_psi, start, stop, pd_tol) for start, stop in ranges]

    failures = [r.first_failure for r in results if r.first_failure is not None]
    if failures:
        witness = PartitionMask.from_int(min(failures), n)
        logger.info(f"Pair is not woven: weaving at sigma={witness} is not a frame")
        raise NotWoven(f"Weaving at sigma={witness} is not a frame", sigma=witness)

    # ties resolve to the smallest mask
    lower_value, lower_mask = min((r.lower for r in results), key=lambda t: (t[0], t[1]))
    upper_value, upper_mask = min((r.upper for r in results), key=lambda t: (-t[0], t[1]))
    borderline = sorted(m for r in results for m in r.borderline)
    if borderline:
        logger.warning(f"{len(borderline)} weaving(s) have lambda_min within "
                       f"{BORDERLINE_FACTOR}x of the frame threshold")

    cert = WovenCertificate(
        universal_lower=lower_value,
        universal_upper=upper_value,
        witness_partition_lower=PartitionMask.from_int(lower_mask, n),
        witness_partition_upper=PartitionMask.from_int(upper_mask, n),
        partitions_checked=total,
        n=n,
        borderline=tuple(PartitionMask.from_int(m, n) for m in borderline),
    )
    logger.info(f"Woven: A={cert.universal_lower:.6g}, B={cert.universal_upper:.6g}")
    return cert


def canonical_weaving_dual(ctx: WeavingContext) -> FrameFamily:
    """{S_W^{-1} w_i} where w is the woven family"""
    return FrameFamily(ctx.dual_rows)


def _dual_operator(ctx: WeavingContext, theta: FrameFamily) -> np.ndarray:
    # f -> sum_i <f, w_i> theta_i
    return theta.vectors.T @ ctx.woven.vectors.conj()


def validate_alternate_dual(ctx: WeavingContext, theta: FrameFamily) -> float:
    """
    Operator residual ||sum_i theta_i w_i^* - I||_F; zero iff theta is a dual
    of the weaving

    Raises:
        ShapeMismatch: if theta does not have n vectors in C^d
    """
    if theta.n != ctx.n or theta.dim != ctx.dim:
        raise ShapeMismatch(f"Dual {theta} does not match a weaving of {ctx.n} vectors in C^{ctx.dim}")
    return fro_norm(_dual_operator(ctx, theta) - np.eye(ctx.dim))


def random_alternate_dual(ctx: WeavingContext, seed: int) -> FrameFamily:
    """
    Canonical dual plus a seeded component in the null space of the weaving's
    analysis adjoint

    The perturbation U satisfies sum_i u_i w_i^* = 0: a random d x n matrix
    is projected onto the orthogonal complement of range(T), where T is the
    analysis map f -> (<f, w_i>)_i.

    Raises:
        NoFreedom: if n == d (the canonical dual is the only dual)
    """
    if ctx.n <= ctx.dim:
        raise NoFreedom(f"n={ctx.n} equals d={ctx.dim}: the dual is unique")

    rng = np.random.default_rng(seed)
    t = ctx.woven.vectors.conj()                       # n x d analysis matrix
    projector = np.eye(ctx.n) - t @ ctx.S_W_inv @ t.conj().T
    r = (rng.standard_normal((ctx.dim, ctx.n)) + 1j * rng.standard_normal((ctx.dim, ctx.n))) / np.sqrt(2)
    perturbation = (r @ projector).T                   # row i -> u_i

    return FrameFamily(canonical_weaving_dual(ctx).vectors + perturbation)
