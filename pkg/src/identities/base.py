"""
Base types for identity evaluation: the per-evaluation record, its batched
form over a stack of test vectors, and the alternate-dual context shared by
the dual identities
"""

import logging
from dataclasses import dataclass
from functools import cached_property
from typing import Dict, Iterable, Optional, Sequence, Tuple, Union

import numpy as np

from config import EQ_TOL, INEQ_TOL, DUAL_TOL
from frames.base import FrameError, FrameFamily, PartitionMask, ShapeMismatch
from frames.linalg import fro_norm
from frames.weaving import WeavingContext, validate_alternate_dual

logger = logging.getLogger(__name__)

Number = Union[float, complex]


class InvalidDual(FrameError):
    """The family passed as a dual does not reconstruct through the weaving"""
    pass


class NotParsevalWeaving(FrameError):
    """The weaving is not Parseval (S_W != I) at this partition"""
    pass


class NotTightWeaving(FrameError):
    """The weaving is not A-tight (S_W != A I) at this partition"""
    pass


def _jsonable(value: Number):
    if isinstance(value, complex):
        if value.imag == 0.0:
            return value.real
        return [value.real, value.imag]
    return float(value)


@dataclass
class IdentityRecord:
    """
    One evaluation of an identity and/or inequality.

    equality_residual is |lhs - rhs| / scale (None when there is no equality
    part); slack is the smallest (side - bound) / scale over the inequality
    chain (None when there is no inequality part). The record passes when
    residual <= eq_tol and slack >= -ineq_tol.
    """
    theorem_id: str
    terms: Dict[str, Number]
    equality_residual: Optional[float]
    slack: Optional[float]
    scale: float
    lam: Optional[float] = None
    sigma: Optional[PartitionMask] = None
    passed: bool = True
    label: str = ''

    def to_dict(self) -> Dict:
        data = {
            'theorem': self.theorem_id,
            'lambda': self.lam,
            'sigma': self.sigma.to_bits() if self.sigma is not None else None,
            'terms': {k: _jsonable(v) for k, v in self.terms.items()},
            'residual': self.equality_residual,
            'slack': self.slack,
            'pass': self.passed,
        }
        if self.label:
            data['label'] = self.label
        return data


@dataclass
class RecordBatch:
    """
    One identity evaluated at k test vectors.

    Every array has one entry per vector; record(j) materializes entry j as
    an IdentityRecord. Scalars that do not depend on the vector are
    broadcast.
    """
    theorem_id: str
    terms: Dict[str, np.ndarray]
    residuals: Optional[np.ndarray]
    slacks: Optional[np.ndarray]
    scales: np.ndarray
    passed: np.ndarray
    lam: Optional[float] = None
    sigma: Optional[PartitionMask] = None
    label: str = ''

    def __len__(self) -> int:
        return int(self.scales.shape[0])

    @property
    def failed_indices(self) -> np.ndarray:
        return np.flatnonzero(~self.passed)

    def record(self, j: int) -> IdentityRecord:
        return IdentityRecord(
            theorem_id=self.theorem_id,
            terms={name: values[j].item() for name, values in self.terms.items()},
            equality_residual=None if self.residuals is None else float(self.residuals[j]),
            slack=None if self.slacks is None else float(self.slacks[j]),
            scale=float(self.scales[j]),
            lam=self.lam,
            sigma=self.sigma,
            passed=bool(self.passed[j]),
            label=self.label,
        )


def make_batch(theorem_id: str,
               terms: Dict[str, Union[Number, np.ndarray]],
               equality: Optional[Tuple[np.ndarray, np.ndarray]] = None,
               slacks: Iterable[Union[float, np.ndarray]] = (),
               level: Union[float, np.ndarray] = 0.0,
               lam: Optional[float] = None,
               sigma: Optional[PartitionMask] = None,
               eq_tol: float = EQ_TOL,
               ineq_tol: float = INEQ_TOL) -> RecordBatch:
    """
    Assemble a RecordBatch from raw quantities, one entry per test vector

    Args:
        theorem_id: Tag of the identity
        terms: Named values reported in the records (arrays or scalars)
        equality: (lhs, rhs) whose difference must vanish, or None
        slacks: Raw (side - bound) differences that must be >= 0
        level: ||f||^2-level quantity added to the scale
        lam: The real parameter, when the statement has one
        sigma: Partition the batch was evaluated at

    Returns:
        RecordBatch with scale = max(1, level, |every term|) per entry
    """
    level = np.abs(np.atleast_1d(np.asarray(level)))
    columns = {name: np.asarray(value) for name, value in terms.items()}
    sides = [] if equality is None else [np.asarray(equality[0]), np.asarray(equality[1])]
    gaps = [np.asarray(s, dtype=float) for s in slacks]
    shape = np.broadcast_shapes(level.shape, *(c.shape for c in columns.values()),
                                *(s.shape for s in sides), *(g.shape for g in gaps))

    scales = np.ones(shape)
    for value in (level, *columns.values(), *sides):
        scales = np.maximum(scales, np.abs(value))

    residuals = None
    passed = np.ones(shape, dtype=bool)
    if equality is not None:
        residuals = np.abs(sides[0] - sides[1]) / scales
        passed &= residuals <= eq_tol

    slack_values = None
    if gaps:
        slack_values = np.min(np.stack([np.broadcast_to(g, shape) for g in gaps]), axis=0) / scales
        passed &= slack_values >= -ineq_tol

    batch = RecordBatch(
        theorem_id=theorem_id,
        terms={name: np.broadcast_to(value, shape) for name, value in columns.items()},
        residuals=residuals,
        slacks=slack_values,
        scales=scales,
        passed=passed,
        lam=None if lam is None else float(lam),
        sigma=sigma,
    )
    failed = batch.failed_indices
    if failed.size:
        j = int(failed[0])
        logger.debug(f"{theorem_id} failed {failed.size}/{len(batch)} at sigma={sigma} lambda={lam}: "
                     f"residual={None if residuals is None else residuals[j]}, "
                     f"slack={None if slack_values is None else slack_values[j]}")
    return batch


def make_record(theorem_id: str,
                terms: Dict[str, Number],
                equality: Optional[Tuple[Number, Number]] = None,
                slacks: Iterable[float] = (),
                level: float = 0.0,
                lam: Optional[float] = None,
                sigma: Optional[PartitionMask] = None,
                eq_tol: float = EQ_TOL,
                ineq_tol: float = INEQ_TOL) -> IdentityRecord:
    """Single-vector form of make_batch"""
    return make_batch(theorem_id, terms, equality, slacks, level, lam, sigma,
                      eq_tol, ineq_tol).record(0)


@dataclass(frozen=True, eq=False)
class AltDualContext:
    """
    A weaving together with a dual family theta and the operators

        E_sigma f   = sum_{i in sigma}   a_i <f, theta_i> phi_i
        E_sigma^c f = sum_{i in sigma^c} a_i <f, theta_i> psi_i
        F_sigma, F_sigma^c the same with (1 - a_i)

    With no weights a_i = 1 and the F operators are zero.
    """
    ctx: WeavingContext
    theta: FrameFamily
    E_sigma: np.ndarray
    E_sigma_c: np.ndarray
    weights: Optional[np.ndarray] = None
    F_sigma: Optional[np.ndarray] = None
    F_sigma_c: Optional[np.ndarray] = None

    def partition_defect(self) -> float:
        """||E_sigma + E_sigma^c (+ F_sigma + F_sigma^c) - I||_F"""
        total = self.E_sigma + self.E_sigma_c
        if self.weights is not None:
            total = total + self.F_sigma + self.F_sigma_c
        return fro_norm(total - np.eye(self.ctx.dim))

    @cached_property
    def _dual_residual(self) -> float:
        return validate_alternate_dual(self.ctx, self.theta)

    def dual_residual(self) -> float:
        return self._dual_residual

    def require_valid(self, tol: float = DUAL_TOL):
        """
        Raises:
            InvalidDual: if theta is not a dual of the weaving within tol
        """
        residual = self.dual_residual()
        if residual > tol:
            raise InvalidDual(f"Family is not a dual of the weaving (operator residual {residual:.3e})")


def _weighted_sum(vectors: np.ndarray, theta: np.ndarray, coeff: np.ndarray) -> np.ndarray:
    # sum_i coeff_i v_i theta_i^*
    return (vectors * coeff[:, None]).T @ theta.conj()


def alt_dual_context(ctx: WeavingContext, theta: FrameFamily,
                     weights: Optional[Sequence[Number]] = None) -> AltDualContext:
    """
    Build E_sigma, E_sigma^c (and F_sigma, F_sigma^c when weights are given)

    Raises:
        ShapeMismatch: if theta or the weights have the wrong length
    """
    if theta.n != ctx.n or theta.dim != ctx.dim:
        raise ShapeMismatch(f"Dual {theta} does not match a weaving of {ctx.n} vectors in C^{ctx.dim}")

    mask = ctx.sigma.as_array()
    on_sigma = mask.astype(float)
    on_complement = 1.0 - on_sigma

    if weights is None:
        a = np.ones(ctx.n, dtype=complex)
    else:
        a = np.asarray(weights, dtype=complex)
        if a.shape != (ctx.n,):
            raise ShapeMismatch(f"Expected {ctx.n} weights, got shape {a.shape}")

    phi, psi, th = ctx.phi.vectors, ctx.psi.vectors, theta.vectors
    e_sigma = _weighted_sum(phi, th, a * on_sigma)
    e_sigma_c = _weighted_sum(psi, th, a * on_complement)

    if weights is None:
        return AltDualContext(ctx=ctx, theta=theta, E_sigma=e_sigma, E_sigma_c=e_sigma_c)

    return AltDualContext(
        ctx=ctx,
        theta=theta,
        E_sigma=e_sigma,
        E_sigma_c=e_sigma_c,
        weights=a,
        F_sigma=_weighted_sum(phi, th, (1 - a) * on_sigma),
        F_sigma_c=_weighted_sum(psi, th, (1 - a) * on_complement),
    )
