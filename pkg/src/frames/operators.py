"""
Classical frame operators: analysis, synthesis, frame operator, bounds,
canonical dual and partial frame operators S_J.

Inner product convention throughout: <x, y> = sum_j x_j conj(y_j), so the
analysis coefficients are c_i = <f, phi_i>. Every sum over i runs in
ascending index order.
"""

import logging
from typing import Sequence, Tuple

import numpy as np

from config import PD_TOL, TIGHT_TOL
from frames.base import (
    FrameFamily, FrameBounds, PartitionMask, NotAFrame, NotPositiveDefinite, DimMismatch, as_vector
)
from frames.linalg import hermitian_eig, psd_transform, fro_norm, is_positive_definite, pd_threshold

logger = logging.getLogger(__name__)


def analysis(F: FrameFamily, f: Sequence) -> np.ndarray:
    """
    Analysis coefficients c_i = <f, phi_i>

    Args:
        F: Frame family
        f: Vector in C^d

    Returns:
        Length-n complex array
    """
    vec = as_vector(f, F.dim)
    return F.vectors.conj() @ vec


def synthesis(F: FrameFamily, c: Sequence) -> np.ndarray:
    """Sum_i c_i phi_i"""
    coeffs = np.asarray(c, dtype=complex)
    if coeffs.ndim != 1 or coeffs.shape[0] != F.n:
        raise DimMismatch(f"Got {coeffs.shape} coefficients for a family of {F.n} vectors")
    return F.vectors.T @ coeffs


def _outer_sum(vectors: np.ndarray, dim: int) -> np.ndarray:
    # sum_i v_i v_i^* in ascending i
    if vectors.shape[0] == 0:
        return np.zeros((dim, dim), dtype=complex)
    return vectors.T @ vectors.conj()


def partial_frame_operator(F: FrameFamily, J: PartitionMask) -> np.ndarray:
    """
    S_J = sum_{i in J} phi_i phi_i^*

    Args:
        F: Frame family
        J: Subset of the index set (J.n must equal F.n)

    Returns:
        d x d Hermitian PSD matrix; zero matrix for the empty set
    """
    if J.n != F.n:
        raise DimMismatch(f"Mask over {J.n} indices used with a family of {F.n} vectors")
    return _outer_sum(F.vectors[J.as_array()], F.dim)


def frame_operator(F: FrameFamily) -> np.ndarray:
    """S = sum_i phi_i phi_i^*"""
    return _outer_sum(F.vectors, F.dim)


def frame_bounds(F: FrameFamily, pd_tol: float = PD_TOL) -> FrameBounds:
    """
    Optimal frame bounds (lambda_min(S), lambda_max(S))

    Raises:
        NotAFrame: if the family does not span C^d
    """
    w = hermitian_eig(frame_operator(F)).eigenvalues
    if not is_positive_definite(w, pd_tol):
        smallest = float(w[0]) if w.size else 0.0
        raise NotAFrame(
            f"Family of {F.n} vectors does not span C^{F.dim} "
            f"(lambda_min {smallest:.3e} <= {pd_threshold(w, pd_tol):.3e})"
        )
    return FrameBounds(lower=float(w[0]), upper=float(w[-1]))


def canonical_dual(F: FrameFamily) -> FrameFamily:
    """
    Canonical dual {S^{-1} phi_i}

    Raises:
        NotAFrame: if S is not invertible
    """
    try:
        s_inv = psd_transform(frame_operator(F), 'inverse')
    except NotPositiveDefinite as e:
        raise NotAFrame(f"Canonical dual undefined: {e}")
    # row i -> S^{-1} phi_i
    return FrameFamily(F.vectors @ s_inv.T)


def reconstruct(F: FrameFamily, G: FrameFamily, f: Sequence) -> np.ndarray:
    """Sum_i <f, F_i> G_i; returns f when G is a dual of F"""
    if F.n != G.n or F.dim != G.dim:
        raise DimMismatch(f"Families {F} and {G} do not match")
    return synthesis(G, analysis(F, f))


def frame_tightness(F: FrameFamily, tol: float = TIGHT_TOL) -> Tuple[bool, float]:
    """
    Check whether S = A I

    Returns:
        (is_tight, A) with A = trace(S)/d
    """
    s = frame_operator(F)
    a = float(np.real(np.trace(s))) / F.dim
    if a <= 0.0:
        return False, a
    return fro_norm(s - a * np.eye(F.dim)) <= tol * a, a


def is_parseval(F: FrameFamily, tol: float = TIGHT_TOL) -> bool:
    tight, a = frame_tightness(F, tol)
    return tight and abs(a - 1.0) <= tol
