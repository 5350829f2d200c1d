"""
Operator lemmas for a pair P, Q with P + Q = I.

The weaving inequalities all reduce to these statements applied to the
normalized pair P = S_W^{-1/2} S_W^sigma S_W^{-1/2}, Q = I - P.
"""

import logging
from typing import List, Optional, Sequence

import numpy as np

from config import EQ_TOL, INEQ_TOL
from frames.base import DimMismatch, as_vector, as_vectors
from frames.linalg import adjoint, fro_norm, row_inner, row_norm_sq, symmetrize
from frames.weaving import WeavingContext
from identities.base import IdentityRecord, RecordBatch, make_batch

logger = logging.getLogger(__name__)


def _operator(P) -> np.ndarray:
    arr = np.asarray(P, dtype=complex)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise DimMismatch(f"Expected a square operator, got shape {arr.shape}")
    return arr


def _forms(M: np.ndarray, vectors: np.ndarray) -> np.ndarray:
    # <M f, f> per row, for self-adjoint M
    return np.real(row_inner(vectors @ M.T, vectors))


def operator_identity_batch(P, count: int = 1, eq_tol: float = EQ_TOL) -> RecordBatch:
    """The identity does not involve f; the one value is repeated count times"""
    p = _operator(P)
    q = np.eye(p.shape[0]) - p
    lhs = p + adjoint(q) @ q
    rhs = adjoint(q) + adjoint(p) @ p
    lhs_norm, rhs_norm = fro_norm(lhs), fro_norm(rhs)
    return make_batch(
        'operator_identity',
        terms={'lhs_norm': lhs_norm, 'rhs_norm': rhs_norm},
        equality=(np.full(count, fro_norm(lhs - rhs)), 0.0),
        level=max(lhs_norm, rhs_norm),
        eq_tol=eq_tol,
    )


def lemma_operator_identity(P, eq_tol: float = EQ_TOL) -> IdentityRecord:
    """
    P + Q*Q = Q* + P*P with Q = I - P, for any square P

    The residual is the Frobenius norm of the difference of the two sides.
    """
    return operator_identity_batch(P, 1, eq_tol).record(0)


def quadratic_bound_batch(P, f: Sequence, lam: float,
                          eq_tol: float = EQ_TOL, ineq_tol: float = INEQ_TOL) -> RecordBatch:
    p = symmetrize(_operator(P))
    q = np.eye(p.shape[0]) - p
    vectors = as_vectors(f, p.shape[0])
    f_sq = row_norm_sq(vectors)
    pf = vectors @ p.T
    qf = vectors @ q.T

    lhs = row_norm_sq(pf) + lam * np.real(row_inner(qf, vectors))
    rhs = row_norm_sq(qf) + (2 - lam) * np.real(row_inner(pf, vectors)) + (lam - 1) * f_sq
    bound = (lam - lam ** 2 / 4) * f_sq

    return make_batch(
        'quadratic_bound',
        terms={'lhs': lhs, 'rhs': rhs, 'lower_bound': bound},
        equality=(lhs, rhs),
        slacks=[lhs - bound],
        level=f_sq,
        lam=lam,
        eq_tol=eq_tol,
        ineq_tol=ineq_tol,
    )


def lemma_quadratic_bound(P, f: Sequence, lam: float,
                          eq_tol: float = EQ_TOL, ineq_tol: float = INEQ_TOL) -> IdentityRecord:
    """
    For self-adjoint P and Q = I - P:

        ||Pf||^2 + lam <Qf, f> = ||Qf||^2 + (2 - lam) <Pf, f> + (lam - 1) ||f||^2
                               >= (lam - lam^2/4) ||f||^2

    Raises:
        NotHermitian: if P is not self-adjoint
    """
    p = _operator(P)
    return quadratic_bound_batch(p, as_vector(f, p.shape[0]), lam, eq_tol, ineq_tol).record(0)


def cross_bound_batch(P, f: Sequence, lam: float,
                      eq_tol: float = EQ_TOL, ineq_tol: float = INEQ_TOL) -> RecordBatch:
    p = _operator(P)
    eye = np.eye(p.shape[0])
    q = eye - p
    vectors = as_vectors(f, p.shape[0])
    f_sq = row_norm_sq(vectors)

    p_star, q_star = adjoint(p), adjoint(q)
    left_op = p_star @ p + lam * (q_star + q)
    right_op = q_star @ q + (1 - lam) * (p_star + p) + (2 * lam - 1) * eye

    lhs = _forms(left_op, vectors)
    rhs = _forms(right_op, vectors)
    bound = (1 - (lam - 1) ** 2) * f_sq

    return make_batch(
        'cross_bound',
        terms={'lhs': lhs, 'rhs': rhs, 'lower_bound': bound},
        equality=(lhs, rhs),
        slacks=[lhs - bound],
        level=f_sq,
        lam=lam,
        eq_tol=eq_tol,
        ineq_tol=ineq_tol,
    )


def lemma_cross_bound(P, f: Sequence, lam: float,
                      eq_tol: float = EQ_TOL, ineq_tol: float = INEQ_TOL) -> IdentityRecord:
    """
    For any square P and Q = I - P (no self-adjointness needed):

        <(P*P + lam (Q* + Q)) f, f> = <(Q*Q + (1 - lam)(P* + P) + (2 lam - 1) I) f, f>
                                    >= (1 - (lam - 1)^2) ||f||^2
    """
    p = _operator(P)
    return cross_bound_batch(p, as_vector(f, p.shape[0]), lam, eq_tol, ineq_tol).record(0)


def commuting_pair_batch(ctx: WeavingContext, f: Sequence,
                         eq_tol: float = EQ_TOL, ineq_tol: float = INEQ_TOL) -> RecordBatch:
    p, q = ctx.normalized
    g = as_vectors(f, ctx.dim) @ ctx.S_W_sqrt.T

    pq = p @ q
    commutator = fro_norm(pq - q @ p)
    # PQ is Hermitian up to the commutator
    lambda_min = float(np.linalg.eigvalsh((pq + adjoint(pq)) / 2)[0])
    p_gap = _forms(p, g) - row_norm_sq(g @ p.T)
    q_gap = _forms(q, g) - row_norm_sq(g @ q.T)

    return make_batch(
        'commuting_pair',
        terms={'commutator': commutator, 'lambda_min_pq': lambda_min,
               'p_gap': p_gap, 'q_gap': q_gap},
        equality=(commutator, 0.0),
        slacks=[lambda_min, p_gap, q_gap],
        level=row_norm_sq(g),
        sigma=ctx.sigma,
        eq_tol=eq_tol,
        ineq_tol=ineq_tol,
    )


def lemma_commuting_pair(ctx: WeavingContext, f: Sequence,
                         eq_tol: float = EQ_TOL, ineq_tol: float = INEQ_TOL) -> IdentityRecord:
    """
    Structural facts about the normalized pair of a weaving

    Equality part: PQ = QP. Inequality part: PQ is positive semidefinite,
    and with g = S_W^{1/2} f both <Pg, g> - ||Pg||^2 and <Qg, g> - ||Qg||^2
    are nonnegative.
    """
    return commuting_pair_batch(ctx, as_vector(f, ctx.dim), eq_tol, ineq_tol).record(0)


def normalized_lemma_batches(ctx: WeavingContext, f: Sequence, lam: Optional[float],
                             eq_tol: float = EQ_TOL, ineq_tol: float = INEQ_TOL) -> List[RecordBatch]:
    """
    Evaluate the three P/Q lemmas on the normalized pair of ctx with
    g = S_W^{1/2} f, for one vector or a stack; with lam None only the
    parameter-free identity runs
    """
    p, _ = ctx.normalized
    vectors = as_vectors(f, ctx.dim)
    if lam is None:
        batches = [operator_identity_batch(p, vectors.shape[0], eq_tol)]
    else:
        g = vectors @ ctx.S_W_sqrt.T
        batches = [
            quadratic_bound_batch(p, g, lam, eq_tol, ineq_tol),
            cross_bound_batch(p, g, lam, eq_tol, ineq_tol),
        ]
    for batch in batches:
        batch.sigma = ctx.sigma
    return batches


def normalized_lemma_records(ctx: WeavingContext, f: Sequence, lam: Optional[float],
                             eq_tol: float = EQ_TOL, ineq_tol: float = INEQ_TOL) -> List[IdentityRecord]:
    """Single-vector form of normalized_lemma_batches"""
    return [batch.record(0) for batch in
            normalized_lemma_batches(ctx, as_vector(f, ctx.dim), lam, eq_tol, ineq_tol)]
