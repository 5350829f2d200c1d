"""
Identities for an alternate dual {theta_i} of a weaving.

With c_i = <f, theta_i>:
    s_sigma   = sum_{i in sigma}   c_i conj<f, phi_i>  (= <E_sigma f, f>)
    s_sigma_c = sum_{i in sigma^c} c_i conj<f, psi_i>  (= <E_sigma^c f, f>)
"""

import logging
from typing import Sequence

import numpy as np

from config import EQ_TOL, INEQ_TOL, DUAL_TOL
from frames.base import as_vector, as_vectors
from frames.linalg import row_norm_sq
from identities.base import AltDualContext, IdentityRecord, RecordBatch, make_batch

logger = logging.getLogger(__name__)


def _split(adc: AltDualContext, f: Sequence):
    ctx = adc.ctx
    vectors = as_vectors(f, ctx.dim)
    mask = ctx.sigma.as_array()
    c = vectors @ adc.theta.vectors.conj().T
    u = vectors @ ctx.phi.vectors.conj().T
    v = vectors @ ctx.psi.vectors.conj().T
    return vectors, mask, c, u, v


def _require_unweighted(adc: AltDualContext, theorem_id: str):
    if adc.weights is not None:
        raise ValueError(f"{theorem_id} takes an unweighted dual context")


def _unweighted_terms(adc: AltDualContext, f: Sequence):
    vectors, mask, c, u, v = _split(adc, f)
    ctx = adc.ctx
    s_sigma = np.sum(c[:, mask] * u[:, mask].conj(), axis=1)
    s_sigma_c = np.sum(c[:, ~mask] * v[:, ~mask].conj(), axis=1)
    e_sigma_sq = row_norm_sq(c[:, mask] @ ctx.phi.vectors[mask])
    e_sigma_c_sq = row_norm_sq(c[:, ~mask] @ ctx.psi.vectors[~mask])
    return row_norm_sq(vectors), s_sigma, s_sigma_c, e_sigma_sq, e_sigma_c_sq


def altdual_re_batch(adc: AltDualContext, f: Sequence, lam: float,
                     eq_tol: float = EQ_TOL, ineq_tol: float = INEQ_TOL,
                     check_dual: bool = True, dual_tol: float = DUAL_TOL) -> RecordBatch:
    _require_unweighted(adc, 'altdual_real')
    if check_dual:
        adc.require_valid(dual_tol)
    f_sq, s_sigma, s_sigma_c, e_sigma_sq, e_sigma_c_sq = _unweighted_terms(adc, f)

    re_sigma, re_sigma_c = s_sigma.real, s_sigma_c.real
    lhs = re_sigma + e_sigma_c_sq
    rhs = re_sigma_c + e_sigma_sq
    bound = (2 * lam - lam ** 2) * re_sigma + (1 - lam ** 2) * re_sigma_c

    return make_batch(
        'altdual_real',
        terms={'re_sigma': re_sigma, 're_sigma_c': re_sigma_c,
               'e_sigma_sq': e_sigma_sq, 'e_sigma_c_sq': e_sigma_c_sq,
               'lhs': lhs, 'rhs': rhs, 'lower_bound': bound},
        equality=(lhs, rhs),
        slacks=[lhs - bound],
        level=f_sq,
        lam=lam,
        sigma=adc.ctx.sigma,
        eq_tol=eq_tol,
        ineq_tol=ineq_tol,
    )


def thm_altdual_re(adc: AltDualContext, f: Sequence, lam: float,
                   eq_tol: float = EQ_TOL, ineq_tol: float = INEQ_TOL,
                   check_dual: bool = True, dual_tol: float = DUAL_TOL) -> IdentityRecord:
    """
    Re s_sigma + ||E_sigma^c f||^2 = Re s_sigma_c + ||E_sigma f||^2
        >= (2 lam - lam^2) Re s_sigma + (1 - lam^2) Re s_sigma_c

    Raises:
        InvalidDual: if check_dual and theta does not reconstruct
    """
    _require_unweighted(adc, 'altdual_real')
    if check_dual:
        adc.require_valid(dual_tol)
    return altdual_re_batch(adc, as_vector(f, adc.ctx.dim), lam, eq_tol, ineq_tol,
                            check_dual=False).record(0)


def altdual_complex_batch(adc: AltDualContext, f: Sequence,
                          eq_tol: float = EQ_TOL,
                          check_dual: bool = True, dual_tol: float = DUAL_TOL) -> RecordBatch:
    _require_unweighted(adc, 'altdual_complex')
    if check_dual:
        adc.require_valid(dual_tol)
    f_sq, s_sigma, s_sigma_c, e_sigma_sq, e_sigma_c_sq = _unweighted_terms(adc, f)

    lhs = s_sigma + e_sigma_c_sq
    rhs = s_sigma_c.conj() + e_sigma_sq

    return make_batch(
        'altdual_complex',
        terms={'s_sigma': s_sigma, 's_sigma_c': s_sigma_c,
               'e_sigma_sq': e_sigma_sq, 'e_sigma_c_sq': e_sigma_c_sq,
               'lhs': lhs, 'rhs': rhs},
        equality=(lhs, rhs),
        level=f_sq,
        sigma=adc.ctx.sigma,
        eq_tol=eq_tol,
    )


def thm_altdual_complex(adc: AltDualContext, f: Sequence,
                        eq_tol: float = EQ_TOL,
                        check_dual: bool = True, dual_tol: float = DUAL_TOL) -> IdentityRecord:
    """
    s_sigma + ||E_sigma^c f||^2 = conj(s_sigma_c) + ||E_sigma f||^2

    Raises:
        InvalidDual: if check_dual and theta does not reconstruct
    """
    _require_unweighted(adc, 'altdual_complex')
    if check_dual:
        adc.require_valid(dual_tol)
    return altdual_complex_batch(adc, as_vector(f, adc.ctx.dim), eq_tol, check_dual=False).record(0)


def altdual_weighted_batch(adc: AltDualContext, f: Sequence,
                           eq_tol: float = EQ_TOL,
                           check_dual: bool = True, dual_tol: float = DUAL_TOL) -> RecordBatch:
    if adc.weights is None:
        raise ValueError("altdual_weighted needs a weighted dual context")
    if check_dual:
        adc.require_valid(dual_tol)

    vectors, mask, c, u, v = _split(adc, f)
    ctx = adc.ctx
    a = adc.weights
    rest = 1 - a

    weighted_sigma = np.sum(a[mask] * c[:, mask] * u[:, mask].conj(), axis=1)
    weighted_sigma_c = np.sum(a[~mask] * c[:, ~mask] * v[:, ~mask].conj(), axis=1)
    rest_sigma = np.sum(rest[mask] * c[:, mask] * u[:, mask].conj(), axis=1)
    rest_sigma_c = np.sum(rest[~mask] * c[:, ~mask] * v[:, ~mask].conj(), axis=1)

    phi_s, psi_c = ctx.phi.vectors[mask], ctx.psi.vectors[~mask]
    weighted_norm_sq = row_norm_sq((a[mask] * c[:, mask]) @ phi_s + (a[~mask] * c[:, ~mask]) @ psi_c)
    rest_norm_sq = row_norm_sq((rest[mask] * c[:, mask]) @ phi_s + (rest[~mask] * c[:, ~mask]) @ psi_c)

    lhs = weighted_sigma + weighted_sigma_c + rest_norm_sq
    rhs = weighted_norm_sq + rest_sigma.conj() + rest_sigma_c.conj()

    return make_batch(
        'altdual_weighted',
        terms={'weighted_sigma': weighted_sigma, 'weighted_sigma_c': weighted_sigma_c,
               'rest_sigma': rest_sigma, 'rest_sigma_c': rest_sigma_c,
               'weighted_norm_sq': weighted_norm_sq, 'rest_norm_sq': rest_norm_sq,
               'lhs': lhs, 'rhs': rhs},
        equality=(lhs, rhs),
        level=row_norm_sq(vectors),
        sigma=ctx.sigma,
        eq_tol=eq_tol,
    )


def thm_altdual_weighted(adc: AltDualContext, f: Sequence,
                         eq_tol: float = EQ_TOL,
                         check_dual: bool = True, dual_tol: float = DUAL_TOL) -> IdentityRecord:
    """
    For any weights a_i:

        sum_sigma a c conj<f,phi> + sum_sigma^c a c conj<f,psi> + ||(F_sigma + F_sigma^c) f||^2
        = ||(E_sigma + E_sigma^c) f||^2
          + conj(sum_sigma (1-a) c conj<f,phi>) + conj(sum_sigma^c (1-a) c conj<f,psi>)

    Raises:
        ValueError: if adc carries no weights
        InvalidDual: if check_dual and theta does not reconstruct
    """
    if adc.weights is None:
        raise ValueError("altdual_weighted needs a weighted dual context")
    if check_dual:
        adc.require_valid(dual_tol)
    return altdual_weighted_batch(adc, as_vector(f, adc.ctx.dim), eq_tol, check_dual=False).record(0)
