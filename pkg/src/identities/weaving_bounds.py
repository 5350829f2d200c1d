"""
Identities and inequalities for a single weaving (Phi, Psi, sigma).

Notation used in the term names:
    a      = sum_{i in sigma}   |<f, phi_i>|^2
    b      = sum_{i in sigma^c} |<f, psi_i>|^2
    x      = sum_i |<S_W^sigma f,   S_W^{-1} w_i>|^2
    y      = sum_i |<S_W^sigma^c f, S_W^{-1} w_i>|^2
where w is the woven family (phi on sigma, psi on sigma^c).

None of these depend on lambda, so the *_batch functions take them
precomputed by weaving_sums for a whole stack of test vectors.
"""

import logging
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from config import EQ_TOL, INEQ_TOL, PARSEVAL_TOL, TIGHT_TOL
from frames.base import as_vector, as_vectors
from frames.linalg import fro_norm, row_inner, row_norm_sq
from frames.weaving import WeavingContext
from identities.base import (
    IdentityRecord, NotParsevalWeaving, NotTightWeaving, RecordBatch, make_batch
)

logger = logging.getLogger(__name__)

ROUTES = ('direct', 'operator')


@dataclass(frozen=True)
class WeavingSums:
    """The building blocks shared by every weaving inequality, one entry per test vector"""
    a: np.ndarray
    b: np.ndarray
    x: np.ndarray
    y: np.ndarray
    sigma_synthesis_sq: np.ndarray      # ||S_W^sigma f||^2
    sigma_c_synthesis_sq: np.ndarray    # ||S_W^sigma^c f||^2
    f_sq: np.ndarray

    def __len__(self) -> int:
        return int(self.f_sq.shape[0])


def weaving_sums(ctx: WeavingContext, f: Sequence, route: str = 'direct') -> WeavingSums:
    """
    Evaluate a, b, x, y and the two synthesis norms

    Args:
        ctx: Weaving context
        f: One vector in C^d or a (k, d) stack, one test vector per row
        route: 'direct' sums over the family members one by one;
               'operator' uses the cached matrices (a = <S_W^sigma f, f>,
               x = <S_W^{-1} S_W^sigma f, S_W^sigma f>, ...)

    Returns:
        WeavingSums with arrays of length k
    """
    if route not in ROUTES:
        raise ValueError(f"Unknown route {route!r}; expected one of {ROUTES}")
    vectors = as_vectors(f, ctx.dim)
    f_sq = row_norm_sq(vectors)

    if route == 'operator':
        s_sigma_f = vectors @ ctx.S_W_sigma.T
        s_sigma_c_f = vectors @ ctx.S_W_sigma_c.T
        return WeavingSums(
            a=np.real(row_inner(s_sigma_f, vectors)),
            b=np.real(row_inner(s_sigma_c_f, vectors)),
            x=np.real(row_inner(s_sigma_f @ ctx.S_W_inv.T, s_sigma_f)),
            y=np.real(row_inner(s_sigma_c_f @ ctx.S_W_inv.T, s_sigma_c_f)),
            sigma_synthesis_sq=row_norm_sq(s_sigma_f),
            sigma_c_synthesis_sq=row_norm_sq(s_sigma_c_f),
            f_sq=f_sq,
        )

    mask = ctx.sigma.as_array()
    phi_sigma = ctx.phi.vectors[mask]
    psi_sigma_c = ctx.psi.vectors[~mask]

    u = vectors @ phi_sigma.conj().T        # <f, phi_i>, i in sigma
    v = vectors @ psi_sigma_c.conj().T      # <f, psi_i>, i in sigma^c
    s_sigma_f = u @ phi_sigma
    s_sigma_c_f = v @ psi_sigma_c

    dual = ctx.dual_rows
    x_coeffs = s_sigma_f @ dual.conj().T
    y_coeffs = s_sigma_c_f @ dual.conj().T

    return WeavingSums(
        a=row_norm_sq(u),
        b=row_norm_sq(v),
        x=row_norm_sq(x_coeffs),
        y=row_norm_sq(y_coeffs),
        sigma_synthesis_sq=row_norm_sq(s_sigma_f),
        sigma_c_synthesis_sq=row_norm_sq(s_sigma_c_f),
        f_sq=f_sq,
    )


def require_parseval(ctx: WeavingContext, tol: float = PARSEVAL_TOL):
    """
    Raises:
        NotParsevalWeaving: unless ||S_W - I||_F <= tol
    """
    if not ctx.is_parseval(tol):
        defect = fro_norm(ctx.S_W - np.eye(ctx.dim))
        raise NotParsevalWeaving(f"Weaving at sigma={ctx.sigma} is not Parseval (||S_W - I|| = {defect:.3e})")


def require_tight(ctx: WeavingContext, A: Optional[float] = None, tol: float = TIGHT_TOL) -> float:
    """
    Check S_W = A I and return A (estimated as trace(S_W)/d when not given)

    Raises:
        NotTightWeaving: if ||S_W - A I||_F > tol * A
    """
    if A is None:
        _, A = ctx.tightness(tol)
    defect = fro_norm(ctx.S_W - A * np.eye(ctx.dim))
    if A <= 0 or defect > tol * A:
        raise NotTightWeaving(
            f"Weaving at sigma={ctx.sigma} is not {A:g}-tight (||S_W - A I|| = {defect:.3e})"
        )
    return float(A)


def _single(ctx: WeavingContext, f: Sequence) -> WeavingSums:
    return weaving_sums(ctx, as_vector(f, ctx.dim))


def parseval_weaving_batch(ctx: WeavingContext, s: WeavingSums,
                           eq_tol: float = EQ_TOL, ineq_tol: float = INEQ_TOL,
                           parseval_tol: float = PARSEVAL_TOL) -> RecordBatch:
    require_parseval(ctx, parseval_tol)
    lhs = s.a + s.sigma_c_synthesis_sq
    rhs = s.b + s.sigma_synthesis_sq
    bound = 0.75 * s.f_sq
    return make_batch(
        'parseval_weaving',
        terms={'a': s.a, 'b': s.b, 'lhs': lhs, 'rhs': rhs, 'lower_bound': bound},
        equality=(lhs, rhs),
        slacks=[lhs - bound],
        level=s.f_sq,
        sigma=ctx.sigma,
        eq_tol=eq_tol,
        ineq_tol=ineq_tol,
    )


def thm_parseval_weaving(ctx: WeavingContext, f: Sequence,
                         eq_tol: float = EQ_TOL, ineq_tol: float = INEQ_TOL,
                         parseval_tol: float = PARSEVAL_TOL) -> IdentityRecord:
    """
    For a 1-woven weaving:

        a + ||S_W^sigma^c f||^2 = b + ||S_W^sigma f||^2 >= 3/4 ||f||^2

    Raises:
        NotParsevalWeaving: if S_W is not the identity
    """
    require_parseval(ctx, parseval_tol)
    return parseval_weaving_batch(ctx, _single(ctx, f), eq_tol, ineq_tol, parseval_tol).record(0)


def general_weaving_batch(ctx: WeavingContext, s: WeavingSums, lam: float,
                          eq_tol: float = EQ_TOL, ineq_tol: float = INEQ_TOL) -> RecordBatch:
    lhs = s.a + s.y
    rhs = s.b + s.x
    bound = (lam - lam ** 2 / 4) * s.a + (1 - lam ** 2 / 4) * s.b
    return make_batch(
        'general_weaving',
        terms={'a': s.a, 'b': s.b, 'x': s.x, 'y': s.y,
               'lhs': lhs, 'rhs': rhs, 'lower_bound': bound},
        equality=(lhs, rhs),
        slacks=[lhs - bound],
        level=s.a + s.b,
        lam=lam,
        sigma=ctx.sigma,
        eq_tol=eq_tol,
        ineq_tol=ineq_tol,
    )


def thm_general_weaving(ctx: WeavingContext, f: Sequence, lam: float,
                        eq_tol: float = EQ_TOL, ineq_tol: float = INEQ_TOL) -> IdentityRecord:
    """
    For any woven pair:

        a + y = b + x >= (lam - lam^2/4) a + (1 - lam^2/4) b
    """
    return general_weaving_batch(ctx, _single(ctx, f), lam, eq_tol, ineq_tol).record(0)


def sandwich_batch(ctx: WeavingContext, s: WeavingSums, lam: float,
                   ineq_tol: float = INEQ_TOL) -> RecordBatch:
    middle = s.a - s.x
    upper = (lam ** 2 / 4) * s.b + (1 - lam / 2) ** 2 * s.a
    return make_batch(
        'sandwich',
        terms={'a': s.a, 'b': s.b, 'x': s.x,
               'middle': middle, 'lower_bound': 0.0, 'upper_bound': upper},
        slacks=[middle, upper - middle],
        level=s.a + s.b,
        lam=lam,
        sigma=ctx.sigma,
        ineq_tol=ineq_tol,
    )


def thm_sandwich(ctx: WeavingContext, f: Sequence, lam: float,
                 ineq_tol: float = INEQ_TOL) -> IdentityRecord:
    """
    0 <= a - x <= (lam^2/4) b + (1 - lam/2)^2 a
    """
    return sandwich_batch(ctx, _single(ctx, f), lam, ineq_tol).record(0)


def double_batch(ctx: WeavingContext, s: WeavingSums, lam: float,
                 ineq_tol: float = INEQ_TOL) -> RecordBatch:
    middle = s.x + s.y
    lower = (2 * lam - lam ** 2 / 2 - 1) * s.a + (1 - lam ** 2 / 2) * s.b
    upper = s.a + s.b
    return make_batch(
        'double',
        terms={'a': s.a, 'b': s.b, 'x': s.x, 'y': s.y,
               'middle': middle, 'lower_bound': lower, 'upper_bound': upper},
        slacks=[middle - lower, upper - middle],
        level=upper,
        lam=lam,
        sigma=ctx.sigma,
        ineq_tol=ineq_tol,
    )


def thm_double(ctx: WeavingContext, f: Sequence, lam: float,
               ineq_tol: float = INEQ_TOL) -> IdentityRecord:
    """
    (2 lam - lam^2/2 - 1) a + (1 - lam^2/2) b <= x + y <= a + b
    """
    return double_batch(ctx, _single(ctx, f), lam, ineq_tol).record(0)


def tight_chain_batch(ctx: WeavingContext, s: WeavingSums, lam: float, A: Optional[float] = None,
                      ineq_tol: float = INEQ_TOL, tight_tol: float = TIGHT_TOL) -> RecordBatch:
    A = require_tight(ctx, A, tight_tol)

    first_middle = A * s.a - s.sigma_synthesis_sq
    first_upper = A * (lam ** 2 / 4) * s.b + (1 - lam / 2) ** 2 * A * s.a
    second_lower = (2 * lam - lam ** 2 / 2 - 1) * A * s.a + (1 - lam ** 2 / 2) * A * s.b
    second_middle = s.sigma_synthesis_sq + s.sigma_c_synthesis_sq
    second_upper = A * (s.a + s.b)

    return make_batch(
        'tight_chain',
        terms={
            'A': A, 'a': s.a, 'b': s.b,
            'first_middle': first_middle, 'first_upper': first_upper,
            'second_lower': second_lower, 'second_middle': second_middle,
            'second_upper': second_upper, 'upper_printed': A * s.f_sq,
        },
        slacks=[
            first_middle,
            first_upper - first_middle,
            second_middle - second_lower,
            second_upper - second_middle,
        ],
        level=A * A * s.f_sq,
        lam=lam,
        sigma=ctx.sigma,
        ineq_tol=ineq_tol,
    )


def cor_tight(ctx: WeavingContext, f: Sequence, lam: float, A: Optional[float] = None,
              ineq_tol: float = INEQ_TOL, tight_tol: float = TIGHT_TOL) -> IdentityRecord:
    """
    Both chains for an A-tight weaving (S_W = A I):

        0 <= A a - ||S_W^sigma f||^2 <= A (lam^2/4) b + (1 - lam/2)^2 A a
        (2 lam - lam^2/2 - 1) A a + (1 - lam^2/2) A b
            <= ||S_W^sigma f||^2 + ||S_W^sigma^c f||^2 <= A (a + b)

    A (a + b) = A^2 ||f||^2 is the bound gated on; A ||f||^2 is reported as
    upper_printed and only agrees with it when A = 1.

    Raises:
        NotTightWeaving: if S_W is not A I
    """
    A = require_tight(ctx, A, tight_tol)
    return tight_chain_batch(ctx, _single(ctx, f), lam, A, ineq_tol, tight_tol).record(0)
