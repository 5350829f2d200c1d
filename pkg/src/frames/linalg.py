"""
Dense complex linear algebra: adjoints, Hermitian eigendecomposition and the
positive-operator functional calculus (inverse, square root, inverse square root)
"""

import logging
from dataclasses import dataclass

import numpy as np

from config import HERM_TOL, PD_TOL
from frames.base import NotHermitian, NotPositiveDefinite, DimMismatch

logger = logging.getLogger(__name__)

PSD_KINDS = ('inverse', 'sqrt', 'inv_sqrt')

_PSD_FUNCTIONS = {
    'inverse': lambda w: 1.0 / w,
    'sqrt': np.sqrt,
    'inv_sqrt': lambda w: 1.0 / np.sqrt(w),
}


@dataclass(frozen=True)
class HermitianEig:
    """Eigenvalues ascending, eigenvectors as the columns of a unitary matrix"""
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


def fro_norm(M: np.ndarray) -> float:
    return float(np.linalg.norm(M, 'fro'))


def inner(x: np.ndarray, y: np.ndarray) -> complex:
    """<x, y> = sum_j x_j conj(y_j): linear in x, conjugate-linear in y"""
    return complex(np.vdot(y, x))


def norm_sq(x: np.ndarray) -> float:
    return float(np.real(np.vdot(x, x)))


def row_inner(X: np.ndarray, Y: np.ndarray) -> np.ndarray:
    """<x_k, y_k> for every row pair of two (k, d) stacks"""
    return np.sum(X * Y.conj(), axis=-1)


def row_norm_sq(X: np.ndarray) -> np.ndarray:
    """||x_k||^2 for every row of a (k, d) stack"""
    return np.sum(np.abs(X) ** 2, axis=-1)


def _square(M) -> np.ndarray:
    arr = np.asarray(M, dtype=complex)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise DimMismatch(f"Expected a square matrix, got shape {arr.shape}")
    return arr


def adjoint(M) -> np.ndarray:
    """Conjugate transpose; adjoint(adjoint(M)) == M exactly"""
    arr = np.asarray(M, dtype=complex)
    if arr.ndim != 2:
        raise DimMismatch(f"Expected a matrix, got shape {arr.shape}")
    return arr.conj().T.copy()


def hermitian_defect(M) -> float:
    """||M - M*||_F relative to max(1, ||M||_F)"""
    arr = _square(M)
    return fro_norm(arr - arr.conj().T) / max(1.0, fro_norm(arr))


def symmetrize(M, herm_tol: float = HERM_TOL) -> np.ndarray:
    """
    Replace a nearly Hermitian M by (M + M*)/2

    Raises:
        NotHermitian: if M is farther than herm_tol (relative) from self-adjoint
    """
    arr = _square(M)
    defect = hermitian_defect(arr)
    if defect > herm_tol:
        raise NotHermitian(f"Operator is not self-adjoint (relative defect {defect:.3e} > {herm_tol:.0e})")
    return (arr + arr.conj().T) / 2


def hermitian_eig(M, herm_tol: float = HERM_TOL) -> HermitianEig:
    """
    Eigendecomposition of a Hermitian matrix

    Args:
        M: Square complex matrix, self-adjoint within herm_tol
        herm_tol: Relative tolerance for the self-adjointness check

    Returns:
        HermitianEig with ascending eigenvalues and unitary eigenvectors
    """
    h = symmetrize(M, herm_tol)
    w, v = np.linalg.eigh(h)
    return HermitianEig(eigenvalues=w, eigenvectors=v)


def pd_threshold(eigenvalues: np.ndarray, pd_tol: float = PD_TOL) -> float:
    """Absolute positive-definiteness threshold: pd_tol times the largest eigenvalue"""
    if eigenvalues.size == 0:
        return 0.0
    return pd_tol * max(float(np.max(eigenvalues)), 0.0)


def is_positive_definite(eigenvalues: np.ndarray, pd_tol: float = PD_TOL) -> bool:
    if eigenvalues.size == 0:
        return False
    top = float(np.max(eigenvalues))
    if top <= 0.0:
        return False
    return bool(float(np.min(eigenvalues)) > pd_threshold(eigenvalues, pd_tol))


def psd_transform(M, kind: str, pd_tol: float = PD_TOL) -> np.ndarray:
    """
    Apply g in {1/w, sqrt(w), 1/sqrt(w)} to a positive-definite Hermitian matrix

    Args:
        M: Hermitian positive-definite matrix
        kind: 'inverse', 'sqrt' or 'inv_sqrt'
        pd_tol: Relative threshold below which an eigenvalue counts as zero

    Returns:
        V diag(g(w)) V*

    Raises:
        NotPositiveDefinite: if some eigenvalue is <= pd_tol * max eigenvalue
    """
    if kind not in _PSD_FUNCTIONS:
        raise ValueError(f"Unknown transform {kind!r}; expected one of {PSD_KINDS}")

    eig = hermitian_eig(M)
    w = eig.eigenvalues
    if not is_positive_definite(w, pd_tol):
        smallest = float(w[0]) if w.size else float('nan')
        raise NotPositiveDefinite(
            f"Smallest eigenvalue {smallest:.3e} is not above {pd_threshold(w, pd_tol):.3e}"
        )
    return psd_apply(eig, kind)


def psd_apply(eig: HermitianEig, kind: str) -> np.ndarray:
    """
    V diag(g(w)) V* from a decomposition the caller has already checked to be
    positive definite; lets one eigh serve several transforms
    """
    if kind not in _PSD_FUNCTIONS:
        raise ValueError(f"Unknown transform {kind!r}; expected one of {PSD_KINDS}")
    g = _PSD_FUNCTIONS[kind](eig.eigenvalues)
    v = eig.eigenvectors
    return (v * g) @ v.conj().T
