"""Small dense linear-algebra kernels used by the rest of the package.

Everything here operates on ordinary numpy arrays and wraps LAPACK-backed
routines with the validation and ordering conventions the callers rely on:
descending eigenvalues, descending singular values, symmetrized outputs.
"""
from __future__ import annotations

import numpy as np

from .errors import NotHermitian, NotPSD, WrongDim

DEFAULT_TOL = 1e-9


def hermiticity_defect(mat: np.ndarray) -> float:
    """Max-abs deviation of ``mat`` from its conjugate transpose."""
    mat = np.asarray(mat)
    return float(np.abs(mat - mat.conj().T).max())


def hermitian_eig(mat: np.ndarray, tol: float = DEFAULT_TOL):
    """Eigendecomposition of a Hermitian matrix.

    Returns ``(values, vectors)`` with eigenvalues sorted descending and
    eigenvectors as the matching orthonormal columns. Raises NotHermitian
    if the Hermiticity defect exceeds ``tol``.
    """
    mat = np.asarray(mat, dtype=complex)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise WrongDim(f"expected a square matrix, got shape {mat.shape}")
    if not np.isfinite(mat).all():
        raise ValueError("matrix entries must be finite")
    defect = hermiticity_defect(mat)
    if defect > tol:
        raise NotHermitian(f"hermiticity defect {defect:.3g} exceeds tol {tol:.3g}")
    values, vectors = np.linalg.eigh((mat + mat.conj().T) / 2)
    return values[::-1], vectors[:, ::-1]


def psd_sqrt(mat: np.ndarray, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Hermitian square root of a positive semidefinite matrix.

    Eigenvalues in [-tol, 0) are clipped to zero; anything lower raises
    NotPSD. The result R satisfies R @ R == mat up to the clip.
    """
    values, vectors = hermitian_eig(mat, tol)
    if values.min() < -tol:
        raise NotPSD(f"eigenvalue {values.min():.3g} below -tol {-tol:.3g}")
    root = (vectors * np.sqrt(np.clip(values, 0.0, None))) @ vectors.conj().T
    return (root + root.conj().T) / 2


def svd3(mat: np.ndarray):
    """SVD of a real 3x3 matrix as ``(o1, s, o2)`` with mat = o1 @ diag(s) @ o2.T.

    Singular values come back descending; o1 and o2 are orthogonal (not
    necessarily proper rotations -- see channels.canonical_form for that).
    """
    mat = np.asarray(mat, dtype=float)
    if mat.shape != (3, 3):
        raise WrongDim(f"expected a 3x3 real matrix, got shape {mat.shape}")
    if not np.isfinite(mat).all():
        raise ValueError("matrix entries must be finite")
    u, s, vt = np.linalg.svd(mat)
    return u, s, vt.T
