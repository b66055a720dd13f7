"""Qubit and two-qubit states: Bloch geometry, Bell states, figures of merit.

Conventions used throughout the package:

* computational basis |0> = |H>, |1> = |V>;
* two-qubit ordering mode1 (x) mode2, i.e. ``kron(op1, op2)``;
* |D> = (|H>+|V>)/sqrt2, |A> = (|H>-|V>)/sqrt2,
  |R> = (|H>-i|V>)/sqrt2, |L> = (|H>+i|V>)/sqrt2;
* |Phi-> = (|HH> - |VV>)/sqrt2.
"""
from __future__ import annotations

import enum

import numpy as np

from .errors import DimMismatch, NotPSD, OutOfRange, OutsideBall, WrongDim
from .linalg import hermitian_eig, hermiticity_defect

ID2 = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = (ID2, SIGMA_X, SIGMA_Y, SIGMA_Z)

KET_H = np.array([1, 0], dtype=complex)
KET_V = np.array([0, 1], dtype=complex)
KET_D = (KET_H + KET_V) / np.sqrt(2)
KET_A = (KET_H - KET_V) / np.sqrt(2)
KET_R = (KET_H - 1j * KET_V) / np.sqrt(2)
KET_L = (KET_H + 1j * KET_V) / np.sqrt(2)


class BellKind(enum.Enum):
    PHI_PLUS = "phi_plus"
    PHI_MINUS = "phi_minus"
    PSI_PLUS = "psi_plus"
    PSI_MINUS = "psi_minus"


_BELL_VECTORS = {
    BellKind.PHI_PLUS: np.array([1, 0, 0, 1], dtype=complex) / np.sqrt(2),
    BellKind.PHI_MINUS: np.array([1, 0, 0, -1], dtype=complex) / np.sqrt(2),
    BellKind.PSI_PLUS: np.array([0, 1, 1, 0], dtype=complex) / np.sqrt(2),
    BellKind.PSI_MINUS: np.array([0, 1, -1, 0], dtype=complex) / np.sqrt(2),
}


def validate_density(rho: np.ndarray, dim: int | None = None, tol: float = 1e-9) -> np.ndarray:
    """Check Hermiticity, unit trace and positivity; return a complex copy."""
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise WrongDim(f"expected a square matrix, got shape {rho.shape}")
    if dim is not None and rho.shape[0] != dim:
        raise WrongDim(f"expected dimension {dim}, got {rho.shape[0]}")
    if not np.isfinite(rho).all():
        raise ValueError("state entries must be finite")
    defect = hermiticity_defect(rho)
    if defect > tol:
        raise ValueError(f"state is not Hermitian (defect {defect:.3g})")
    trace = rho.trace()
    if abs(trace - 1) > tol:
        raise ValueError(f"state trace {trace:.6g} differs from 1")
    values = np.linalg.eigvalsh((rho + rho.conj().T) / 2)
    if values.min() < -tol:
        raise NotPSD(f"state eigenvalue {values.min():.3g} below -tol")
    return rho


def bloch_to_density(r) -> np.ndarray:
    """Single-qubit state (I + r . sigma)/2 for a Bloch vector of norm <= 1."""
    r = np.asarray(r, dtype=float)
    if r.shape != (3,):
        raise WrongDim(f"expected a 3-vector, got shape {r.shape}")
    norm = float(np.linalg.norm(r))
    if norm > 1 + 1e-9:
        raise OutsideBall(f"Bloch vector norm {norm:.6g} exceeds 1")
    return (ID2 + r[0] * SIGMA_X + r[1] * SIGMA_Y + r[2] * SIGMA_Z) / 2


def density_to_bloch(rho: np.ndarray) -> np.ndarray:
    """Bloch vector (tr[rho sigma_x], tr[rho sigma_y], tr[rho sigma_z])."""
    rho = validate_density(rho, dim=2)
    return np.array([np.trace(rho @ s).real for s in PAULIS[1:]])


def bell_state(kind: BellKind = BellKind.PHI_MINUS) -> np.ndarray:
    """Density matrix of the requested maximally entangled state."""
    vec = _BELL_VECTORS[BellKind(kind)]
    return np.outer(vec, vec.conj())


def werner_state(visibility: float, kind: BellKind = BellKind.PHI_MINUS) -> np.ndarray:
    """v * Bell + (1 - v) * I/4 for v in [0, 1]."""
    if not 0 <= visibility <= 1:
        raise OutOfRange(f"visibility {visibility} outside [0, 1]")
    return visibility * bell_state(kind) + (1 - visibility) * np.eye(4, dtype=complex) / 4


def purity(rho: np.ndarray) -> float:
    """tr[rho^2]; 1 for pure states, 1/dim for the maximally mixed state."""
    rho = validate_density(rho)
    return float(np.trace(rho @ rho).real)


def fidelity(rho1: np.ndarray, rho2: np.ndarray) -> float:
    """Uhlmann fidelity tr sqrt(sqrt(rho1) rho2 sqrt(rho1)).

    Symmetric in its arguments and equal to sqrt(<psi|rho1|psi>) when rho2
    is the pure state |psi><psi|.
    """
    rho1 = validate_density(rho1)
    rho2 = validate_density(rho2)
    if rho1.shape != rho2.shape:
        raise DimMismatch(f"dimensions {rho1.shape[0]} and {rho2.shape[0]} differ")
    # Nuclear norm of sqrt(rho1) sqrt(rho2): same value, but singular values
    # avoid the sqrt-of-eigenvalue-noise blowup for rank-deficient inputs.
    product = _noise_floored_root(rho1) @ _noise_floored_root(rho2)
    return float(np.linalg.svd(product, compute_uv=False).sum())


def _noise_floored_root(rho: np.ndarray) -> np.ndarray:
    """PSD square root with eigenvalues below 1e-13 * max treated as zero.

    Rank-deficient states come out of eigh with ~1e-16 noise where exact
    zeros belong; taking its square root would inject ~1e-8 errors.
    """
    values, vectors = hermitian_eig(rho)
    floor = 1e-13 * max(float(values.max()), 0.0)
    values = np.where(values > floor, values, 0.0)
    root = (vectors * np.sqrt(values)) @ vectors.conj().T
    return (root + root.conj().T) / 2


def concurrence(rho: np.ndarray) -> float:
    """Wootters concurrence of a two-qubit state.

    Uses the spin-flip spectrum: with rho~ = (sy x sy) rho* (sy x sy) and
    mu_1 >= ... >= mu_4 the square roots of the eigenvalues of rho rho~,
    C = max(0, mu_1 - mu_2 - mu_3 - mu_4).
    """
    rho = validate_density(rho, dim=4)
    flip = np.kron(SIGMA_Y, SIGMA_Y)
    rho_tilde = flip @ rho.conj() @ flip
    values = np.linalg.eigvals(rho @ rho_tilde)
    mu = np.sqrt(np.clip(values.real, 0.0, None))
    mu.sort()
    return float(max(0.0, mu[-1] - mu[-2] - mu[-3] - mu[-4]))


def partial_trace(rho: np.ndarray, keep: int) -> np.ndarray:
    """Reduce a two-qubit state to mode ``keep`` (1 or 2)."""
    rho = validate_density(rho, dim=4)
    if keep not in (1, 2):
        raise OutOfRange(f"keep must be 1 or 2, got {keep}")
    blocks = rho.reshape(2, 2, 2, 2)
    if keep == 1:
        return np.einsum("ikjk->ij", blocks)
    return np.einsum("kikj->ij", blocks)


def random_density(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Full-rank random density matrix from a complex Ginibre draw."""
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = g @ g.conj().T
    return rho / rho.trace().real
