"""Polarization optics: Jones matrices, element sequences, operator compilation.

Angles are radians of the element's axis from horizontal. A sequence lists
elements in the order light meets them, so the composed Jones matrix is the
reversed product. Elements act on mode 1 only; mode 2 passes through.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import FullyBlocked, NotCompilable, OutOfRange, WrongDim
from .states import ID2, SIGMA_X, SIGMA_Y, SIGMA_Z, validate_density

TRANSMISSIVITY_FLOOR = 1e-15


@dataclass(frozen=True)
class OpticalElement:
    kind: str  # "hwp" | "qwp" | "pol"
    angle: float  # radians

    def __post_init__(self):
        if self.kind not in ("hwp", "qwp", "pol"):
            raise OutOfRange(f"unknown element kind {self.kind!r}")


def hwp(angle: float) -> OpticalElement:
    """Half-wave plate with fast axis at ``angle``."""
    return OpticalElement("hwp", float(angle))


def qwp(angle: float) -> OpticalElement:
    """Quarter-wave plate with fast axis at ``angle``."""
    return OpticalElement("qwp", float(angle))


def polarizer(angle: float) -> OpticalElement:
    """Linear polarizer transmitting the axis at ``angle``."""
    return OpticalElement("pol", float(angle))


def _rotation(angle: float) -> np.ndarray:
    c, s = np.cos(angle), np.sin(angle)
    return np.array([[c, -s], [s, c]])


def element_matrix(element: OpticalElement) -> np.ndarray:
    """Jones matrix of a single element."""
    a = element.angle
    if element.kind == "hwp":
        c, s = np.cos(2 * a), np.sin(2 * a)
        return np.array([[c, s], [s, -c]], dtype=complex)
    if element.kind == "qwp":
        r = _rotation(a)
        return (r @ np.diag([1, 1j]) @ r.T).astype(complex)
    vec = np.array([np.cos(a), np.sin(a)], dtype=complex)
    return np.outer(vec, vec.conj())


def sequence_matrix(sequence) -> np.ndarray:
    """Composed Jones matrix of a sequence (identity when empty)."""
    mat = ID2.copy()
    for element in sequence:
        mat = element_matrix(element) @ mat
    return mat


# Unit-form operator shapes realizable with at most two elements. sigma_y is
# realized as sigma_x sigma_z, which equals it up to a global phase.
_PROJ_H = np.diag([1, 0]).astype(complex)
_PROJ_V = np.diag([0, 1]).astype(complex)
_COMPILE_TABLE = (
    (ID2, ()),
    (SIGMA_X, (hwp(np.pi / 4),)),
    (SIGMA_Y, (hwp(0.0), hwp(np.pi / 4))),
    (SIGMA_Z, (hwp(0.0),)),
    (_PROJ_H, (polarizer(0.0),)),
    (_PROJ_V, (polarizer(np.pi / 2),)),
    (np.array([[0, 1], [0, 0]], dtype=complex), (hwp(np.pi / 4), polarizer(0.0))),
    (np.array([[0, 0], [1, 0]], dtype=complex), (hwp(np.pi / 4), polarizer(np.pi / 2))),
)


def compile_kraus(operator: np.ndarray) -> tuple[OpticalElement, ...]:
    """Element sequence realizing ``operator`` up to scale and global phase.

    Only the eight tabulated shapes (identity, the three Pauli operators and
    the four |a><b| projector/flip operators in the H/V basis) compile;
    anything else raises NotCompilable and callers fall back to applying the
    operator abstractly.
    """
    operator = np.asarray(operator, dtype=complex)
    if operator.shape != (2, 2):
        raise WrongDim(f"expected a 2x2 operator, got shape {operator.shape}")
    norm = np.linalg.norm(operator)
    if norm < 1e-15:
        raise NotCompilable("zero operator")
    for shape, sequence in _COMPILE_TABLE:
        # |<A, B>| = |A||B| iff the matrices are proportional.
        inner = abs(np.trace(shape.conj().T @ operator))
        if abs(inner - np.linalg.norm(shape) * norm) <= 1e-10 * max(norm, 1.0):
            return sequence
    raise NotCompilable("operator is not proportional to any supported element product")


def apply_sequence(sequence, rho: np.ndarray):
    """Push a two-qubit state through mode-1 elements.

    Returns ``(state, transmissivity)`` where transmissivity is the survival
    probability tr[(A x I) rho (A x I)^dag] and ``state`` is the renormalized
    output. Raises FullyBlocked when (numerically) nothing is transmitted.
    """
    rho = validate_density(rho, dim=4)
    lifted = np.kron(sequence_matrix(sequence), ID2)
    out = lifted @ rho @ lifted.conj().T
    transmissivity = float(out.trace().real)
    if transmissivity < TRANSMISSIVITY_FLOOR:
        raise FullyBlocked("sequence transmits nothing of this state")
    out = (out + out.conj().T) / 2
    return out / transmissivity, transmissivity
