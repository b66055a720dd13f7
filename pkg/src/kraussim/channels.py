"""Single-qubit channels: Kraus sets, affine (Bloch) form, canonical form.

A channel is a plain tuple of 2x2 Kraus operators. Its action on the Bloch
ball is the affine map r -> T r + tau; the canonical form factors T through
proper rotations as T = O1 diag(eta) O2^T with signed principal axes eta,
which is the frame the Fujiwara-Algoet positivity check applies to.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import IncompleteKraus, OutOfRange, WrongDim
from .linalg import svd3
from .states import (
    ID2,
    PAULIS,
    bloch_to_density,
    density_to_bloch,
    validate_density,
)

COMPLETENESS_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class KrausChannel:
    """An ordered set of 2x2 Kraus operators."""

    operators: tuple[np.ndarray, ...]

    def __post_init__(self):
        ops = []
        for op in self.operators:
            op = np.asarray(op, dtype=complex)
            if op.shape != (2, 2):
                raise WrongDim(f"Kraus operator has shape {op.shape}, expected (2, 2)")
            if not np.isfinite(op).all():
                raise ValueError("Kraus operator entries must be finite")
            ops.append(op)
        if not ops:
            raise ValueError("a channel needs at least one Kraus operator")
        object.__setattr__(self, "operators", tuple(ops))

    @property
    def is_minimal(self) -> bool:
        # A qubit channel never needs more than four operators.
        return len(self.operators) <= 4


@dataclass(frozen=True)
class AffineRepresentation:
    """Bloch-ball action r -> t @ r + tau."""

    t: np.ndarray
    tau: np.ndarray


@dataclass(frozen=True)
class CanonicalForm:
    """t = o1 @ diag(eta) @ o2.T with o1, o2 proper rotations, tau in the o1 frame."""

    eta: np.ndarray
    tau: np.ndarray
    o1: np.ndarray
    o2: np.ndarray


@dataclass(frozen=True)
class FAVerdict:
    """Outcome of the Fujiwara-Algoet check; margin is the most-violated slack."""

    satisfied: bool
    margin: float


def completeness_defect(channel: KrausChannel) -> float:
    """Max-abs deviation of sum K^dag K from the identity."""
    acc = sum(op.conj().T @ op for op in channel.operators)
    return float(np.abs(acc - ID2).max())


def apply(channel: KrausChannel, rho: np.ndarray) -> np.ndarray:
    """Channel output sum_i K_i rho K_i^dag for a single-qubit state."""
    rho = validate_density(rho, dim=2)
    defect = completeness_defect(channel)
    if defect > COMPLETENESS_TOL:
        raise IncompleteKraus(f"completeness defect {defect:.3g} exceeds {COMPLETENESS_TOL:.1g}")
    out = sum(op @ rho @ op.conj().T for op in channel.operators)
    return (out + out.conj().T) / 2


def to_affine(channel: KrausChannel) -> AffineRepresentation:
    """Affine form obtained by pushing the Pauli basis through the channel."""
    tau = density_to_bloch(apply(channel, ID2 / 2))
    cols = []
    for axis in range(3):
        r = np.zeros(3)
        r[axis] = 1.0
        cols.append(density_to_bloch(apply(channel, bloch_to_density(r))) - tau)
    return AffineRepresentation(t=np.column_stack(cols), tau=tau)


def canonical_form(affine: AffineRepresentation) -> CanonicalForm:
    """Signed-axis decomposition of the affine map through proper rotations.

    Sign flips needed to make both orthogonal factors proper are absorbed
    into eta, so det(t) < 0 shows up as a negative eta entry.
    """
    o1, s, o2 = svd3(affine.t)
    eta = s.astype(float).copy()
    o1 = o1.copy()
    o2 = o2.copy()
    if np.linalg.det(o1) < 0:
        o1[:, 2] *= -1
        eta[2] *= -1
    if np.linalg.det(o2) < 0:
        o2[:, 2] *= -1
        eta[2] *= -1
    tau = o1.T @ np.asarray(affine.tau, dtype=float)
    return CanonicalForm(eta=eta, tau=tau, o1=o1, o2=o2)


def fujiwara_algoet_check(eta, tau_z: float = 0.0, tol: float = 1e-9) -> FAVerdict:
    """Complete-positivity necessary conditions in the canonical frame.

    Checks (eta_x +- eta_y)^2 <= (1 +- eta_z)^2 - tau_z^2; with tau_z = 0
    this is the unital-channel form. The margin is the smaller slack and is
    negative exactly when some branch is violated beyond ``tol``.
    """
    ex, ey, ez = np.asarray(eta, dtype=float)
    slack_plus = (1 + ez) ** 2 - tau_z**2 - (ex + ey) ** 2
    slack_minus = (1 - ez) ** 2 - tau_z**2 - (ex - ey) ** 2
    margin = float(min(slack_plus, slack_minus))
    return FAVerdict(satisfied=margin >= -tol, margin=margin)


def trig_family_residual(eta, tau_z: float) -> float:
    """Distance from the two-operator extremal family.

    That family satisfies eta_z = eta_x * eta_y together with
    tau_z^2 = (1 - eta_x^2)(1 - eta_y^2); returns the larger residual.
    """
    ex, ey, ez = np.asarray(eta, dtype=float)
    return float(max(abs(ez - ex * ey), abs(tau_z**2 - (1 - ex**2) * (1 - ey**2))))


def depolarizing(lam: float) -> KrausChannel:
    """Depolarizing channel {sqrt(1-lam) I, sqrt(lam/3) sigma_k}.

    The Bloch contraction is 1 - 4*lam/3, so the output is maximally mixed
    at lam = 3/4.
    """
    if not 0 <= lam <= 1:
        raise OutOfRange(f"lambda {lam} outside [0, 1]")
    weights = [1 - lam, lam / 3, lam / 3, lam / 3]
    ops = [np.sqrt(w) * p for w, p in zip(weights, PAULIS) if w > 0]
    return KrausChannel(tuple(ops))


def generalized_amplitude_damping(lam: float, gamma: float) -> KrausChannel:
    """Finite-temperature amplitude damping.

    lam is the decay parameter; gamma in [0, 1] weights relaxation toward
    |0> (gamma = 1) versus |1> (gamma = 0). The lam -> 1 fixed point is
    diag(gamma, 1 - gamma).
    """
    if not 0 <= lam <= 1:
        raise OutOfRange(f"lambda {lam} outside [0, 1]")
    if not 0 <= gamma <= 1:
        raise OutOfRange(f"gamma {gamma} outside [0, 1]")
    root = np.sqrt(1 - lam)
    k0 = np.sqrt(gamma) * np.array([[1, 0], [0, root]], dtype=complex)
    k1 = np.sqrt(gamma) * np.array([[0, np.sqrt(lam)], [0, 0]], dtype=complex)
    k2 = np.sqrt(1 - gamma) * np.array([[root, 0], [0, 1]], dtype=complex)
    k3 = np.sqrt(1 - gamma) * np.array([[0, 0], [np.sqrt(lam), 0]], dtype=complex)
    ops = [op for op in (k0, k1, k2, k3) if np.abs(op).max() > 0]
    return KrausChannel(tuple(ops))


def amplitude_damping(lam: float) -> KrausChannel:
    """Zero-temperature damping toward |0>; equals generalized damping at gamma=1."""
    return generalized_amplitude_damping(lam, 1.0)


def dephasing(lam: float) -> KrausChannel:
    """Phase damping {sqrt(1-lam) I, sqrt(lam) |0><0|, sqrt(lam) |1><1|}."""
    if not 0 <= lam <= 1:
        raise OutOfRange(f"lambda {lam} outside [0, 1]")
    p0 = np.diag([1, 0]).astype(complex)
    p1 = np.diag([0, 1]).astype(complex)
    ops = [np.sqrt(w) * op for w, op in ((1 - lam, ID2), (lam, p0), (lam, p1)) if w > 0]
    return KrausChannel(tuple(ops))


def trig_channel(theta: float, phi: float) -> KrausChannel:
    """Two-operator family covering the extremal non-unital channels.

    Angles in radians with theta in [0, 2*pi) and phi in [0, pi). The Bloch
    action is eta = (cos theta, cos phi, cos theta cos phi) with shift
    tau = (0, 0, sin theta sin phi); theta = phi gives plain amplitude
    damping with lam = sin^2 theta.
    """
    if not 0 <= theta < 2 * np.pi:
        raise OutOfRange(f"theta {theta} outside [0, 2*pi)")
    if not 0 <= phi < np.pi:
        raise OutOfRange(f"phi {phi} outside [0, pi)")
    half_diff = (phi - theta) / 2
    half_sum = (phi + theta) / 2
    k1 = np.array([[np.cos(half_diff), 0], [0, np.cos(half_sum)]], dtype=complex)
    k2 = np.array([[0, np.sin(half_sum)], [np.sin(half_diff), 0]], dtype=complex)
    return KrausChannel((k1, k2))


def haar_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary via phase-corrected QR of a Ginibre matrix."""
    z = (rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def random_cptp_channel(num_kraus: int, seed: int) -> KrausChannel:
    """Random channel from a Haar unitary on system x environment.

    The environment has dimension ``num_kraus``; the operators are the
    blocks K_mu = (I x <mu|) U (I x |0>), which are complete by unitarity.
    """
    if not 1 <= num_kraus <= 4:
        raise OutOfRange(f"num_kraus {num_kraus} outside [1, 4]")
    rng = np.random.default_rng(seed)
    u = haar_unitary(2 * num_kraus, rng)
    # Row/column index (s, e) -> s * num_kraus + e with the environment last.
    ops = []
    for mu in range(num_kraus):
        k = np.empty((2, 2), dtype=complex)
        for i in range(2):
            for j in range(2):
                k[i, j] = u[i * num_kraus + mu, j * num_kraus]
        ops.append(k)
    return KrausChannel(tuple(ops))


def lift_to_mode1(op: np.ndarray) -> np.ndarray:
    """Embed a single-qubit operator as op (x) I on the two-mode space."""
    op = np.asarray(op, dtype=complex)
    if op.shape != (2, 2):
        raise WrongDim(f"expected a 2x2 operator, got shape {op.shape}")
    return np.kron(op, ID2)
