"""Signed-weight operator decompositions and their acquisition-time partitions.

A channel is written as rho -> sum_i p_i M_i rho M_i^dag with unit-form
operators M_i and signed real weights p_i obeying the weighted completeness
relation sum_i p_i M_i^dag M_i = I. Each weight is realized operationally as
a fraction of the total acquisition time, |p_i| * total, with negative
weights marking slots whose coincidence counts are subtracted.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import channels, states
from .errors import NotTracePreserving, OutOfRange, Unsatisfiable, WrongDim

TRACE_TOL = 1e-9

OPERATORS = {
    "identity": states.ID2,
    "sigma_x": states.SIGMA_X,
    "sigma_y": states.SIGMA_Y,
    "sigma_z": states.SIGMA_Z,
    "proj_00": np.diag([1, 0]).astype(complex),
    "proj_11": np.diag([0, 1]).astype(complex),
    "ketbra_01": np.array([[0, 1], [0, 0]], dtype=complex),
    "ketbra_10": np.array([[0, 0], [1, 0]], dtype=complex),
}


@dataclass(frozen=True, eq=False)
class SignedTerm:
    """One decomposition term: a unit-form operator and its signed weight."""

    name: str
    operator: np.ndarray
    weight: float

    def __post_init__(self):
        op = np.asarray(self.operator, dtype=complex)
        if op.shape != (2, 2):
            raise WrongDim(f"term operator has shape {op.shape}, expected (2, 2)")
        object.__setattr__(self, "operator", op)
        object.__setattr__(self, "weight", float(self.weight))


@dataclass(frozen=True, eq=False)
class SignedDecomposition:
    terms: tuple[SignedTerm, ...]
    notes: tuple[str, ...] = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(self.terms))
        object.__setattr__(self, "notes", tuple(self.notes))
        if not any(t.weight > 0 for t in self.terms):
            raise ValueError("a signed decomposition needs at least one positive weight")

    @property
    def weights(self) -> np.ndarray:
        return np.array([t.weight for t in self.terms])

    def trace_defect(self) -> float:
        """Max-abs deviation of sum_i p_i M_i^dag M_i from the identity."""
        acc = sum(t.weight * (t.operator.conj().T @ t.operator) for t in self.terms)
        return float(np.abs(acc - states.ID2).max())

    def bench_time_overhead(self) -> float:
        """sum_i |p_i|: total acquisition time in units of the nominal window."""
        return float(np.abs(self.weights).sum())


@dataclass(frozen=True)
class TimeSlot:
    duration: float
    sign: int


@dataclass(frozen=True)
class TimePartition:
    total: float
    slots: tuple[TimeSlot, ...]


def dp_decomposition(lam: float) -> SignedDecomposition:
    """Depolarizing decomposition {I, sigma_x, sigma_y, sigma_z}.

    Weights (1 - lam, lam/3, lam/3, lam/3). lam beyond 3/4 still satisfies
    the completeness relation but over-depolarizes (the Bloch contraction
    1 - 4*lam/3 turns negative); such inputs are flagged in ``notes``.
    """
    if not 0 <= lam <= 1:
        raise OutOfRange(f"lambda {lam} outside [0, 1]")
    names = ("identity", "sigma_x", "sigma_y", "sigma_z")
    weights = (1 - lam, lam / 3, lam / 3, lam / 3)
    terms = tuple(SignedTerm(n, OPERATORS[n], w) for n, w in zip(names, weights))
    notes = ("over-depolarized: lambda > 3/4",) if lam > 0.75 else ()
    return SignedDecomposition(terms, notes)


def gad_decomposition(lam: float, gamma: float) -> SignedDecomposition:
    """Finite-temperature damping decomposition over projector/flip terms.

    Terms {I, |0><0|, |1><1|, |0><1|, |1><0|} with weights

        p0 = sqrt(1 - lam)
        p1 = 1 - lam + lam*gamma - sqrt(1 - lam)
        p2 = 1 - lam*gamma - sqrt(1 - lam)
        p3 = lam*gamma
        p4 = lam - lam*gamma

    so that p0 + p1 + p4 = 1 and p0 + p2 + p3 = 1 hold exactly. p1 is
    negative on a finite parameter region (e.g. lam = 0.1, gamma = 0), which
    is what the signed combination is for.
    """
    if not 0 <= lam <= 1:
        raise OutOfRange(f"lambda {lam} outside [0, 1]")
    if not 0 <= gamma <= 1:
        raise OutOfRange(f"gamma {gamma} outside [0, 1]")
    root = np.sqrt(1 - lam)
    weights = (
        root,
        1 - lam + lam * gamma - root,
        1 - lam * gamma - root,
        lam * gamma,
        lam - lam * gamma,
    )
    names = ("identity", "proj_00", "proj_11", "ketbra_01", "ketbra_10")
    terms = tuple(SignedTerm(n, OPERATORS[n], w) for n, w in zip(names, weights))
    return SignedDecomposition(terms)


def amplitude_damping_decomposition(lam: float) -> SignedDecomposition:
    """Zero-temperature reduction: the gamma = 1 family with the |1><0| term dropped."""
    return reduce_term(gad_decomposition(lam, 1.0), 4)


def dephasing_decomposition(lam: float) -> SignedDecomposition:
    """Pure-dephasing reduction {I: 1-lam, |0><0|: lam, |1><1|: lam}.

    Obtained from the damping family at lam' = 1 - (1 - lam)^2 (so the
    identity weight sqrt(1 - lam') equals 1 - lam) with both flip terms
    dropped; the re-fit forces p1 = p2 = 1 - p0.
    """
    if not 0 <= lam <= 1:
        raise OutOfRange(f"lambda {lam} outside [0, 1]")
    d = gad_decomposition(1 - (1 - lam) ** 2, 0.5)
    return reduce_term(reduce_term(d, 3), 3)


def apply_signed(decomposition: SignedDecomposition, rho: np.ndarray) -> np.ndarray:
    """Signed map sum_i p_i M_i rho M_i^dag on a single-qubit state."""
    rho = states.validate_density(rho, dim=2)
    defect = decomposition.trace_defect()
    if defect > TRACE_TOL:
        raise NotTracePreserving(f"weighted completeness defect {defect:.3g}")
    out = sum(t.weight * (t.operator @ rho @ t.operator.conj().T) for t in decomposition.terms)
    return (out + out.conj().T) / 2


def reduce_term(decomposition: SignedDecomposition, drop: int) -> SignedDecomposition:
    """Remove term ``drop`` and re-fit the remaining weights.

    Re-fit rule: the dropped weight moves onto the first remaining term
    whose Gram matrix M^dag M is proportional to the dropped term's, scaled
    by the trace ratio, which restores the completeness relation exactly.
    Raises Unsatisfiable when no such receiver exists.
    """
    terms = list(decomposition.terms)
    if not 0 <= drop < len(terms):
        raise OutOfRange(f"term index {drop} outside [0, {len(terms) - 1}]")
    dropped = terms.pop(drop)
    gram = dropped.operator.conj().T @ dropped.operator
    receiver = None
    for idx, term in enumerate(terms):
        g = term.operator.conj().T @ term.operator
        inner = abs(np.trace(g.conj().T @ gram))
        norms = np.linalg.norm(g) * np.linalg.norm(gram)
        if norms > 0 and abs(inner - norms) <= 1e-12 * max(norms, 1.0):
            receiver = idx
            break
    if receiver is None:
        if abs(dropped.weight) > 1e-15:
            raise Unsatisfiable(f"no remaining term can absorb the weight of {dropped.name!r}")
    else:
        term = terms[receiver]
        g = term.operator.conj().T @ term.operator
        scale = np.trace(gram).real / np.trace(g).real
        terms[receiver] = SignedTerm(term.name, term.operator, term.weight + dropped.weight * scale)
    return SignedDecomposition(tuple(terms), decomposition.notes)


def to_partition(decomposition: SignedDecomposition, total: float) -> TimePartition:
    """Acquisition-time partition with slot durations |p_i| * total.

    Zero-weight terms keep zero-duration slots so that indices line up with
    the decomposition and the weight round trip is exact.
    """
    if not total > 0:
        raise OutOfRange(f"total acquisition time must be positive, got {total}")
    slots = tuple(
        TimeSlot(duration=abs(t.weight) * total, sign=1 if t.weight >= 0 else -1)
        for t in decomposition.terms
    )
    return TimePartition(total=float(total), slots=slots)


def weights_from_partition(partition: TimePartition) -> np.ndarray:
    """Recover signed weights sign_i * dt_i / total from a partition."""
    return np.array([s.sign * s.duration / partition.total for s in partition.slots])


def verify_against(
    decomposition: SignedDecomposition,
    channel: channels.KrausChannel,
    num_states: int = 100,
    seed: int = 0,
) -> float:
    """Max-abs deviation between the signed map and the Kraus map.

    Sampled over ``num_states`` full-rank random density matrices; the two
    routes agree to ~1e-12 exactly when the decomposition realizes the
    channel.
    """
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(num_states):
        rho = states.random_density(2, rng)
        dev = np.abs(apply_signed(decomposition, rho) - channels.apply(channel, rho)).max()
        worst = max(worst, float(dev))
    return worst
