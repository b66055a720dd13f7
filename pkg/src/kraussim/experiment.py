"""Simulated two-photon experiment: source, tomography, protocol runs, sweeps.

The channel acts on mode 1 of a polarization-entangled pair. Each
decomposition term occupies an acquisition slot of duration |p_i| * total;
coincidence counts are Poisson with mean rate * duration * transmissivity *
tr[Pi rho_slot], and the per-setting signed combination

    sum_i sign_i * |p_i| * t_i * counts_i / (rate * dt_i * t_i)

estimates tr[Pi rho_out] for the signed map. Because dt_i = |p_i| * total,
every slot carries the same conversion factor 1 / (rate * total): the weights
are realized purely as exposure times.
"""
from __future__ import annotations

import functools
from dataclasses import dataclass

import numpy as np
from scipy import optimize

from . import channels, optics
from .decomposition import SignedDecomposition, dp_decomposition, gad_decomposition, to_partition
from .errors import DegenerateSystem, NotCompilable, OutOfRange, WrongDim
from .states import (
    BellKind,
    PAULIS,
    bell_state,
    concurrence,
    fidelity,
    purity,
    validate_density,
    werner_state,
)

DEFAULT_PAIR_RATE = 1e4  # coincidence pairs per second
DEFAULT_TOTAL_TIME = 10.0  # seconds per nominal acquisition window
DEFAULT_SOURCE_FIDELITY = 0.93
BASIS_LETTERS = ("H", "V", "D", "A", "R", "L")

# QWP and polarizer axis angles (radians) whose composition analyzes each
# single-qubit basis state, with |R> = (|H> - i|V>)/sqrt2.
_ANALYZER_ANGLES = {
    "H": (0.0, 0.0),
    "V": (0.0, np.pi / 2),
    "D": (np.pi / 4, np.pi / 4),
    "A": (np.pi / 4, 3 * np.pi / 4),
    "R": (np.pi / 4, np.pi / 2),
    "L": (np.pi / 4, 0.0),
}


def werner_visibility_for_fidelity(target_fidelity: float) -> float:
    """Visibility v with fidelity sqrt(v + (1-v)/4) to the Bell target."""
    if not 0.5 <= target_fidelity <= 1:
        raise OutOfRange(f"Bell fidelity {target_fidelity} outside [0.5, 1]")
    return (4 * target_fidelity**2 - 1) / 3


@dataclass(frozen=True, eq=False)
class SourceModel:
    """Pair source: ideal Bell state, Werner-noise source, or a custom state."""

    kind: str  # "ideal" | "werner" | "custom"
    visibility: float | None = None
    state: np.ndarray | None = None
    pair_rate: float = DEFAULT_PAIR_RATE

    def __post_init__(self):
        if self.kind not in ("ideal", "werner", "custom"):
            raise OutOfRange(f"unknown source kind {self.kind!r}")
        if not self.pair_rate > 0:
            raise OutOfRange(f"pair rate must be positive, got {self.pair_rate}")

    @classmethod
    def ideal(cls, pair_rate: float = DEFAULT_PAIR_RATE) -> "SourceModel":
        return cls(kind="ideal", pair_rate=pair_rate)

    @classmethod
    def werner(cls, visibility: float | None = None, pair_rate: float = DEFAULT_PAIR_RATE) -> "SourceModel":
        """Werner source; default visibility is calibrated to Bell fidelity 0.93."""
        if visibility is None:
            visibility = werner_visibility_for_fidelity(DEFAULT_SOURCE_FIDELITY)
        return cls(kind="werner", visibility=float(visibility), pair_rate=pair_rate)

    @classmethod
    def custom(cls, state: np.ndarray, pair_rate: float = DEFAULT_PAIR_RATE) -> "SourceModel":
        return cls(kind="custom", state=validate_density(state, dim=4), pair_rate=pair_rate)


def source_state(model: SourceModel) -> np.ndarray:
    """Two-qubit density matrix emitted by the source."""
    if model.kind == "ideal":
        return bell_state(BellKind.PHI_MINUS)
    if model.kind == "werner":
        return werner_state(model.visibility, BellKind.PHI_MINUS)
    return validate_density(model.state, dim=4)


@dataclass(frozen=True)
class MeasurementSetting:
    """One coincidence setting: QWP + polarizer angles on each arm."""

    label: str
    qwp1: float
    pol1: float
    qwp2: float
    pol2: float


@functools.lru_cache(maxsize=None)
def setting_projector(setting: MeasurementSetting) -> np.ndarray:
    """Rank-one projector realized by the setting's element composition."""
    proj = []
    for q, p in ((setting.qwp1, setting.pol1), (setting.qwp2, setting.pol2)):
        m = optics.element_matrix(optics.polarizer(p)) @ optics.element_matrix(optics.qwp(q))
        proj.append(m.conj().T @ m)
    return np.kron(proj[0], proj[1])


@functools.lru_cache(maxsize=1)
def tomography_settings() -> tuple[MeasurementSetting, ...]:
    """The 36 product settings over {H, V, D, A, R, L} x {H, V, D, A, R, L}."""
    out = []
    for a in BASIS_LETTERS:
        for b in BASIS_LETTERS:
            q1, p1 = _ANALYZER_ANGLES[a]
            q2, p2 = _ANALYZER_ANGLES[b]
            out.append(MeasurementSetting(label=a + b, qwp1=q1, pol1=p1, qwp2=q2, pol2=p2))
    return tuple(out)


@dataclass(frozen=True)
class CoincidenceRecord:
    """Counts from one (setting, slot) exposure."""

    label: str
    duration: float
    counts: float  # integer-valued for Poisson draws; float in exact mode
    sign: int
    slot: int

    def __post_init__(self):
        if self.duration < 0:
            raise OutOfRange(f"duration must be nonnegative, got {self.duration}")
        if self.counts < 0:
            raise OutOfRange(f"counts must be nonnegative, got {self.counts}")
        if self.sign not in (-1, 1):
            raise OutOfRange(f"sign must be +1 or -1, got {self.sign}")


@dataclass(frozen=True, eq=False)
class TomographyResult:
    rho_hat: np.ndarray
    method: str
    min_eig_pre_clip: float
    iterations: int = 0
    converged: bool = True
    log_likelihood: float | None = None
    ll_trajectory: tuple[float, ...] = ()


def simulate_counts(
    state: np.ndarray,
    setting: MeasurementSetting,
    rate: float,
    duration: float,
    rng,
    sign: int = 1,
    slot: int = 0,
    exact: bool = False,
) -> CoincidenceRecord:
    """Poisson coincidence counts with mean rate * duration * tr[Pi state].

    ``rng`` is a numpy Generator or an integer seed. ``exact=True`` returns
    the expected value itself instead of a draw (float counts).
    """
    state = validate_density(state, dim=4)
    if not rate > 0:
        raise OutOfRange(f"rate must be positive, got {rate}")
    if duration < 0:
        raise OutOfRange(f"duration must be nonnegative, got {duration}")
    prob = float(np.clip(np.trace(setting_projector(setting) @ state).real, 0.0, 1.0))
    mean = rate * duration * prob
    if exact:
        counts = mean
    else:
        if not isinstance(rng, np.random.Generator):
            rng = np.random.default_rng(rng)
        counts = int(rng.poisson(mean))
    return CoincidenceRecord(setting.label, duration, counts, sign, slot)


_PAULI_PRODUCTS = tuple(np.kron(a, b) for a in PAULIS for b in PAULIS)


def _design_matrix(projectors) -> np.ndarray:
    """Rows map Pauli-product coefficients to setting probabilities."""
    return np.array(
        [[np.trace(proj @ basis).real / 4 for basis in _PAULI_PRODUCTS] for proj in projectors]
    )


def _effective_by_label(data) -> dict[str, float]:
    if hasattr(data, "items"):
        return {str(k): float(v) for k, v in data.items()}
    eff: dict[str, float] = {}
    for record in data:
        eff[record.label] = eff.get(record.label, 0.0) + record.sign * record.counts
    return eff


def _select_settings(eff: dict[str, float], settings):
    chosen = [s for s in settings if s.label in eff]
    unknown = set(eff) - {s.label for s in settings}
    if unknown:
        raise OutOfRange(f"unknown setting labels {sorted(unknown)}")
    return chosen


def reconstruct_linear(data, settings=None) -> TomographyResult:
    """Least-squares tomographic inversion with a positivity projection.

    ``data`` maps setting labels to signed-combined effective counts (any
    common scale; negative values are fine) or is an iterable of records to
    combine. The raw solve lands on the Pauli-product coefficients; the
    result is Hermitized, negative eigenvalues are clipped, and the trace is
    renormalized. Raises DegenerateSystem when the provided settings do not
    determine all 16 coefficients.
    """
    settings = tomography_settings() if settings is None else tuple(settings)
    eff = _effective_by_label(data)
    chosen = _select_settings(eff, settings)
    design = _design_matrix([setting_projector(s) for s in chosen])
    values = np.array([eff[s.label] for s in chosen])
    coeff, _, rank, _ = np.linalg.lstsq(design, values, rcond=None)
    if rank < 16:
        raise DegenerateSystem(f"measurement design has rank {rank} < 16")
    if coeff[0] <= 0:
        raise DegenerateSystem("nonpositive total intensity")
    coeff = coeff / coeff[0]
    rho = sum(c * basis for c, basis in zip(coeff, _PAULI_PRODUCTS)) / 4
    rho = (rho + rho.conj().T) / 2
    values_pre, vectors = np.linalg.eigh(rho)
    min_eig = float(values_pre.min())
    clipped = np.clip(values_pre, 0.0, None)
    rho = (vectors * clipped) @ vectors.conj().T
    rho = (rho + rho.conj().T) / 2
    rho /= rho.trace().real
    return TomographyResult(rho_hat=rho, method="linear", min_eig_pre_clip=min_eig)


def _params_from_lower(lower: np.ndarray) -> np.ndarray:
    dim = lower.shape[0]
    params = [lower[i, i].real for i in range(dim)]
    for i in range(dim):
        for j in range(i):
            params.extend((lower[i, j].real, lower[i, j].imag))
    return np.array(params)


def _rho_from_params(params: np.ndarray, dim: int = 4) -> np.ndarray:
    lower = np.zeros((dim, dim), dtype=complex)
    idx = dim
    for i in range(dim):
        lower[i, i] = params[i]
    for i in range(dim):
        for j in range(i):
            lower[i, j] = params[idx] + 1j * params[idx + 1]
            idx += 2
    rho = lower @ lower.conj().T
    return rho / rho.trace().real


def reconstruct_mle(records, settings=None, max_iter: int = 300, tol: float = 1e-9) -> TomographyResult:
    """Maximum-likelihood tomography over a Cholesky-parameterized state.

    Operates on raw (nonnegative) slot records; the signs enter only through
    the expected intensities of the signed-combined per-setting counts. With
    one all-positive record per setting the exact Poisson likelihood is
    maximized; otherwise a Gaussian likelihood whose per-setting variance is
    the summed raw counts. The per-setting exposure is estimated from the
    data itself (the 36 settings tile 9 complete bases), so no rate argument
    is needed.

    Iterates until the log-likelihood gain drops below ``tol`` or
    ``max_iter`` is reached; the trajectory is non-decreasing. On hitting
    ``max_iter`` without convergence the best iterate is returned with
    ``converged=False``.
    """
    settings = tomography_settings() if settings is None else tuple(settings)
    records = list(records)
    for record in records:
        if record.counts < 0:
            raise OutOfRange(f"raw record counts must be nonnegative, got {record.counts}")
    eff: dict[str, float] = {}
    raw: dict[str, float] = {}
    per_label: dict[str, int] = {}
    plain = True
    for record in records:
        eff[record.label] = eff.get(record.label, 0.0) + record.sign * record.counts
        raw[record.label] = raw.get(record.label, 0.0) + record.counts
        per_label[record.label] = per_label.get(record.label, 0) + 1
        if record.sign != 1:
            plain = False
    plain = plain and all(n == 1 for n in per_label.values())
    chosen = _select_settings(eff, settings)
    projectors = [setting_projector(s) for s in chosen]
    design = _design_matrix(projectors)
    if np.linalg.matrix_rank(design) < 16:
        raise DegenerateSystem("measurement design has rank < 16")
    observed = np.array([eff[s.label] for s in chosen])
    variance = np.array([max(raw[s.label], 1.0) for s in chosen])
    exposure = 4.0 * observed.mean()
    if exposure <= 0:
        raise DegenerateSystem("nonpositive total intensity")

    seed_result = reconstruct_linear(eff, chosen)
    rho0 = (1 - 1e-9) * seed_result.rho_hat + 1e-9 * np.eye(4) / 4
    x0 = _params_from_lower(np.linalg.cholesky(rho0))
    proj_stack = np.stack(projectors)

    def negative_ll(x: np.ndarray) -> float:
        rho = _rho_from_params(x)
        probs = np.einsum("sij,ji->s", proj_stack, rho).real
        mu = exposure * probs
        if plain:
            mu = np.clip(mu, 1e-12, None)
            return float(np.sum(mu - observed * np.log(mu)))
        return float(0.5 * np.sum((observed - mu) ** 2 / variance))

    trajectory = [-negative_ll(x0)]
    best = {"x": np.array(x0), "nll": negative_ll(x0)}

    def callback(xk):
        value = negative_ll(xk)
        trajectory.append(-value)
        if value < best["nll"]:
            best["x"] = np.array(xk)
            best["nll"] = value
        if abs(trajectory[-1] - trajectory[-2]) < tol:
            raise StopIteration

    converged = True
    try:
        result = optimize.minimize(
            negative_ll,
            x0,
            method="L-BFGS-B",
            callback=callback,
            options={"maxiter": max_iter, "ftol": 1e-16, "gtol": 1e-12},
        )
        if result.fun < best["nll"]:
            best = {"x": np.array(result.x), "nll": float(result.fun)}
        iterations = len(trajectory) - 1
        if iterations >= max_iter and (
            len(trajectory) < 2 or abs(trajectory[-1] - trajectory[-2]) >= tol
        ):
            converged = False
    except StopIteration:
        iterations = len(trajectory) - 1

    return TomographyResult(
        rho_hat=_rho_from_params(best["x"]),
        method="mle",
        min_eig_pre_clip=seed_result.min_eig_pre_clip,
        iterations=iterations,
        converged=converged,
        log_likelihood=-best["nll"],
        ll_trajectory=tuple(trajectory),
    )


@dataclass(frozen=True, eq=False)
class ProtocolResult:
    reconstruction: TomographyResult
    theory: np.ndarray
    records: tuple[CoincidenceRecord, ...]
    effective: dict[str, float]


def run_protocol(
    decomposition: SignedDecomposition,
    source: SourceModel,
    total_time: float = DEFAULT_TOTAL_TIME,
    seed=0,
    method: str = "linear",
    exact: bool = False,
) -> ProtocolResult:
    """Simulate the full signed time-partition protocol for one channel.

    Each term is compiled to its element sequence when possible (abstract
    operator application otherwise), exposed for |p_i| * total_time, and
    measured in all 36 settings. ``theory`` is the noiseless signed map
    output on the source state; with ``exact=True`` the reconstruction
    reproduces it up to solver roundoff.
    """
    if method not in ("linear", "mle"):
        raise OutOfRange(f"unknown reconstruction method {method!r}")
    rho_src = source_state(source)
    rate = source.pair_rate
    settings = tomography_settings()
    rng = np.random.default_rng(seed)
    partition = to_partition(decomposition, total_time)
    records: list[CoincidenceRecord] = []
    effective = {s.label: 0.0 for s in settings}
    theory = np.zeros((4, 4), dtype=complex)
    for slot, (term, time_slot) in enumerate(zip(decomposition.terms, partition.slots)):
        lifted = channels.lift_to_mode1(term.operator)
        sigma = lifted @ rho_src @ lifted.conj().T
        theory += term.weight * sigma
        transmissivity = float(sigma.trace().real)
        if time_slot.duration <= 0 or transmissivity < optics.TRANSMISSIVITY_FLOOR:
            continue
        try:
            sequence = optics.compile_kraus(term.operator)
            state, transmissivity = optics.apply_sequence(sequence, rho_src)
        except NotCompilable:
            state = (sigma + sigma.conj().T) / 2 / transmissivity
        for setting in settings:
            record = simulate_counts(
                state,
                setting,
                rate * transmissivity,
                time_slot.duration,
                rng,
                sign=time_slot.sign,
                slot=slot,
                exact=exact,
            )
            records.append(record)
            # counts / (rate dt t) estimates tr[Pi rho_slot]; recombine with
            # sign |p| t. The slot duration |p| * total makes this telescoping.
            prob = record.counts / (rate * time_slot.duration * transmissivity)
            effective[setting.label] += (
                time_slot.sign * abs(term.weight) * transmissivity * prob
            )
    theory = (theory + theory.conj().T) / 2
    if method == "linear":
        reconstruction = reconstruct_linear(effective, settings)
    else:
        reconstruction = reconstruct_mle(records, settings)
    return ProtocolResult(reconstruction, theory, tuple(records), effective)


@dataclass(frozen=True)
class SweepRow:
    lam: float
    gamma: float
    fid_theory: float
    fid_sim: float
    purity_theory: float
    purity_sim: float
    conc_theory: float
    conc_sim: float
    seed: int


@dataclass(frozen=True, eq=False)
class SweepResult:
    rows: tuple[SweepRow, ...]
    death_sim: float | None
    death_theory: float | None
    metadata: dict


SWEEP_COLUMNS = (
    "lambda",
    "gamma",
    "fid_theory",
    "fid_sim",
    "purity_theory",
    "purity_sim",
    "conc_theory",
    "conc_sim",
    "seed",
)

SUDDEN_DEATH_THRESHOLD = 1e-3


def child_seed(seed: int, index: int) -> int:
    """Deterministic per-grid-point seed derived from (seed, index)."""
    return int(np.random.SeedSequence([int(seed), int(index)]).generate_state(1, dtype=np.uint64)[0])


def detect_sudden_death(lams, concs, threshold: float = SUDDEN_DEATH_THRESHOLD):
    """First grid value whose concurrence stays below threshold to the end."""
    lams = np.asarray(lams, dtype=float)
    concs = np.asarray(concs, dtype=float)
    below = concs < threshold
    for i in range(len(lams)):
        if below[i:].all():
            return float(lams[i])
    return None


def dynamics_sweep(
    family: str,
    lam_grid=None,
    gamma: float = 0.0,
    source: SourceModel | None = None,
    total_time: float = DEFAULT_TOTAL_TIME,
    seed: int = 0,
    method: str = "linear",
    exact: bool = False,
) -> SweepResult:
    """Metrics along a lambda grid for the dp or gad decomposition family.

    Fidelities are taken against the ideal Bell target (the lambda = 0 input
    state); purity and concurrence are reported for both the noiseless
    theory state and the reconstructed one. Each grid point runs with the
    child seed derived from (seed, index), so points are independent and the
    sweep is reproducible row by row.
    """
    if family not in ("dp", "gad"):
        raise OutOfRange(f"unknown family {family!r}")
    lam_grid = np.linspace(0.0, 1.0, 101) if lam_grid is None else np.asarray(lam_grid, dtype=float)
    source = SourceModel.werner() if source is None else source
    target = bell_state(BellKind.PHI_MINUS)
    rows = []
    for index, lam in enumerate(lam_grid):
        point_seed = child_seed(seed, index)
        if family == "dp":
            decomp = dp_decomposition(float(lam))
        else:
            decomp = gad_decomposition(float(lam), gamma)
        run = run_protocol(decomp, source, total_time, point_seed, method=method, exact=exact)
        theory = validate_density(run.theory, dim=4)
        rho_hat = run.reconstruction.rho_hat
        rows.append(
            SweepRow(
                lam=float(lam),
                gamma=float(gamma) if family == "gad" else 0.0,
                fid_theory=fidelity(theory, target),
                fid_sim=fidelity(rho_hat, target),
                purity_theory=purity(theory),
                purity_sim=purity(rho_hat),
                conc_theory=concurrence(theory),
                conc_sim=concurrence(rho_hat),
                seed=point_seed,
            )
        )
    lams = [r.lam for r in rows]
    death_sim = detect_sudden_death(lams, [r.conc_sim for r in rows])
    death_theory = detect_sudden_death(lams, [r.conc_theory for r in rows])
    metadata = {
        "family": family,
        "gamma": float(gamma) if family == "gad" else None,
        "source": source.kind,
        "source_visibility": source.visibility,
        "pair_rate": source.pair_rate,
        "total_time": total_time,
        "base_seed": int(seed),
        "method": method,
        "exact": exact,
        "fidelity_target": "phi_minus",
        "death_threshold": SUDDEN_DEATH_THRESHOLD,
        "lambda_convention": "kraus weights (maximal dp mixing at lambda = 3/4)",
        "death_sim": death_sim,
        "death_theory": death_theory,
    }
    if family == "dp":
        # Alternate axis lambda' = 4*lambda/3 (Bloch contraction 1 - lambda').
        metadata["death_sim_contraction_axis"] = None if death_sim is None else 4 * death_sim / 3
        metadata["death_theory_contraction_axis"] = (
            None if death_theory is None else 4 * death_theory / 3
        )
    return SweepResult(tuple(rows), death_sim, death_theory, metadata)


def sweep_to_csv(result: SweepResult) -> str:
    """CSV rows with 10-significant-digit floats; byte-stable for fixed seeds."""
    lines = [",".join(SWEEP_COLUMNS)]
    for row in result.rows:
        floats = (
            row.lam,
            row.gamma,
            row.fid_theory,
            row.fid_sim,
            row.purity_theory,
            row.purity_sim,
            row.conc_theory,
            row.conc_sim,
        )
        lines.append(",".join(f"{v:.10g}" for v in floats) + f",{row.seed}")
    return "\n".join(lines) + "\n"
