import numpy as np
import pytest

from kraussim import channels
from kraussim.channels import (
    KrausChannel,
    amplitude_damping,
    apply,
    canonical_form,
    completeness_defect,
    dephasing,
    depolarizing,
    fujiwara_algoet_check,
    generalized_amplitude_damping,
    haar_unitary,
    lift_to_mode1,
    random_cptp_channel,
    to_affine,
    trig_channel,
    trig_family_residual,
)
from kraussim.errors import IncompleteKraus, OutOfRange, WrongDim
from kraussim.states import (
    BellKind,
    bell_state,
    bloch_to_density,
    density_to_bloch,
    purity,
    random_density,
    validate_density,
)

ID2 = np.eye(2, dtype=complex)


def rotation_z(alpha):
    c, s = np.cos(alpha), np.sin(alpha)
    return np.array([[c, -s, 0], [s, c, 0], [0, 0, 1.0]])


def test_kraus_channel_validation():
    with pytest.raises(WrongDim):
        KrausChannel((np.eye(3),))
    with pytest.raises(ValueError):
        KrausChannel(())
    assert KrausChannel((ID2,)).is_minimal
    five = KrausChannel(tuple(np.sqrt(0.2) * ID2 for _ in range(5)))
    assert not five.is_minimal


def test_apply_identity_and_depolarizing():
    rng = np.random.default_rng(0)
    for _ in range(10):
        rho = random_density(2, rng)
        assert np.abs(apply(KrausChannel((ID2,)), rho) - rho).max() < 1e-12
        assert np.abs(apply(depolarizing(0.75), rho) - ID2 / 2).max() < 1e-12


def test_apply_gad_poles():
    rng = np.random.default_rng(1)
    for _ in range(5):
        rho = random_density(2, rng)
        assert np.abs(apply(generalized_amplitude_damping(1, 1), rho) - np.diag([1.0, 0])).max() < 1e-12
        assert np.abs(apply(generalized_amplitude_damping(1, 0), rho) - np.diag([0, 1.0])).max() < 1e-12


def test_apply_rejects_incomplete():
    with pytest.raises(IncompleteKraus):
        apply(KrausChannel((np.sqrt(0.5) * ID2,)), ID2 / 2)


def test_completeness_defect_values():
    assert completeness_defect(KrausChannel((ID2,))) == pytest.approx(0, abs=1e-15)
    assert completeness_defect(KrausChannel((np.sqrt(0.5) * ID2,))) == pytest.approx(0.5)
    for theta in np.linspace(0, 2 * np.pi, 9, endpoint=False):
        for phi in np.linspace(0, np.pi, 7, endpoint=False):
            assert completeness_defect(trig_channel(theta, phi)) < 1e-12


def test_to_affine_identity_and_dp():
    affine = to_affine(KrausChannel((ID2,)))
    assert np.allclose(affine.t, np.eye(3), atol=1e-12)
    assert np.allclose(affine.tau, 0, atol=1e-12)
    for lam in np.linspace(0, 1, 9):
        affine = to_affine(depolarizing(lam))
        c = 1 - 4 * lam / 3
        assert np.abs(affine.t - c * np.eye(3)).max() < 1e-12
        assert np.abs(affine.tau).max() < 1e-12


def test_to_affine_gad_closed_form():
    for lam in np.linspace(0, 1, 6):
        for gamma in np.linspace(0, 1, 5):
            affine = to_affine(generalized_amplitude_damping(lam, gamma))
            root = np.sqrt(1 - lam)
            assert np.abs(affine.t - np.diag([root, root, 1 - lam])).max() < 1e-10
            assert np.allclose(affine.tau, [0, 0, lam * (2 * gamma - 1)], atol=1e-10)


def test_affine_consistency_random():
    rng = np.random.default_rng(3)
    for seed in range(40):
        channel = random_cptp_channel(int(rng.integers(1, 5)), seed)
        affine = to_affine(channel)
        for _ in range(5):
            rho = random_density(2, rng)
            r = density_to_bloch(rho)
            image = density_to_bloch(apply(channel, rho))
            assert np.abs(image - (affine.t @ r + affine.tau)).max() < 1e-9


def test_canonical_form_diagonal():
    t = np.diag([0.5, 0.5, 0.25])
    form = canonical_form(channels.AffineRepresentation(t=t, tau=np.zeros(3)))
    assert np.allclose(np.abs(form.eta), [0.5, 0.5, 0.25])
    assert np.abs(form.o1 @ np.diag(form.eta) @ form.o2.T - t).max() < 1e-12
    assert np.linalg.det(form.o1) == pytest.approx(1, abs=1e-12)
    assert np.linalg.det(form.o2) == pytest.approx(1, abs=1e-12)


def test_canonical_form_rotated_round_trip():
    alpha = 0.6
    t = rotation_z(alpha) @ np.diag([0.9, 0.8, 0.7])
    form = canonical_form(channels.AffineRepresentation(t=t, tau=np.zeros(3)))
    assert np.allclose(form.eta, [0.9, 0.8, 0.7], atol=1e-12)
    assert np.abs(form.o1 @ np.diag(form.eta) @ form.o2.T - t).max() < 1e-9
    # o1 @ o2.T is invariant under the paired-sign SVD ambiguity.
    assert np.allclose(form.o1 @ form.o2.T, rotation_z(alpha), atol=1e-9)
    assert np.linalg.det(form.o1) == pytest.approx(1, abs=1e-9)
    assert np.linalg.det(form.o2) == pytest.approx(1, abs=1e-9)


def test_canonical_form_negative_determinant():
    for diag in ([0.9, 0.8, -0.7], [-0.9, -0.8, -0.7]):
        t = np.diag(diag)
        form = canonical_form(channels.AffineRepresentation(t=t, tau=np.zeros(3)))
        assert np.linalg.det(form.o1) == pytest.approx(1, abs=1e-9)
        assert np.linalg.det(form.o2) == pytest.approx(1, abs=1e-9)
        assert np.abs(form.o1 @ np.diag(form.eta) @ form.o2.T - t).max() < 1e-9
        negatives = int(np.sum(form.eta < 0))
        assert negatives % 2 == (1 if np.linalg.det(t) < 0 else 0)


def test_canonical_tau_rotated_frame():
    t = rotation_z(0.4) @ np.diag([0.6, 0.5, 0.4])
    tau = np.array([0.1, -0.2, 0.05])
    form = canonical_form(channels.AffineRepresentation(t=t, tau=tau))
    assert np.allclose(form.o1 @ form.tau, tau, atol=1e-12)


def test_fujiwara_algoet_examples():
    assert fujiwara_algoet_check([1, 1, 1]).satisfied
    verdict = fujiwara_algoet_check([1, 1, -1])
    assert not verdict.satisfied
    assert verdict.margin < -1
    for lam in np.linspace(0, 1, 11):
        for gamma in np.linspace(0, 1, 11):
            root = np.sqrt(1 - lam)
            verdict = fujiwara_algoet_check([root, root, 1 - lam], lam * (2 * gamma - 1))
            assert verdict.satisfied


def test_trig_channel_identity_and_ranges():
    rng = np.random.default_rng(4)
    rho = random_density(2, rng)
    assert np.abs(apply(trig_channel(0, 0), rho) - rho).max() < 1e-12
    for bad in ((-0.1, 0.5), (2 * np.pi, 0.5), (0.5, np.pi), (0.5, -0.01)):
        with pytest.raises(OutOfRange):
            trig_channel(*bad)


def test_trig_channel_matches_target_geometry():
    for theta in np.linspace(0, 2 * np.pi, 11, endpoint=False):
        for phi in np.linspace(0, np.pi, 9, endpoint=False):
            affine = to_affine(trig_channel(theta, phi))
            eta = np.array([np.cos(theta), np.cos(phi), np.cos(theta) * np.cos(phi)])
            tau = np.array([0, 0, np.sin(theta) * np.sin(phi)])
            assert np.abs(np.diag(affine.t) - eta).max() < 1e-10
            assert np.abs(affine.t - np.diag(np.diag(affine.t))).max() < 1e-10
            assert np.abs(affine.tau - tau).max() < 1e-10


def test_trig_channel_theta_equals_phi_is_damping():
    theta = 0.7
    affine = to_affine(trig_channel(theta, theta))
    lam = np.sin(theta) ** 2
    root = np.sqrt(1 - lam)
    assert np.abs(affine.t - np.diag([root, root, 1 - lam])).max() < 1e-10
    assert np.allclose(affine.tau, [0, 0, lam], atol=1e-10)


def test_trig_family_residual():
    for theta, phi in ((0.3, 0.9), (2.0, 0.1), (4.5, 2.2)):
        form = canonical_form(to_affine(trig_channel(theta, phi)))
        assert trig_family_residual(form.eta, form.tau[2]) < 1e-9
    form = canonical_form(to_affine(depolarizing(0.3)))
    assert trig_family_residual(form.eta, form.tau[2]) > 0.1


def test_builtin_channel_ranges_and_edges():
    assert len(depolarizing(0).operators) == 1
    with pytest.raises(OutOfRange):
        depolarizing(1.2)
    with pytest.raises(OutOfRange):
        generalized_amplitude_damping(0.5, -0.1)
    with pytest.raises(OutOfRange):
        dephasing(2.0)
    rng = np.random.default_rng(9)
    rho = random_density(2, rng)
    assert np.abs(apply(amplitude_damping(0.4), rho) - apply(generalized_amplitude_damping(0.4, 1.0), rho)).max() < 1e-12


def test_gad_matches_pure_state_closed_form():
    rng = np.random.default_rng(6)
    for _ in range(20):
        amp = rng.normal(size=2) + 1j * rng.normal(size=2)
        amp /= np.linalg.norm(amp)
        alpha, beta = amp
        rho = np.outer(amp, amp.conj())
        lam, gamma = rng.uniform(), rng.uniform()
        out = apply(generalized_amplitude_damping(lam, gamma), rho)
        expected = np.array(
            [
                [abs(alpha) ** 2 * (1 - lam + lam * gamma) + abs(beta) ** 2 * lam * gamma,
                 alpha * np.conj(beta) * np.sqrt(1 - lam)],
                [np.conj(alpha) * beta * np.sqrt(1 - lam),
                 abs(alpha) ** 2 * lam * (1 - gamma) + abs(beta) ** 2 * (1 - lam * gamma)],
            ]
        )
        assert np.abs(out - expected).max() < 1e-12


def test_dephasing_kills_coherence():
    rho = np.full((2, 2), 0.5, dtype=complex)
    out = apply(dephasing(1.0), rho)
    assert np.abs(out - np.diag([0.5, 0.5])).max() < 1e-12


def test_random_cptp_channel_contract():
    first = random_cptp_channel(3, seed=123)
    second = random_cptp_channel(3, seed=123)
    for a, b in zip(first.operators, second.operators):
        assert np.array_equal(a, b)
    rng = np.random.default_rng(10)
    for seed in range(30):
        num = seed % 4 + 1
        channel = random_cptp_channel(num, seed)
        assert completeness_defect(channel) < 1e-10
        rho = random_density(2, rng)
        out = apply(channel, rho)
        assert abs(np.trace(out).real - 1) < 1e-10
        assert np.linalg.eigvalsh(out).min() > -1e-9
    with pytest.raises(OutOfRange):
        random_cptp_channel(5, 0)


def test_random_unitary_channel_preserves_purity():
    rng = np.random.default_rng(12)
    channel = random_cptp_channel(1, seed=77)
    for _ in range(5):
        r = rng.normal(size=3)
        r /= np.linalg.norm(r)
        rho = bloch_to_density(r)
        assert purity(apply(channel, rho)) == pytest.approx(1, abs=1e-10)


def test_haar_unitary_is_unitary():
    rng = np.random.default_rng(14)
    for dim in (2, 4, 8):
        u = haar_unitary(dim, rng)
        assert np.abs(u @ u.conj().T - np.eye(dim)).max() < 1e-12


def test_lift_to_mode1():
    assert np.allclose(lift_to_mode1(ID2), np.eye(4))
    bell = bell_state(BellKind.PHI_MINUS)
    sx = np.array([[0, 1], [1, 0]], dtype=complex)
    out = lift_to_mode1(sx) @ bell @ lift_to_mode1(sx).conj().T
    assert np.abs(out - bell_state(BellKind.PSI_MINUS)).max() < 1e-12
    ketbra = np.array([[0, 1], [0, 0]], dtype=complex)
    lifted = lift_to_mode1(ketbra)
    out = lifted @ bell @ lifted.conj().T
    out /= out.trace().real
    expected = np.kron(np.diag([1.0, 0]), np.diag([0, 1.0]))
    assert np.abs(out - expected).max() < 1e-12
    with pytest.raises(WrongDim):
        lift_to_mode1(np.eye(4))


def test_ellipsoid_image_property():
    rng = np.random.default_rng(15)
    cases = [
        generalized_amplitude_damping(0.3, 0.2),
        trig_channel(0.7, 0.5),
        random_cptp_channel(1, seed=5),
    ]
    for channel in cases:
        affine = to_affine(channel)
        form = canonical_form(affine)
        assert np.abs(form.eta).min() > 1e-6
        for _ in range(100):
            r = rng.normal(size=3)
            r /= np.linalg.norm(r)
            image = affine.t @ r + affine.tau
            rel = form.o1.T @ (image - affine.tau) / form.eta
            assert np.sum(rel**2) == pytest.approx(1, abs=1e-9)


def test_unitality():
    assert np.abs(to_affine(depolarizing(0.4)).tau).max() < 1e-12
    assert np.abs(to_affine(generalized_amplitude_damping(0.5, 0.9)).tau).max() > 0.1


def test_channel_outputs_are_states():
    rng = np.random.default_rng(16)
    cases = [depolarizing(0.3), generalized_amplitude_damping(0.6, 0.25), dephasing(0.5), trig_channel(1.0, 0.4)]
    for channel in cases:
        for _ in range(10):
            out = apply(channel, random_density(2, rng))
            validate_density(out, dim=2)
