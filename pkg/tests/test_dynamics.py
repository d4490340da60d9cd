import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from magnocool import cooling, dynamics, spectrum, supermodes
from magnocool.errors import DomainError, InstabilityError
from magnocool.model import SystemParams, canonical_params


def _loss(**kw):
    return canonical_params(kappa_a_over_kappa_m=-1.0, **kw)


def test_uncoupled_phonon_block():
    p = canonical_params(j_coupling=0.0, g_linearized_override=0.0)
    a = dynamics.drift_matrix(p)
    wb, gb = p.omega_b, p.gamma_b
    np.testing.assert_allclose(a[2:4, 2:4], [[-gb / 2, wb], [-wb, -gb / 2]], rtol=1e-15)
    mask = np.ones((6, 6), dtype=bool)
    for k in range(3):
        mask[2 * k:2 * k + 2, 2 * k:2 * k + 2] = False
    assert np.all(a[mask] == 0)


def test_drift_trace():
    for ratio in (1.0, -1.0, 0.3):
        p = canonical_params(kappa_a_over_kappa_m=ratio)
        assert np.trace(dynamics.drift_matrix(p)) == pytest.approx(
            p.kappa_a - p.kappa_m - p.gamma_b, abs=1e-12 * p.kappa_m
        )


def _eig_match(p):
    ev = np.linalg.eigvals(dynamics.drift_matrix(p.replace(g_linearized_override=0.0)))
    pair = supermodes.supermodes_from_params(p)
    lam = [-1j * (pair.xi_plus - p.omega_drive), -1j * (pair.xi_minus - p.omega_drive)]
    expected = lam + [np.conj(z) for z in lam]
    scale = max(abs(p.delta_a), p.kappa_m, abs(p.kappa_a), p.j_coupling)
    return max(np.min(np.abs(ev - z)) for z in expected) / scale


@given(
    j=st.floats(0.0, 2.0),
    ratio=st.floats(-2.0, 2.0),
    det=st.floats(-2.0, 2.0),
)
@settings(max_examples=100)
def test_drift_matches_supermodes(j, ratio, det):
    p = canonical_params(kappa_a_over_kappa_m=ratio, detuning_over_omega_b=det)
    p = p.replace(j_coupling=j * p.kappa_m)
    disc = p.j_coupling**2 - ((p.kappa_a + p.kappa_m) / 4) ** 2
    # a double root only resolves to sqrt(eps)
    tol = 1e-9 if abs(disc) > 1e-6 * p.kappa_m**2 else 1e-6
    assert _eig_match(p) <= tol


def test_diffusion_matrix():
    p = canonical_params()
    d0 = dynamics.diffusion_matrix(p, 0.0)
    np.testing.assert_array_equal(d0[2:4, 2:4], np.eye(2) * p.gamma_b / 2)
    np.testing.assert_array_equal(d0[0:2, 0:2], d0[4:6, 4:6])
    assert np.all(np.linalg.eigvalsh(dynamics.diffusion_matrix(_loss(), 123.0)) >= 0)
    with pytest.raises(DomainError):
        dynamics.diffusion_matrix(p, -1.0)


def test_stability_classification():
    base = canonical_params(j_coupling=0.0, g_linearized_override=0.0)
    gain = dynamics.stability(base)
    assert not gain.stable
    assert gain.margin == pytest.approx(base.kappa_a / 2, rel=1e-9)
    assert dynamics.stability(base.replace(kappa_a=-base.kappa_m)).stable


def test_fig9_sets_are_unstable():
    # recorded regression values, in units of omega_b
    for g, margin in ((0.15, 0.0382), (0.05, 0.0199)):
        p = canonical_params(g_over_kappa_m=g)
        rep = dynamics.stability(p)
        assert not rep.stable
        assert rep.margin / p.omega_b == pytest.approx(margin, rel=2e-2)


def test_steady_covariance_uncoupled_is_thermal():
    p = _loss(j_coupling=0.0, g_linearized_override=0.0)
    st_ = dynamics.steady_covariance(p, 42.0)
    assert st_.n_phonon == pytest.approx(42.0, rel=1e-12)


def test_lyapunov_residual():
    p = _loss()
    d = dynamics.diffusion_matrix(p, 1e3)
    st_ = dynamics.steady_covariance(p, 1e3)
    assert dynamics.lyapunov_residual(p, 1e3, st_.cov) <= 1e-9 * np.max(d)
    assert np.all(np.linalg.eigvalsh(st_.cov) > 0)


def test_steady_covariance_refuses_unstable():
    with pytest.raises(InstabilityError, match="unstable drift"):
        dynamics.steady_covariance(canonical_params(), 1e3)


def test_weak_coupling_agrees_with_rate_picture():
    # a stable loss-cavity set with small G
    p = _loss(g_over_kappa_m=0.05)
    n_th = 1e3
    lyap = dynamics.steady_covariance(p, n_th).n_phonon
    n_f = cooling.cooling_report(p, n_th).n_f
    assert abs(lyap - n_f) / lyap < 0.2


def test_evolution_uncoupled_stays_thermal():
    p = _loss(j_coupling=0.0, g_linearized_override=0.0)
    t = np.linspace(0, 1e-5, 21)
    states = dynamics.evolve_covariance(p, 100.0, t)
    for s in states:
        assert s.n_phonon == pytest.approx(100.0, rel=1e-9)


def test_evolution_reaches_lyapunov_fixed_point():
    p = _loss()
    n_th = 1e3
    # net rate ~ 5e5 /s, so 6e-5 s is ~30 relaxation times
    t = np.linspace(0, 6e-5, 121)
    states = dynamics.evolve_covariance(p, n_th, t, rtol=1e-10, atol=1e-12)
    ss = dynamics.steady_covariance(p, n_th)
    assert abs(states[-1].n_phonon - ss.n_phonon) <= 1e-6
    for s in states:
        assert np.array_equal(s.cov, s.cov.T)
    # distance to the fixed point decays after the transient, up to integrator noise
    dist = np.array([np.max(np.abs(s.cov - ss.cov)) for s in states[40:]])
    assert np.all(np.diff(dist) <= 1e-10 * np.max(np.abs(ss.cov)))


def test_evolution_divergence_carries_partial_states():
    p = canonical_params()
    t = np.linspace(0, 2e-5, 81)
    with pytest.raises(InstabilityError) as info:
        dynamics.evolve_covariance(p, 1e3, t)
    states = info.value.states
    assert 0 < len(states) < t.size
    assert states[0].n_phonon == pytest.approx(1e3)


def test_evolution_input_validation():
    p = _loss()
    with pytest.raises(DomainError):
        dynamics.evolve_covariance(p, 1.0, [0.0, 0.0])
    with pytest.raises(DomainError):
        dynamics.evolve_covariance(p, 1.0, [0.0, 1.0], v0=np.triu(np.ones((6, 6))))


def test_complex_coupling_drift_is_rotation_invariant():
    p = SystemParams(
        omega_a=1e9, omega_m=1e9, omega_b=1e6, kappa_a=-1e5, kappa_m=2e5, gamma_b=10.0,
        j_coupling=1e5, g_single=0.1, omega_drive=1e9 - 1e6, rabi=1e9,
    )
    ev_rot = np.sort_complex(np.linalg.eigvals(dynamics.drift_matrix(p, rotate=True)))
    ev_raw = np.sort_complex(np.linalg.eigvals(dynamics.drift_matrix(p, rotate=False)))
    np.testing.assert_allclose(ev_raw, ev_rot, rtol=1e-9, atol=1e-9 * p.omega_b)
    assert spectrum.coupling(p, rotate=False).imag != 0
