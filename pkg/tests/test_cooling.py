import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import linalg

from magnocool import cooling, spectrum
from magnocool.errors import DomainError, NetHeatingError, TruncationError, UnstableCoolingError
from magnocool.model import SphereSpec, canonical_params, field_for_magnon_frequency
from magnocool.spectrum import CoolingRates


def rates(a_plus, a_minus):
    return CoolingRates(a_plus, a_minus, a_minus - a_plus, 0.0)


def test_quantum_limit_examples():
    assert cooling.quantum_limit(0.0, 1.0) == 0.0
    assert cooling.quantum_limit(1.0, 2.0) == 1.0
    with pytest.raises(NetHeatingError):
        cooling.quantum_limit(2.0, 1.0)
    with pytest.raises(DomainError):
        cooling.quantum_limit(-1.0, 1.0)


def test_no_net_rate_leaves_thermal_occupancy():
    rep = cooling.final_phonon_number(rates(0.0, 0.0), 1e-3, 1234.0)
    assert rep.n_f == pytest.approx(1234.0)


def test_vanishing_damping_reaches_quantum_limit():
    rep = cooling.final_phonon_number(rates(0.1, 1.0), 0.0, 1e6)
    assert rep.n_f == pytest.approx(rep.n_c) == pytest.approx(0.1 / 0.9)


def test_unstable_cooling():
    with pytest.raises(UnstableCoolingError):
        cooling.final_phonon_number(rates(2.0, 1.0), 0.5, 10.0)


def test_net_heating_falls_back_to_continuous_form():
    rep = cooling.final_phonon_number(rates(1.0, 0.9), 0.5, 10.0)
    assert math.isnan(rep.n_c)
    assert rep.n_f == pytest.approx((0.5 * 10 + 1.0) / 0.4)


@given(
    a_minus=st.floats(1e-3, 1.0),
    frac=st.floats(0.0, 0.95),
    gamma_b=st.floats(1e-6, 1e-2),
    n_th=st.floats(0.0, 1e6),
)
def test_sandwich_and_monotonicity(a_minus, frac, gamma_b, n_th):
    r = rates(frac * a_minus, a_minus)
    rep = cooling.final_phonon_number(r, gamma_b, n_th)
    lo, hi = min(rep.n_c, n_th), max(rep.n_c, n_th)
    assert lo * (1 - 1e-12) - 1e-300 <= rep.n_f <= hi * (1 + 1e-12) + 1e-300
    assert cooling.final_phonon_number(r, gamma_b, n_th + 1.0).n_f > rep.n_f


def test_rate_equation_thermal_without_optical_rates():
    assert cooling.rate_equation_steady_state(0.0, 0.0, 1e-3, 57.0) == pytest.approx(57.0, rel=1e-8)


def test_rate_equation_geometric_mean():
    up, down = 0.3, 1.0
    r = up / down
    assert cooling.rate_equation_steady_state(up, down, 0.0, 0.0) == pytest.approx(r / (1 - r), rel=1e-9)


def test_rate_equation_against_generator_null_space():
    # build the truncated master-equation generator and take its kernel
    a_plus, a_minus, gamma_b, n_th = 0.02, 0.3, 1e-3, 20.0
    up = a_plus + gamma_b * n_th
    down = a_minus + gamma_b * (n_th + 1)
    n = 400
    q = np.zeros((n, n))
    for k in range(n - 1):
        q[k + 1, k] += (k + 1) * up
        q[k, k] -= (k + 1) * up
        q[k, k + 1] += (k + 1) * down
        q[k + 1, k + 1] -= (k + 1) * down
    p = linalg.null_space(q)[:, 0]
    p = p / p.sum()
    mean = float(np.arange(n) @ p)
    assert cooling.rate_equation_steady_state(a_plus, a_minus, gamma_b, n_th) == pytest.approx(mean, rel=1e-8)


def test_truncation_error():
    with pytest.raises(TruncationError) as info:
        cooling.rate_equation_steady_state(0.0, 1.0, 1e-3, 1e3, n_trunc=10)
    assert info.value.suggested_n_trunc > 10


def test_rate_equation_rejects_heating():
    with pytest.raises(NetHeatingError):
        cooling.rate_equation_steady_state(2.0, 1.0, 1e-3, 1.0)


@given(
    gamma_b=st.floats(1e-6, 1e-3),
    a_minus=st.floats(1e-3, 1.0),
    frac=st.floats(0.0, 0.9),
    n_th=st.floats(1.0, 1e3),
)
@settings(max_examples=100, deadline=None)
def test_oracle_equivalence(gamma_b, a_minus, frac, n_th):
    closed = cooling.final_phonon_number(rates(frac * a_minus, a_minus), gamma_b, n_th).n_f
    brute = cooling.rate_equation_steady_state(frac * a_minus, a_minus, gamma_b, n_th)
    assert brute == pytest.approx(closed, rel=1e-6)


def test_oracle_on_loss_cavity_rates_at_room_temperature():
    p = canonical_params(kappa_a_over_kappa_m=-1.0, g_over_kappa_m=0.05)
    r = spectrum.scattering_rates(p)
    rep = cooling.final_phonon_number(r, p.gamma_b, 6.25e5)
    if r.a_plus >= 0:
        brute = cooling.rate_equation_steady_state(r.a_plus, r.a_minus, p.gamma_b, 6.25e5)
        assert brute == pytest.approx(rep.n_f, rel=1e-6)
    else:
        # negative A_+ from the loss-cavity spectrum has no birth-death reading
        with pytest.raises(DomainError):
            cooling.rate_equation_steady_state(r.a_plus, r.a_minus, p.gamma_b, 0.0)


def test_gain_canonical_point_is_a_pole():
    with pytest.raises(spectrum.PoleError):
        cooling.cooling_report(canonical_params(), 1e3)


def test_field_sweep_single_point_matches_detuning_sweep():
    base = canonical_params(detuning_over_omega_b=0.0, kappa_a_over_kappa_m=-1.0)
    sphere = SphereSpec()
    # omega_L fixed; choose H so omega_m = omega_L + omega_b, i.e. Delta_m = -omega_b
    h = field_for_magnon_frequency(base.omega_drive + base.omega_b)
    sw = cooling.field_sweep(sphere, base, [h], 1e3)
    p = cooling.params_at_field(base, sphere, h)
    assert p.delta_m == pytest.approx(-base.omega_b, rel=1e-6)
    n_f, failed = cooling.detuning_sweep(p, [p.delta_m], 1e3)
    assert not failed and not sw.failed
    assert sw.n_f[0] == pytest.approx(n_f[0], rel=1e-12)


def test_field_sweep_rejects_out_of_range():
    with pytest.raises(DomainError):
        cooling.field_sweep(SphereSpec(), canonical_params(), [1.2], 1.0)


def test_detuning_sweep_reports_failures():
    p = canonical_params()
    d = np.array([-1.5, -1.0, -0.5]) * p.omega_b
    n_f, failed = cooling.detuning_sweep(p, d, 1e3)
    assert np.isnan(n_f[1])
    assert any(kind == "PoleError" for _, kind in failed)
