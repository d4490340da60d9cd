"""Invariant checks run by ``magnocool check``.

Each check returns ``(status, detail)`` with status "PASS", "FAIL" or
"SKIP".  Checks skip rather than fail when a precondition of the property
(e.g. a stable drift matrix) does not hold for the given parameters.
"""

from __future__ import annotations

import numpy as np

from . import cooling, dynamics, spectrum, supermodes
from .errors import PhysicsError

_RNG_SEED = 20201016


def _rel(a, b):
    scale = max(abs(a), abs(b))
    return abs(a - b) / scale if scale else 0.0


def check_supermode_identities(inputs):
    p = inputs.params
    if p.omega_a != p.omega_m:
        return "SKIP", "omega_a != omega_m"
    grid = np.linspace(0.0, 2.0, 201) * p.kappa_m
    sw = supermodes.sweep_eigenvalues("CouplingJ", grid, p)
    w0 = p.omega_a
    chi = (p.kappa_m - p.kappa_a) / 2.0
    gam = (p.kappa_a + p.kappa_m) / 4.0
    trace = (sw.xi_plus - w0) + (sw.xi_minus - w0)
    err_t = np.max(np.abs(trace + 1j * chi)) / max(abs(chi), p.kappa_m)
    prod = (sw.xi_plus - w0 + 0.5j * chi) * (sw.xi_minus - w0 + 0.5j * chi)
    ref = gam**2 - grid**2
    err_p = np.max(np.abs(prod - ref)) / np.max(np.abs(ref))
    ok = err_t <= 1e-12 and err_p <= 1e-12
    return ("PASS" if ok else "FAIL"), f"trace err {err_t:.2e}, product err {err_p:.2e}"


def check_drift_matches_supermodes(inputs):
    p = inputs.params
    if p.omega_a != p.omega_m:
        return "SKIP", "omega_a != omega_m"
    q = p.replace(g_linearized_override=0.0)
    ev = np.linalg.eigvals(dynamics.drift_matrix(q))
    pair = supermodes.supermodes_from_params(q)
    expected = []
    for xi in (pair.xi_plus, pair.xi_minus):
        lam = -1j * (xi - p.omega_drive)
        expected += [lam, np.conj(lam)]
    scale = max(abs(p.delta_a), p.kappa_m)
    tol = 1e-9 if pair.phase is not supermodes.PTPhase.EXCEPTIONAL_POINT else 1e-6
    worst = max(np.min(np.abs(ev - z)) for z in expected) / scale
    return ("PASS" if worst <= tol else "FAIL"), f"max eigenvalue mismatch {worst:.2e} (tol {tol:g})"


def check_spectrum_additivity(inputs):
    p = inputs.params
    sw = spectrum.spectrum_sweep(p, spectrum.default_window(p, points=401), inputs.form)
    ok = ~sw.pole
    if not ok.any():
        return "SKIP", "all points are poles"
    total = sw.term_thermal[ok] + sw.term_cavity[ok]
    err = np.max(np.abs(total - sw.s_ff[ok]) / np.maximum(np.abs(sw.s_ff[ok]), 1e-300))
    return ("PASS" if err <= 1e-12 else "FAIL"), f"max relative error {err:.2e}"


def check_g_scaling(inputs):
    p = inputs.params
    if inputs.form.response is spectrum.Response.WITH_PHONON:
        return "SKIP", "phonon-dressed response is not quadratic in G"
    g = abs(spectrum.coupling(p))
    if g == 0:
        return "SKIP", "G = 0"
    p2 = p.replace(g_linearized_override=2.0 * g)
    w = spectrum.default_window(p, points=101)
    s1 = spectrum.spectrum_sweep(p, w, inputs.form)
    s2 = spectrum.spectrum_sweep(p2, w, inputs.form)
    ok = ~(s1.pole | s2.pole)
    ratios = s2.s_ff[ok] / s1.s_ff[ok]
    worst = float(np.max(np.abs(ratios / 4.0 - 1.0))) if ok.any() else 0.0
    detail = f"spectrum ratio error {worst:.2e}"
    try:
        r1 = spectrum.scattering_rates(p, inputs.form)
        r2 = spectrum.scattering_rates(p2, inputs.form)
        for a, b in ((r1.a_plus, r2.a_plus), (r1.a_minus, r2.a_minus),
                     (r1.gamma_net, r2.gamma_net), (r1.delta_omega_b, r2.delta_omega_b)):
            if a != 0:
                worst = max(worst, abs(b / a / 4.0 - 1.0))
        detail += f"; with rates {worst:.2e}"
    except PhysicsError as exc:
        detail += f"; rates skipped ({exc})"
    return ("PASS" if worst <= 1e-10 else "FAIL"), detail


def check_gamma_identity(inputs):
    try:
        r = spectrum.scattering_rates(inputs.params, inputs.form)
    except PhysicsError as exc:
        return "SKIP", f"rates undefined: {exc}"
    status = "PASS" if r.relative_gap <= spectrum.WEAK_COUPLING_RTOL else "FAIL"
    return status, f"A_- - A_+ = {r.gamma_net:.6g}, -2 Im Sigma = {r.gamma_selfenergy:.6g}, gap {r.relative_gap:.2e}"


def check_oracle_equivalence(inputs, draws=100):
    rng = np.random.default_rng(_RNG_SEED)
    worst = 0.0
    for _ in range(draws):
        gamma_b = 10 ** rng.uniform(-6, -3)
        a_minus = 10 ** rng.uniform(-3, 0)
        a_plus = a_minus * rng.uniform(0.0, 0.9)
        n_th = 10 ** rng.uniform(0, 3)
        rates = spectrum.CoolingRates(a_plus, a_minus, a_minus - a_plus, 0.0)
        closed = cooling.final_phonon_number(rates, gamma_b, n_th).n_f
        brute = cooling.rate_equation_steady_state(a_plus, a_minus, gamma_b, n_th)
        worst = max(worst, _rel(closed, brute))
    return ("PASS" if worst <= 1e-6 else "FAIL"), f"{draws} draws, max relative gap {worst:.2e}"


def check_diffusion(inputs):
    n_th = inputs.n_th if inputs.n_th is not None else 0.0
    d = dynamics.diffusion_matrix(inputs.params, n_th)
    sym = np.max(np.abs(d - d.T))
    low = float(np.min(np.linalg.eigvalsh(d)))
    ok = sym == 0 and low >= 0
    return ("PASS" if ok else "FAIL"), f"asymmetry {sym:.1e}, min eigenvalue {low:.3g}"


def check_drift_trace(inputs):
    p = inputs.params
    tr = np.trace(dynamics.drift_matrix(p))
    ref = p.kappa_a - p.kappa_m - p.gamma_b
    err = abs(tr - ref) / max(abs(p.kappa_a), p.kappa_m)
    return ("PASS" if err <= 1e-12 else "FAIL"), f"trace {tr:.6g} vs {ref:.6g}"


def check_lyapunov(inputs):
    p = inputs.params
    n_th = inputs.n_th if inputs.n_th is not None else 0.0
    rep = dynamics.stability(p)
    if not rep.stable:
        return "SKIP", f"unstable drift (max Re lambda = {rep.margin:.4g} rad/s)"
    st = dynamics.steady_covariance(p, n_th)
    res = dynamics.lyapunov_residual(p, n_th, st.cov)
    dmax = np.max(dynamics.diffusion_matrix(p, n_th))
    return ("PASS" if res <= 1e-9 * dmax else "FAIL"), f"residual {res:.2e}, n_phonon {st.n_phonon:.6g}"


def check_sandwich(inputs):
    n_th = inputs.n_th if inputs.n_th is not None else 1e3
    try:
        r = spectrum.scattering_rates(inputs.params, inputs.form)
        rep = cooling.final_phonon_number(r, inputs.params.gamma_b, n_th)
    except PhysicsError as exc:
        return "SKIP", f"no cooling steady state: {exc}"
    if not np.isfinite(rep.n_c):
        return "SKIP", "no quantum limit (net heating)"
    lo, hi = min(rep.n_c, n_th), max(rep.n_c, n_th)
    ok = lo * (1 - 1e-12) <= rep.n_f <= hi * (1 + 1e-12)
    split = _rel(rep.n_f, rep.n_f_classical + rep.n_f_quantum)
    ok = ok and split <= 1e-12
    return ("PASS" if ok else "FAIL"), f"n_c {rep.n_c:.4g} <= n_f {rep.n_f:.4g} <= n_th {n_th:.4g}"


CHECKS = [
    ("supermode trace/product identities", check_supermode_identities),
    ("drift eigenvalues match supermodes (G = 0)", check_drift_matches_supermodes),
    ("spectrum additivity", check_spectrum_additivity),
    ("G^2 scaling", check_g_scaling),
    ("Gamma: spectrum vs self-energy", check_gamma_identity),
    ("rate-equation oracle", check_oracle_equivalence),
    ("diffusion matrix PSD", check_diffusion),
    ("drift trace", check_drift_trace),
    ("Lyapunov residual", check_lyapunov),
    ("cooling sandwich", check_sandwich),
]


def run_checks(inputs):
    results = []
    for name, fn in CHECKS:
        try:
            status, detail = fn(inputs)
        except PhysicsError as exc:
            status, detail = "FAIL", f"{type(exc).__name__}: {exc}"
        results.append((name, status, detail))
    return results

