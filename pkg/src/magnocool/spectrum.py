"""Magnetic-force noise spectrum, scattering rates and self-energy.

Spectra are returned in rate units: the force spectrum multiplied by
x_zpf**2, so A_- = S(omega_b) and A_+ = S(-omega_b) directly.  The
single-mode response functions are

    chi_a = 1 / (-i(w + Delta_a) - kappa_a/2)      (gain enters with a minus)
    chi_b = 1 / (-i(w - omega_b) + gamma_b/2)
    chi_m = 1 / (-i(w + Delta_m) + kappa_m/2)

and the magnon response seen by the phonon is either the bare cavity-dressed
one, [J^2 chi_a + 1/chi_m]^-1, or the phonon-dressed one
chi_m / (1 + J^2 chi_a chi_m + |G|^2 chi_b chi_m).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np
from scipy import optimize

from .errors import PoleError
from .model import SystemParams, coupling

#: A denominator smaller than this fraction of the magnitudes that cancel in
#: it is treated as an exact pole (the value would be round-off noise).
POLE_RTOL = 1e-12
#: Default relative tolerance between A_- - A_+ and -2 Im Sigma(omega_b).
WEAK_COUPLING_RTOL = 0.05


class Response(enum.Enum):
    WITH_PHONON = "WithPhonon"
    BARE = "Bare"


@dataclass(frozen=True)
class SpectrumForm:
    """Which response and which intrinsic-noise rate build the force spectrum.

    ``intrinsic`` is the rate multiplying |chi(w)|^2: ``"kappa_m"`` (magnon
    input noise) or ``"gamma_b"``.
    """

    response: Response = Response.BARE
    intrinsic: str = "kappa_m"

    def __post_init__(self):
        object.__setattr__(self, "response", Response(self.response))
        if self.intrinsic not in ("kappa_m", "gamma_b"):
            raise ValueError(f"intrinsic must be 'kappa_m' or 'gamma_b', got {self.intrinsic!r}")


#: Default form: A_- - A_+ equals -2 Im Sigma(omega_b) identically.
CONSISTENT = SpectrumForm(Response.BARE, "kappa_m")
#: Literal transcription: phonon-dressed response, gamma_b prefactor.
PRINTED = SpectrumForm(Response.WITH_PHONON, "gamma_b")


@dataclass(frozen=True)
class SusceptibilityTriple:
    chi_a: complex
    chi_b: complex
    chi_m: complex


@dataclass(frozen=True)
class SpectrumPoint:
    omega: float
    s_ff: float
    term_thermal: float
    term_cavity: float


@dataclass(frozen=True)
class CoolingRates:
    """Scattering rates at +-omega_b.

    ``gamma_net`` = A_- - A_+ from the spectrum; ``gamma_selfenergy`` =
    -2 Im Sigma(omega_b) from the bare self-energy.  ``consistent`` is False
    when the two differ by more than the tolerance passed to
    :func:`scattering_rates`.
    """

    a_plus: float
    a_minus: float
    gamma_net: float
    delta_omega_b: float
    gamma_selfenergy: float = float("nan")
    relative_gap: float = 0.0
    consistent: bool = True
    negative_spectrum: bool = False


# ---------------------------------------------------------------------------
# vectorised core; every function returns (values, pole_mask)


def _inverse_susceptibilities(params, omega):
    w = np.asarray(omega, dtype=float)
    wa = -1j * (w + params.delta_a) - params.kappa_a / 2.0
    wb = -1j * (w - params.omega_b) + params.gamma_b / 2.0
    wm = -1j * (w + params.delta_m) + params.kappa_m / 2.0
    return wa, wb, wm


def _is_pole(den, *terms):
    scale = sum(np.abs(t) for t in terms)
    return np.abs(den) <= POLE_RTOL * scale


def _response_parts(params, omega, response, g2):
    """Return chi(w), chi(w)*chi_a(w) and the pole mask."""
    wa, wb, wm = _inverse_susceptibilities(params, omega)
    j2 = params.j_coupling**2
    if response is Response.BARE:
        t1, t2 = j2 + 0j * wa, wa * wm
        den = t1 + t2
        pole = _is_pole(den, t1, t2)
        num, num_a = wa, np.ones_like(wa)
    else:
        t1, t2, t3 = wa * wb * wm, j2 * wb, g2 * wa
        den = t1 + t2 + t3
        pole = _is_pole(den, t1, t2, t3)
        num, num_a = wa * wb, wb
    den = np.asarray(den, dtype=complex)
    chi = np.divide(num, den, out=np.full(den.shape, np.nan, dtype=complex), where=~pole)
    chi_ca = np.divide(num_a, den, out=np.full(den.shape, np.nan, dtype=complex), where=~pole)
    return chi, chi_ca, pole


def response_array(params, omega, variant, g=None):
    """Vectorised :func:`total_response`; poles come back as NaN with a mask."""
    variant = Response(variant)
    g2 = abs(coupling(params) if g is None else g) ** 2
    chi, _, pole = _response_parts(params, omega, variant, g2)
    return chi, pole


def spectrum_array(params, omega, form=CONSISTENT):
    """Vectorised force spectrum.

    Returns ``(s_ff, term_thermal, term_cavity, pole)`` where ``pole`` marks
    frequencies at which either chi(w) or chi(-w) is singular.
    """
    w = np.asarray(omega, dtype=float)
    g2 = abs(coupling(params)) ** 2
    chi_p, _, pole_p = _response_parts(params, w, form.response, g2)
    _, chica_n, pole_n = _response_parts(params, -w, form.response, g2)
    rate = params.kappa_m if form.intrinsic == "kappa_m" else params.gamma_b
    thermal = g2 * rate * np.abs(chi_p) ** 2
    cavity = g2 * params.kappa_a * params.j_coupling**2 * np.abs(chica_n) ** 2
    return thermal + cavity, thermal, cavity, pole_p | pole_n


def self_energy_array(params, omega):
    w = np.asarray(omega, dtype=float)
    g2 = abs(coupling(params)) ** 2
    chi_p, _, pole_p = _response_parts(params, w, Response.BARE, g2)
    chi_n, _, pole_n = _response_parts(params, -w, Response.BARE, g2)
    return -1j * g2 * (chi_p - np.conj(chi_n)), pole_p | pole_n


# ---------------------------------------------------------------------------
# scalar API


def susceptibilities(params: SystemParams, omega: float) -> SusceptibilityTriple:
    wa, wb, wm = (complex(x) for x in _inverse_susceptibilities(params, omega))
    for name, w in (("cavity", wa), ("phonon", wb), ("magnon", wm)):
        if w == 0:
            raise PoleError(name, omega)
    return SusceptibilityTriple(1.0 / wa, 1.0 / wb, 1.0 / wm)


def total_response(params: SystemParams, omega: float, variant) -> complex:
    chi, pole = response_array(params, omega, variant)
    if pole:
        raise PoleError(f"total ({Response(variant).value})", omega)
    return complex(chi)


def force_noise_spectrum(params: SystemParams, omega: float, form=CONSISTENT) -> SpectrumPoint:
    s, th, cav, pole = spectrum_array(params, omega, form)
    if pole:
        raise PoleError(f"total ({form.response.value})", omega)
    return SpectrumPoint(float(omega), float(s), float(th), float(cav))


def self_energy(params: SystemParams, omega: float) -> complex:
    """Sigma(w) = -i|G|^2 [chi(w) - chi*(-w)] with the bare response."""
    sigma, pole = self_energy_array(params, omega)
    if pole:
        raise PoleError("total (Bare)", omega)
    return complex(sigma)


def scattering_rates(params: SystemParams, form=CONSISTENT, rtol=WEAK_COUPLING_RTOL) -> CoolingRates:
    wb = params.omega_b
    s, _, _, pole = spectrum_array(params, np.array([wb, -wb]), form)
    if pole.any():
        raise PoleError(f"total ({form.response.value})", wb if pole[0] else -wb)
    a_minus, a_plus = float(s[0]), float(s[1])
    try:
        sigma = self_energy(params, wb)
    except PoleError:
        # only reachable with the phonon-dressed form, which stays finite here
        sigma = complex(np.nan, np.nan)
    gamma = a_minus - a_plus
    gamma_se = -2.0 * sigma.imag
    scale = max(abs(gamma), abs(gamma_se))
    gap = abs(gamma - gamma_se) / scale if scale > 0 else 0.0
    if np.isnan(gap):
        gap = np.inf
    return CoolingRates(
        a_plus=a_plus,
        a_minus=a_minus,
        gamma_net=gamma,
        delta_omega_b=sigma.real,
        gamma_selfenergy=gamma_se,
        relative_gap=gap,
        consistent=gap <= rtol,
        negative_spectrum=a_plus < 0 or a_minus < 0,
    )


# ---------------------------------------------------------------------------
# sweeps and peak location


@dataclass(frozen=True)
class SpectrumSweep:
    omega: np.ndarray
    s_ff: np.ndarray
    term_thermal: np.ndarray
    term_cavity: np.ndarray
    pole: np.ndarray


def spectrum_sweep(params, omegas, form=CONSISTENT) -> SpectrumSweep:
    w = np.asarray(omegas, dtype=float)
    s, th, cav, pole = spectrum_array(params, w, form)
    return SpectrumSweep(w, s, th, cav, pole)


def default_window(params, lo=0.5, hi=1.5, points=4001):
    return np.linspace(lo * params.omega_b, hi * params.omega_b, points)


def local_maxima(values, pole=None):
    """Indices of strict interior local maxima; poles count as +inf."""
    v = np.asarray(values, dtype=float).copy()
    if pole is not None:
        v[np.asarray(pole)] = np.inf
    v[np.isnan(v)] = -np.inf
    inner = (v[1:-1] > v[:-2]) & (v[1:-1] > v[2:])
    return np.flatnonzero(inner) + 1


def refine_maximum(func, lo, mid, hi, xtol):
    """Golden-section refinement of a bracketed maximum of ``func``.

    ``func`` may return +inf (a pole); the bracket then shrinks onto it.
    """
    def neg(x):
        try:
            val = func(x)
        except PoleError:
            return -np.inf
        return -val

    # scipy's golden uses a relative tolerance on |x|
    tol = xtol / max(abs(mid), 1e-300)
    res = optimize.minimize_scalar(neg, bracket=(lo, mid, hi), method="golden", tol=tol)
    return float(res.x)


def spectrum_peak(params, omegas=None, form=CONSISTENT, xtol_over_omega_b=1e-6):
    """Global maximum of S(w) on a grid, refined below the grid spacing.

    Returns ``(omega_peak, s_peak)``; ``s_peak`` is inf if the maximum is a pole.
    """
    w = default_window(params) if omegas is None else np.asarray(omegas, dtype=float)
    sweep = spectrum_sweep(params, w, form)
    vals = np.where(sweep.pole, np.inf, np.nan_to_num(sweep.s_ff, nan=-np.inf))
    k = int(np.argmax(vals))
    if k == 0 or k == len(w) - 1:
        return float(w[k]), float(vals[k])

    def f(x):
        return force_noise_spectrum(params, x, form).s_ff

    x = refine_maximum(f, w[k - 1], w[k], w[k + 1], xtol_over_omega_b * params.omega_b)
    try:
        val = f(x)
    except PoleError:
        val = np.inf
    return x, val


@dataclass(frozen=True)
class CoolingRateSweep:
    detuning: np.ndarray
    a_plus: np.ndarray
    a_minus: np.ndarray
    gamma_net: np.ndarray
    gamma_selfenergy: np.ndarray
    delta_omega_b: np.ndarray
    pole: np.ndarray


def cooling_rate_sweep(params, detunings, form=CONSISTENT) -> CoolingRateSweep:
    """Rates versus the common detuning Delta_a = Delta_m (rad/s).

    The drive is moved with omega_a = omega_m assumed; for omega_a != omega_m
    the detuning refers to the magnon.
    """
    d = np.asarray(detunings, dtype=float)
    n = d.size
    out = {k: np.full(n, np.nan) for k in ("ap", "am", "g", "gse", "dw")}
    pole = np.zeros(n, dtype=bool)
    for k, det in enumerate(d):
        p = params.with_detuning(det)
        try:
            r = scattering_rates(p, form)
        except PoleError:
            pole[k] = True
            continue
        out["ap"][k], out["am"][k], out["g"][k] = r.a_plus, r.a_minus, r.gamma_net
        out["gse"][k], out["dw"][k] = r.gamma_selfenergy, r.delta_omega_b
    return CoolingRateSweep(d, out["ap"], out["am"], out["g"], out["gse"], out["dw"], pole)
