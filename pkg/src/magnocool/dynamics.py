"""Gaussian (covariance) dynamics of the linearised three-mode system.

Quadratures are ordered u = (x_a, p_a, x_b, p_b, x_m, p_m) with
x = (o + o^dag)/sqrt(2) and p = (o - o^dag)/(i sqrt(2)).  The symmetrised
covariance V obeys dV/dt = A V + V A^T + D.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import integrate, linalg

from .errors import DomainError, InstabilityError
from .model import SystemParams, coupling

DIVERGENCE_NORM = 1e12
SYMMETRY_TOL = 1e-10
_IU = np.triu_indices(6)
#: Index of each quadrature pair in u.
CAVITY, PHONON, MAGNON = 0, 1, 2


@dataclass(frozen=True)
class CovarianceState:
    time: float
    cov: np.ndarray
    n_phonon: float


@dataclass(frozen=True)
class StabilityReport:
    eigenvalues: np.ndarray
    stable: bool
    margin: float


def phonon_number(cov):
    return 0.5 * (cov[2, 2] + cov[3, 3] - 1.0)


def _mode_matrices(params, g):
    """Complex drift d o = M o + N o* for o = (a, b, m)."""
    m = np.zeros((3, 3), dtype=complex)
    n = np.zeros((3, 3), dtype=complex)
    a, b, mg = CAVITY, PHONON, MAGNON
    j = params.j_coupling
    m[a, a] = 1j * params.delta_a + params.kappa_a / 2.0
    m[a, mg] = -1j * j
    m[b, b] = -1j * params.omega_b - params.gamma_b / 2.0
    m[b, mg] = -1j * np.conj(g)
    n[b, mg] = -1j * g
    m[mg, mg] = 1j * params.delta_m - params.kappa_m / 2.0
    m[mg, a] = -1j * j
    m[mg, b] = -1j * g
    n[mg, b] = -1j * g
    return m, n


def drift_matrix(params: SystemParams, rotate: bool = True) -> np.ndarray:
    """Real 6x6 drift matrix A of the quadrature means."""
    m, n = _mode_matrices(params, coupling(params, rotate=rotate))
    a = np.zeros((6, 6))
    for r in range(3):
        for c in range(3):
            cx = m[r, c] + n[r, c]
            cp = 1j * (m[r, c] - n[r, c])
            a[2 * r, 2 * c] = cx.real
            a[2 * r, 2 * c + 1] = cp.real
            a[2 * r + 1, 2 * c] = cx.imag
            a[2 * r + 1, 2 * c + 1] = cp.imag
    return a


def diffusion_matrix(params: SystemParams, n_th) -> np.ndarray:
    """Symmetrised diffusion matrix.

    Gain and loss both inject half a quantum per quadrature, so the cavity
    block is |kappa_a|/2 whatever the sign of kappa_a.
    """
    if n_th < 0:
        raise DomainError(f"n_th must be non-negative, got {n_th!r}")
    return np.diag(
        [
            abs(params.kappa_a) / 2.0,
            abs(params.kappa_a) / 2.0,
            params.gamma_b * (n_th + 0.5),
            params.gamma_b * (n_th + 0.5),
            params.kappa_m / 2.0,
            params.kappa_m / 2.0,
        ]
    )


def stability(params: SystemParams) -> StabilityReport:
    ev = np.linalg.eigvals(drift_matrix(params))
    margin = float(np.max(ev.real))
    return StabilityReport(eigenvalues=ev, stable=margin < 0, margin=margin)


def initial_covariance(n_th, hot_magnon=True):
    """Phonon (and by default magnon) thermal at n_th, cavity in vacuum."""
    hot = n_th + 0.5
    return np.diag([0.5, 0.5, hot, hot, hot if hot_magnon else 0.5, hot if hot_magnon else 0.5])


def steady_covariance(params: SystemParams, n_th) -> CovarianceState:
    report = stability(params)
    if not report.stable:
        raise InstabilityError(
            f"unstable drift: no steady state (max Re lambda = {report.margin:.6g} rad/s)",
            report=report,
        )
    a = drift_matrix(params)
    d = diffusion_matrix(params, n_th)
    v = linalg.solve_continuous_lyapunov(a, -d)
    v = 0.5 * (v + v.T)
    return CovarianceState(time=np.inf, cov=v, n_phonon=phonon_number(v))


def lyapunov_residual(params, n_th, cov):
    a = drift_matrix(params)
    d = diffusion_matrix(params, n_th)
    return np.max(np.abs(a @ cov + cov @ a.T + d))


def _pack(v):
    return v[_IU]


def _unpack(y):
    v = np.zeros((6, 6))
    v[_IU] = y
    return v + np.triu(v, 1).T


def evolve_covariance(params: SystemParams, n_th, t_grid, v0=None, rtol=1e-8, atol=None):
    """Integrate dV/dt = AV + VA^T + D and sample it on ``t_grid`` (s).

    Only the 21 upper-triangular entries are integrated, so V stays exactly
    symmetric.  Raises :class:`InstabilityError` once ||V|| exceeds 1e12; the
    samples accepted up to then are attached to the exception.
    """
    t = np.asarray(t_grid, dtype=float)
    if t.ndim != 1 or t.size == 0 or t[0] != 0 or np.any(np.diff(t) <= 0):
        raise DomainError("t_grid must be increasing and start at 0")
    v0 = initial_covariance(n_th) if v0 is None else np.asarray(v0, dtype=float)
    if v0.shape != (6, 6) or np.max(np.abs(v0 - v0.T)) > SYMMETRY_TOL * max(1.0, np.max(np.abs(v0))):
        raise DomainError("v0 must be a symmetric 6x6 matrix")
    a = drift_matrix(params)
    d = diffusion_matrix(params, n_th)

    def rhs(_t, y):
        v = _unpack(y)
        av = a @ v
        return _pack(av + av.T + d)

    def diverged(_t, y):
        return DIVERGENCE_NORM - np.max(np.abs(y))

    diverged.terminal = True
    if atol is None:
        atol = 1e-10 * max(1.0, n_th)
    sol = integrate.solve_ivp(
        rhs,
        (t[0], t[-1]),
        _pack(0.5 * (v0 + v0.T)),
        method="RK45",
        t_eval=t,
        rtol=rtol,
        atol=atol,
        events=diverged,
    )
    states = []
    for k in range(sol.t.size):
        v = _unpack(sol.y[:, k])
        states.append(CovarianceState(time=float(sol.t[k]), cov=v, n_phonon=phonon_number(v)))
    if sol.status == 1:
        report = stability(params)
        raise InstabilityError(
            f"covariance diverged at t = {sol.t_events[0][0]:.6g} s "
            f"(drift max Re lambda = {report.margin:.6g} rad/s)",
            report=report,
            states=states,
        )
    if sol.status != 0:
        raise RuntimeError(f"integration failed: {sol.message}")
    return states
