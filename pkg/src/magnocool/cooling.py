"""Final phonon occupancy from the scattering rates.

Closed form::

    n_c = A_+ / (A_- - A_+)
    n_f = (gamma_b n_th + Gamma n_c) / (gamma_b + Gamma)

together with a brute-force evaluation of the Fock-state rate equation
(detailed balance on a truncated ladder) that serves as an independent check,
and the bias-field sweep.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    DomainError,
    NetHeatingError,
    PhysicsError,
    TruncationError,
    UnstableCoolingError,
)
from .model import SphereSpec, SystemParams, magnon_frequency_from_field
from .spectrum import CONSISTENT, CoolingRates, scattering_rates

TAIL_MASS = 1e-10
MAX_TRUNCATION = 10_000_000
_CHUNK = 1 << 20


@dataclass(frozen=True)
class CoolingReport:
    n_c: float
    n_f: float
    n_f_classical: float
    n_f_quantum: float
    ground_state: bool


def quantum_limit(a_plus, a_minus):
    if a_plus < 0:
        raise DomainError(f"A_+ must be non-negative, got {a_plus!r}")
    if not a_minus > a_plus:
        raise NetHeatingError(f"A_- = {a_minus!r} <= A_+ = {a_plus!r}: no cooling limit")
    return a_plus / (a_minus - a_plus)


def final_phonon_number(rates: CoolingRates, gamma_b, n_th) -> CoolingReport:
    if n_th < 0:
        raise DomainError(f"n_th must be non-negative, got {n_th!r}")
    gamma = rates.gamma_net
    total = gamma + gamma_b
    if not total > 0:
        raise UnstableCoolingError(f"Gamma + gamma_b = {total!r} <= 0: no steady occupancy")
    n_classical = gamma_b * n_th / total
    n_quantum = rates.a_plus / total
    if gamma_b == 0 or rates.a_minus > rates.a_plus >= 0:
        n_c = quantum_limit(rates.a_plus, rates.a_minus)
        n_f = (gamma_b * n_th + gamma * n_c) / total
    else:
        # no cooling limit; Gamma n_c -> A_+ is the continuous extension
        n_c = math.nan
        n_f = n_classical + n_quantum
    return CoolingReport(
        n_c=n_c,
        n_f=n_f,
        n_f_classical=n_classical,
        n_f_quantum=n_quantum,
        ground_state=n_f < 1.0,
    )


def cooling_report(params: SystemParams, n_th, form=CONSISTENT) -> CoolingReport:
    """Full pipeline: spectrum -> rates -> occupancy."""
    return final_phonon_number(scattering_rates(params, form), params.gamma_b, n_th)


def _ladder_ratio(a_plus, a_minus, gamma_b, n_th):
    up = a_plus + gamma_b * n_th
    down = a_minus + gamma_b * (n_th + 1.0)
    if up < 0 or not down > 0:
        raise DomainError("rate-equation coefficients must give non-negative transition rates")
    return up, down


def default_truncation(a_plus, a_minus, gamma_b, n_th, tail=TAIL_MASS):
    up, down = _ladder_ratio(a_plus, a_minus, gamma_b, n_th)
    r = up / down
    if r >= 1.0:
        raise NetHeatingError(f"ladder ratio {r!r} >= 1: distribution not normalisable")
    if r == 0.0:
        return 1
    return max(1, math.ceil(math.log(tail) / math.log(r)))


def rate_equation_steady_state(a_plus, a_minus, gamma_b, n_th, n_trunc=None, tail=TAIL_MASS):
    """Mean phonon number of the steady state of the Fock-state rate equation.

    The ladder n -> n+1 has rate (n+1)(A_+ + gamma_b n_th) and n+1 -> n has
    rate (n+1)(A_- + gamma_b (n_th + 1)).  Zero net flux across every edge
    fixes P_{n+1}/P_n; the products are accumulated in chunks so no array of
    length ``n_trunc`` is held.
    """
    up, down = _ladder_ratio(a_plus, a_minus, gamma_b, n_th)
    if up >= down:
        raise NetHeatingError("heating exceeds cooling: distribution not normalisable")
    if n_trunc is None:
        n_trunc = min(default_truncation(a_plus, a_minus, gamma_b, n_th, tail), MAX_TRUNCATION)
    n_trunc = int(n_trunc)
    if n_trunc < 1:
        raise DomainError("n_trunc must be at least 1")

    # work with log-weights, relative to P_0
    total = 0.0
    first = 0.0
    log_p = 0.0
    start = 0
    while start <= n_trunc:
        stop = min(start + _CHUNK, n_trunc + 1)
        n = np.arange(start, stop, dtype=float)
        # P_{k+1}/P_k from the edge flux balance, for k = n
        step = np.log((n + 1.0) * up) - np.log((n + 1.0) * down)
        logs = log_p + np.concatenate(([0.0], np.cumsum(step[:-1])))
        p = np.exp(logs)
        total += p.sum()
        first += (n * p).sum()
        log_p = logs[-1] + step[-1]
        start = stop
    # mass beyond the truncation, relative to the retained mass
    tail_mass = math.exp(log_p) / (1.0 - up / down) / total
    if tail_mass > tail:
        raise TruncationError(
            f"tail mass {tail_mass:.3e} beyond n_trunc = {n_trunc} exceeds {tail:.1e}",
            suggested_n_trunc=default_truncation(a_plus, a_minus, gamma_b, n_th, tail),
        )
    return first / total


@dataclass(frozen=True)
class FieldSweep:
    field: np.ndarray
    n_f: np.ndarray
    failed: list


def params_at_field(base: SystemParams, sphere: SphereSpec, h) -> SystemParams:
    """Move only the Kittel frequency; omega_L and omega_a stay fixed."""
    return base.replace(omega_m=magnon_frequency_from_field(sphere.replace(bias_field=h)))


def field_sweep(sphere: SphereSpec, base: SystemParams, h_grid, n_th, form=CONSISTENT) -> FieldSweep:
    h = np.asarray(h_grid, dtype=float)
    if np.any((h < 0) | (h > 1)):
        raise DomainError("bias-field grid must lie within [0, 1] T")
    n_f = np.full(h.size, np.nan)
    failed = []
    for k, hk in enumerate(h):
        try:
            n_f[k] = cooling_report(params_at_field(base, sphere, hk), n_th, form).n_f
        except PhysicsError as exc:
            failed.append((float(hk), type(exc).__name__))
    return FieldSweep(h, n_f, failed)


def detuning_sweep(params: SystemParams, detunings, n_th, form=CONSISTENT):
    """n_f versus the common detuning; failures (poles, heating) give NaN."""
    d = np.asarray(detunings, dtype=float)
    n_f = np.full(d.size, np.nan)
    failed = []
    for k, det in enumerate(d):
        try:
            n_f[k] = cooling_report(params.with_detuning(det), n_th, form).n_f
        except PhysicsError as exc:
            failed.append((float(det), type(exc).__name__))
    return n_f, failed
