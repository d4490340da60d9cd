"""System parameters, unit conversions and the linearised steady state.

All quantities are SI: angular frequencies and rates in rad/s, fields in
tesla, lengths in metres.  The cavity rate ``kappa_a`` is a *gain* rate when
positive; a negative value describes an ordinary lossy cavity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from scipy import constants

from .errors import DomainError, SingularDriveError

HBAR = constants.hbar
K_B = constants.k
#: Electron gyromagnetic ratio used for the Kittel mode, 2*pi * 28 GHz/T.
GYRO_RATIO = 2.0 * math.pi * 28.0e9

#: YIG sphere values used throughout (radius in m, spin density in 1/m^3).
YIG_RADIUS = 125e-6
YIG_SPIN_DENSITY = 4.22e27

#: Relative size of the dropped magnon shift g(beta + beta*) / |Delta_m|
#: above which the linearisation is flagged.
LINEARIZATION_WARN = 0.1


@dataclass(frozen=True)
class SystemParams:
    """Parameters of the driven three-mode (cavity, phonon, magnon) model."""

    omega_a: float
    omega_m: float
    omega_b: float
    kappa_a: float
    kappa_m: float
    gamma_b: float
    j_coupling: float
    g_single: float = 0.0
    omega_drive: float = 0.0
    rabi: float = 0.0
    g_linearized_override: float | None = None
    steady_state_halfwidth: bool = False

    def __post_init__(self):
        for name in ("omega_a", "omega_m", "omega_b", "omega_drive"):
            if not getattr(self, name) > 0:
                raise DomainError(f"{name} must be positive, got {getattr(self, name)!r}")
        if not self.kappa_m > 0:
            raise DomainError(f"kappa_m must be positive, got {self.kappa_m!r}")
        if not self.gamma_b > 0:
            raise DomainError(f"gamma_b must be positive, got {self.gamma_b!r}")
        if not math.isfinite(self.kappa_a):
            raise DomainError("kappa_a must be finite")
        for name in ("j_coupling", "g_single", "rabi"):
            if not getattr(self, name) >= 0:
                raise DomainError(f"{name} must be non-negative, got {getattr(self, name)!r}")
        if self.g_linearized_override is not None and not self.g_linearized_override >= 0:
            raise DomainError("g_linearized_override must be non-negative")

    @property
    def delta_a(self) -> float:
        """Cavity detuning omega_L - omega_a."""
        return self.omega_drive - self.omega_a

    @property
    def delta_m(self) -> float:
        """Magnon detuning omega_L - omega_m."""
        return self.omega_drive - self.omega_m

    def replace(self, **changes) -> "SystemParams":
        return replace(self, **changes)

    def with_detuning(self, detuning: float) -> "SystemParams":
        """Move the drive so that Delta_m = ``detuning`` (rad/s)."""
        return replace(self, omega_drive=self.omega_m + detuning)


@dataclass(frozen=True)
class SphereSpec:
    radius: float = YIG_RADIUS
    spin_density: float = YIG_SPIN_DENSITY
    gyro_ratio: float = GYRO_RATIO
    bias_field: float = 0.0
    drive_field_amplitude: float = 0.0

    @property
    def total_spins(self) -> float:
        return self.spin_density * 4.0 / 3.0 * math.pi * self.radius**3

    def replace(self, **changes) -> "SphereSpec":
        return replace(self, **changes)


@dataclass(frozen=True)
class SteadyState:
    """Mean fields of the linearisation.

    ``shift_ratio`` is g(beta + beta*)/|Delta_m|, the relative size of the
    magnon frequency shift that the linearised model drops.
    """

    zeta: complex
    beta: complex
    g_eff: complex
    dropped_shift: float = 0.0
    shift_ratio: float = 0.0
    linearization_ok: bool = True


def thermal_occupancy(omega_b, temperature):
    """Bose-Einstein occupation of a mode at ``omega_b`` (rad/s) and ``temperature`` (K)."""
    if temperature < 0:
        raise DomainError(f"temperature must be non-negative, got {temperature!r}")
    if not omega_b > 0:
        raise DomainError(f"omega_b must be positive, got {omega_b!r}")
    if temperature == 0:
        return 0.0
    return 1.0 / math.expm1(HBAR * omega_b / (K_B * temperature))


def temperature_for_occupancy(omega_b, n_th):
    """Inverse of :func:`thermal_occupancy`."""
    if n_th < 0:
        raise DomainError(f"n_th must be non-negative, got {n_th!r}")
    if n_th == 0:
        return 0.0
    return HBAR * omega_b / (K_B * math.log1p(1.0 / n_th))


def _check_sphere(sphere):
    if not sphere.radius > 0:
        raise DomainError(f"sphere radius must be positive, got {sphere.radius!r}")
    if not sphere.spin_density > 0:
        raise DomainError(f"spin density must be positive, got {sphere.spin_density!r}")


def rabi_from_drive(sphere: SphereSpec) -> float:
    """Drive Rabi frequency sqrt(5)/4 * gamma_g * sqrt(M) * B_0 in rad/s."""
    _check_sphere(sphere)
    if sphere.drive_field_amplitude < 0:
        raise DomainError("drive field amplitude must be non-negative")
    return math.sqrt(5.0) / 4.0 * sphere.gyro_ratio * math.sqrt(sphere.total_spins) * sphere.drive_field_amplitude


def magnon_frequency_from_field(sphere: SphereSpec) -> float:
    """Kittel frequency gamma_g * H for a bias field in [0, 1] T."""
    h = sphere.bias_field
    if not 0.0 <= h <= 1.0:
        raise DomainError(f"bias field must lie in [0, 1] T, got {h!r}")
    return sphere.gyro_ratio * h


def field_for_magnon_frequency(omega_m, gyro_ratio=GYRO_RATIO):
    return omega_m / gyro_ratio


def _zeta_factors(params):
    da, dm = params.delta_a, params.delta_m
    if params.steady_state_halfwidth:
        # half-widths, gain entering with the sign of the Langevin equations
        ca = complex(-params.kappa_a / 2.0, -da)
        cm = complex(params.kappa_m / 2.0, -dm)
    else:
        ca = complex(params.kappa_a, -da)
        cm = complex(params.kappa_m, -dm)
    den = params.j_coupling**2 + ca * cm
    return ca, den


def zeta_per_rabi(params: SystemParams) -> complex:
    """zeta / Omega, the linear drive-to-mean-field factor."""
    ca, den = _zeta_factors(params)
    if den == 0 or abs(den) <= 1e-14 * (params.j_coupling**2 + abs(ca) * params.kappa_m):
        raise SingularDriveError("steady-state denominator J^2 + (...)(...) vanishes")
    return ca / den


def steady_state_amplitudes(params: SystemParams) -> SteadyState:
    zeta = params.rabi * zeta_per_rabi(params)
    g = params.g_single
    beta = -1j * g * abs(zeta) ** 2 / complex(params.gamma_b / 2.0, params.omega_b)
    g_eff = g * zeta
    shift = g * 2.0 * beta.real
    dm = abs(params.delta_m)
    ratio = abs(shift) / dm if dm > 0 else (math.inf if shift else 0.0)
    return SteadyState(
        zeta=zeta,
        beta=beta,
        g_eff=g_eff,
        dropped_shift=shift,
        shift_ratio=ratio,
        linearization_ok=ratio <= LINEARIZATION_WARN,
    )


def rabi_for_coupling(params: SystemParams, g_abs: float) -> float:
    """Drive amplitude Omega for which |g * zeta| equals ``g_abs``."""
    if not params.g_single > 0:
        raise DomainError("g_single must be positive to realise a coupling by driving")
    return g_abs / (params.g_single * abs(zeta_per_rabi(params)))


def coupling(params: SystemParams, rotate: bool = True) -> complex:
    """Linearised magnomechanical coupling G.

    The override, when present, is used as is.  Otherwise G = g * zeta from
    the steady state; with ``rotate`` the phase is dropped (absorbed into the
    phonon fluctuation operator), which leaves every spectrum unchanged.
    """
    if params.g_linearized_override is not None:
        return complex(params.g_linearized_override)
    g = steady_state_amplitudes(params).g_eff
    return complex(abs(g)) if rotate else g


def canonical_params(
    g_over_kappa_m: float = 0.15,
    kappa_a_over_kappa_m: float = 1.0,
    detuning_over_omega_b: float = -1.0,
    **changes,
) -> SystemParams:
    """Parameter set of the noise-spectrum study.

    omega_a/2pi = omega_m/2pi = 10.1 GHz, omega_b/2pi = 10 MHz,
    gamma_b = 1e-5 omega_b, kappa_m = 0.2 omega_b, J = 0.1 omega_b, with
    Delta_a = Delta_m = ``detuning_over_omega_b`` * omega_b.
    """
    omega_b = 2.0 * math.pi * 10.0e6
    omega_0 = 2.0 * math.pi * 10.1e9
    kappa_m = 0.2 * omega_b
    p = SystemParams(
        omega_a=omega_0,
        omega_m=omega_0,
        omega_b=omega_b,
        kappa_a=kappa_a_over_kappa_m * kappa_m,
        kappa_m=kappa_m,
        gamma_b=1e-5 * omega_b,
        j_coupling=0.1 * omega_b,
        omega_drive=omega_0 + detuning_over_omega_b * omega_b,
        g_linearized_override=g_over_kappa_m * kappa_m,
    )
    return replace(p, **changes) if changes else p
