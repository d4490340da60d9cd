"""Cavity-magnon supermodes of the non-Hermitian two-mode Hamiltonian.

With omega_a = omega_m = omega_0 the eigenfrequencies are

    xi_pm = omega_0 - i*chi/2 +- sqrt(J^2 - Gamma_eff^2),

Gamma_eff = (kappa_a + kappa_m)/4 and chi = (kappa_m - kappa_a)/2.  The
closed form is always cross-checked against a direct eigenvalue solve.
"""

from __future__ import annotations

import cmath
import enum
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateFrequencyError, DomainError
from .model import SystemParams

#: Relative tolerance (in units of max(|kappa_a|, kappa_m)) for |J - Gamma_eff|
#: under which the point is classified as exceptional.
EP_RTOL = 1e-9
#: Relative agreement required between closed form and eigensolver.
CROSSCHECK_RTOL = 1e-12


class PTPhase(enum.Enum):
    UNBROKEN = "UnbrokenPT"
    EXCEPTIONAL_POINT = "ExceptionalPoint"
    BROKEN = "BrokenPT"


class SweepAxis(enum.Enum):
    COUPLING_J = "CouplingJ"
    GAIN_KAPPA_A = "GainKappaA"


@dataclass(frozen=True)
class SupermodePair:
    xi_plus: complex
    xi_minus: complex
    gamma_eff: float
    chi_asym: float
    phase: PTPhase
    discriminant: float
    balanced: bool


def non_hermitian_matrix(omega0, j, kappa_a, kappa_m):
    """2x2 effective Hamiltonian in the (a, m) basis."""
    return np.array(
        [[omega0 + 0.5j * kappa_a, j], [j, omega0 - 0.5j * kappa_m]],
        dtype=complex,
    )


def _classify(j, gamma_eff, kappa_a, kappa_m):
    tol = EP_RTOL * max(abs(kappa_a), abs(kappa_m))
    if abs(j - gamma_eff) <= tol:
        return PTPhase.EXCEPTIONAL_POINT
    return PTPhase.UNBROKEN if j * j > gamma_eff * gamma_eff else PTPhase.BROKEN


def supermode_frequencies(omega0, j, kappa_a, kappa_m, crosscheck=True) -> SupermodePair:
    if not omega0 > 0:
        raise DomainError(f"omega0 must be positive, got {omega0!r}")
    gamma_eff = (kappa_a + kappa_m) / 4.0
    chi = (kappa_m - kappa_a) / 2.0
    disc = j * j - gamma_eff * gamma_eff
    root = cmath.sqrt(disc)
    off_p, off_m = complex(0.0, -chi / 2.0) + root, complex(0.0, -chi / 2.0) - root
    if crosscheck:
        _crosscheck(j, kappa_a, kappa_m, off_p, off_m)
    xi_p, xi_m = omega0 + off_p, omega0 + off_m
    scale = max(abs(kappa_a), abs(kappa_m))
    return SupermodePair(
        xi_plus=xi_p,
        xi_minus=xi_m,
        gamma_eff=gamma_eff,
        chi_asym=chi,
        phase=_classify(j, gamma_eff, kappa_a, kappa_m),
        discriminant=disc,
        balanced=abs(kappa_a - kappa_m) <= EP_RTOL * scale,
    )


def _crosscheck(j, kappa_a, kappa_m, off_p, off_m):
    # offsets from omega0, so the large common frequency cannot mask errors
    ev = np.linalg.eigvals(non_hermitian_matrix(0.0, j, kappa_a, kappa_m))
    closed = np.array([off_p, off_m])
    scale = max(abs(kappa_a), abs(kappa_m), j)
    # an EP is a double root: eigensolver error there grows like sqrt(eps)
    tol = CROSSCHECK_RTOL * scale
    if abs(j * j - ((kappa_a + kappa_m) / 4.0) ** 2) < 1e-6 * scale**2:
        tol = 1e-6 * scale
    for z in closed:
        if np.min(np.abs(ev - z)) > tol:
            raise ArithmeticError(
                f"closed-form supermode {z!r} disagrees with eigensolver {ev!r}"
            )


def supermodes_from_params(params: SystemParams) -> SupermodePair:
    if params.omega_a != params.omega_m:
        raise DegenerateFrequencyError(
            "degenerate-frequency required: supermode analysis needs omega_a == omega_m"
        )
    return supermode_frequencies(params.omega_a, params.j_coupling, params.kappa_a, params.kappa_m)


def ep_coupling(kappa_a, kappa_m):
    """Coupling J at which the square root vanishes, (kappa_a + kappa_m)/4."""
    if not kappa_a + kappa_m > 0:
        raise DomainError("kappa_a + kappa_m must be positive for an exceptional point in J")
    return (kappa_a + kappa_m) / 4.0


@dataclass(frozen=True)
class EigenSweep:
    axis: SweepAxis
    grid: np.ndarray
    xi_plus: np.ndarray
    xi_minus: np.ndarray
    discriminant: np.ndarray
    phases: list

    def rows(self):
        for k, x in enumerate(self.grid):
            yield (
                x,
                self.xi_plus[k].real,
                self.xi_plus[k].imag,
                self.xi_minus[k].real,
                self.xi_minus[k].imag,
                self.phases[k].value,
            )


def _pair_branches(xp, xm):
    """Relabel so each branch moves continuously from one grid point to the next."""
    xp, xm = xp.copy(), xm.copy()
    for k in range(1, len(xp)):
        keep = abs(xp[k] - xp[k - 1]) + abs(xm[k] - xm[k - 1])
        swap = abs(xm[k] - xp[k - 1]) + abs(xp[k] - xm[k - 1])
        if swap < keep:
            xp[k], xm[k] = xm[k], xp[k]
    return xp, xm


def sweep_eigenvalues(axis, grid, fixed: SystemParams) -> EigenSweep:
    """Supermode frequencies along ``grid`` (rad/s) of J or kappa_a."""
    axis = SweepAxis(axis)
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size == 0:
        raise DomainError("grid must be a non-empty 1-D sequence")
    if np.any(np.diff(grid) <= 0):
        raise DomainError("grid must be strictly increasing")
    if fixed.omega_a != fixed.omega_m:
        raise DegenerateFrequencyError(
            "degenerate-frequency required: supermode analysis needs omega_a == omega_m"
        )
    pairs = []
    for x in grid:
        if axis is SweepAxis.COUPLING_J:
            pairs.append(supermode_frequencies(fixed.omega_a, x, fixed.kappa_a, fixed.kappa_m))
        else:
            pairs.append(supermode_frequencies(fixed.omega_a, fixed.j_coupling, x, fixed.kappa_m))
    xp = np.array([p.xi_plus for p in pairs])
    xm = np.array([p.xi_minus for p in pairs])
    xp, xm = _pair_branches(xp, xm)
    return EigenSweep(
        axis=axis,
        grid=grid,
        xi_plus=xp,
        xi_minus=xm,
        discriminant=np.array([p.discriminant for p in pairs]),
        phases=[p.phase for p in pairs],
    )


def bifurcation_index(sweep: EigenSweep, rtol=1e-9):
    """First grid index where the real parts of the two branches separate."""
    scale = np.max(np.abs(sweep.xi_plus - sweep.xi_minus)) or 1.0
    split = np.abs(sweep.xi_plus.real - sweep.xi_minus.real) > rtol * scale
    idx = np.flatnonzero(split)
    return int(idx[0]) if idx.size else None
