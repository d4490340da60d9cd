"""Sideband cooling of a magnomechanical resonator with a gain cavity.

Modules:

* :mod:`~magnocool.model` - parameters, unit conversions, steady state
* :mod:`~magnocool.supermodes` - non-Hermitian cavity-magnon supermodes
* :mod:`~magnocool.spectrum` - force noise spectrum, rates, self-energy
* :mod:`~magnocool.cooling` - final phonon number, rate-equation oracle
* :mod:`~magnocool.dynamics` - drift/diffusion, covariance evolution
* :mod:`~magnocool.cli` - command line
"""

__version__ = "0.1.0"

from .model import SphereSpec, SystemParams, canonical_params, thermal_occupancy  # noqa: E402

__all__ = ["SphereSpec", "SystemParams", "canonical_params", "thermal_occupancy", "__version__"]
