"""Regularised vacuum energies E_v = alpha hbar c / R of scale-free cavities."""

from .cutoff import default_cutoffs, regulated_sum, vacuum_energy_cutoff
from .modes import CavityKind, CavitySpec, ModeSpectrum, enumerate_modes
from .result import Scheme, VacuumEnergyResult
from .zeta import (
    dirichlet_box_zeta,
    epstein_zeta,
    riemann_zeta_negative,
    slab_coefficient_abel_plana,
    slab_coefficient_zeta,
    vacuum_energy_zeta,
)


def scaling_check(cavity, lam):
    """Relative violation of E_v(lam R) lam^p = E_v(R), p = 1 (3 for per-area slab)."""
    if not lam > 0:
        raise ValueError("lambda must be positive")
    base = vacuum_energy_zeta(cavity)
    scaled = vacuum_energy_zeta(cavity.scaled(lam))
    p = 3 if base.per_area else 1
    return abs(scaled.E_v * lam**p - base.E_v) / abs(base.E_v)


__all__ = [
    "CavityKind",
    "CavitySpec",
    "ModeSpectrum",
    "Scheme",
    "VacuumEnergyResult",
    "default_cutoffs",
    "dirichlet_box_zeta",
    "enumerate_modes",
    "epstein_zeta",
    "regulated_sum",
    "riemann_zeta_negative",
    "scaling_check",
    "slab_coefficient_abel_plana",
    "slab_coefficient_zeta",
    "vacuum_energy_cutoff",
    "vacuum_energy_zeta",
]
