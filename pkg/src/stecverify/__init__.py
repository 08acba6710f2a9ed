"""Numerical checks of vacuum-energy positivity for matter-confined cavities.

Submodules: ``tensor_core``, ``energy_conditions``, ``casimir``,
``wall_mechanics``, ``trace_method`` and the ``cli`` front end.
"""

from . import casimir, energy_conditions, errors, kernels, tensor_core, trace_method, wall_mechanics
from .casimir import CavitySpec, enumerate_modes, scaling_check, vacuum_energy_cutoff, vacuum_energy_zeta
from .energy_conditions import ConditionKind, Status, check_condition, classify, covariant_verify
from .tensor_core import Observer4Velocity, StressEnergyTensor, boost, rest_frame_decompose
from .trace_method import beltrami_field, scalar_trace_identity, trace_bound_chain, virial_residual
from .wall_mechanics import (
    ThinShellSpec,
    Verdict,
    WallMesh,
    cell_virtual_work,
    equilibrium_shell,
    positivity_audit,
    shell_mesh,
    total_virtual_work,
)

__all__ = [
    "CavitySpec",
    "ConditionKind",
    "Observer4Velocity",
    "Status",
    "StressEnergyTensor",
    "ThinShellSpec",
    "Verdict",
    "WallMesh",
    "beltrami_field",
    "boost",
    "casimir",
    "cell_virtual_work",
    "check_condition",
    "classify",
    "covariant_verify",
    "energy_conditions",
    "enumerate_modes",
    "equilibrium_shell",
    "errors",
    "kernels",
    "positivity_audit",
    "rest_frame_decompose",
    "scalar_trace_identity",
    "scaling_check",
    "shell_mesh",
    "tensor_core",
    "total_virtual_work",
    "trace_bound_chain",
    "trace_method",
    "vacuum_energy_cutoff",
    "vacuum_energy_zeta",
    "virial_residual",
    "wall_mechanics",
]
