"""Cell-discretised cavity walls: virtual work under homologous dilation,
the equilibrium condition and the positivity audit built on STEC."""

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .energy_conditions import SATURATION_TOL
from .errors import EmptyMesh, InvalidShell, NonNegativeVacuumEnergy
from .tensor_core import StressEnergyTensor, check_rest_frame, rest_frame_decompose, sorted_eigh3
from .errors import NonRestFrame

RESIDUAL_TOL = 1e-6
DEFAULT_DILATION = 1e-6
MAX_DILATION = 1e-3
DEFAULT_RESOLUTION = (64, 128)


class Verdict(enum.Enum):
    POSITIVE_TOTAL = "PositiveTotal"
    INCONCLUSIVE = "Inconclusive"
    VIOLATES_STEC = "ViolatesSTEC"


@dataclass(frozen=True)
class WallCell:
    center: np.ndarray
    volume: float
    stress: StressEnergyTensor

    def __post_init__(self):
        if not self.volume > 0:
            raise ValueError(f"cell volume must be positive, got {self.volume!r}")
        rest_frame_decompose(self.stress)


@dataclass(frozen=True)
class WallMesh:
    """Array-backed cells: centers (N, 3), volumes (N,), stress (N, 4, 4)."""

    centers: np.ndarray
    volumes: np.ndarray
    stress: np.ndarray
    geometry_tag: str = ""

    def __post_init__(self):
        c = np.array(self.centers, dtype=float).reshape(-1, 3)
        v = np.array(self.volumes, dtype=float).ravel()
        s = np.array(self.stress, dtype=float).reshape(-1, 4, 4)
        if not (len(c) == len(v) == len(s)):
            raise ValueError("centers, volumes and stress must have the same length")
        if np.any(v <= 0):
            raise ValueError("cell volumes must be positive")
        s = 0.5 * (s + s.transpose(0, 2, 1))
        for a in (c, v, s):
            a.setflags(write=False)
        object.__setattr__(self, "centers", c)
        object.__setattr__(self, "volumes", v)
        object.__setattr__(self, "stress", s)

    @classmethod
    def from_cells(cls, cells, geometry_tag=""):
        cells = list(cells)
        if not cells:
            return cls(np.zeros((0, 3)), np.zeros(0), np.zeros((0, 4, 4)), geometry_tag)
        return cls(
            np.array([c.center for c in cells]),
            np.array([c.volume for c in cells]),
            np.array([c.stress.components for c in cells]),
            geometry_tag,
        )

    def __len__(self):
        return len(self.volumes)

    def cell(self, i):
        return WallCell(self.centers[i], float(self.volumes[i]), StressEnergyTensor(self.stress[i]))

    @property
    def cells(self):
        return [self.cell(i) for i in range(len(self))]

    @property
    def total_volume(self):
        return kernels.tree_sum(self.volumes)


@dataclass(frozen=True)
class ThinShellSpec:
    """Spherical shell: zero radial stress, isotropic tangential pressure P."""

    R: float
    t: float
    P: float
    rho_w: float | None = None

    def __post_init__(self):
        if not self.R > 0:
            raise InvalidShell(f"R must be positive, got {self.R!r}")
        if not 0 < self.t < self.R / 10:
            raise InvalidShell(f"need 0 < t < R/10, got t={self.t!r}, R={self.R!r}")
        if self.rho_w is not None and not self.rho_w > 0:
            raise InvalidShell(f"rho_w must be positive, got {self.rho_w!r}")

    def with_density(self, rho_w):
        return ThinShellSpec(self.R, self.t, self.P, rho_w)

    @property
    def wall_mass(self):
        """Analytic M_w = rho_w 4 pi R^2 t."""
        return self.rho_w * 4.0 * math.pi * self.R**2 * self.t

    @property
    def trace_integral(self):
        """Analytic integral of the stress trace, 2P 4 pi R^2 t."""
        return 2.0 * self.P * 4.0 * math.pi * self.R**2 * self.t


def shell_mesh(shell, n_theta=DEFAULT_RESOLUTION[0], n_phi=DEFAULT_RESOLUTION[1], volume_rule="exact"):
    """Latitude-longitude cells on a thin shell.

    ``volume_rule="exact"`` uses the exact spherical-zone area times t;
    ``"midpoint"`` uses R^2 sin(theta_c) dtheta dphi t, a second-order
    approximation kept for convergence studies.
    """
    if shell.rho_w is None:
        raise InvalidShell("rho_w must be set before meshing")
    if n_theta < 1 or n_phi < 1:
        raise ValueError("mesh resolution must be positive")
    edges = np.linspace(0.0, math.pi, n_theta + 1)
    theta = 0.5 * (edges[:-1] + edges[1:])
    dphi = 2.0 * math.pi / n_phi
    phi = (np.arange(n_phi) + 0.5) * dphi
    if volume_rule == "exact":
        zone = np.cos(edges[:-1]) - np.cos(edges[1:])
    elif volume_rule == "midpoint":
        zone = np.sin(theta) * np.diff(edges)
    else:
        raise ValueError(f"unknown volume_rule {volume_rule!r}")
    th, ph = np.meshgrid(theta, phi, indexing="ij")
    normal = np.stack([np.sin(th) * np.cos(ph), np.sin(th) * np.sin(ph), np.cos(th)], axis=-1).reshape(-1, 3)
    volumes = np.repeat(zone * shell.R**2 * dphi * shell.t, n_phi)
    stress = np.zeros((len(normal), 4, 4))
    stress[:, 0, 0] = shell.rho_w
    stress[:, 1:, 1:] = shell.P * (np.eye(3) - normal[:, :, None] * normal[:, None, :])
    return WallMesh(shell.R * normal, volumes, stress, f"shell{n_theta}x{n_phi}:{volume_rule}")


def _check_dilation(dilation):
    if not abs(dilation) < MAX_DILATION:
        raise ValueError(f"|dilation| must be below {MAX_DILATION}, got {dilation!r}")


def cell_virtual_work(cell, dilation):
    """-(tau_1 + tau_2 + tau_3) volume dilation, tau_i the principal stresses."""
    _check_dilation(dilation)
    dec = rest_frame_decompose(cell.stress)
    return -float(np.sum(dec.pressures)) * cell.volume * dilation


def _principal(mesh):
    if len(mesh) == 0:
        raise EmptyMesh("mesh has no cells")
    ok = check_rest_frame(mesh.stress)
    if not np.all(ok):
        raise NonRestFrame(f"cell {int(np.argmin(ok))} carries energy flux")
    w, _ = sorted_eigh3(mesh.stress[:, 1:, 1:])
    return mesh.stress[:, 0, 0], w


def total_virtual_work(mesh, dilation=DEFAULT_DILATION):
    """Return ``(delta_W, trace_integral)``; delta_W = -dilation * trace_integral."""
    _check_dilation(dilation)
    _, w = _principal(mesh)
    trace_integral = kernels.tree_sum(w.sum(axis=1) * mesh.volumes)
    return -dilation * trace_integral, trace_integral


def equilibrium_shell(E_v, R, t):
    """Tangential pressure balancing vacuum suction: P = |E_v| / (8 pi R^2 t)."""
    if not E_v < 0:
        raise NonNegativeVacuumEnergy(
            f"E_v = {E_v!r} >= 0: equilibrium would need wall tension, not solved here"
        )
    return ThinShellSpec(R, t, abs(E_v) / (8.0 * math.pi * R**2 * t))


@dataclass(frozen=True)
class PositivityReport:
    E_v: float
    trace_integral: float
    M_w: float
    equilibrium_residual: float
    stec_margin_min: float
    verdict: Verdict
    details: dict = field(default_factory=dict, compare=False)

    @property
    def total(self):
        return self.E_v + self.M_w


def cell_stec_margins(rho, pressures):
    """Per-cell rest-frame STEC margins min(rho, rho - |sum p|)."""
    return np.minimum(rho, rho - np.abs(np.sum(pressures, axis=-1)))


def decide(residual, margins, rho, total):
    tol = SATURATION_TOL * np.abs(rho)
    if np.any(margins < -tol):
        return Verdict.VIOLATES_STEC
    if residual < RESIDUAL_TOL and np.all(margins > tol) and total > 0:
        return Verdict.POSITIVE_TOTAL
    return Verdict.INCONCLUSIVE


def positivity_audit(E_v, mesh):
    """Equilibrium residual, per-cell STEC and the sign of E_v + M_w."""
    rho, w = _principal(mesh)
    trace_integral = kernels.tree_sum(w.sum(axis=1) * mesh.volumes)
    M_w = kernels.tree_sum(rho * mesh.volumes)
    residual = abs(E_v + trace_integral) / abs(E_v) if E_v != 0 else math.inf
    margins = cell_stec_margins(rho, w)
    verdict = decide(residual, margins, rho, E_v + M_w)
    return PositivityReport(
        E_v=float(E_v),
        trace_integral=trace_integral,
        M_w=M_w,
        equilibrium_residual=float(residual),
        stec_margin_min=float(margins.min()),
        verdict=verdict,
        details={"n_cells": len(mesh), "worst_cell": int(np.argmin(margins))},
    )
