"""Cavity descriptors and Dirichlet mode spectra in units of 1/R."""

import enum
from dataclasses import dataclass

import numpy as np

from ..errors import UnsupportedGeometry

MERGE_RTOL = 1e-12


class CavityKind(enum.Enum):
    INTERVAL = "Interval"
    SLAB = "Slab"
    BOX = "Box"


@dataclass(frozen=True)
class CavitySpec:
    """Scale-free cavity of reference length ``R``.

    Interval: R is the length.  Slab: R is the plate gap.  Box: R is the
    radius of the circumscribing sphere (half the diagonal) and ``xi`` the
    three edge ratios (any overall scale).
    """

    kind: CavityKind
    R: float = 1.0
    xi: tuple = ()
    boundary: str = "Dirichlet"

    def __post_init__(self):
        object.__setattr__(self, "kind", CavityKind(self.kind))
        object.__setattr__(self, "xi", tuple(float(x) for x in self.xi))
        if not self.R > 0:
            raise ValueError(f"R must be positive, got {self.R!r}")
        if any(not x > 0 for x in self.xi):
            raise ValueError(f"shape ratios must be positive, got {self.xi!r}")
        if self.boundary != "Dirichlet":
            raise UnsupportedGeometry(f"boundary {self.boundary!r} not supported")
        if self.kind is CavityKind.BOX and len(self.xi) != 3:
            raise UnsupportedGeometry("Box needs three edge ratios")
        if self.kind is not CavityKind.BOX and self.xi:
            raise UnsupportedGeometry(f"{self.kind.value} takes no shape ratios")

    @classmethod
    def interval(cls, L=1.0):
        return cls(CavityKind.INTERVAL, L)

    @classmethod
    def slab(cls, d=1.0):
        return cls(CavityKind.SLAB, d)

    @classmethod
    def box(cls, xi=(1.0, 1.0, 1.0), R=1.0):
        return cls(CavityKind.BOX, R, tuple(xi))

    @classmethod
    def cube(cls, R=1.0):
        return cls.box((1.0, 1.0, 1.0), R)

    def scaled(self, lam):
        return CavitySpec(self.kind, self.R * lam, self.xi, self.boundary)

    def edges_over_R(self):
        """Box edges in units of R, normalised so the half-diagonal is 1."""
        xi = np.asarray(self.xi, dtype=float)
        return 2.0 * xi / np.linalg.norm(xi)


@dataclass(frozen=True)
class ModeSpectrum:
    epsilons: np.ndarray
    degeneracies: np.ndarray
    truncation: int
    first_excluded: float
    dimension: int = 1
    transverse_dims: int = 0
    orbit_length: float = 2.0  # shortest periodic reflection path, units of R

    def __len__(self):
        return len(self.epsilons)


def merge_degenerate(eps, rtol=MERGE_RTOL):
    """Sort and merge values equal to relative tolerance ``rtol``."""
    eps = np.sort(np.asarray(eps, dtype=float), kind="stable")
    if eps.size == 0:
        return eps, np.zeros(0, dtype=np.int64)
    new = np.empty(eps.size, dtype=bool)
    new[0] = True
    new[1:] = np.diff(eps) > rtol * eps[1:]
    starts = np.flatnonzero(new)
    counts = np.diff(np.append(starts, eps.size))
    return eps[starts], counts.astype(np.int64)


def box_epsilons(edges, n_max):
    n = np.arange(1, n_max + 1, dtype=float)
    q = [(n / a) ** 2 for a in edges]
    return np.pi * np.sqrt(q[0][:, None, None] + q[1][None, :, None] + q[2][None, None, :]).ravel()


def enumerate_modes(cavity, n_max):
    """Dimensionless mode constants eps_j with E_j = eps_j hbar c / R."""
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    if cavity.kind in (CavityKind.INTERVAL, CavityKind.SLAB):
        eps = np.pi * np.arange(1, n_max + 1, dtype=float)
        return ModeSpectrum(
            eps,
            np.ones(n_max, dtype=np.int64),
            n_max,
            np.pi * (n_max + 1),
            dimension=1,
            transverse_dims=2 if cavity.kind is CavityKind.SLAB else 0,
        )
    if cavity.kind is CavityKind.BOX:
        edges = cavity.edges_over_R()
        eps, deg = merge_degenerate(box_epsilons(edges, n_max))
        base = np.sum((1.0 / edges) ** 2)
        first_out = min(
            np.pi * np.sqrt(base - (1.0 / a) ** 2 + ((n_max + 1) / a) ** 2) for a in edges
        )
        return ModeSpectrum(eps, deg, n_max, float(first_out), dimension=3,
                            orbit_length=float(2.0 * edges.min()))
    raise UnsupportedGeometry(str(cavity.kind))
