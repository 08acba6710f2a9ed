"""Stress-energy tensor algebra in flat spacetime.

Conventions: signature (-,+,+,+), natural units, index 0 is time.
``StressEnergyTensor.components`` holds the covariant components T_{mu nu};
for a medium at rest T_00 is the energy density and T_ij the stresses.
"""

from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import DegenerateInput, InvalidObserver, NonRestFrame, SuperluminalBoost

METRIC = np.diag([-1.0, 1.0, 1.0, 1.0])
REST_FRAME_TOL = 1e-12
BOOST_LIMIT = 1.0 - 1e-9
_ORIENT_TOL = 1e-12


@dataclass(frozen=True)
class StressEnergyTensor:
    """Symmetric 4x4 tensor T_{mu nu}; symmetrized on construction."""

    components: np.ndarray
    frame_label: str = "rest"

    def __post_init__(self):
        c = np.array(self.components, dtype=float)
        if c.shape != (4, 4):
            raise DegenerateInput(f"expected 4x4 components, got shape {c.shape}")
        if not np.all(np.isfinite(c)):
            raise DegenerateInput("stress-energy components must be finite")
        c = 0.5 * (c + c.T)
        c.setflags(write=False)
        object.__setattr__(self, "components", c)

    @classmethod
    def diagonal(cls, rho, p1, p2, p3, frame_label="rest"):
        return cls(np.diag([rho, p1, p2, p3]), frame_label)

    @classmethod
    def perfect_fluid(cls, rho, p):
        return cls.diagonal(rho, p, p, p)

    @property
    def energy_density(self):
        return self.components[0, 0]

    @property
    def spatial(self):
        return self.components[1:, 1:]

    @property
    def spatial_trace(self):
        """Theta_i^i, the sum of the three principal stresses."""
        return float(np.trace(self.spatial))

    @property
    def trace(self):
        """Full trace g^{mu nu} T_{mu nu} = -T_00 + T_ii."""
        return float(np.einsum("ij,ij->", METRIC, self.components))

    def mixed(self):
        """T^mu_nu with the first index raised."""
        return METRIC @ self.components

    def rotated(self, rotation):
        """Apply a spatial rotation matrix R (3x3) to the tensor."""
        lam = np.eye(4)
        lam[1:, 1:] = rotation
        return StressEnergyTensor(lam @ self.components @ lam.T, self.frame_label)


@dataclass(frozen=True)
class Observer4Velocity:
    u: np.ndarray

    def __post_init__(self):
        u = np.array(self.u, dtype=float)
        if u.shape != (4,) or not np.all(np.isfinite(u)):
            raise InvalidObserver("observer 4-velocity must be 4 finite numbers")
        norm = u @ METRIC @ u
        if abs(norm + 1.0) > 1e-12 * max(1.0, u[0] ** 2):
            raise InvalidObserver(f"u.u = {norm!r}, expected -1")
        if u[0] <= 0:
            raise InvalidObserver("observer must be future-pointing")
        u.setflags(write=False)
        object.__setattr__(self, "u", u)

    @classmethod
    def from_velocity(cls, beta):
        beta = np.asarray(beta, dtype=float)
        b2 = beta @ beta
        if b2 >= 1.0:
            raise InvalidObserver("speed must be below 1")
        gamma = 1.0 / np.sqrt(1.0 - b2)
        return cls(np.concatenate([[gamma], gamma * beta]))

    @classmethod
    def from_rapidity(cls, chi, direction):
        n = np.asarray(direction, dtype=float)
        n = n / np.linalg.norm(n)
        return cls(np.concatenate([[np.cosh(chi)], np.sinh(chi) * n]))


@dataclass(frozen=True)
class RestFrameDecomposition:
    rho: float
    pressures: np.ndarray
    axes: np.ndarray = field(repr=False)  # columns are the principal axes

    def reconstruct_spatial(self):
        return self.axes @ np.diag(self.pressures) @ self.axes.T


def _orient(vecs):
    """Flip columns so each one's first non-negligible component is positive."""
    out = vecs.copy()
    for k in range(out.shape[-1]):
        col = out[..., :, k]
        big = np.abs(col) > _ORIENT_TOL
        first = np.argmax(big, axis=-1)
        sign = np.sign(np.take_along_axis(col, first[..., None], axis=-1))[..., 0]
        sign[sign == 0] = 1.0
        out[..., :, k] = col * sign[..., None]
    return out


def sorted_eigh3(blocks, backend=None):
    """Batched eigen-systems of symmetric 3x3 blocks (cyclic Jacobi).

    Eigenvalues descending; eigenvectors as columns, first two oriented with
    the first nonzero component positive, third chosen so the triad is
    right-handed.
    """
    blocks = np.asarray(blocks, dtype=float)
    w, v = kernels.eigh3(blocks, backend=backend)
    order = np.argsort(-w, axis=1, kind="stable")
    w = np.take_along_axis(w, order, axis=1)
    v = np.take_along_axis(v, order[:, None, :], axis=2)
    v = _orient(v)
    v[:, :, 2] = np.cross(v[:, :, 0], v[:, :, 1])
    return w, v


def check_rest_frame(components, tol=REST_FRAME_TOL):
    c = np.asarray(components, dtype=float)
    scale = np.max(np.abs(c), axis=(-2, -1))
    flux = np.max(np.abs(c[..., 0, 1:]), axis=-1)
    bad = flux > tol * np.where(scale > 0, scale, 1.0)
    return ~bad


def rest_frame_decompose(T):
    """Energy density and principal stresses of a tensor in the medium's rest frame."""
    c = T.components
    if not np.all(np.isfinite(c)):
        raise DegenerateInput("non-finite components")
    if not check_rest_frame(c):
        raise NonRestFrame(
            f"energy flux T_0j = {c[0, 1:]} is not negligible relative to |T|"
        )
    w, v = sorted_eigh3(c[None, 1:, 1:])
    return RestFrameDecomposition(rho=float(c[0, 0]), pressures=w[0], axes=v[0])


def boost_matrix(beta):
    """Lambda^mu_nu for a pure boost with 3-velocity ``beta``."""
    beta = np.asarray(beta, dtype=float)
    b2 = float(beta @ beta)
    if not np.sqrt(b2) < BOOST_LIMIT:
        raise SuperluminalBoost(f"|beta| = {np.sqrt(b2)!r} is not below 1 - 1e-9")
    lam = np.eye(4)
    if b2 == 0.0:
        return lam
    gamma = 1.0 / np.sqrt(1.0 - b2)
    lam[0, 0] = gamma
    lam[0, 1:] = lam[1:, 0] = -gamma * beta
    lam[1:, 1:] += (gamma - 1.0) * np.outer(beta, beta) / b2
    return lam


def boost(T, beta):
    """Components of T seen from a frame moving with velocity ``beta``.

    For covariant components T'_{ab} = L_a^m L_b^n T_{mn} with L the inverse
    transpose of the vector boost; for a pure boost that is Lambda(-beta).
    """
    lam = boost_matrix(-np.asarray(beta, dtype=float))
    return StressEnergyTensor(lam @ T.components @ lam.T, frame_label="boosted")


def observer_contraction(T, u):
    """Energy density seen by ``u`` and the energy-flux 4-vector.

    Returns ``(rho_u, flux, flux_norm)`` with rho_u = T_{ab} u^a u^b,
    flux^a = -T^a_b u^b and flux_norm = g_{ab} flux^a flux^b.
    """
    uu = u.u if isinstance(u, Observer4Velocity) else np.asarray(u, dtype=float)
    c = T.components
    rho_u = float(uu @ c @ uu)
    flux = -(METRIC @ c @ uu)
    return rho_u, flux, float(flux @ METRIC @ flux)
