"""Trace-method ingredients: virial identity on conserved stress fields,
the integrated positivity chain, and the classical scalar trace identity."""

import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import kernels
from .errors import ChainStepFailed, IntegratorToleranceExceeded, SupportTooLarge
from .wall_mechanics import Verdict, positivity_audit

EXCHANGE_TOL = 1e-6
CHAIN_TOL = 1e-12
ENERGY_DRIFT_TOL = 1e-10
DEFAULT_STEPS_PER_PERIOD = 512

_SYM = ((0, 0), (1, 1), (2, 2), (0, 1), (0, 2), (1, 2))


@dataclass(frozen=True)
class Grid:
    """Uniform lattice on [-L, L]^3 with n nodes per axis."""

    L: float
    n: int

    @classmethod
    def from_spacing(cls, L, h):
        n = round(2 * L / h) + 1
        if not math.isclose((n - 1) * h, 2 * L, rel_tol=1e-12):
            raise ValueError(f"spacing {h!r} does not divide 2L = {2 * L!r}")
        return cls(L, n)

    @property
    def h(self):
        return 2 * self.L / (self.n - 1)

    @property
    def axis(self):
        return np.linspace(-self.L, self.L, self.n)


@dataclass(frozen=True)
class BumpSeed:
    """Separable compact profile amplitude * b(x) b(y) b(z), zero for |x_i| >= a.

    ``kind="poly"``: b(u) = (1 - u^2/a^2)^3, twice continuously differentiable.
    ``kind="gaussian"``: the same taper times exp(-u^2 / w^2), w = a/3.
    """

    amplitude: float = 1.0
    support_radius: float = 0.5
    kind: str = "poly"

    def profile(self, u):
        """b, b', b'' at the points ``u``."""
        a = self.support_radius
        u = np.asarray(u, dtype=float)
        inside = np.abs(u) < a
        q = np.where(inside, 1.0 - (u / a) ** 2, 0.0)
        c = q**3
        c1 = np.where(inside, -6.0 * u / a**2 * q**2, 0.0)
        c2 = np.where(inside, 24.0 * u**2 / a**4 * q - 6.0 / a**2 * q**2, 0.0)
        if self.kind == "poly":
            return c, c1, c2
        if self.kind == "gaussian":
            w2 = (a / 3.0) ** 2
            g = np.exp(-(u**2) / w2)
            g1 = -2.0 * u / w2 * g
            g2 = (4.0 * u**2 / w2**2 - 2.0 / w2) * g
            return g * c, g1 * c + g * c1, g2 * c + 2.0 * g1 * c1 + g * c2
        raise ValueError(f"unknown seed kind {self.kind!r}")


@dataclass(frozen=True)
class StressField:
    """Spatial stress components on a grid, stored as (n, n, n, 3, 3)."""

    grid: Grid
    values: np.ndarray = field(repr=False)
    support_radius: float = 0.0

    @property
    def h(self):
        return self.grid.h

    def trace(self):
        return np.einsum("...ii->...", self.values)


def _check_support(seed, grid):
    if not seed.support_radius < grid.L - 3 * grid.h:
        raise SupportTooLarge(
            f"support radius {seed.support_radius!r} must be below L - 3h = {grid.L - 3 * grid.h!r}"
        )


def beltrami_field(seed, grid):
    """Double-curl field T_ij = eps_ikl eps_jmn d_k d_m A_ln with A_ln = delta_ln phi.

    That contraction is delta_ij lap(phi) - d_i d_j phi.  Derivatives of the
    separable seed phi are sampled analytically at the nodes, so the field
    is exactly symmetric and identically divergence-free in the continuum;
    its lattice divergence and lattice virial residual carry the
    discretisation error.
    """
    _check_support(seed, grid)
    b, b1, b2 = seed.profile(grid.axis)
    d = (b, b1, b2)
    n = grid.n
    s = seed.amplitude

    def sep(ox, oy, oz):
        return s * d[ox][:, None, None] * d[oy][None, :, None] * d[oz][None, None, :]

    hess = np.empty((n, n, n, 3, 3))
    orders = {(0, 0): (2, 0, 0), (1, 1): (0, 2, 0), (2, 2): (0, 0, 2),
              (0, 1): (1, 1, 0), (0, 2): (1, 0, 1), (1, 2): (0, 1, 1)}
    for (i, j), o in orders.items():
        hess[..., i, j] = hess[..., j, i] = sep(*o)
    lap = hess[..., 0, 0] + hess[..., 1, 1] + hess[..., 2, 2]
    values = -hess
    for i in range(3):
        values[..., i, i] += lap
    return StressField(grid, values, seed.support_radius)


def control_field(seed, grid):
    """Non-conserved fixture T_ij = delta_ij phi; its virial residual tends to 3 int(phi)."""
    _check_support(seed, grid)
    b, _, _ = seed.profile(grid.axis)
    phi = seed.amplitude * b[:, None, None] * b[None, :, None] * b[None, None, :]
    values = np.zeros(phi.shape + (3, 3))
    for i in range(3):
        values[..., i, i] = phi
    return StressField(grid, values, seed.support_radius)


def divergence(field):
    """Central-difference d_j T_ji on interior nodes, shape (n-2, n-2, n-2, 3)."""
    v, h = field.values, field.h
    core = (slice(1, -1),) * 3
    out = np.zeros(tuple(k - 2 for k in v.shape[:3]) + (3,))
    for j in range(3):
        hi = list(core)
        lo = list(core)
        hi[j] = slice(2, None)
        lo[j] = slice(None, -2)
        out += (v[tuple(hi)][..., j, :] - v[tuple(lo)][..., j, :]) / (2 * h)
    return out


def virial_residual(field):
    """(surface_term, volume_term, residual) of the identity oint T_ji x^i dsigma_j = int T_ii.

    The surface term is the lattice flux through the outer box faces.
    """
    v, h, x = field.values, field.h, field.grid.axis
    volume = kernels.tree_sum(field.trace() * h**3)
    parts = []
    for j in range(3):
        for side, sign in ((0, -1.0), (-1, 1.0)):
            face = np.take(v, side, axis=j)[..., j, :]  # T_ji on the face
            coords = np.meshgrid(x, x, x, indexing="ij")
            pos = np.stack([np.take(c, side, axis=j) for c in coords], axis=-1)
            parts.append(sign * kernels.tree_sum(np.einsum("abi,abi->ab", face, pos) * h**2))
    surface = kernels.tree_sum(np.array(parts))
    return surface, volume, abs(surface - volume)


def trace_bound_chain(E_v, field_trace_integral, mesh):
    """Audit the integrated chain E_v >= int T_ii = -int Theta_ii > -M_w.

    ``field_trace_integral`` defaults to E_v (traceless field, T_ii = T_tt).
    Raises ChainStepFailed naming the step that broke; a chain that only
    holds with equality returns an Inconclusive report.
    """
    if field_trace_integral is None:
        field_trace_integral = E_v
    if not (math.isfinite(E_v) and math.isfinite(field_trace_integral)):
        raise ValueError("chain inputs must be finite")
    report = positivity_audit(E_v, mesh)
    theta = report.trace_integral
    scale = max(abs(E_v), abs(theta), abs(field_trace_integral))
    gap = abs(field_trace_integral + theta)
    steps = {"exchange": gap, "trace_sign": E_v - field_trace_integral, "stec": report.M_w - theta}
    report = replace(report, details={**report.details, "chain": steps,
                                      "field_trace_integral": float(field_trace_integral)})
    if gap > EXCHANGE_TOL * scale:
        raise ChainStepFailed("exchange", f"|int T_ii + int Theta_ii| = {gap:.3g}", report)
    if E_v - field_trace_integral < -CHAIN_TOL * scale:
        raise ChainStepFailed("trace_sign", f"E_v = {E_v!r} < int T_ii = {field_trace_integral!r}", report)
    mass_scale = max(scale, abs(report.M_w))
    if report.verdict is Verdict.VIOLATES_STEC or report.M_w - theta < -CHAIN_TOL * mass_scale:
        raise ChainStepFailed(
            "stec", f"int Theta_ii = {theta!r} vs M_w = {report.M_w!r}, min cell margin {report.stec_margin_min!r}",
            report,
        )
    return report


# Gauss-Legendre, 3 stages, order 6
_S15 = math.sqrt(15.0)
_GL3_A = np.array([
    [5 / 36, 2 / 9 - _S15 / 15, 5 / 36 - _S15 / 30],
    [5 / 36 + _S15 / 24, 2 / 9, 5 / 36 - _S15 / 24],
    [5 / 36 + _S15 / 30, 2 / 9 + _S15 / 15, 5 / 36],
])
_GL3_B = np.array([5 / 18, 4 / 9, 5 / 18])


def gl3_step_matrix(m, h):
    """One-step map of the Gauss-Legendre scheme for (phi, phidot)' = L (phi, phidot).

    For linear systems the implicit stages solve in closed form:
    M = I + h (b^T x I) (I - h A x L)^-1 (1 x L).
    """
    lin = np.array([[0.0, 1.0], [-m * m, 0.0]])
    eye2 = np.eye(2)
    k_sys = np.eye(6) - h * np.kron(_GL3_A, lin)
    rhs = np.kron(np.ones((3, 1)), lin)
    stages = np.linalg.solve(k_sys, rhs)
    return eye2 + h * np.kron(_GL3_B[None, :], eye2) @ stages


@dataclass(frozen=True)
class OscillatorState:
    m: float
    A: float
    times: np.ndarray = field(repr=False)
    trajectory: np.ndarray = field(repr=False)  # columns phi, phidot

    def energy(self):
        phi, dphi = self.trajectory.T
        return 0.5 * dphi**2 + 0.5 * self.m**2 * phi**2


def integrate_oscillator(m, A, periods=10, steps_per_period=DEFAULT_STEPS_PER_PERIOD):
    if not m > 0:
        raise ValueError("m must be positive")
    if periods < 1 or steps_per_period < 1:
        raise ValueError("periods and steps_per_period must be >= 1")
    h = 2 * math.pi / m / steps_per_period
    step = gl3_step_matrix(m, h)
    n = periods * steps_per_period
    traj = np.empty((n + 1, 2))
    traj[0] = (A, 0.0)
    for k in range(n):
        traj[k + 1] = step @ traj[k]
    return OscillatorState(m, A, h * np.arange(n + 1), traj)


def scalar_trace_identity(m, A, periods=10, steps_per_period=DEFAULT_STEPS_PER_PERIOD):
    """Time averages of T = 3p - rho and of m dL/dm = -m^2 phi^2 for a homogeneous field.

    Returns ``(mean_trace, mass_term, discrepancy)``.  The averages use the
    periodic rectangle rule over whole periods (endpoint excluded).
    """
    state = integrate_oscillator(m, A, periods, steps_per_period)
    e = state.energy()
    if e[0] > 0:
        drift = float(np.max(np.abs(e - e[0])) / e[0])
        if drift > ENERGY_DRIFT_TOL:
            raise IntegratorToleranceExceeded(f"relative energy drift {drift:.3g}")
    phi, dphi = state.trajectory[:-1].T
    rho = 0.5 * dphi**2 + 0.5 * m * m * phi**2
    p = 0.5 * dphi**2 - 0.5 * m * m * phi**2
    n = len(phi)
    mean_trace = kernels.tree_sum(3 * p - rho) / n
    mass_term = kernels.tree_sum(-m * m * phi**2) / n
    return mean_trace, mass_term, abs(mean_trace - mass_term)
