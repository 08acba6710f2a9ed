"""Analytic continuation route: Riemann and Epstein zeta functions, Abel-Plana for the slab."""

import math

import numpy as np
from scipy import integrate, special

from ..errors import ContinuationNonConvergent, UnsupportedGeometry
from .modes import CavityKind
from .result import Scheme, VacuumEnergyResult

TAIL_TOL = 1e-14
MAX_SHELLS = 400


def riemann_zeta_negative(n):
    """zeta(1 - n) for integer n >= 2 through the functional equation."""
    if n < 2:
        raise ValueError("n must be >= 2")
    if n % 2:
        return 0.0  # trivial zeros
    return 2.0 * (2.0 * math.pi) ** (-n) * math.cos(math.pi * n / 2) * math.gamma(n) * special.zeta(n, 1)


def upper_gamma(a, x):
    """Unnormalised upper incomplete gamma, any real a, x > 0."""
    x = np.asarray(x, dtype=float)
    if a > 0:
        return special.gammaincc(a, x) * special.gamma(a)
    if a == 0:
        return special.exp1(x)
    return (upper_gamma(a + 1, x) - x**a * np.exp(-x)) / a


def _shell(d, k):
    """Integer points with max-norm exactly k in d dimensions."""
    r = np.arange(-k, k + 1)
    grids = np.meshgrid(*([r] * d), indexing="ij")
    pts = np.stack([g.ravel() for g in grids], axis=1)
    return pts[np.abs(pts).max(axis=1) == k].astype(float)


def _shell_count(d, k):
    return (2 * k + 1) ** d - (2 * k - 1) ** d


def epstein_zeta(weights, s):
    """Z(s) = sum over nonzero n in Z^d of (sum_i w_i n_i^2)^(-s), continued to all s != d/2.

    Uses the incomplete-gamma (Chowla-Selberg type) split at unit scale after
    rescaling the form to unit determinant.  Lattice shells are summed until
    a Gaussian envelope bound on the remaining shells drops below TAIL_TOL.
    Returns ``(value, tail_bound)``.
    """
    w = np.asarray(weights, dtype=float)
    d = w.size
    if s == 0:
        return -1.0, 0.0
    if s == d / 2:
        raise ValueError("pole at s = d/2")
    c = np.prod(w) ** (-1.0 / d)
    w = w * c
    a_dir, a_dual = s, d / 2 - s

    def term_dir(q):
        x = math.pi * q
        return upper_gamma(a_dir, x) * x ** (-a_dir)

    def term_dual(q):
        x = math.pi * q
        return upper_gamma(a_dual, x) * x ** (-a_dual)

    # monotone envelopes: both terms decrease in q, and every point on shell k
    # has q >= w_min k^2 (direct) or q >= k^2 / w_max (dual)
    wmin, wmax = w.min(), w.max()
    total = 0.0
    for k in range(1, MAX_SHELLS + 1):
        pts = _shell(d, k)
        sq = pts**2
        total += float(np.sum(term_dir(sq @ w))) + float(np.sum(term_dual(sq @ (1.0 / w))))
        nxt = [
            _shell_count(d, j) * (term_dir(wmin * j * j) + term_dual(j * j / wmax))
            for j in (k + 1, k + 2)
        ]
        ratio = nxt[1] / nxt[0] if nxt[0] > 0 else 0.0
        tail = nxt[0] / (1.0 - ratio) if ratio < 1 else np.inf
        if tail < TAIL_TOL * max(1.0, abs(total)):
            break
    else:
        raise ContinuationNonConvergent(f"Epstein series not converged after {MAX_SHELLS} shells")
    lhs = -1.0 / s - 1.0 / a_dual + total
    value = lhs * math.pi**s / math.gamma(s) * c**s
    return value, float(tail * abs(math.pi**s / math.gamma(s) * c**s))


def dirichlet_box_zeta(edges, s=-0.5):
    """sum over n_i >= 1 of (sum (n_i/a_i)^2)^(-s), by inclusion-exclusion over faces."""
    w = 1.0 / np.asarray(edges, dtype=float) ** 2
    total, err = 0.0, 0.0
    for sign, subsets in ((1, [(0, 1, 2)]), (-1, [(0, 1), (0, 2), (1, 2)]), (1, [(0,), (1,), (2,)])):
        for sub in subsets:
            v, e = epstein_zeta(w[list(sub)], s)
            total += sign * v
            err += e
    return total / 8.0, err / 8.0


def slab_coefficient_abel_plana():
    """Per-area vacuum energy of one Dirichlet scalar between plates at unit gap.

    Abel-Plana turns sum_n F(n) - int F into i int_0^inf [F(it) - F(-it)]/(e^{2 pi t} - 1) dt
    (the F(0)/2 surface term is discarded); for F(n) = int d^2k/(2pi)^2 sqrt(k^2 + (n pi)^2)
    the branch-cut jump is -(1/pi) int_0^{pi t} k sqrt((pi t)^2 - k^2) dk.
    """

    def jump(t):
        m = math.pi * t
        inner, _ = integrate.quad(lambda k: k * math.sqrt(max(m * m - k * k, 0.0)), 0.0, m,
                                  epsabs=0.0, epsrel=1e-13, limit=200)
        return -inner / math.pi

    def integrand(t):
        if t <= 0:
            return 0.0
        x = math.exp(-2.0 * math.pi * t)
        return jump(t) * x / (-math.expm1(-2.0 * math.pi * t))

    val, err = integrate.quad(integrand, 0.0, np.inf, epsabs=0.0, epsrel=1e-12, limit=200)
    return 0.5 * val, 0.5 * err


def slab_coefficient_zeta():
    """Same coefficient via -(pi^2/12) zeta(-3); cross-check for the Abel-Plana route."""
    return -(math.pi**2) / 12.0 * riemann_zeta_negative(4)


def vacuum_energy_zeta(cavity):
    """alpha by analytic continuation; for the slab, the per-area coefficient via Abel-Plana."""
    if cavity.kind is CavityKind.INTERVAL:
        alpha = 0.5 * math.pi * riemann_zeta_negative(2)
        return VacuumEnergyResult(alpha, cavity.R, Scheme.ZETA, 0.0)
    if cavity.kind is CavityKind.SLAB:
        c, err = slab_coefficient_abel_plana()
        return VacuumEnergyResult(c, cavity.R, Scheme.ABEL_PLANA, err, per_area=True)
    if cavity.kind is CavityKind.BOX:
        z, err = dirichlet_box_zeta(cavity.edges_over_R())
        return VacuumEnergyResult(0.5 * math.pi * z, cavity.R, Scheme.ZETA, 0.5 * math.pi * err)
    raise UnsupportedGeometry(str(cavity.kind))
