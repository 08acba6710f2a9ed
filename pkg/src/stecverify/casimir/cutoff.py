"""Exponential-cutoff regularisation of the zero-point mode sum."""

import numpy as np

from .. import kernels
from ..errors import EmptySpectrum, FitIllConditioned, InsufficientDecay, UnsupportedGeometry
from .result import Scheme, VacuumEnergyResult

DECAY_FLOOR = 1e-16
MAX_CONDITION = 1e12
N_CUTOFFS = 14


def divergent_powers(spectrum):
    """Negative powers of s present in the regulated sum for this spectrum."""
    if spectrum.transverse_dims:
        raise UnsupportedGeometry("cutoff scheme handles Interval and Box spectra only")
    return tuple(range(spectrum.dimension + 1, 1, -1))


def default_cutoffs(spectrum, n=N_CUTOFFS):
    """Geometric cutoffs from the truncation-safe minimum up to half the shortest orbit.

    The finite remainder of S(s) is analytic for s below the shortest
    periodic path; fitting up to half of it keeps the polynomial honest.
    """
    if len(spectrum) == 0:
        raise EmptySpectrum("empty spectrum")
    s_min = 1.001 * -np.log(DECAY_FLOOR) / spectrum.first_excluded
    s_max = 0.5 * spectrum.orbit_length
    if s_max < 10.0 * s_min:
        need = int(np.ceil(spectrum.truncation * 10.0 * s_min / s_max))
        raise InsufficientDecay(
            f"cutoff window [{s_min:.3g}, {s_max:.3g}] spans less than a decade; use n_max >= {need}"
        )
    return np.geomspace(s_min, s_max, n)


def regulated_sum(spectrum, cutoffs, threads=1):
    """S(s) = 1/2 sum_j g_j eps_j exp(-eps_j s) for each cutoff s."""
    return 0.5 * kernels.regulated_sums(
        spectrum.epsilons, spectrum.degeneracies.astype(float), cutoffs, threads=threads
    )


def _fit(s, y, powers, degree):
    cols = [s ** (-p) for p in powers] + [s**k for k in range(degree + 1)]
    m = np.stack(cols, axis=1)
    scale = np.linalg.norm(m, axis=0)
    mn = m / scale
    coef, _, rank, sv = np.linalg.lstsq(mn, y, rcond=None)
    cond = sv[0] / sv[-1] if sv[-1] > 0 else np.inf
    coef = coef / scale
    resid = y - m @ coef
    return coef, resid, cond


def vacuum_energy_cutoff(spectrum, epsilon_cutoffs=None, threads=1, R=1.0):
    """Finite part of the regulated zero-point sum, alpha = E_v R / (hbar c).

    The divergent Laurent coefficients are fitted (not assumed) jointly with
    a polynomial in s for the regular remainder; the constant term is the
    s -> 0 extrapolation of the remainder.  The error estimate combines the
    change when the polynomial degree drops by one with the intercept's
    least-squares standard error.
    """
    if len(spectrum) == 0:
        raise EmptySpectrum("empty spectrum: nothing to regularise")
    powers = divergent_powers(spectrum)
    s = np.sort(np.asarray(
        default_cutoffs(spectrum) if epsilon_cutoffs is None else epsilon_cutoffs, dtype=float
    ))
    if s.size < 4 or np.any(s <= 0):
        raise ValueError("need at least 4 positive cutoffs")
    if s[-1] / s[0] < 10.0:
        raise ValueError("cutoffs must span at least one decade")
    tail = np.exp(-spectrum.first_excluded * s[0])
    if tail >= DECAY_FLOOR:
        raise InsufficientDecay(
            f"exp(-eps_excluded * s_min) = {tail:.3g}; raise n_max or the smallest cutoff"
        )
    y = regulated_sum(spectrum, s, threads=threads)
    degree = min(s.size - len(powers) - 3, 8)
    if degree < 1:
        raise ValueError("too few cutoffs for the divergent terms plus a remainder")
    coef, resid, cond = _fit(s, y, powers, degree)
    if cond > MAX_CONDITION:
        raise FitIllConditioned(f"Laurent fit condition number {cond:.3g}")
    coef_lo, _, _ = _fit(s, y, powers, degree - 1)
    alpha = coef[len(powers)]
    dof = s.size - len(coef)
    stderr = np.sqrt(resid @ resid / dof) if dof > 0 else 0.0
    err = abs(alpha - coef_lo[len(powers)]) + stderr
    return VacuumEnergyResult(
        alpha=float(alpha),
        R=R,
        scheme=Scheme.CUTOFF,
        error_estimate=float(err),
        details={
            "cutoffs": s.tolist(),
            "regulated_sums": y.tolist(),
            "divergent_powers": list(powers),
            "divergent_coefficients": coef[: len(powers)].tolist(),
            "condition_number": float(cond),
        },
    )


def finite_part_at(spectrum, s, divergent_coefficients, powers):
    """S(s) minus the fitted divergent terms at a single cutoff."""
    s = float(s)
    y = regulated_sum(spectrum, np.array([s]))[0]
    return y - sum(c * s ** (-p) for c, p in zip(divergent_coefficients, powers))
