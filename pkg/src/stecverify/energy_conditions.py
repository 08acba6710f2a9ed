"""Pointwise energy conditions: closed rest-frame forms and sampled covariant forms.

Margins are signed slacks in energy-density units; a verdict is Saturated
when the margin lies within ``SATURATION_TOL * rho`` of zero.

Covariant per-observer margins are normalised so that the infimum over all
observers reproduces the sign of the closed form:

* WEC: T(u,u) / (u^0)^2
* NEC: T(k,k) with k = (1, n)
* SEC: (T_ab - g_ab T / 2) u^a u^b / (u^0)^2, times 2 so the rest observer gives rho + sum(p)
* DEC: min(rho_u, rho_u - |S_u|) / (u^0 (u^0 - |u_vec|)), S_u the momentum density seen by u
* STEC: rho_u - |T + rho_u|, T the full trace
"""

import enum
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import ImplicationViolation
from .tensor_core import METRIC, Observer4Velocity, rest_frame_decompose

SATURATION_TOL = 1e-12
DEFAULT_CHI_MAX = 5.0
SAMPLE_BLOCK = 4096


class ConditionKind(enum.Enum):
    WEC = "WEC"
    NEC = "NEC"
    SEC = "SEC"
    DEC = "DEC"
    STEC = "STEC"


class Status(enum.Enum):
    SATISFIED = "Satisfied"
    SATURATED = "Saturated"
    VIOLATED = "Violated"


@dataclass(frozen=True)
class ConditionVerdict:
    kind: ConditionKind
    status: Status
    margin: float
    witness: np.ndarray | None = field(default=None, compare=False)

    @property
    def satisfied(self):
        return self.status is Status.SATISFIED


def status_from_margin(margin, scale):
    tol = SATURATION_TOL * abs(scale)
    if margin > tol:
        return Status.SATISFIED
    if margin < -tol:
        return Status.VIOLATED
    return Status.SATURATED


def closed_form_margins(rho, pressures):
    """Rest-frame margins of all five conditions from rho and principal stresses."""
    p = np.asarray(pressures, dtype=float)
    total = p.sum()
    return {
        ConditionKind.WEC: min(rho, rho + p.min()),
        ConditionKind.NEC: rho + p.min(),
        ConditionKind.SEC: min(rho + total, rho + p.min()),
        ConditionKind.DEC: min(rho, rho - np.abs(p).max()),
        ConditionKind.STEC: min(rho, rho - abs(total)),
    }


def covariant_stec_margin(rho, pressures):
    """Closed form of inf_u [rho_u - |T + rho_u|].

    Equals the rest-frame STEC margin when every rho + p_i >= 0, and is
    unbounded below otherwise (rho_u -> -inf for fast observers).
    """
    p = np.asarray(pressures, dtype=float)
    if rho + p.min() < -SATURATION_TOL * abs(rho):
        return -np.inf
    return min(rho - p.sum(), rho + p.sum())


def check_condition(T, kind):
    """Closed-form rest-frame verdict for one condition."""
    kind = ConditionKind(kind)
    dec = rest_frame_decompose(T)
    margin = float(closed_form_margins(dec.rho, dec.pressures)[kind])
    return ConditionVerdict(kind, status_from_margin(margin, dec.rho), margin)


def sample_observers(n_samples, seed, chi_max=DEFAULT_CHI_MAX):
    """Future-pointing unit timelike vectors: rapidity uniform, direction isotropic."""
    rng = np.random.default_rng(seed)
    chi = rng.uniform(0.0, chi_max, n_samples)
    n = rng.normal(size=(n_samples, 3))
    n /= np.linalg.norm(n, axis=1)[:, None]
    u = np.empty((n_samples, 4))
    u[:, 0] = np.cosh(chi)
    u[:, 1:] = np.sinh(chi)[:, None] * n
    return u, n


def observer_margins(components, u, n, kind):
    """Per-observer covariant margins for an array of observers."""
    c = np.asarray(components, dtype=float)
    rho_u = np.einsum("na,ab,nb->n", u, c, u)
    u0 = u[:, 0]
    if kind is ConditionKind.WEC:
        return rho_u / u0**2
    if kind is ConditionKind.NEC:
        k = np.concatenate([np.ones((len(n), 1)), n], axis=1)
        return np.einsum("na,ab,nb->n", k, c, k)
    trace = float(np.einsum("ab,ab->", METRIC, c))
    if kind is ConditionKind.SEC:
        return 2.0 * (rho_u + 0.5 * trace) / u0**2
    if kind is ConditionKind.DEC:
        flux = -np.einsum("ab,bc,nc->na", METRIC, c, u)
        ff = np.einsum("na,ab,nb->n", flux, METRIC, flux)
        s_norm = np.sqrt(np.maximum(ff + rho_u**2, 0.0))
        speed = np.linalg.norm(u[:, 1:], axis=1)
        # u0 - |u| = exp(-chi), computed without cancellation
        lightcone = u0 * np.exp(-np.arcsinh(speed))
        return np.minimum(rho_u, rho_u - s_norm) / lightcone
    if kind is ConditionKind.STEC:
        return rho_u - np.abs(trace + rho_u)
    raise ValueError(kind)


def covariant_verify(T, kind, n_samples, seed, chi_max=DEFAULT_CHI_MAX, workers=1):
    """Minimum covariant margin over sampled observers.

    Observers are drawn in fixed blocks of ``SAMPLE_BLOCK``; block ``b``
    uses seed ``(seed, b)``.  Workers only split the blocks, so the verdict
    and witness depend on (seed, n_samples) and not on ``workers``.  The
    first observer is always the rest observer.
    """
    kind = ConditionKind(kind)
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    blocks = [(b, min(SAMPLE_BLOCK, n_samples - b * SAMPLE_BLOCK))
              for b in range(-(-n_samples // SAMPLE_BLOCK))]

    def part(block):
        b, count = block
        u, n = sample_observers(count, [seed, b], chi_max)
        if b == 0:
            u[0] = (1.0, 0.0, 0.0, 0.0)  # rest observer always included
        m = observer_margins(T.components, u, n, kind)
        i = int(np.argmin(m))
        return float(m[i]), (np.concatenate([[1.0], n[i]]) if kind is ConditionKind.NEC else u[i])

    if workers > 1 and len(blocks) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(part, blocks))
    else:
        results = [part(b) for b in blocks]
    # first minimum in block order
    margin, witness = min(results, key=lambda r: r[0])
    scale = T.components[0, 0]
    return ConditionVerdict(kind, status_from_margin(margin, scale), margin, witness)


@dataclass(frozen=True)
class ConditionProfile:
    verdicts: dict
    stec_covariant_margin: float
    rest_form_implication_holds: bool

    def status(self, kind):
        return self.verdicts[ConditionKind(kind)].status


def classify(T):
    """Verdicts for all five conditions plus an implication audit.

    The audit checks that the covariant STEC (closed form) implies SEC, WEC
    and NEC.  Whether the rest-frame STEC alone implies them is reported in
    ``rest_form_implication_holds``; it does not when some rho + p_i < 0.
    """
    dec = rest_frame_decompose(T)
    margins = closed_form_margins(dec.rho, dec.pressures)
    verdicts = {
        k: ConditionVerdict(k, status_from_margin(float(m), dec.rho), float(m))
        for k, m in margins.items()
    }
    weaker = (ConditionKind.SEC, ConditionKind.WEC, ConditionKind.NEC)
    cov = covariant_stec_margin(dec.rho, dec.pressures)
    if status_from_margin(cov, dec.rho) is Status.SATISFIED:
        broken = [k.value for k in weaker if verdicts[k].status is Status.VIOLATED]
        if broken:
            raise ImplicationViolation(f"covariant STEC holds but {broken} violated")
    rest_ok = not (
        verdicts[ConditionKind.STEC].satisfied
        and any(not verdicts[k].satisfied for k in weaker)
    )
    return ConditionProfile(verdicts, float(cov), rest_ok)


__all__ = [
    "ConditionKind",
    "ConditionProfile",
    "ConditionVerdict",
    "Observer4Velocity",
    "Status",
    "check_condition",
    "classify",
    "closed_form_margins",
    "covariant_stec_margin",
    "covariant_verify",
    "observer_margins",
    "sample_observers",
]
