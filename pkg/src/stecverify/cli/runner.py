"""Dispatch validated scenarios to the physics modules."""

import math
import platform
import time
from dataclasses import dataclass, field
from importlib import metadata

import numpy as np
import scipy
from scipy import constants

from .. import kernels
from .. import casimir, energy_conditions as ec, trace_method as tm, wall_mechanics as wm
from ..errors import ChainStepFailed, ConfigInvalid, StecVerifyError, TaskFailed
from ..tensor_core import StressEnergyTensor, rest_frame_decompose
from .config import load_scenario
from .report import plain

DEFAULT_OBSERVERS = 10_000
DEFAULT_N_MAX = {"Interval": 2000, "Box": 200}
CROSS_SCHEME_RTOL = 1e-4
TRACE_IDENTITY_TOL = 1e-8


@dataclass
class Report:
    scenario: dict
    results: dict
    outcomes: list
    provenance: dict = field(default_factory=dict)

    def payload(self):
        return {"scenario": self.scenario, "results": self.results,
                "outcomes": self.outcomes, "provenance": self.provenance}


def _cavity(geo):
    return casimir.CavitySpec(geo["kind"], geo["R"], tuple(geo.get("xi", ())), geo.get("boundary", "Dirichlet"))


def _si_energy(res, geo):
    unit = geo.get("length_unit_m")
    if unit is None:
        return None
    # E_v carries hbar c / length (or / length^3 per area)
    power = 3 if res.per_area else 1
    return res.E_v * constants.hbar * constants.c / unit**power


def _vacuum_dict(res, geo):
    out = {
        "scheme": res.scheme.value,
        "alpha": res.alpha,
        "E_v": res.E_v,
        "error_estimate": res.error_estimate,
        "per_area": res.per_area,
        "alpha_in_typical_range": res.in_typical_range(),
    }
    si = _si_energy(res, geo)
    if si is not None:
        out["E_v_SI"] = si
        out["E_v_SI_unit"] = "J/m^2" if res.per_area else "J"
    return out


def _verdict_dict(v):
    d = {"status": v.status.value, "margin": v.margin}
    if v.witness is not None:
        d["witness"] = [float(x) for x in v.witness]
    return d


def _report_dict(rep):
    d = {
        "E_v": rep.E_v,
        "trace_integral": rep.trace_integral,
        "M_w": rep.M_w,
        "E_v_plus_M_w": rep.total,
        "equilibrium_residual": rep.equilibrium_residual,
        "stec_margin_min": rep.stec_margin_min,
        "verdict": rep.verdict.value,
    }
    if "chain" in rep.details:
        d["chain"] = {k: float(v) for k, v in rep.details["chain"].items()}
    return d


def _shell(p, E_v):
    base = wm.equilibrium_shell(E_v, p["R"], p["t"])
    rho_w = p["rho_w"] if "rho_w" in p else p["rho_w_over_P"] * base.P
    return base.with_density(rho_w)


def _mesh(shell, spec):
    spec = spec or {}
    return wm.shell_mesh(
        shell,
        spec.get("n_theta", wm.DEFAULT_RESOLUTION[0]),
        spec.get("n_phi", wm.DEFAULT_RESOLUTION[1]),
        spec.get("volume_rule", "exact"),
    )


def _mesh_table(shell, E_v, spec):
    spec = spec or {}
    k = spec.get("refinements", 0)
    if not k:
        return None
    nt = spec.get("n_theta", wm.DEFAULT_RESOLUTION[0])
    nphi = spec.get("n_phi", wm.DEFAULT_RESOLUTION[1])
    rows = []
    for j in range(k, -1, -1):
        a, b = max(nt >> j, 1), max(nphi >> j, 1)
        mesh = wm.shell_mesh(shell, a, b, spec.get("volume_rule", "exact"))
        rep = wm.positivity_audit(E_v, mesh)
        rows.append([a, b, math.pi / a, rep.trace_integral, rep.equilibrium_residual])
    return {"columns": ["n_theta", "n_phi", "h_theta", "trace_integral", "equilibrium_residual"], "rows": rows}


def task_check_conditions(sc, threads):
    p = sc.parameters
    comps = p["tensor"] if "tensor" in p else np.diag(p["diagonal"])
    T = StressEnergyTensor(comps)
    kinds = [ec.ConditionKind(k) for k in p.get("conditions", [k.value for k in ec.ConditionKind])]
    n_obs = p.get("observers", DEFAULT_OBSERVERS)
    chi_max = p.get("chi_max", ec.DEFAULT_CHI_MAX)
    profile = ec.classify(T)
    dec = rest_frame_decompose(T)
    conds = {}
    for k in kinds:
        entry = _verdict_dict(profile.verdicts[k])
        if n_obs:
            entry["covariant"] = _verdict_dict(
                ec.covariant_verify(T, k, n_obs, sc.seed, chi_max, workers=threads)
            )
        conds[k.value] = entry
    results = {
        "rho": dec.rho,
        "pressures": [float(x) for x in dec.pressures],
        "conditions": conds,
        "stec_covariant_margin": profile.stec_covariant_margin,
        "rest_form_implication_holds": profile.rest_form_implication_holds,
    }
    return results, [profile.verdicts[k].status.value for k in kinds]


def task_casimir_alpha(sc, threads):
    p = sc.parameters
    geo = p["geometry"]
    cavity = _cavity(geo)
    schemes = p.get("schemes", ["Zeta"] if cavity.kind is casimir.CavityKind.SLAB else ["Zeta", "Cutoff"])
    results, tables = {}, {}
    if "Zeta" in schemes:
        results["Zeta"] = _vacuum_dict(casimir.vacuum_energy_zeta(cavity), geo)
        if cavity.kind is casimir.CavityKind.SLAB:
            results["Zeta"]["zeta_cross_check"] = casimir.slab_coefficient_zeta()
    if "Cutoff" in schemes:
        n_max = p.get("n_max", DEFAULT_N_MAX.get(cavity.kind.value, 200))
        spec = casimir.enumerate_modes(cavity, n_max)
        res = casimir.vacuum_energy_cutoff(spec, p.get("cutoffs"), threads=threads, R=cavity.R)
        results["Cutoff"] = _vacuum_dict(res, geo)
        results["Cutoff"]["n_modes"] = len(spec)
        results["Cutoff"]["condition_number"] = res.details["condition_number"]
        d = res.details
        rows = []
        for s, y in zip(d["cutoffs"], d["regulated_sums"]):
            div = sum(c * s ** (-k) for c, k in zip(d["divergent_coefficients"], d["divergent_powers"]))
            rows.append([s, y, y - div])
        tables["cutoff"] = {"columns": ["s", "S", "finite_part"], "rows": rows}
    outcomes = []
    if "Zeta" in results and "Cutoff" in results:
        a, b = results["Zeta"], results["Cutoff"]
        diff = abs(a["alpha"] - b["alpha"])
        allowed = max(CROSS_SCHEME_RTOL * abs(a["alpha"]), a["error_estimate"] + b["error_estimate"])
        results["cross_scheme"] = {"abs_difference": diff, "allowed": allowed, "agree": diff <= allowed}
        outcomes.append("Satisfied" if diff <= allowed else "Violated")
    results["tables"] = tables
    return results, outcomes


def task_wall_audit(sc, threads):
    p = sc.parameters
    shell = _shell(p["shell"], p["E_v"])
    rep = wm.positivity_audit(p["E_v"], _mesh(shell, p.get("mesh")))
    results = {"P": shell.P, "rho_w": shell.rho_w, "audit": _report_dict(rep), "tables": {}}
    table = _mesh_table(shell, p["E_v"], p.get("mesh"))
    if table:
        results["tables"]["mesh_convergence"] = table
    return results, [rep.verdict.value]


def _virial_table(spec):
    seed = tm.BumpSeed(1.0, spec.get("support_radius", 0.5), spec.get("seed_kind", "poly"))
    L = spec.get("L", 0.75)
    rows = []
    for h in spec.get("spacings", [1 / 16, 1 / 32, 1 / 64]):
        grid = tm.Grid.from_spacing(L, h)
        surface, volume, residual = tm.virial_residual(tm.beltrami_field(seed, grid))
        control = tm.virial_residual(tm.control_field(seed, grid))[2]
        rows.append([h, surface, volume, residual, control])
    return {"columns": ["h", "surface_term", "volume_term", "residual", "control_residual"], "rows": rows}


def _chain(E_v, field_trace, mesh):
    try:
        rep = tm.trace_bound_chain(E_v, field_trace, mesh)
        return _report_dict(rep), None, rep.verdict.value
    except ChainStepFailed as exc:
        verdict = wm.Verdict.VIOLATES_STEC.value if exc.step == "stec" else "Violated"
        return _report_dict(exc.report), exc.step, verdict


def task_trace_chain(sc, threads):
    p = sc.parameters
    shell = _shell(p["shell"], p["E_v"])
    chain, failed, verdict = _chain(p["E_v"], p.get("field_trace_integral"), _mesh(shell, p.get("mesh")))
    results = {"P": shell.P, "rho_w": shell.rho_w, "chain": chain, "failed_step": failed, "tables": {}}
    if "virial" in p:
        results["tables"]["virial"] = _virial_table(p["virial"])
    return results, [verdict]


def task_oscillator(sc, threads):
    p = sc.parameters
    m, A = p["m"], p["A"]
    periods = p.get("periods", 10)
    steps = p.get("steps_per_period", tm.DEFAULT_STEPS_PER_PERIOD)
    mean_trace, mass_term, disc = tm.scalar_trace_identity(m, A, periods, steps)
    rows = []
    for s in (steps // 8, steps // 4, steps // 2, steps):
        if s >= 4:
            rows.append([s, tm.scalar_trace_identity(m, A, periods, s)[2]])
    holds = disc < TRACE_IDENTITY_TOL and (mean_trace < 0 or A == 0)
    results = {
        "mean_trace": mean_trace,
        "mass_term": mass_term,
        "discrepancy": disc,
        "closed_form": -0.5 * A * A * m * m,
        "identity_holds": holds,
        "tables": {"step_refinement": {"columns": ["steps_per_period", "discrepancy"], "rows": rows}},
    }
    return results, ["Satisfied" if holds else "Violated"]


def task_full_pipeline(sc, threads):
    p = sc.parameters
    geo = p["geometry"]
    cavity = _cavity(geo)
    if cavity.kind is casimir.CavityKind.SLAB:
        raise TaskFailed("FullPipeline needs a finite cavity; Slab gives an energy per area")
    if p.get("scheme", "Zeta") == "Cutoff":
        n_max = p.get("n_max", DEFAULT_N_MAX.get(cavity.kind.value, 200))
        vac = casimir.vacuum_energy_cutoff(casimir.enumerate_modes(cavity, n_max), threads=threads, R=cavity.R)
    else:
        vac = casimir.vacuum_energy_zeta(cavity)
    shell = _shell({**p, "R": cavity.R}, vac.E_v)
    mesh = _mesh(shell, p.get("mesh"))
    audit = wm.positivity_audit(vac.E_v, mesh)
    chain, failed, verdict = _chain(vac.E_v, None, mesh)
    results = {
        "vacuum": _vacuum_dict(vac, geo),
        "P": shell.P,
        "rho_w": shell.rho_w,
        "audit": _report_dict(audit),
        "chain": chain,
        "failed_step": failed,
        "verdict": verdict,
    }
    return results, [verdict]


TASKS = {
    "CheckConditions": task_check_conditions,
    "CasimirAlpha": task_casimir_alpha,
    "WallAudit": task_wall_audit,
    "TraceChain": task_trace_chain,
    "OscillatorTrace": task_oscillator,
    "FullPipeline": task_full_pipeline,
}


def _version(name):
    try:
        return metadata.version(name)
    except metadata.PackageNotFoundError:
        return None


def provenance(seed, threads, elapsed):
    return {
        "package": {"name": "stecverify", "version": _version("artifact")},
        "python": platform.python_version(),
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "kernel_backend": kernels.BACKEND,
        "seed": seed,
        "threads": threads,
        "tolerances": {
            "saturation_rel": ec.SATURATION_TOL,
            "chi_max_default": ec.DEFAULT_CHI_MAX,
            "observer_block": ec.SAMPLE_BLOCK,
            "equilibrium_residual": wm.RESIDUAL_TOL,
            "dilation_default": wm.DEFAULT_DILATION,
            "exchange_rel": tm.EXCHANGE_TOL,
            "chain_rel": tm.CHAIN_TOL,
            "energy_drift_rel": tm.ENERGY_DRIFT_TOL,
            "trace_identity_abs": TRACE_IDENTITY_TOL,
            "cross_scheme_rel": CROSS_SCHEME_RTOL,
            "epstein_tail": casimir.zeta.TAIL_TOL,
            "cutoff_decay_floor": casimir.cutoff.DECAY_FLOOR,
            "cutoff_max_condition": casimir.cutoff.MAX_CONDITION,
            "mode_merge_rel": casimir.modes.MERGE_RTOL,
            "reduction_chunk": kernels.CHUNK,
        },
        "constants": {"source": "CODATA via scipy.constants", "hbar_J_s": constants.hbar, "c_m_s": constants.c},
        "wall_clock_s": elapsed,
    }


def run(scenario, seed=None, threads=1):
    """Execute a validated Scenario and return a Report."""
    if seed is not None:
        scenario = type(scenario)(scenario.name, scenario.task, scenario.parameters, seed, scenario.output_format)
    start = time.perf_counter()
    try:
        results, outcomes = TASKS[scenario.task](scenario, threads)
    except TaskFailed:
        raise
    except StecVerifyError as exc:
        raise TaskFailed(f"{scenario.task} failed: {type(exc).__name__}: {exc}") from exc
    elapsed = time.perf_counter() - start
    return Report(plain(scenario.echo()), plain(results), list(outcomes), provenance(scenario.seed, threads, elapsed))


def run_scenario(config_path, seed=None, threads=1):
    """Load, validate and run a scenario file."""
    return run(load_scenario(config_path), seed=seed, threads=threads)


__all__ = ["ConfigInvalid", "Report", "TaskFailed", "run", "run_scenario"]
