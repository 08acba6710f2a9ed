import csv
import json
import math
from pathlib import Path

import pytest
import yaml

from stecverify.cli import report as rp
from stecverify.cli.config import TASKS, load_scenario, schema_for, validate
from stecverify.cli.main import main
from stecverify.cli.runner import run, run_scenario
from stecverify.errors import ConfigInvalid, TaskFailed

SCENARIOS = Path(__file__).resolve().parent.parent / "scenarios"


def write(tmp_path, data, name="s.yaml"):
    p = tmp_path / name
    p.write_text(yaml.safe_dump(data))
    return p


def scenario(task, params, seed=0):
    return {"schema": 1, "name": "t", "task": task, "parameters": params, "seed": seed}


FULL = scenario("FullPipeline", {"geometry": {"kind": "Interval", "R": 1.0}, "t": 0.01, "rho_w_over_P": 3})


def test_full_pipeline_interval(tmp_path):
    rep = run_scenario(write(tmp_path, FULL))
    assert rep.results["verdict"] == "PositiveTotal"
    assert rep.results["vacuum"]["alpha"] == pytest.approx(-math.pi / 24, rel=1e-15)
    assert rp.exit_code(rep.outcomes) == 0


def test_check_conditions_stiff(tmp_path):
    rep = run_scenario(write(tmp_path, scenario("CheckConditions", {"diagonal": [1, 1, 1, 1], "observers": 500})))
    assert rep.results["conditions"]["STEC"]["status"] == "Violated"
    assert rp.exit_code(rep.outcomes) == 2


def test_missing_R_named(tmp_path):
    bad = scenario("FullPipeline", {"geometry": {"kind": "Interval"}, "t": 0.01, "rho_w_over_P": 3})
    with pytest.raises(ConfigInvalid, match="'R'"):
        run_scenario(write(tmp_path, bad))


@pytest.mark.parametrize("mutate", [
    lambda d: d.update(schema=2),
    lambda d: d.update(task="Nope"),
    lambda d: d.pop("parameters"),
    lambda d: d["parameters"].update(t=-1),
    lambda d: d["parameters"].update(extra=1),
    lambda d: d["parameters"].update(rho_w=1.0),
])
def test_schema_rejections(mutate):
    d = json.loads(json.dumps(FULL))
    mutate(d)
    with pytest.raises(ConfigInvalid):
        validate(d)


def test_missing_file():
    with pytest.raises(ConfigInvalid):
        load_scenario("/nonexistent/x.yaml")


def test_every_task_has_schema():
    for t in TASKS:
        assert schema_for(t)["type"] == "object"


def test_json_config_accepted(tmp_path):
    p = tmp_path / "s.json"
    p.write_text(json.dumps(FULL))
    assert load_scenario(p).task == "FullPipeline"


@pytest.mark.parametrize("path", sorted(SCENARIOS.glob("*.yaml")), ids=lambda p: p.stem)
def test_bundled_scenarios(path):
    if path.stem.startswith("invalid"):
        with pytest.raises(ConfigInvalid):
            load_scenario(path)
        return
    rep = run_scenario(path)
    assert rep.outcomes is not None


def test_slab_full_pipeline_fails(tmp_path):
    d = scenario("FullPipeline", {"geometry": {"kind": "Slab", "R": 1.0}, "t": 0.01, "rho_w_over_P": 3})
    with pytest.raises(TaskFailed):
        run_scenario(write(tmp_path, d))


def test_module_error_wrapped(tmp_path):
    d = scenario("WallAudit", {"E_v": -0.1, "shell": {"R": 1.0, "t": 0.5, "rho_w_over_P": 3}})
    with pytest.raises(TaskFailed, match="InvalidShell"):
        run_scenario(write(tmp_path, d))


def test_casimir_task_tables(tmp_path):
    d = scenario("CasimirAlpha", {"geometry": {"kind": "Interval", "R": 2.0, "length_unit_m": 1e-6}})
    rep = run_scenario(write(tmp_path, d))
    assert rep.results["cross_scheme"]["agree"]
    z = rep.results["Zeta"]
    assert z["E_v"] == pytest.approx(-math.pi / 48)
    assert z["E_v_SI"] < 0 and z["E_v_SI_unit"] == "J"
    rows = rep.results["tables"]["cutoff"]["rows"]
    s = [r[0] for r in rows]
    assert s == sorted(s)


def test_oscillator_task(tmp_path):
    rep = run_scenario(write(tmp_path, scenario("OscillatorTrace", {"m": 2, "A": 1})))
    assert rep.results["identity_holds"]
    assert rep.results["mean_trace"] == pytest.approx(-2.0, abs=1e-8)


def test_trace_chain_stiff_reports_step(tmp_path):
    d = scenario("TraceChain", {"E_v": -0.1, "shell": {"R": 1, "t": 0.01, "rho_w_over_P": 1}})
    rep = run_scenario(write(tmp_path, d))
    assert rep.results["failed_step"] == "stec"
    assert rp.exit_code(rep.outcomes) == 2


def test_wall_saturated_exit_three(tmp_path):
    d = scenario("WallAudit", {"E_v": -0.1, "shell": {"R": 1, "t": 0.01, "rho_w_over_P": 2}})
    assert main(["verify", str(write(tmp_path, d)), "--out", str(tmp_path / "o.json")]) == 3


def test_exit_codes():
    assert rp.exit_code(["PositiveTotal"]) == 0
    assert rp.exit_code(["Satisfied", "Saturated"]) == 3
    assert rp.exit_code(["Saturated", "Violated"]) == 2
    assert rp.exit_code(["ViolatesSTEC"]) == 2
    assert rp.exit_code(["Inconclusive"]) == 3


def test_cli_error_exit(tmp_path, capsys):
    assert main(["verify", str(tmp_path / "missing.yaml")]) == 1
    assert "ConfigInvalid" in capsys.readouterr().err


def test_json_roundtrip(tmp_path):
    rep = run_scenario(write(tmp_path, FULL))
    out = tmp_path / "r.json"
    rp.emit_report(rep, str(out), "json")
    back = json.loads(out.read_text())
    assert back == json.loads(json.dumps(rep.payload()))


def test_seventeen_digits():
    text = rp.dumps({"x": 0.1, "y": 1.0, "z": float("inf"), "n": [1e-300]})
    assert '"x": 0.10000000000000001' in text
    assert '"y": 1.0' in text
    back = json.loads(text)
    assert back["x"] == 0.1 and back["z"] == math.inf and isinstance(back["y"], float)


def test_csv_tables(tmp_path):
    d = scenario("TraceChain", {"E_v": -0.1, "shell": {"R": 1, "t": 0.01, "rho_w_over_P": 3},
                                "virial": {"spacings": [0.0625, 0.03125]}})
    out = tmp_path / "r.csv"
    assert main(["verify", str(write(tmp_path, d)), "--out", str(out), "--format", "csv"]) == 0
    with open(tmp_path / "r.virial.csv") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["h", "surface_term", "volume_term", "residual", "control_residual"]
    hs = [float(r[0]) for r in rows[1:]]
    assert hs == sorted(hs, reverse=True)
    with open(out) as fh:
        summary = dict(csv.reader(fh))
    assert summary["results.chain.verdict"] == "PositiveTotal"


def test_io_failure():
    rep = run(validate(FULL))
    with pytest.raises(rp.IoFailure):
        rp.emit_report(rep, "/nonexistent/dir/r.json")


def test_provenance_lists_tolerances_and_seed(tmp_path):
    rep = run_scenario(write(tmp_path, FULL), seed=42)
    prov = rep.provenance
    assert prov["seed"] == 42 and rep.scenario["seed"] == 42
    assert prov["tolerances"]["saturation_rel"] == 1e-12
    assert prov["tolerances"]["equilibrium_residual"] == 1e-6
    assert prov["constants"]["hbar_J_s"] > 0


def test_report_diff(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    p = write(tmp_path, FULL)
    main(["verify", str(p), "--out", str(a)])
    main(["verify", str(p), "--out", str(b), "--seed", "3"])
    capsys.readouterr()
    assert main(["report", "--diff", str(a), str(a)]) == 0
    assert main(["report", "--diff", str(a), str(b)]) == 2
    assert "/scenario/seed" in capsys.readouterr().out


def test_diff_structure():
    d = rp.diff({"a": 1, "b": [1, 2]}, {"a": 2, "b": [1, 2], "c": 0})
    assert ("/a", 1, 2) in d and ("/c", "<missing>", 0) in d and len(d) == 2


def test_modes_command(tmp_path):
    out = tmp_path / "m.csv"
    assert main(["modes", "Box", "--n-max", "1", "--out", str(out)]) == 0
    rows = list(csv.reader(out.open()))
    assert float(rows[1][0]) == pytest.approx(1.5 * math.pi)


def test_determinism_across_threads(tmp_path):
    d = scenario("CheckConditions", {"diagonal": [1.0, 0.3, -0.2, 0.5], "observers": 20000}, seed=9)
    p = write(tmp_path, d)
    ref = rp.results_bytes(run_scenario(p, threads=1))
    for t in (2, 4):
        assert rp.results_bytes(run_scenario(p, threads=t)) == ref
