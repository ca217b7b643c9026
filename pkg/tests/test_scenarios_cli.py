import json

import pytest

from modstab import builtin_scenarios, list_builtin_scenarios, run_scenario
from modstab.cli import main as cli_main
from modstab.report import SCHEMA


def small_stability_config(**overrides):
    cfg = {
        "name": "mini",
        "algebra": {"preset": "matrix2"},
        "modular": {"kind": "norm", "kappa": 2.0},
        "map": {
            "kernel": {"form": "commutator", "c": [1.0, 0.0]},
            "perturbation": {"name": "bounded_osc", "epsilon": 0.01, "boundary_safe": True},
        },
        "psi": {"form": "power", "theta": "calibrate", "p": 0.5, "direction": "ascending"},
        "s": [0.5, 0.0],
        "rho_tilde_weight": "psi_xx_z0",
        "probes": {"count": 32, "radius": 1.0, "seed": 3},
        "iteration": {"direction": "ascending", "n_max": 40, "tol": 1e-10},
        "checks": ["inequality_A", "stability_bound", "biadditivity"],
    }
    cfg.update(overrides)
    return cfg


def test_catalog_contents():
    names = list_builtin_scenarios()
    assert len(names) >= 6
    assert "superstability-commutator" in names
    assert "lemma-falsifier" in names


@pytest.mark.parametrize("name", sorted(builtin_scenarios()))
def test_every_builtin_runs_without_config_error(name):
    result = run_scenario(name)
    assert result.exit_code != 2


def test_builtin_expected_exit_codes():
    assert run_scenario("superstability-commutator").exit_code == 0
    assert run_scenario("lemma-falsifier").exit_code == 1
    assert run_scenario("axioms-suite").exit_code == 0


def test_invalid_s_exits_two():
    result = run_scenario(small_stability_config(s=[1.5, 0.0]))
    assert result.exit_code == 2
    assert not result.records[0].passed
    assert "s" in result.records[0].payload["error"]


def test_zero_s_exits_two():
    assert run_scenario(small_stability_config(s=[0.0, 0.0])).exit_code == 2


def test_unknown_check_exits_two():
    result = run_scenario(small_stability_config(checks=["inequality_A", "nonsense"]))
    assert result.exit_code == 2


def test_unknown_preset_exits_two():
    result = run_scenario(small_stability_config(algebra={"preset": "octonions"}))
    assert result.exit_code == 2


def test_direction_mismatch_exits_two():
    cfg = small_stability_config()
    cfg["iteration"]["direction"] = "descending"
    assert run_scenario(cfg).exit_code == 2


def test_power_env_direction_guard():
    cfg = small_stability_config()
    cfg["map"]["perturbation"] = {"name": "power_env", "epsilon": 0.01, "p": 2.0}
    assert run_scenario(cfg).exit_code == 2  # p > 1 cannot ride an ascending run


def test_small_scenario_passes_and_reports_theta():
    result = run_scenario(small_stability_config())
    assert result.exit_code == 0
    echo = result.records[0]
    assert echo.stage == "config"
    assert echo.payload["theta"] > 0
    assert echo.payload["L"] == pytest.approx(2.0 ** (-0.5))


def test_seed_and_probe_overrides():
    base = run_scenario(small_stability_config())
    other = run_scenario(small_stability_config(), seed_override=99, probes_override=48)
    assert other.exit_code == 0
    assert other.records[0].payload["probes"] == {"count": 48, "radius": 1.0, "seed": 99}
    assert base.records[0].payload["probes"]["seed"] == 3


def test_payload_lines_are_deterministic():
    a = run_scenario("corollary-descending-p2")
    b = run_scenario("corollary-descending-p2")
    lines_a = [r.to_json() for r in a.records]
    lines_b = [r.to_json() for r in b.records]
    assert lines_a == lines_b
    ha = {k: v for k, v in a.header.items() if k != "created_at"}
    hb = {k: v for k, v in b.header.items() if k != "created_at"}
    assert ha == hb


def test_exit_code_is_a_function_of_records():
    result = run_scenario("lemma-falsifier")
    fails = [r for r in result.records if not r.advisory and not r.passed]
    assert result.exit_code == (1 if fails else 0)
    assert all(r.payload["check"] == "inequality_A" for r in fails)


def test_overflow_abort_becomes_failing_record():
    cfg = small_stability_config()
    cfg["iteration"]["magnitude_cap"] = 1e3
    result = run_scenario(cfg)
    assert result.exit_code == 1
    aborts = [r for r in result.records if r.stage == "iterate" and "error" in r.payload]
    assert aborts and aborts[0].payload["level"] is not None


def test_iterate_records_streamed():
    result = run_scenario(small_stability_config())
    levels = [r.payload["level"] for r in result.records if r.stage == "iterate"]
    assert levels == sorted(levels) and len(levels) >= 2
    out = result.context["outcome"]
    assert out.N_converged == levels[-1]


def test_axioms_suite_broken_fixture_detected():
    result = run_scenario("axioms-suite")
    rows = [
        r.payload
        for r in result.records
        if r.payload.get("check") == "modular_axiom" and r.payload["fixture"] == "dead-zone-broken"
    ]
    flagged = [p for p in rows if p["axiom"] == "i"]
    assert flagged and flagged[0]["expected_violation"]
    assert result.exit_code == 0


# --- CLI ----------------------------------------------------------------------


def test_cli_list(capsys):
    assert cli_main(["list"]) == 0
    out = capsys.readouterr().out.strip().splitlines()
    assert "corollary-ascending-p05" in out


def test_cli_norm_one_shot(capsys):
    assert cli_main(["norm", "power:2", "[3, 4]"]) == 0
    assert float(capsys.readouterr().out.strip()) == pytest.approx(5.0, abs=1e-9)


def test_cli_norm_complex_entries(capsys):
    assert cli_main(["norm", "norm", "[[3, 0], [0, 4]]"]) == 0
    assert float(capsys.readouterr().out.strip()) == pytest.approx(5.0, abs=1e-9)


def test_cli_norm_bad_modular(capsys):
    assert cli_main(["norm", "weird", "[1]"]) == 2


def test_cli_decompose(capsys):
    assert cli_main(["decompose", "3", "0"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    vals = [complex(float(l.split()[0]), float(l.split()[1])) for l in lines[:3]]
    assert vals == [1.0 + 0j, 1.0 + 0j, 1.0 + 0j]


def test_cli_decompose_out_of_disc(capsys):
    assert cli_main(["decompose", "4", "0"]) == 2


def test_cli_run_builtin_to_file(tmp_path, capsys):
    out = tmp_path / "report.jsonl"
    code = cli_main(["run", "superstability-commutator", "--out", str(out), "--quiet"])
    assert code == 0
    lines = out.read_text().strip().splitlines()
    header = json.loads(lines[0])
    assert header["schema"] == SCHEMA
    assert "config_hash" in header and "created_at" in header
    body = [json.loads(l) for l in lines[1:]]
    assert all({"scenario", "stage", "pass", "payload"} <= set(doc) for doc in body)
    assert body[0]["stage"] == "config"


def test_cli_run_config_file(tmp_path):
    path = tmp_path / "mini.json"
    path.write_text(json.dumps(small_stability_config()))
    assert cli_main(["run", str(path), "--quiet"]) == 0


def test_cli_run_missing_config_exits_two(tmp_path):
    assert cli_main(["run", str(tmp_path / "nope.json"), "--quiet"]) == 2


def test_cli_run_invalid_json_exits_two(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{not json")
    assert cli_main(["run", str(path), "--quiet"]) == 2
