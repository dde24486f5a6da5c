import json
import subprocess
import sys
from pathlib import Path

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ionmirror import cli, model
from ionmirror import config as cfgmod
from ionmirror.errors import ConfigInvalid
from ionmirror.units import parse_quantity

CONFIGS = Path(__file__).resolve().parents[1] / "configs"


# ---------------------------------------------------------------------------
# units and documents

@pytest.mark.parametrize(
    "text,kind,value",
    [
        ("3 MHz", "frequency", 3.0),
        ("150 kHz", "frequency", 0.15),
        ("12 GHz", "frequency", 12000.0),
        ("2.5e6 rad/s", "frequency", 2.5),
        ("20 us", "time", 20.0),
        ("1 ms", "time", 1000.0),
        (0.7, "frequency", 0.7),
    ],
)
def test_parse_quantity(text, kind, value):
    assert parse_quantity(text, kind) == pytest.approx(value)


@pytest.mark.parametrize("bad", ["3 furlongs", "MHz", "", True, None])
def test_parse_quantity_rejects(bad):
    with pytest.raises(ConfigInvalid):
        parse_quantity(bad, "frequency")


@settings(max_examples=30, deadline=None)
@given(
    ga=st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False),
    w=st.floats(0.1, 100),
    k=st.floats(-1e7, 1e7),
)
def test_raman_params_round_trip(ga, w, k):
    p = model.RamanParams(w, 0.0, 3.0, 1e5, 1e5 + 40.0, 1e5 + 37.0, ga, 1.0, (0, 0, k), (k, 0, 0))
    back = cfgmod.raman_params_from_dict(json.loads(json.dumps(cfgmod.raman_params_to_dict(p))))
    assert back == p


def test_beam_round_trip_and_rejects_unknown():
    beam = model.BeamSpec(-3.0785, 0.3, (0.1, 0.2), 5)
    assert cfgmod.beam_from_dict(cfgmod.beam_to_dict(beam)) == beam
    with pytest.raises(ConfigInvalid):
        cfgmod.beam_from_dict({"strength": 1.0, "eta": 0.1, "colour": "red"})


def test_validate_config_defaults_and_units():
    cfg = cfgmod.validate_config({"params": {"g1": "6 MHz"}}, "design")
    assert cfg["params"]["g1"] == 6.0
    assert cfg["thresholds"]["pulse_time_target"] == 20.0


@pytest.mark.parametrize(
    "doc",
    [
        {"params": {"bogus": 1}},
        {"extra_block": {}},
        {"scenario": "design"},
        {"space": {"cutoffs": {"w": 4}}},
        {"space": {"cutoffs": {"z": 0}}},
        {"run": {"seed": "zero"}},
    ],
)
def test_validate_config_rejects(doc):
    with pytest.raises(ConfigInvalid):
        cfgmod.validate_config(doc, "parity-ideal")


# ---------------------------------------------------------------------------
# command line

def _run(tmp_path, scenario, config=None, name="out", seed=None):
    out = tmp_path / name
    code = cli.run_scenario(scenario, config, out, seed)
    return code, out


def test_design_report(tmp_path):
    code, out = _run(tmp_path, "design", CONFIGS / "design.json")
    assert code == 0
    doc = json.loads((out / "design.json").read_text())
    assert doc["schema_version"] == cfgmod.SCHEMA_VERSION
    assert doc["results"]["g_parity_kHz"] == pytest.approx(150.0)
    assert doc["results"]["pulse_time_us"] == pytest.approx(20.94, abs=0.005)
    for check in doc["checks"]:
        assert "threshold" in check and "value" in check


def test_parity_ideal_default(tmp_path):
    code, out = _run(tmp_path, "parity-ideal")
    assert code == 0
    doc = json.loads((out / "parity-ideal.json").read_text())
    assert 1 - doc["results"]["gate_fidelity"] <= 1e-10
    assert (out / "parity-ideal-trajectory.csv").exists()


def test_parity_two_beam_golden(tmp_path):
    code, out = _run(tmp_path, "parity-two-beam", CONFIGS / "parity-two-beam.json")
    assert code == 0
    doc = json.loads((out / "parity-two-beam.json").read_text())
    assert doc["checks"][0]["name"] == "golden_gate_fidelity_deviation"
    assert doc["checks"][0]["value"] <= 1e-6


def test_threshold_failure_exit_code(tmp_path):
    path = tmp_path / "strict.json"
    path.write_text(json.dumps({"thresholds": {"min_gate_fidelity": 0.99}}))
    code, _ = _run(tmp_path, "parity-two-beam", path)
    assert code == cli.EXIT_THRESHOLD


def test_config_error_exit_code(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"params": {"g": "1 MHz", "unknown": 2}}))
    assert _run(tmp_path, "parity-ideal", path)[0] == cli.EXIT_CONFIG
    path.write_text("{not json")
    assert _run(tmp_path, "parity-ideal", path)[0] == cli.EXIT_CONFIG
    path.write_text(json.dumps({"params": {"eta1": 0.3, "eta2": 0.3}}))
    assert _run(tmp_path, "design", path)[0] == cli.EXIT_CONFIG


def test_io_error_exit_code(tmp_path):
    assert _run(tmp_path, "design", tmp_path / "missing.json")[0] == cli.EXIT_IO
    blocker = tmp_path / "file"
    blocker.write_text("x")
    assert cli.run_scenario("design", None, blocker / "sub") == cli.EXIT_IO


def test_commuting_counterexample_rejected(tmp_path):
    code, out = _run(tmp_path, "time-reversal", CONFIGS / "time-reversal-commuting.json")
    assert code == 0
    assert json.loads((out / "time-reversal.json").read_text())["results"]["rejected"] is True


@pytest.mark.parametrize("scenario,config", [("parity-ideal", "parity-ideal.json"),
                                             ("parity-two-beam", "parity-two-beam.json")])
def test_seeded_runs_byte_identical(tmp_path, scenario, config):
    _, a = _run(tmp_path, scenario, CONFIGS / config, "a", seed=3)
    _, b = _run(tmp_path, scenario, CONFIGS / config, "b", seed=3)
    doc_a = json.loads((a / f"{scenario}.json").read_text())
    doc_b = json.loads((b / f"{scenario}.json").read_text())
    assert cfgmod.dumps_report(cli.comparable_report(doc_a)) == cfgmod.dumps_report(cli.comparable_report(doc_b))
    for csv_a in sorted(a.glob("*.csv")):
        assert csv_a.read_bytes() == (b / csv_a.name).read_bytes()
    _, c = _run(tmp_path, scenario, CONFIGS / config, "c", seed=4)
    doc_c = json.loads((c / f"{scenario}.json").read_text())
    assert doc_c["results"] != doc_a["results"]


def test_emit_plots(tmp_path):
    out = tmp_path / "plots"
    assert cli.main(["not-gate", "--out", str(out), "--emit-plots"]) == 0
    svg = (out / "not-gate-fidelity.svg").read_text()
    assert svg.lstrip().startswith("<?xml") and "<svg" in svg


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "ionmirror", "design", "--out", str(tmp_path)],
                          capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert "[PASS] pulse_time_relative_error" in proc.stdout


def test_eta_sweep_script(tmp_path):
    script = Path(__file__).resolve().parents[1] / "scripts" / "eta_sweep.py"
    proc = subprocess.run([sys.executable, str(script), "--etas", "0.05", "0.1", "--out", str(tmp_path)],
                          capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    doc = json.loads((tmp_path / "eta-sweep.json").read_text())
    assert len(doc["infidelity"]) == 2 and doc["infidelity"][0] < doc["infidelity"][1]
