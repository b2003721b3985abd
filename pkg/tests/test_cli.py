"""Command-line front end: exit-code contract, artifact files, config
handling, and byte-level determinism."""

import json

import numpy as np
import pytest

from hamrep import cli
from hamrep.representation import load_trace_csv


def run(*argv):
    return cli.main(list(argv))


@pytest.fixture(scope="module")
def represent_ex2(tmp_path_factory):
    out = tmp_path_factory.mktemp("rep_ex2")
    code = run("represent", "--example", "EX2", "--out", str(out),
               "--seed", "0")
    return code, out


@pytest.fixture(scope="module")
def bolza_ex2(tmp_path_factory):
    out = tmp_path_factory.mktemp("bolza_ex2")
    code = run("bolza", "--example", "EX2", "--Nt", "10", "--Nx", "61",
               "--out", str(out))
    return code, out


# ============================================================
# usage errors
# ============================================================

class TestUsage:
    def test_unknown_example(self, tmp_path, capsys):
        assert run("represent", "--example", "NOPE",
                   "--out", str(tmp_path)) == 64
        assert "unknown example" in capsys.readouterr().err

    def test_example_and_model_file_are_exclusive(self, tmp_path):
        assert run("represent", "--out", str(tmp_path)) == 64
        assert run("represent", "--example", "EX1", "--model-file", "x.json",
                   "--out", str(tmp_path)) == 64

    def test_bad_subcommand_and_flags(self):
        assert run("frobnicate") == 64
        assert run("verify", "--example", "EX1", "--check", "NOPE") == 64

    def test_help_exits_zero(self):
        assert run("--help") == 0

    def test_parameter_validation(self, tmp_path):
        assert run("stability", "--example", "EX2", "--imax", "2",
                   "--out", str(tmp_path)) == 64
        assert run("bolza", "--example", "EX2", "--Nt", "0",
                   "--out", str(tmp_path)) == 64
        assert run("verify", "--example", "EX1", "--seed", "-1",
                   "--out", str(tmp_path)) == 64


# ============================================================
# config files
# ============================================================

class TestConfigFile:
    def test_config_supplies_flags(self, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("example = EX1\ncheck = HLC\n# comment\nseed = 3\n")
        out = tmp_path / "out"
        assert run("verify", "--config", str(cfg), "--out", str(out)) == 0
        payload = json.loads((out / "verify_report.json").read_text())
        assert [r["condition"] for r in payload["reports"]] == ["HLC"]

    def test_explicit_flag_overrides_config(self, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("example = EX1\ncheck = HLC\n")
        out = tmp_path / "out"
        assert run("verify", "--config", str(cfg), "--check", "BLC",
                   "--out", str(out)) == 0
        payload = json.loads((out / "verify_report.json").read_text())
        assert [r["condition"] for r in payload["reports"]] == ["BLC"]

    def test_unknown_key_rejected(self, tmp_path, capsys):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("examplee = EX1\n")
        assert run("verify", "--config", str(cfg)) == 64
        assert "unknown config key" in capsys.readouterr().err

    def test_malformed_line_rejected(self, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("just words\n")
        assert run("verify", "--config", str(cfg)) == 64

    def test_missing_config_file(self, tmp_path):
        assert run("verify", "--example", "EX1",
                   "--config", str(tmp_path / "absent.cfg")) == 64


# ============================================================
# represent
# ============================================================

class TestRepresent:
    def test_ex2_passes(self, represent_ex2):
        code, _ = represent_ex2
        assert code == 0

    def test_audit_json_contents(self, represent_ex2):
        _, out = represent_ex2
        audit = json.loads((out / "audit.json").read_text())
        assert audit["passed"] is True
        assert audit["reason"] == "OK"
        assert audit["seed"] == 0
        assert audit["sup_formula"]["residual_min"] >= -1e-9
        assert audit["sup_formula"]["residual_max"] <= 5e-2
        assert audit["sandwich"]["membership_min_slack"] >= -1e-6
        assert audit["sandwich"]["velocity_coverage"] == 1.0
        assert audit["lipschitz"]["passed"] is True
        assert audit["growth"]["worst_excess"] <= 1e-9

    def test_trace_csv_loads(self, represent_ex2):
        _, out = represent_ex2
        trace = load_trace_csv(str(out / "representation_trace.csv"))
        assert trace.controls.shape[0] > 256
        assert np.all(np.isfinite(trace.e))

    def test_ex4_blc_pathway(self, tmp_path, capsys):
        code = run("represent", "--example", "EX4", "--out", str(tmp_path))
        assert code == 2
        assert "reason=BLC_VIOLATED" in capsys.readouterr().out
        audit = json.loads((tmp_path / "audit.json").read_text())
        assert audit["passed"] is False
        assert audit["reason"] == "BLC_VIOLATED"


# ============================================================
# verify
# ============================================================

class TestVerify:
    def test_hlc_with_empirical_constant(self, tmp_path, capsys):
        assert run("verify", "--example", "EX1", "--check", "HLC",
                   "--out", str(tmp_path)) == 0
        assert "HLC=pass" in capsys.readouterr().out
        payload = json.loads((tmp_path / "verify_report.json").read_text())
        (rep,) = payload["reports"]
        assert rep["condition"] == "HLC"
        assert 0.0 < rep["empirical_constant"] <= 1.0
        assert (tmp_path / "verify_report.csv").exists()

    def test_all_conditions_on_ex2(self, tmp_path):
        assert run("verify", "--example", "EX2", "--out", str(tmp_path)) == 0
        payload = json.loads((tmp_path / "verify_report.json").read_text())
        names = {r["condition"] for r in payload["reports"]}
        assert {"H1", "H2", "H3", "H4", "HLC", "LLC", "ELC",
                "BLC"} <= names
        assert all(r["passed"] for r in payload["reports"])

    def test_ex4_blc_violation(self, tmp_path, capsys):
        assert run("verify", "--example", "EX4", "--check", "BLC",
                   "--out", str(tmp_path)) == 2
        assert "reason=BLC_VIOLATED" in capsys.readouterr().out


# ============================================================
# stability
# ============================================================

class TestStability:
    def test_shift_family_passes(self, tmp_path, capsys):
        assert run("stability", "--example", "EX2", "--rule", "shift",
                   "--imax", "64", "--out", str(tmp_path)) == 0
        text = capsys.readouterr().out
        assert "stability=pass" in text
        payload = json.loads((tmp_path / "stability_report.json").read_text())
        assert payload["passed"] is True
        assert payload["schedule"] == [1, 2, 4, 8, 16, 32, 64]
        assert payload["r_squared"] >= 0.99
        lines = (tmp_path / "stability_deviations.csv") \
            .read_text().splitlines()
        assert lines[0] == "index,deviation"
        assert len(lines) == 8


# ============================================================
# bolza
# ============================================================

class TestBolza:
    def test_minima_agree(self, bolza_ex2, capsys):
        code, out = bolza_ex2
        assert code == 0
        payload = json.loads((out / "bolza_report.json").read_text())
        assert payload["passed"] is True
        assert abs(payload["min_variational"] + 1.0) <= 1e-9
        assert payload["gap"] <= payload["tolerance"]
        assert payload["min_variational"] >= payload["lower_bound"]

    def test_artifact_files(self, bolza_ex2):
        _, out = bolza_ex2
        value_lines = (out / "bolza_value.csv").read_text().splitlines()
        assert value_lines[0] == "t,x,V"
        assert len(value_lines) == 1 + 11 * 61
        arc_v = (out / "bolza_arc_variational.csv").read_text().splitlines()
        arc_c = (out / "bolza_arc_control.csv").read_text().splitlines()
        assert arc_v[0] == "t,x"
        assert arc_c[0] == "t,x,a1,a2"
        assert len(arc_v) == 12 and len(arc_c) == 12

    def test_ex4_blc_pathway(self, tmp_path, capsys):
        assert run("bolza", "--example", "EX4", "--Nt", "5", "--Nx", "31",
                   "--out", str(tmp_path)) == 2
        assert "reason=BLC_VIOLATED" in capsys.readouterr().out
        payload = json.loads((tmp_path / "bolza_report.json").read_text())
        assert payload["reason"] == "BLC_VIOLATED"


# ============================================================
# grid model files
# ============================================================

class TestModelFile:
    def test_sampled_grid_model_runs(self, tmp_path, catalog):
        e = catalog["EX2"]
        tn = np.linspace(0.0, 1.0, 3)
        xn = np.linspace(-2.0, 2.0, 21)
        pn = np.linspace(-20.0, 20.0, 401)
        H = [[list(map(float, e.hamiltonian.H(t, x, pn))) for x in xn]
             for t in tn]
        path = tmp_path / "model.json"
        path.write_text(json.dumps({
            "name": "ex2-grid", "t_nodes": list(tn), "x_nodes": list(xn),
            "p_nodes": list(pn), "H": H, "c": 1.0, "k_R": 1.0,
            "lambda": 2.0}))
        out = tmp_path / "out"
        assert run("verify", "--model-file", str(path), "--check", "HLC",
                   "--out", str(out)) == 0

    def test_bad_model_file(self, tmp_path):
        path = tmp_path / "model.json"
        path.write_text('{"t_nodes": [0.0]}')
        assert run("verify", "--model-file", str(path),
                   "--out", str(tmp_path)) == 64
        assert run("verify", "--model-file", str(tmp_path / "absent.json"),
                   "--out", str(tmp_path)) == 64


# ============================================================
# determinism and environment
# ============================================================

class TestDeterminism:
    def test_verify_outputs_byte_identical(self, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        for out in (a, b):
            assert run("verify", "--example", "EX1", "--check", "HLC",
                       "--out", str(out), "--seed", "7") == 0
        assert (a / "verify_report.json").read_bytes() \
            == (b / "verify_report.json").read_bytes()
        assert (a / "verify_report.csv").read_bytes() \
            == (b / "verify_report.csv").read_bytes()

    def test_bolza_outputs_byte_identical(self, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        for out in (a, b):
            assert run("bolza", "--example", "EX2", "--Nt", "6", "--Nx",
                       "41", "--out", str(out), "--seed", "1") == 0
        for name in ("bolza_report.json", "bolza_value.csv",
                     "bolza_arc_control.csv"):
            assert (a / name).read_bytes() == (b / name).read_bytes()

    def test_thread_cap_env(self, monkeypatch, capsys):
        monkeypatch.setenv("HAMREP_THREADS", "1")
        assert run("catalog") == 0
        monkeypatch.setenv("HAMREP_THREADS", "bogus")
        assert run("catalog") == 0
        assert "EX2" in capsys.readouterr().out
