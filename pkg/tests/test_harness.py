import json

import numpy as np
import pytest
from click.testing import CliRunner

from rieszvar import build_grid, emit_report, sample_catalog, write_field
from rieszvar.cli import main
from rieszvar.config import load_config, materialize_level
from rieszvar.errors import ConfigError
from rieszvar.harness import run_config, verify_theorem1
from rieszvar.report import (
    Report,
    ReportRow,
    report_from_json,
    report_to_csv,
    report_to_json,
)


def minimal_config(**overrides):
    data = {
        "grid": {"dim": 1, "bounds": [[0.0, 1.0]], "h": 1 / 256},
        "function": {"catalog": "linear", "params": {"slope": 1.0}},
        "weight": {"catalog": "constant", "params": {"value": 1.0}},
        "radii": [1 / 8, 1 / 16, 1 / 32],
        "p_values": [2.0],
        "suites": ["theorem1"],
        "seed": 0,
    }
    data.update(overrides)
    return data


class TestConfigValidation:
    def test_minimal_loads(self):
        cfg = load_config(minimal_config())
        assert cfg.dim == 1 and cfg.p_values == (2.0,)

    def test_unknown_catalog(self):
        with pytest.raises(ConfigError) as err:
            load_config(minimal_config(function={"catalog": "nosuch"}))
        assert "function.catalog" in str(err.value)

    def test_threshold_not_above_one(self):
        with pytest.raises(ConfigError):
            load_config(minimal_config(thresholds={"c_eq": 1.0}))

    def test_bad_bounds_multiple(self):
        with pytest.raises(ConfigError):
            load_config(minimal_config(grid={"dim": 1, "bounds": [[0.0, 1.0]], "h": 0.3}))

    def test_radius_below_2h(self):
        with pytest.raises(ConfigError):
            load_config(minimal_config(radii=[1 / 1024]))

    def test_unknown_suite(self):
        with pytest.raises(ConfigError):
            load_config(minimal_config(suites=["nosuch"]))

    def test_config_hash_stable(self):
        a = load_config(minimal_config()).config_hash()
        b = load_config(minimal_config()).config_hash()
        assert a == b and len(a) == 64


class TestRunConfig:
    def test_minimal_theorem1_passes(self):
        report = run_config(load_config(minimal_config()))
        variations = [r for r in report.rows if r.quantity == "variation"]
        assert variations and variations[0].value == pytest.approx(2.0, rel=0.05)
        assert not report.has_failures()

    def test_empty_suites_empty_report(self):
        report = run_config(load_config(minimal_config(suites=[])))
        assert report.rows == ()
        assert not report.has_failures()

    def test_two_runs_identical_values(self):
        cfg = minimal_config(suites=["theorem1", "weak_type", "lemma21"],
                             function={"catalog": "hat", "params": {"radius": 0.4,
                                                                    "center": 0.5}})
        a = run_config(load_config(cfg))
        b = run_config(load_config(cfg))
        strip = lambda rep: [
            (r.experiment, r.quantity, r.params, r.value, r.tolerance, r.status)
            for r in rep.rows
        ]
        assert strip(a) == strip(b)

    def test_verify_theorem1_two_sided_rows(self):
        cfg = load_config(minimal_config(refinements=2))
        rows = verify_theorem1(cfg)
        kinds = {r.quantity for r in rows}
        assert "ratio_var_over_grad" in kinds
        assert "ratio_grad_over_var_drift" in kinds

    def test_p_equals_n_is_left_only(self):
        # at p = 1 = dim, p > n * rw fails, so only the gradient-side row exists
        cfg = load_config(minimal_config(p_values=[1.0]))
        rows = verify_theorem1(cfg)
        kinds = [r.quantity for r in rows]
        assert "ratio_grad_over_var" in kinds
        assert "ratio_var_over_grad" not in kinds

    def test_varexp_suites(self):
        cfg = load_config(minimal_config(
            suites=["gd_equivalence", "varexp_sobolev"],
            exponent={"catalog": "affine", "params": {"intercept": 3.0, "slope": 1.0}},
            refinements=2,
        ))
        report = run_config(cfg)
        assert not report.has_failures()
        assert any(r.quantity == "ratio" for r in report.rows)


class TestReportEmission:
    def sample_report(self):
        rows = (
            ReportRow("exp", "value", "p=2.0", 1.5, 0.1, "pass", 12),
            ReportRow("exp", "other", "", float("inf"), float("nan"), "info", 0),
        )
        return Report(rows=rows, config_hash="abc", seed=7)

    def test_csv_layout(self, tmp_path):
        report = self.sample_report()
        path = tmp_path / "report.csv"
        emit_report(report, path, "csv")
        lines = path.read_text().splitlines()
        assert lines[0] == "experiment,quantity,params,value,tolerance,status,runtime_ms"
        assert len(lines) == 3

    def test_json_round_trip(self):
        report = self.sample_report()
        back = report_from_json(report_to_json(report))
        assert back.rows[0] == report.rows[0]
        assert back.seed == report.seed and back.config_hash == report.config_hash

    def test_emit_deterministic_bytes(self, tmp_path):
        report = self.sample_report()
        p1, p2 = tmp_path / "a.csv", tmp_path / "b.csv"
        emit_report(report, p1, "csv")
        emit_report(report, p2, "csv")
        assert p1.read_bytes() == p2.read_bytes()

    def test_unwritable_path(self, tmp_path):
        with pytest.raises(OSError):
            emit_report(self.sample_report(), tmp_path / "nodir" / "x.csv", "csv")

    def test_unknown_format(self, tmp_path):
        with pytest.raises(ValueError):
            emit_report(self.sample_report(), tmp_path / "x.xml", "xml")


class TestFileBasedFields:
    def test_function_from_grid_file(self, tmp_path):
        g = build_grid(1, [0.0], 1 / 256, [257])
        f = sample_catalog(g, "sinusoid", {"freq": 1.0})
        path = tmp_path / "f.grid"
        write_field(path, f)
        cfg = load_config(minimal_config(function={"file": str(path)}))
        grid, fld, w, _ = materialize_level(cfg)
        assert np.array_equal(fld.values, f.values)
        assert w.grid is grid

    def test_mismatched_file_grid_rejected(self, tmp_path):
        g = build_grid(1, [0.0], 1 / 128, [129])
        write_field(tmp_path / "f.grid", sample_catalog(g, "linear"))
        cfg = load_config(minimal_config(function={"file": str(tmp_path / "f.grid")}))
        with pytest.raises(ConfigError):
            materialize_level(cfg)

    def test_exponent_from_file(self, tmp_path):
        g = build_grid(1, [0.0], 1 / 256, [257])
        pvals = sample_catalog(g, "linear", {"slope": 1.0, "intercept": 2.0})
        path = tmp_path / "p.grid"
        write_field(path, pvals)
        cfg = load_config(minimal_config(exponent={"file": str(path)}))
        _, _, _, pfun = materialize_level(cfg)
        assert pfun.p_minus == pytest.approx(2.0)
        assert pfun.p_plus == pytest.approx(3.0)


class TestCli:
    def write_config(self, tmp_path, **overrides):
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps(minimal_config(**overrides)))
        return str(path)

    def test_catalog_lists_families(self):
        result = CliRunner().invoke(main, ["catalog"])
        assert result.exit_code == 0
        for name in ("linear", "power_weight", "step_exponent"):
            assert name in result.output

    def test_weights_csv_columns(self, tmp_path):
        cfg = self.write_config(tmp_path)
        result = CliRunner().invoke(main, ["weights", "--config", cfg])
        assert result.exit_code == 0
        header = result.output.splitlines()[0]
        assert header == "quantity,p_or_s,family,levels,value"

    def test_riesz_var_json_object(self, tmp_path):
        cfg = self.write_config(tmp_path)
        result = CliRunner().invoke(main, ["riesz-var", "--config", cfg])
        assert result.exit_code == 0
        payload = json.loads(result.output)
        for key in ("p", "method", "h", "radii", "total", "variation", "n_balls", "balls"):
            assert key in payload
        assert payload["variation"] == pytest.approx(2.0, rel=0.05)
        ball = payload["balls"][0]
        for key in ("center", "radius", "osc", "mass", "score"):
            assert key in ball

    def test_sobolev_json(self, tmp_path):
        cfg = self.write_config(tmp_path)
        result = CliRunner().invoke(main, ["sobolev", "--config", cfg])
        payload = json.loads(result.output)
        assert payload["total"] == pytest.approx(payload["lp"] + payload["grad_lp"])

    def test_varexp_requires_exponent(self, tmp_path):
        cfg = self.write_config(tmp_path)
        result = CliRunner().invoke(main, ["varexp", "--config", cfg])
        assert result.exit_code != 0

    def test_verify_pass_exit_zero(self, tmp_path):
        cfg = self.write_config(tmp_path)
        out = tmp_path / "report.csv"
        result = CliRunner().invoke(main, ["verify", "--config", cfg, "--out", str(out)])
        assert result.exit_code == 0
        assert out.exists()

    def test_verify_fail_exit_nonzero(self, tmp_path):
        cfg = self.write_config(tmp_path, thresholds={"bound_thm1": 1.0001})
        result = CliRunner().invoke(main, ["verify", "--config", cfg])
        assert result.exit_code == 1

    def test_verify_json_out(self, tmp_path):
        cfg = self.write_config(tmp_path)
        out = tmp_path / "report.json"
        result = CliRunner().invoke(
            main, ["verify", "--config", cfg, "--out", str(out), "--format", "json"]
        )
        assert result.exit_code == 0
        parsed = report_from_json(out.read_text())
        assert parsed.rows

    def test_seed_override_recorded(self, tmp_path):
        cfg = self.write_config(tmp_path)
        out = tmp_path / "report.json"
        CliRunner().invoke(
            main,
            ["verify", "--config", cfg, "--out", str(out), "--format", "json",
             "--seed", "99"],
        )
        assert report_from_json(out.read_text()).seed == 99

    def test_threads_env_fallback(self, tmp_path, monkeypatch):
        monkeypatch.setenv("TOOLKIT_THREADS", "4")
        cfg = self.write_config(tmp_path)
        result = CliRunner().invoke(main, ["sobolev", "--config", cfg])
        assert result.exit_code == 0
