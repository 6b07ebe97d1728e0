import json
import math

import numpy as np
import pytest

from holospin import cli


class TestParseConfig:
    def test_empty_document_resolves_reference_defaults(self):
        config = cli.parse_config("", "sweep-gamma")
        assert config.values["amp_stokes"] == 0.5
        assert config.values["tau_ps"] == 100.0
        assert config.values["delta_rad_per_ps"] == pytest.approx(1.016e-3)
        assert "amp_stokes" in config.defaults_used

    def test_unknown_key_named(self):
        with pytest.raises(cli.ConfigError, match="foo"):
            cli.parse_config("foo = 1\n", "init")

    def test_range_error(self):
        with pytest.raises(cli.ConfigError, match="delta_rad_per_ps"):
            cli.parse_config("delta_rad_per_ps = -1\n", "init")

    def test_malformed_line(self):
        with pytest.raises(cli.ConfigError, match="line 2"):
            cli.parse_config("tau_ps = 50\njust words\n", "init")

    def test_duplicate_key(self):
        with pytest.raises(cli.ConfigError, match="duplicate"):
            cli.parse_config("tau_ps = 50\ntau_ps = 60\n", "init")

    def test_comments_and_blanks_ignored(self):
        config = cli.parse_config("# comment\n\ntau_ps = 42 # inline\n", "init")
        assert config.values["tau_ps"] == 42.0

    def test_unknown_scenario(self):
        with pytest.raises(cli.ConfigError):
            cli.parse_config("", "fly")

    def test_gate_variant_defaults(self):
        config = cli.parse_config("variant = z_fractional\n", "gate")
        assert config.values["tau0_over_tau"] == 6.5
        assert config.values["stokes_phase_rad"] == pytest.approx(math.pi / 2)

    def test_sweep_ratio_validation(self):
        with pytest.raises(cli.ConfigError, match="sweep_ratios"):
            cli.parse_config("sweep_ratios = 3,2,1\n", "sweep-beta")
        with pytest.raises(cli.ConfigError, match="40"):
            cli.parse_config("sweep_ratios = 0,64\n", "sweep-beta")


class TestRun:
    def test_sweep_gamma_schema_and_plateau(self, tmp_path):
        config = cli.parse_config("", "sweep-gamma")
        status = cli.run(config, tmp_path)
        assert status == 0
        lines = (tmp_path / "sweep_gamma.csv").read_text().splitlines()
        assert lines[0] == "tau0_over_tau,gamma_f_rad,gamma_f_over_pi,quad_err"
        assert len(lines) == 10  # header + 9 default rows
        last = [float(x) for x in lines[-1].split(",")]
        assert last[2] == pytest.approx(0.25, abs=1e-4)

    def test_sweep_beta_csv(self, tmp_path):
        config = cli.parse_config("sweep_ratios = 0,1.5,3\n", "sweep-beta")
        assert cli.run(config, tmp_path) == 0
        lines = (tmp_path / "sweep_beta.csv").read_text().splitlines()
        assert lines[0] == "tau0_over_tau,beta_rad,beta_over_pi,quad_err"
        rows = [[float(x) for x in line.split(",")] for line in lines[1:]]
        assert rows[0][1] == 0.0
        assert rows[2][1] == pytest.approx(math.pi / 2, abs=1e-3)

    def test_byte_identical_reruns(self, tmp_path):
        config = cli.parse_config("sweep_ratios = 0,2,4\n", "sweep-gamma")
        cli.run(config, tmp_path / "a")
        cli.run(config, tmp_path / "b")
        assert ((tmp_path / "a" / "sweep_gamma.csv").read_bytes()
                == (tmp_path / "b" / "sweep_gamma.csv").read_bytes())

    def test_init_schema_and_manifest(self, tmp_path):
        config = cli.parse_config("duration_ps = 1000\nrecord_stride_ps = 250\n",
                                  "init")
        assert cli.run(config, tmp_path) == 0
        lines = (tmp_path / "init.csv").read_text().splitlines()
        assert lines[0] == "t_ps,rho00,rho11,rho_aa,rho_e1e1,rho_e2e2,fidelity"
        manifest = json.loads((tmp_path / "manifest.json").read_text())
        assert manifest["scenario"] == "init"
        assert manifest["exit_status"] == 0
        # every emitted file is referenced in the manifest
        emitted = {p.name for p in tmp_path.iterdir()}
        assert emitted == set(manifest["outputs"])

    def test_gate_scenario(self, tmp_path):
        text = "variant = y_closed_loop\ndecoherence = false\n"
        config = cli.parse_config(text, "gate")
        assert cli.run(config, tmp_path) == 0
        manifest = json.loads((tmp_path / "manifest.json").read_text())
        details = {c["name"]: c["detail"] for c in manifest["checks"]}
        assert "gate_fidelity" in details
        lines = (tmp_path / "gate_process.csv").read_text().splitlines()
        assert len(lines) == 5

    def test_readout_scenario(self, tmp_path):
        config = cli.parse_config("input_state = zero\nduration_ps = 5000\n",
                                  "readout")
        assert cli.run(config, tmp_path) == 0
        lines = (tmp_path / "readout.csv").read_text().splitlines()
        assert lines[1].startswith("zero,")

    def test_validate_scenario_passes(self, tmp_path):
        config = cli.parse_config("", "validate")
        assert cli.run(config, tmp_path) == 0
        rows = (tmp_path / "validate.csv").read_text().splitlines()[1:]
        assert all(",pass," in row for row in rows)

    def test_manifest_written_on_failure(self, tmp_path):
        # an unsatisfiable tolerance drives the quadrature into rejection
        config = cli.parse_config("", "sweep-gamma")
        config.values["sweep_ratios"] = (0.0, 1e6)  # far outside the family's range
        status = cli.run(config, tmp_path)
        manifest = json.loads((tmp_path / "manifest.json").read_text())
        assert manifest["exit_status"] == status


class TestMain:
    def test_config_error_exit_code(self, tmp_path):
        bad = tmp_path / "bad.cfg"
        bad.write_text("nope = 1\n")
        assert cli.main(["init", "--config", str(bad), "--out", str(tmp_path)]) == 1

    def test_missing_config_file(self, tmp_path):
        assert cli.main(["init", "--config", str(tmp_path / "absent.cfg"),
                         "--out", str(tmp_path)]) == 1

    def test_bad_threads(self, tmp_path):
        assert cli.main(["validate", "--threads", "0", "--out", str(tmp_path)]) == 1

    def test_sweep_runs_end_to_end(self, tmp_path):
        cfg = tmp_path / "ok.cfg"
        cfg.write_text("sweep_ratios = 0,3\n")
        status = cli.main(["sweep-beta", "--config", str(cfg),
                           "--out", str(tmp_path / "out"), "--threads", "2"])
        assert status == 0
        assert (tmp_path / "out" / "sweep_beta.csv").exists()
