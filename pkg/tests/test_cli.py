import json

import numpy as np
import pytest

from conftest import encodable_profile
from esrl.cli import main
from esrl.profile import load_profile, save_profile


@pytest.fixture()
def profile_path(tmp_path):
    rng = np.random.default_rng(0)
    p = encodable_profile(rng, 4, 6, 1, rho=1, Z=4, density=0.6)
    path = tmp_path / "profile.txt"
    save_profile(p, path)
    return str(path)


def design_config(tmp_path, **extra):
    cfg = dict(m_prime=4, n_prime=8, m=6, n=10, rho=1, omega=1, L=3,
               g_target=6, eta_ace=1, eta_ace_ime=0, I_HRC=2, I_IME=2,
               I_MP=5, n_degree_candidates=4, rca_iters=120,
               rca_resolution_db=0.1, rca_bracket=[-4.0, 12.0], seed=0,
               out=str(tmp_path / "designed.txt"))
    cfg.update(extra)
    path = tmp_path / "design.json"
    path.write_text(json.dumps(cfg))
    return str(path), cfg


class TestValidate:
    def test_good_profile(self, tmp_path, capsys):
        cfg_path, cfg = design_config(tmp_path)
        assert main(["design", "--config", cfg_path]) == 0
        capsys.readouterr()
        assert main(["validate", cfg["out"]]) == 0
        assert "profile ok" in capsys.readouterr().out

    def test_corrupt_profile(self, tmp_path, capsys):
        bad = tmp_path / "bad.txt"
        bad.write_text("not a profile\n")
        assert main(["validate", str(bad)]) == 1

    def test_missing_file(self, tmp_path):
        assert main(["validate", str(tmp_path / "nope.txt")]) == 1


class TestAnalyze:
    def test_json_fields(self, profile_path, capsys):
        assert main(["analyze", profile_path, "--lengths", "4,6"]) == 0
        out = json.loads(capsys.readouterr().out)
        assert set(out["lengths"]) == {"4", "6"}
        for entry in out["lengths"].values():
            assert entry["total"] >= 0
            assert len(entry["per_vn"]) == load_profile(profile_path).n

    def test_optimize_moves_reported(self, profile_path, tmp_path):
        out = tmp_path / "analysis.json"
        assert main(["analyze", profile_path, "--optimize-length", "4",
                     "--out", str(out)]) == 0
        data = json.loads(out.read_text())
        assert "reallocations" in data

    def test_bad_length_is_usage_error(self, profile_path):
        assert main(["analyze", profile_path, "--lengths", "5"]) == 2


class TestThreshold:
    def test_json_output(self, profile_path, capsys):
        assert main(["threshold", "--profile", profile_path, "--L", "3",
                     "--i-rca", "150", "--resolution-db", "0.1",
                     "--bracket=-4,12"]) == 0
        out = json.loads(capsys.readouterr().out)
        assert set(out) == {"rate", "threshold_db", "esn0_db",
                            "iterations_used"}
        assert "/" in out["rate"]

    def test_config_file_with_flag_override(self, profile_path, tmp_path,
                                            capsys):
        cfg = tmp_path / "thr.json"
        cfg.write_text(json.dumps({
            "profile": profile_path, "L": 3, "i_rca": 150,
            "resolution_db": 0.5, "bracket": [-4, 12]}))
        assert main(["threshold", "--config", str(cfg)]) == 0
        a = json.loads(capsys.readouterr().out)
        assert main(["threshold", "--config", str(cfg),
                     "--resolution-db", "0.1"]) == 0
        b = json.loads(capsys.readouterr().out)
        assert b["threshold_db"] <= a["threshold_db"] + 1e-9

    def test_sweep_writes_csv(self, profile_path, tmp_path):
        out = tmp_path / "sweep.csv"
        assert main(["threshold", "--profile", profile_path, "--L", "3",
                     "--i-rca", "120", "--resolution-db", "0.2",
                     "--bracket=-4,12", "--sweep", "4",
                     "--out", str(out)]) == 0
        lines = out.read_text().splitlines()
        assert lines[0].startswith("# esrl-sim v1 config=")
        assert lines[1] == "ebn0_db,metric,value"
        assert lines[2].startswith("4,rate,")
        assert lines[3].startswith("4,threshold_db,")

    def test_sweep_without_out_is_usage_error(self, profile_path):
        assert main(["threshold", "--profile", profile_path, "--L", "3",
                     "--sweep", "4"]) == 2

    def test_unknown_config_key(self, profile_path, tmp_path):
        cfg = tmp_path / "thr.json"
        cfg.write_text(json.dumps({"profile": profile_path, "L": 3,
                                   "bogus": 1}))
        assert main(["threshold", "--config", str(cfg)]) == 2

    def test_missing_required(self):
        assert main(["threshold"]) == 2


class TestDesignLift:
    def test_design_writes_profile_and_log(self, tmp_path, capsys):
        cfg_path, cfg = design_config(tmp_path)
        log = tmp_path / "log.json"
        assert main(["design", "--config", cfg_path,
                     "--log-out", str(log)]) == 0
        p = load_profile(cfg["out"])
        assert (p.m, p.n) == (6, 10)
        data = json.loads(log.read_text())
        assert data["weight"] == int(p.B.sum())

    def test_design_without_out_is_usage_error(self, tmp_path):
        cfg_path, _ = design_config(tmp_path, out=None)
        cfg = json.loads((tmp_path / "design.json").read_text())
        del cfg["out"]
        (tmp_path / "design.json").write_text(json.dumps(cfg))
        assert main(["design", "--config", cfg_path]) == 2

    def test_lift_assigns_shifts(self, tmp_path, capsys):
        cfg_path, cfg = design_config(tmp_path)
        assert main(["design", "--config", cfg_path]) == 0
        out = tmp_path / "lifted.txt"
        assert main(["lift", cfg["out"], "--z", "5", "--out", str(out)]) == 0
        p = load_profile(str(out))
        assert p.Z == 5
        assert (p.P[p.B == 1] >= 0).all()


class TestEncode:
    def test_encode_and_write(self, profile_path, tmp_path, capsys):
        out = tmp_path / "frames.txt"
        assert main(["encode", profile_path, "--L", "3", "--frames", "4",
                     "--out", str(out)]) == 0
        lines = out.read_text().splitlines()
        assert len(lines) == 4
        p = load_profile(profile_path)
        assert all(len(ln) == (p.n * 3 + p.m * p.omega) * p.Z
                   for ln in lines)
        assert "all syndromes zero" in capsys.readouterr().out


class TestSimulate:
    def sim_config(self, tmp_path, profile_path, **extra):
        cfg = dict(profile=profile_path, L=3, ebn0_grid_db=[2.0],
                   I_max=5, max_frames=32, min_frame_errors=5,
                   out=str(tmp_path / "fer.csv"))
        cfg.update(extra)
        path = tmp_path / "sim.json"
        path.write_text(json.dumps(cfg))
        return str(path), cfg

    def test_simulate_writes_csv(self, profile_path, tmp_path, capsys):
        cfg_path, cfg = self.sim_config(tmp_path, profile_path)
        assert main(["simulate", "--config", cfg_path]) == 0
        text = (tmp_path / "fer.csv").read_text()
        assert text.startswith("# esrl-sim v1 config=")
        assert "ebn0_db,metric,value" in text

    def test_malformed_config_exit_2_no_output(self, profile_path,
                                               tmp_path):
        cfg_path, cfg = self.sim_config(tmp_path, profile_path,
                                        ebn0_grid_db=[3.0, 1.0])
        assert main(["simulate", "--config", cfg_path]) == 2
        assert not (tmp_path / "fer.csv").exists()

    def test_unknown_key_exit_2(self, profile_path, tmp_path):
        cfg_path, _ = self.sim_config(tmp_path, profile_path, zzz=1)
        assert main(["simulate", "--config", cfg_path]) == 2

    def test_out_override(self, profile_path, tmp_path):
        cfg_path, _ = self.sim_config(tmp_path, profile_path)
        other = tmp_path / "other.csv"
        assert main(["simulate", "--config", cfg_path,
                     "--out", str(other)]) == 0
        assert other.exists()

    def test_harq_needs_stages(self, profile_path, tmp_path):
        cfg_path, _ = self.sim_config(tmp_path, profile_path)
        assert main(["harq", "--config", cfg_path]) == 2

    def test_harq_writes_csv(self, tmp_path):
        rng = np.random.default_rng(1)
        p = encodable_profile(rng, 4, 6, 1, rho=0, Z=4, density=0.6,
                              m_prime=2, n_prime=4)
        ppath = tmp_path / "h.txt"
        save_profile(p, ppath)
        cfg_path, cfg = self.sim_config(tmp_path, str(ppath),
                                        stages=[2, 4],
                                        out=str(tmp_path / "harq.csv"))
        assert main(["harq", "--config", cfg_path]) == 0
        assert "stage1_fail_rate" in (tmp_path / "harq.csv").read_text()


class TestRepro:
    def test_cycles_golden(self, capsys):
        assert main(["repro", "cycles"]) == 0
        out = capsys.readouterr().out
        assert "FAIL" not in out
        assert "cycles/root-6-cycle-count" in out

    def test_help_lists_subcommands(self, capsys):
        with pytest.raises(SystemExit) as e:
            main(["--help"])
        assert e.value.code == 0
        out = capsys.readouterr().out
        for name in ("design", "lift", "analyze", "threshold", "encode",
                     "simulate", "harq", "validate", "repro"):
            assert name in out

    def test_subcommand_help_lists_keys(self, capsys):
        for name in ("simulate", "design", "threshold"):
            with pytest.raises(SystemExit) as e:
                main([name, "--help"])
            assert e.value.code == 0
            assert "--config" in capsys.readouterr().out
