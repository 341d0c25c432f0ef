import math

import pytest

from vfpath.cli import main
from vfpath.config import (
    ConfigError,
    build_scenario,
    default_settings,
    dump_settings,
    load_settings,
)
from vfpath.paths import CirclePath, LinePath, SinusoidPath


class TestConfig:
    def test_defaults_build(self):
        cfg = build_scenario(load_settings(None), "switched")
        assert cfg.dt == 0.01
        assert cfg.guidance.k1 == 0.01
        assert cfg.guidance.d_s == 10.0
        assert cfg.airspeed.v_a == 15.0
        assert isinstance(cfg.path, SinusoidPath)

    def test_unknown_key_named(self, tmp_path):
        f = tmp_path / "bad.cfg"
        f.write_text("[guidance]\nk9 = 1\n")
        with pytest.raises(ConfigError, match="k9"):
            load_settings(str(f))

    def test_unknown_section_named(self, tmp_path):
        f = tmp_path / "bad.cfg"
        f.write_text("[rocket]\nthrust = 1\n")
        with pytest.raises(ConfigError, match="rocket"):
            load_settings(str(f))

    def test_bad_value_named(self, tmp_path):
        f = tmp_path / "bad.cfg"
        f.write_text("[sim]\ndt = soon\n")
        with pytest.raises(ConfigError, match="dt"):
            load_settings(str(f))

    def test_missing_file_named(self):
        with pytest.raises(ConfigError, match="no/such/file.cfg"):
            load_settings("no/such/file.cfg")

    def test_round_trip(self, tmp_path):
        settings = default_settings()
        settings["sim"]["dt"] = 0.02
        settings["path"]["kind"] = "circle"
        text = dump_settings(settings)
        f = tmp_path / "dump.cfg"
        f.write_text(text)
        reparsed = load_settings(str(f))
        assert reparsed == settings
        assert dump_settings(reparsed) == text

    def test_path_kinds(self, tmp_path):
        settings = default_settings()
        settings["path"]["kind"] = "line"
        assert isinstance(build_scenario(settings, "switched").path, LinePath)
        settings["path"]["kind"] = "circle"
        assert isinstance(build_scenario(settings, "switched").path, CirclePath)
        settings["path"]["kind"] = "polyline"
        settings["path"]["file"] = ""
        with pytest.raises(ConfigError):
            build_scenario(settings, "switched")
        poly = tmp_path / "p.csv"
        poly.write_text("0,0\n100,0\n200,50\n")
        settings["path"]["file"] = str(poly)
        assert build_scenario(settings, "switched").path.s_max > 200.0

    def test_kappa_max_zero_means_unbounded(self):
        settings = default_settings()
        settings["sim"]["kappa_max"] = 0.0
        cfg = build_scenario(settings, "switched")
        assert cfg.kappa_max == math.inf

    def test_invalid_guidance_rejected(self):
        settings = default_settings()
        settings["guidance"]["n"] = 4
        with pytest.raises(ConfigError):
            build_scenario(settings, "switched")


class TestCli:
    def test_missing_config_exits_2(self, capsys, tmp_path):
        rc = main(["run", "--config", "nope.cfg", "--out", str(tmp_path)])
        assert rc == 2
        assert "nope.cfg" in capsys.readouterr().err

    def test_unknown_law_exits_2(self, capsys, tmp_path):
        rc = main(["run", "--law", "wizardry", "--out", str(tmp_path)])
        assert rc == 2
        assert "wizardry" in capsys.readouterr().err

    def test_run_writes_outputs_and_reruns_identically(self, tmp_path, capsys):
        out = tmp_path / "out"
        args = ["run", "--law", "switched", "--seed", "7", "--out", str(out)]
        assert main(args) == 0
        capsys.readouterr()
        traj = (out / "trajectory_switched.csv").read_bytes()
        mets = (out / "metrics_switched.csv").read_bytes()
        header = traj.decode().splitlines()[0]
        assert header == "t,x,y,chi,chi_c,chi_d,chi_dot,d,phase"
        assert main(args) == 0
        assert (out / "trajectory_switched.csv").read_bytes() == traj
        assert (out / "metrics_switched.csv").read_bytes() == mets

    def test_run_nlgl_far_offset_exits_1(self, tmp_path, capsys):
        # default d0 = 200 m exceeds the 110 m look-ahead
        rc = main(["run", "--law", "nlgl", "--out", str(tmp_path / "o")])
        assert rc == 1
        assert "look-ahead infeasible" in capsys.readouterr().out

    def test_run_multiple_laws_exits_2(self, tmp_path):
        rc = main(["run", "--law", "switched,plos", "--out", str(tmp_path / "o")])
        assert rc == 2

    def test_compare_table_order_follows_selection(self, tmp_path, capsys):
        out = tmp_path / "cmp"
        rc = main(
            [
                "compare",
                "--law",
                "plos,switched",
                "--seed",
                "1",
                "--out",
                str(out),
                "--dt",
                "0.02",
            ]
        )
        assert rc == 0
        rows = (out / "comparison.csv").read_text().splitlines()
        assert rows[1].startswith("plos,")
        assert rows[2].startswith("switched,")
        assert (out / "trajectory_plos.csv").exists()
        assert (out / "trajectory_switched.csv").exists()

    def test_validate_default_passes(self, tmp_path, capsys):
        rc = main(["validate", "--out", str(tmp_path / "v")])
        assert rc == 0
        text = capsys.readouterr().out
        assert "PASS" in text
        assert (tmp_path / "v" / "feasibility.txt").exists()
        assert (tmp_path / "v" / "feasibility.csv").exists()

    def test_validate_aggressive_gain_fails(self, tmp_path, capsys):
        cfg = tmp_path / "hot.cfg"
        cfg.write_text("[guidance]\nk1 = 0.2\n")
        rc = main(["validate", "--config", str(cfg)])
        assert rc == 1
        assert "FAIL" in capsys.readouterr().out

    def test_validate_unbounded_sentinel_passes(self, tmp_path, capsys):
        cfg = tmp_path / "free.cfg"
        cfg.write_text("[guidance]\nk1 = 0.2\n\n[sim]\nkappa_max = 0\n")
        rc = main(["validate", "--config", str(cfg)])
        assert rc == 0
        assert "PASS" in capsys.readouterr().out

    def test_dump_effective_config_round_trips(self, tmp_path, capsys):
        rc = main(["run", "--dt", "0.05", "--dump-effective-config"])
        assert rc == 0
        text = capsys.readouterr().out
        f = tmp_path / "eff.cfg"
        f.write_text(text)
        settings = load_settings(str(f))
        assert settings["sim"]["dt"] == 0.05
        assert dump_settings(settings) == text

    def test_montecarlo_small_campaign(self, tmp_path, capsys):
        out = tmp_path / "mc"
        args = [
            "montecarlo",
            "--trials",
            "2",
            "--seed",
            "3",
            "--law",
            "switched",
            "--out",
            str(out),
            "--per-trial",
            "--serial",
        ]
        assert main(args) == 0
        capsys.readouterr()
        summary = (out / "montecarlo_summary.csv").read_bytes()
        trials = (out / "montecarlo_trials.csv").read_bytes()
        assert summary.decode().splitlines()[0] == (
            "law,metric,count,min,q1,median,q3,max,mean"
        )
        assert main(args) == 0
        assert (out / "montecarlo_summary.csv").read_bytes() == summary
        assert (out / "montecarlo_trials.csv").read_bytes() == trials

    def test_montecarlo_bad_trials_exits_2(self, tmp_path):
        rc = main(["montecarlo", "--trials", "0", "--out", str(tmp_path / "x")])
        assert rc == 2
