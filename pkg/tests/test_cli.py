import json

import pytest

from planetspec import cli
from planetspec import spectrum as S
from planetspec.profile import ConstantSpeed, LayeredProfile, LogSpeed


@pytest.fixture()
def ball_file(profile_file, ball):
    return profile_file(ball, "ball.json")


@pytest.fixture()
def glide_file(profile_file, glide_profile):
    return profile_file(glide_profile, "glide.json")


def run(capsys, *argv):
    code = cli.main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestProfileCheck:
    def test_passing_profile(self, capsys, ball_file):
        code, out, _ = run(capsys, "profile-check", "--profile", ball_file)
        assert code == 0
        doc = json.loads(out)
        assert doc["passed"] is True
        assert doc["profile"] == ball_file

    def test_failing_profile(self, capsys, profile_file):
        bad = LayeredProfile([LogSpeed(2.0, -0.3)], inner_radius=0.05)
        path = profile_file(bad, "bad.json")
        code, out, _ = run(capsys, "profile-check", "--profile", path)
        assert code == 1
        doc = json.loads(out)
        assert doc["passed"] is False and doc["violations"]

    def test_distributional_flag(self, capsys, profile_file):
        slower_below = LayeredProfile(
            [ConstantSpeed(1.0), ConstantSpeed(0.7)], interfaces=[0.6])
        path = profile_file(slower_below, "slow.json")
        ok, _, _ = run(capsys, "profile-check", "--profile", path)
        assert ok == 0   # per-layer check alone passes
        code, out, _ = run(capsys, "profile-check", "--profile", path,
                           "--distributional")
        assert code == 1
        assert json.loads(out)["violations"]

    def test_missing_file_is_usage_error(self, capsys, tmp_path):
        code, _, err = run(capsys, "profile-check", "--profile",
                           str(tmp_path / "nope.json"))
        assert code == 2 and "usage error" in err

    def test_malformed_file_is_usage_error(self, capsys, tmp_path):
        path = tmp_path / "garbage.json"
        path.write_text("{not json")
        code, _, err = run(capsys, "profile-check", "--profile", str(path))
        assert code == 2 and "usage error" in err


class TestBlsp:
    def test_stdout_json(self, capsys, ball_file):
        code, out, _ = run(capsys, "blsp", "--profile", ball_file,
                           "--cutoff", "6.1")
        assert code == 0
        doc = json.loads(out)
        lengths = [e["length"] for e in doc["entries"]]
        assert lengths[0] == pytest.approx(4.0, abs=1e-9)
        assert len(lengths) == 6

    def test_stdout_csv(self, capsys, ball_file):
        code, out, _ = run(capsys, "blsp", "--profile", ball_file,
                           "--cutoff", "6.1", "--format", "csv")
        assert code == 0
        assert out.splitlines()[0] == "length,layer,kind,p,N,m"
        assert len(out.splitlines()) == 7

    def test_out_writes_both_artifacts_deterministically(self, capsys,
                                                         ball_file, tmp_path):
        out_path = tmp_path / "spec.json"
        code, _, _ = run(capsys, "blsp", "--profile", ball_file,
                         "--cutoff", "6.1", "--out", str(out_path))
        assert code == 0
        first_json = (tmp_path / "spec.json").read_bytes()
        first_csv = (tmp_path / "spec.csv").read_bytes()
        code, _, _ = run(capsys, "blsp", "--profile", ball_file,
                         "--cutoff", "6.1", "--out", str(out_path))
        assert code == 0
        assert (tmp_path / "spec.json").read_bytes() == first_json
        assert (tmp_path / "spec.csv").read_bytes() == first_csv

    def test_nonpositive_cutoff_usage_error(self, capsys, ball_file):
        code, _, err = run(capsys, "blsp", "--profile", ball_file,
                           "--cutoff", "0")
        assert code == 2 and "cutoff" in err

    def test_two_speed_merged(self, capsys, ball_file, profile_file):
        fast = LayeredProfile([ConstantSpeed(2.0)],
                              density=[{"rho": 1.0, "mu": 4.0}])
        fast_file = profile_file(fast, "fast.json")
        code, out, _ = run(capsys, "blsp", "--profile", ball_file,
                           "--cutoff", "6.5", "--two-speed-profile", fast_file,
                           "--format", "csv")
        assert code == 0
        lines = out.splitlines()
        assert lines[0] == "length,source"
        first = [tuple(l.split(",")) for l in lines[1:7]]
        assert all(tag == "S" for _v, tag in first)
        assert float(first[0][0]) == pytest.approx(2.0, abs=1e-9)

    def test_two_speed_interface_mismatch_is_domain_error(self, capsys,
                                                          ball_file,
                                                          glide_file):
        code, _, err = run(capsys, "blsp", "--profile", ball_file,
                           "--cutoff", "6.0", "--two-speed-profile",
                           glide_file)
        assert code == 1 and "error" in err


class TestTraceAmplitudes:
    def test_ball_table(self, capsys, ball_file):
        code, out, _ = run(capsys, "trace-amplitudes", "--profile", ball_file,
                           "--cutoff", "6.1")
        assert code == 0
        doc = json.loads(out)
        assert doc["flagged"] == []
        assert len(doc["singularities"]) == 6
        diameter = doc["singularities"][0]
        assert diameter["degenerate"] is True
        assert diameter["amplitude_re"] == 0.0
        assert doc["normalization"].startswith("c_d")

    def test_csv_format(self, capsys, ball_file):
        code, out, _ = run(capsys, "trace-amplitudes", "--profile", ball_file,
                           "--cutoff", "6.1", "--format", "csv")
        assert code == 0
        lines = out.splitlines()
        assert lines[0] == "T,order,amplitude_re,amplitude_im,degenerate,n_classes"
        assert lines[1] == "4.0,-5/2,0.0,0.0,1,1"

    def test_conjugate_class_flagged_and_exit_1(self, capsys, ball_file,
                                                monkeypatch):
        bad_ray = S.PeriodicBasicRay(layer=1, kind=S.TURNING, p=0.77,
                                     n_legs=2, winding=1, length=5.5,
                                     dalpha_dp=0.0, conjugacy_ok=False)
        real_blsp = S.blsp

        def with_bad(profile, cutoff, **kw):
            entries = real_blsp(profile, cutoff, **kw)
            return entries + [S.SpectrumEntry(length=5.5, rays=[bad_ray])]

        monkeypatch.setattr(S, "blsp", with_bad)
        code, out, _ = run(capsys, "trace-amplitudes", "--profile", ball_file,
                           "--cutoff", "6.1")
        assert code == 1
        doc = json.loads(out)
        assert len(doc["flagged"]) == 1
        assert "vanishing angle derivative" in doc["flagged"][0]
        # the degenerate-but-defined radial row does not by itself flag
        assert not any(abs(s["T"] - 5.5) < 1e-9 for s in doc["singularities"])


class TestModesum:
    def test_artifacts_and_cache(self, capsys, ball_file, tmp_path):
        out = tmp_path / "run.json"
        args = ("modesum", "--profile", ball_file, "--lmax", "40",
                "--omegamax", "60", "--sigma", "0.02", "--cutoff", "4.5",
                "--out", str(out))
        code, _, _ = run(capsys, *args)
        assert code == 0
        for suffix in ("-modes.csv", "-modes.meta.json", "-trace.csv",
                       "-peaks.json"):
            assert (tmp_path / ("run" + suffix)).exists(), suffix
        peaks = json.loads((tmp_path / "run-peaks.json").read_text())
        assert peaks["cached_table"] is False
        assert peaks["n_modes"] > 100
        assert any(abs(m["candidate"] - 4.0) < 1e-9 for m in peaks["matches"])
        modes_before = (tmp_path / "run-modes.csv").read_bytes()

        code, _, _ = run(capsys, *args)
        assert code == 0
        peaks2 = json.loads((tmp_path / "run-peaks.json").read_text())
        assert peaks2["cached_table"] is True
        assert (tmp_path / "run-modes.csv").read_bytes() == modes_before
        peaks.pop("cached_table"), peaks2.pop("cached_table")
        assert peaks == peaks2

    def test_soft_failures_recorded_but_exit_0(self, capsys, profile_file,
                                               annulus, tmp_path):
        path = profile_file(annulus, "annulus.json")
        out = tmp_path / "ann.json"
        code, _, _ = run(capsys, "modesum", "--profile", path, "--lmax", "20",
                         "--omegamax", "80", "--sigma", "0.02",
                         "--cutoff", "3.5", "--out", str(out))
        assert code == 0
        peaks = json.loads((tmp_path / "ann-peaks.json").read_text())
        assert any("regime-transition gap" in f[2] for f in peaks["failures"])

    @pytest.mark.parametrize("extra", [
        ("--sigma", "0"), ("--lmax", "-1"), ("--omegamax", "0")])
    def test_bad_numeric_arguments(self, capsys, ball_file, tmp_path, extra):
        code, _, err = run(capsys, "modesum", "--profile", ball_file,
                           "--out", str(tmp_path / "x.json"), *extra)
        assert code == 2 and "usage error" in err

    def test_out_required(self, capsys, ball_file):
        code, _, err = run(capsys, "modesum", "--profile", ball_file)
        assert code == 2 and "--out is required" in err


class TestDisk:
    def test_json_report(self, capsys):
        code, out, _ = run(capsys, "disk", "--qmax", "12")
        assert code == 0
        doc = json.loads(out)
        assert doc["n_primitive"] == 23
        assert doc["primitive_distinct"] is True
        assert len(doc["rational_pairs"]) == 1

    def test_csv_format(self, capsys):
        code, out, _ = run(capsys, "disk", "--qmax", "6", "--format", "csv")
        assert code == 0
        lines = out.splitlines()
        assert lines[0] == "p,q,length,exact_form"
        assert lines[1] == "1,2,4.0,2*2*sin(1*pi/2)"

    def test_deterministic_output_file(self, capsys, tmp_path):
        out = tmp_path / "disk.json"
        code, _, _ = run(capsys, "disk", "--qmax", "10", "--out", str(out))
        assert code == 0
        first = out.read_bytes()
        run(capsys, "disk", "--qmax", "10", "--out", str(out))
        assert out.read_bytes() == first

    def test_qmax_validation(self, capsys):
        code, _, err = run(capsys, "disk", "--qmax", "1")
        assert code == 2 and "qmax" in err


class TestGliding:
    def test_records_and_decay(self, capsys, glide_file):
        code, out, _ = run(capsys, "gliding", "--profile", glide_file,
                           "--glide-angle", "5.0", "--count", "10")
        assert code == 0
        doc = json.loads(out)
        assert len(doc["records"]) == 10   # m = 2..11 at this glide angle
        assert doc["records"][0]["m"] == 2
        assert doc["p_critical"] == pytest.approx(0.6 / 1.3, abs=1e-12)
        assert "decay" in doc
        assert doc["decay"]["exponent"] < -1

    def test_csv_and_small_count(self, capsys, glide_file):
        code, out, _ = run(capsys, "gliding", "--profile", glide_file,
                           "--glide-angle", "5.0", "--count", "5",
                           "--format", "csv")
        assert code == 0
        lines = out.splitlines()
        assert lines[0] == "m,theta,p,kappa,length"
        assert len(lines) == 6   # m = 2..6; too few records for a decay fit

    def test_no_interface_is_domain_error(self, capsys, ball_file):
        code, _, err = run(capsys, "gliding", "--profile", ball_file)
        assert code == 1 and "no interface" in err

    def test_negative_angle_is_domain_error(self, capsys, glide_file):
        code, _, err = run(capsys, "gliding", "--profile", glide_file,
                           "--glide-angle", "-1.0")
        assert code == 1 and "error" in err


class TestParser:
    def test_unknown_subcommand_exits_2(self):
        with pytest.raises(SystemExit) as exc:
            cli.main(["frobnicate"])
        assert exc.value.code == 2

    def test_missing_required_argument_exits_2(self):
        with pytest.raises(SystemExit) as exc:
            cli.main(["blsp"])
        assert exc.value.code == 2
        with pytest.raises(SystemExit) as exc:
            cli.main(["disk"])
        assert exc.value.code == 2

    def test_no_subcommand_exits_2(self):
        with pytest.raises(SystemExit) as exc:
            cli.main([])
        assert exc.value.code == 2
