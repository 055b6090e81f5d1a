import json
import math
import re

import pytest

from gaugebounds import GaugeSpec, ProcessSpec, missing_mass_G, prefix_min_profile, simulate
from gaugebounds.cli import main, parse_embedding, parse_gauge, parse_process


def run(args):
    return main(args)


def load_json(path):
    return json.loads(path.read_text())


def strip_timestamp(text: str) -> str:
    return re.sub(r'^\s*"generated_at".*$', "", text, flags=re.M)


class TestSpecParsers:
    def test_process_strings(self):
        spec = parse_process("cycle:N=100,p=0.5", seed=3)
        assert spec.kind == "cycle" and spec.n_states == 100 and spec.reset_p == 0.5
        assert parse_process("circle:zeta=0.25,p=0.1").zeta == 0.25
        torus = parse_process("torus:p=0.2")
        assert torus.zeta1 is not None and torus.zeta2 is not None
        assert parse_process("iid:space=circle").kind == "iid"

    def test_gauge_strings(self):
        assert parse_gauge("lipschitz:L=2").L == 2.0
        assert parse_gauge("lipschitz:L=1,metric=discrete").metric == "discrete"
        assert parse_gauge("discrete").kind == "discrete"
        assert parse_gauge("smooth:gamma=1.5,lambda=0.5").gamma == 1.5
        assert parse_gauge("local-smooth:c=2").c == 2.0
        assert parse_gauge("hinge:L=3").kind == "hinge"

    def test_embedding_strings(self):
        assert parse_embedding("identity").kind == "identity"
        assert parse_embedding("fourier:D=8").dim == 8
        assert parse_embedding("raster:scaling=true").with_scaling

    def test_unknown_names_rejected(self):
        with pytest.raises(ValueError):
            parse_process("brownian:p=1")
        with pytest.raises(ValueError):
            parse_gauge("tv")


class TestSimulateEstimateRoundTrip:
    @pytest.mark.parametrize("fmt", ["csv", "bin"])
    def test_file_route_matches_in_process(self, tmp_path, fmt):
        pfile = tmp_path / f"path.{fmt}"
        rfile = tmp_path / "report.json"
        assert run(["simulate", "--process", "circle:zeta=0.3,p=0.2", "--n", "64",
                    "--seed", "5", "--out", str(pfile), "--format", fmt]) == 0
        assert run(["estimate", "--in", str(pfile), "--gauge", "lipschitz:L=1",
                    "--tau", "2", "--out", str(rfile)]) == 0
        report = load_json(rfile)
        spec = ProcessSpec.circle_rotation(zeta=0.3, p=0.2, seed=5)
        expected = missing_mass_G(prefix_min_profile(simulate(spec, 64),
                                                     GaugeSpec.lipschitz(1.0), 2))
        assert report["g"] == expected    # bit-exact round trip
        assert report["n"] == 64 and report["tau"] == 2

    def test_four_row_example(self, tmp_path):
        pfile = tmp_path / "p.csv"
        pfile.write_text("c0\n0\n1\n0.5\n0.25\n")
        rfile = tmp_path / "r.json"
        assert run(["estimate", "--in", str(pfile), "--gauge", "lipschitz:L=1",
                    "--tau", "1", "--t", "0.4", "--out", str(rfile)]) == 0
        report = load_json(rfile)
        assert report["g"] == pytest.approx(7.0 / 12.0, rel=1e-15)
        assert report["g_t"] == pytest.approx(2.0 / 3.0)
        assert report["good_turing"] is not None

    def test_profile_dump(self, tmp_path):
        pfile = tmp_path / "p.csv"
        pfile.write_text("c0\n0\n1\n0.5\n0.25\n")
        dump = tmp_path / "mins.csv"
        assert run(["estimate", "--in", str(pfile), "--gauge", "lipschitz:L=1",
                    "--tau", "1", "--dump-profile", str(dump),
                    "--out", str(tmp_path / "r.json")]) == 0
        lines = dump.read_text().splitlines()
        assert lines[0] == "entry,position,min"
        assert len(lines) == 4

    def test_exclusions_flag(self, tmp_path):
        pfile = tmp_path / "p.csv"
        pfile.write_text("c0\n0\n1\n0.9\n")
        rfile = tmp_path / "r.json"
        assert run(["estimate", "--in", str(pfile), "--gauge", "lipschitz:L=1",
                    "--tau", "1", "--exclude", "1", "--out", str(rfile)]) == 0
        assert load_json(rfile)["g"] == pytest.approx((1.0 + 0.9) / 2.0)

    def test_infinite_gauge_reports_null_g(self, tmp_path):
        pfile = tmp_path / "p.csv"
        pfile.write_text("c0,label\n0,1\n1,-1\n0.5,-1\n")
        rfile = tmp_path / "r.json"
        assert run(["estimate", "--in", str(pfile), "--gauge", "hinge:L=1",
                    "--tau", "1", "--t", "0.4", "--out", str(rfile)]) == 0
        report = load_json(rfile)
        assert report["g"] is None and "g_note" in report
        assert report["g_t"] == pytest.approx(1.0)


class TestBoundCommand:
    def test_frozen_threshold_report(self, tmp_path):
        rfile = tmp_path / "b.json"
        assert run(["bound", "--kind", "excess-loss", "--gt", "0", "--n", "101",
                    "--tau", "1", "--delta", "0.05", "--out", str(rfile)]) == 0
        report = load_json(rfile)
        assert report["total"] == pytest.approx(0.08143244602130115, rel=1e-12)
        assert report["terms"]["estimator_term"] == 0.0
        assert report["vacuous"] is False

    def test_risk_with_chain_derived_mixing(self, tmp_path):
        rfile = tmp_path / "b.json"
        assert run(["bound", "--kind", "risk", "--g", "0.05", "--n", "110", "--tau", "10",
                    "--delta", "0.05", "--process", "cycle:N=10,p=0.1",
                    "--sup-f", "1", "--sup-g", "1", "--out", str(rfile)]) == 0
        report = load_json(rfile)
        assert report["mixing_provenance"] == "chain-derived"
        assert report["terms"]["mixing_term"] == pytest.approx(0.9 ** 10, rel=1e-12)

    def test_exceptions_kind(self, tmp_path):
        rfile = tmp_path / "b.json"
        assert run(["bound", "--kind", "risk-exceptions", "--g", "0", "--n", "101",
                    "--tau", "1", "--delta", "0.05", "--alpha", "0.1",
                    "--out", str(rfile)]) == 0
        assert load_json(rfile)["total"] == pytest.approx(0.9650995853327102, rel=1e-12)

    def test_missing_estimate_is_an_error(self, capsys):
        assert run(["bound", "--kind", "risk", "--n", "101", "--tau", "1",
                    "--delta", "0.05"]) == 1
        err = json.loads(capsys.readouterr().err)
        assert err["error"]["type"] == "ValueError"


class TestValidateCommand:
    def test_martingale_report(self, tmp_path):
        rfile = tmp_path / "v.json"
        assert run(["validate", "--check", "martingale", "--chain", "iid:q=0.3",
                    "--n", "100", "--delta", "0.1", "--trials", "300",
                    "--seed", "2", "--out", str(rfile)]) == 0
        report = load_json(rfile)
        assert report["check"] == "martingale"
        assert report["passed"] is True
        assert report["violations"] <= report["trials"]

    def test_good_turing_report(self, tmp_path):
        rfile = tmp_path / "v.json"
        assert run(["validate", "--check", "good-turing", "--symbols", "12",
                    "--n", "60", "--t", "0.5", "--trials", "200",
                    "--seed", "3", "--out", str(rfile)]) == 0
        report = load_json(rfile)
        assert report["rms"] <= report["bound"]

    def test_coverage_report(self, tmp_path):
        rfile = tmp_path / "v.json"
        assert run(["validate", "--check", "coverage", "--process", "iid:space=circle",
                    "--L", "1", "--t", "0.1", "--tau", "1", "--n", "48",
                    "--delta", "0.1", "--trials", "30", "--mc-fresh", "200",
                    "--seed", "4", "--out", str(rfile)]) == 0
        assert load_json(rfile)["passed"] is True


class TestStudyCommand:
    def test_pure_cycle_study_is_identically_zero(self, tmp_path):
        out = tmp_path / "table.csv"
        assert run(["study", "--process", "cycle:N=100,p=0", "--gauge", "discrete",
                    "--tau", "100", "--sizes", "128,256,512,1024", "--p-list", "0",
                    "--n-seeds", "2", "--seed", "5", "--out", str(out)]) == 0
        rows = out.read_text().splitlines()
        assert rows[0] == "p,n,mean_G,std_G,n_seeds,tau_mix,tau_over_n"
        for line in rows[1:]:
            fields = line.split(",")
            assert float(fields[2]) == 0.0

    def test_long_format_axes(self, tmp_path):
        out = tmp_path / "t.csv"
        assert run(["study", "--process", "circle:p=0.5", "--gauge", "lipschitz:L=1",
                    "--tau", "1", "--sizes", "16,64", "--p-list", "0.5,1.0",
                    "--n-seeds", "2", "--seed", "6", "--out", str(out)]) == 0
        long_file = tmp_path / "t_long.csv"
        lines = long_file.read_text().splitlines()
        assert lines[0] == "p,series,ln_n,value"
        series = {line.split(",")[1] for line in lines[1:]}
        assert series == {"ln_G", "ln_tau_over_n"}
        ln_ns = {line.split(",")[2] for line in lines[1:]}
        assert {format(math.log(16), ".17g"), format(math.log(64), ".17g")} == ln_ns


class TestDeterminismAndErrors:
    def test_same_seed_same_bytes_modulo_timestamp(self, tmp_path):
        args = ["validate", "--check", "martingale", "--chain", "mmb:stay0=0.9,stay1=0.8,q0=0.1,q1=0.5",
                "--n", "80", "--delta", "0.1", "--trials", "200", "--seed", "7"]
        f1, f2 = tmp_path / "a.json", tmp_path / "b.json"
        assert run(args + ["--out", str(f1)]) == 0
        assert run(args + ["--out", str(f2)]) == 0
        assert strip_timestamp(f1.read_text()) == strip_timestamp(f2.read_text())

    def test_threads_do_not_change_output(self, tmp_path):
        base = ["validate", "--check", "coverage", "--process", "iid:space=circle",
                "--t", "0.05", "--n", "32", "--delta", "0.1", "--trials", "20",
                "--mc-fresh", "100", "--seed", "8"]
        f1, f2 = tmp_path / "a.json", tmp_path / "b.json"
        assert run(base + ["--threads", "1", "--out", str(f1)]) == 0
        assert run(base + ["--threads", "4", "--out", str(f2)]) == 0
        assert strip_timestamp(f1.read_text()) == strip_timestamp(f2.read_text())

    def test_study_outputs_are_byte_identical(self, tmp_path):
        args = ["study", "--process", "circle:p=0.5", "--gauge", "lipschitz:L=1",
                "--tau", "1", "--sizes", "16,64", "--p-list", "0.5",
                "--n-seeds", "3", "--seed", "11"]
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        assert run(args + ["--out", str(a)]) == 0
        assert run(args + ["--out", str(b), "--threads", "4"]) == 0
        assert a.read_bytes() == b.read_bytes()
        assert (tmp_path / "a_long.csv").read_bytes() == (tmp_path / "b_long.csv").read_bytes()

    def test_module_error_yields_json_and_nonzero_exit(self, capsys, tmp_path):
        pfile = tmp_path / "p.csv"
        pfile.write_text("c0\n0\n1\n")
        code = run(["estimate", "--in", str(pfile), "--gauge", "lipschitz:L=-1", "--tau", "1"])
        assert code == 1
        err = json.loads(capsys.readouterr().err)
        assert err["error"]["type"] == "ValueError"
        assert "positive" in err["error"]["message"]

    def test_missing_input_file(self, capsys):
        assert run(["estimate", "--in", "/nonexistent/x.csv",
                    "--gauge", "lipschitz:L=1", "--tau", "1"]) == 1
        err = json.loads(capsys.readouterr().err)
        assert err["error"]["type"] in ("FileNotFoundError", "OSError")

    def test_precondition_checked_before_compute(self, capsys, tmp_path):
        pfile = tmp_path / "p.csv"
        pfile.write_text("c0\n0\n1\n")
        assert run(["estimate", "--in", str(pfile), "--gauge", "lipschitz:L=1",
                    "--tau", "5"]) == 1
        err = json.loads(capsys.readouterr().err)
        assert "tau" in err["error"]["message"]
