import csv
import json

import pytest

from perfchar.cli import AnalysisConfig, main
from perfchar.exceptions import ParameterError
from refdata import EXPECTED_EDP_KJS, EXPECTED_MLUP_PER_J, MPI_SHARE_PARAMS


def read_csv(path):
    with open(path, newline="") as handle:
        return list(csv.DictReader(handle))


class TestDispatch:
    def test_no_arguments_is_usage_error(self, capsys):
        assert main([]) == 2
        assert "usage" in capsys.readouterr().err

    def test_unknown_subcommand(self, capsys):
        assert main(["frobnicate"]) == 2

    def test_version(self, capsys):
        assert main(["--version"]) == 0
        assert "perfchar" in capsys.readouterr().out

    def test_missing_input_file(self, capsys):
        assert main(["analyze", "energy", "--in", "/nonexistent/runs.csv"]) == 1
        err = capsys.readouterr().err
        assert err.startswith("perfchar: error:")
        assert err.strip().count("\n") == 0

    def test_validation_failure_is_exit_one(self, tmp_path, capsys):
        bad = tmp_path / "bad.csv"
        bad.write_text(
            "platform,app,compiler,nodes,ranks_per_node,time_s,energy_j,app_metric,timestamp\n"
            "p,a,c,1,1,0,,,2020-01-01T00:00:00Z\n"
        )
        assert main(["analyze", "energy", "--in", str(bad)]) == 1
        err = capsys.readouterr().err
        assert "RowError" in err


class TestAnalysisConfig:
    def test_requires_some_path(self, tmp_path):
        with pytest.raises(ParameterError):
            AnalysisConfig(output_dir=tmp_path / "out")

    def test_creates_output_dir(self, tmp_path):
        target = tmp_path / "fresh"
        AnalysisConfig(data_paths=(tmp_path,), output_dir=target, report_format="all")
        assert target.is_dir()

    def test_bad_format(self, tmp_path):
        with pytest.raises(ParameterError):
            AnalysisConfig(data_paths=(tmp_path,), report_format="pdf")


class TestSpecShow:
    def test_prints_peaks(self, fixtures_dir, capsys):
        code = main(["spec", "show", str(fixtures_dir / "platforms" / "dibona-tx2.json")])
        assert code == 0
        out = capsys.readouterr().out
        assert "170.64 GB/s" in out
        assert "32.00 / 16.00 GFlop/s" in out
        assert "16777216" in out

    def test_second_platform(self, fixtures_dir, capsys):
        main(["spec", "show", str(fixtures_dir / "platforms" / "marenostrum4.json")])
        out = capsys.readouterr().out
        assert "134.40 / 67.20 GFlop/s" in out
        assert "153.60 GB/s" in out
        assert "17301504" in out


class TestAnalyzeEnergy:
    def test_edp_matches_reference_table(self, fixtures_dir, tmp_path, capsys):
        out = tmp_path / "energy.csv"
        code = main(
            ["analyze", "energy", "--in", str(fixtures_dir / "energy_node_runs.csv"),
             "--out", str(out)]
        )
        assert code == 0
        rows = read_csv(out)
        assert len(rows) == 20
        for row in rows:
            key = (row["app"], row["platform"], row["compiler"])
            expected = EXPECTED_EDP_KJS[key]
            assert float(row["edp_kjs"]) == pytest.approx(expected, rel=0.005)
        lbc = {
            (r["app"], r["platform"], r["compiler"]): r
            for r in rows if r["app"] == "lbc"
        }
        for key, expected in EXPECTED_MLUP_PER_J.items():
            assert float(lbc[key]["work_per_joule"]) == pytest.approx(expected, abs=0.01)
            assert lbc[key]["work_unit"] == "MLUP/J"

    def test_sidecar_written(self, fixtures_dir, tmp_path):
        out = tmp_path / "energy.csv"
        main(["analyze", "energy", "--in", str(fixtures_dir / "energy_node_runs.csv"),
              "--out", str(out)])
        meta = json.loads((tmp_path / "energy.csv.meta.json").read_text())
        assert meta["command"] == "analyze energy"
        assert "written_at" in meta


class TestAnalyzeScaling:
    def test_amdahl_fit_from_runs(self, fixtures_dir, tmp_path):
        out_dir = tmp_path / "scal"
        code = main(
            ["analyze", "scaling", "--model", "amdahl",
             "--in", str(fixtures_dir / "amdahl_runs.csv"), "--out-dir", str(out_dir)]
        )
        assert code == 0
        (fit_row,) = read_csv(out_dir / "scaling_fits.csv")
        assert fit_row["group"] == "alya/dibona-tx2/gnu"
        assert float(fit_row["a"]) == pytest.approx(0.96, abs=1e-6)
        assert float(fit_row["b"]) == pytest.approx(0.0, abs=1e-6)
        proj = read_csv(out_dir / "scaling_projection.csv")
        assert len(proj) == 10  # default projection grid
        ps = [float(r["p"]) for r in proj]
        assert ps == sorted(ps)

    def test_gustafson_fit_from_rates(self, fixtures_dir, tmp_path):
        out_dir = tmp_path / "weak"
        code = main(
            ["analyze", "scaling", "--model", "gustafson",
             "--in", str(fixtures_dir / "gustafson_runs.csv"), "--out-dir", str(out_dir)]
        )
        assert code == 0
        (fit_row,) = read_csv(out_dir / "scaling_fits.csv")
        assert float(fit_row["a"]) == pytest.approx(0.817, abs=1e-9)

    def test_gustafson_without_rates_fails(self, fixtures_dir, tmp_path, capsys):
        code = main(
            ["analyze", "scaling", "--model", "gustafson",
             "--in", str(fixtures_dir / "amdahl_runs.csv"), "--out-dir", str(tmp_path / "x")]
        )
        assert code == 1
        assert "InvalidDataError" in capsys.readouterr().err

    def test_mpi_share_fit(self, fixtures_dir, tmp_path):
        out_dir = tmp_path / "shares"
        code = main(
            ["analyze", "scaling", "--model", "mpi-shares",
             "--in", str(fixtures_dir / "mpi_shares.csv"),
             "--group", "platform", "--out-dir", str(out_dir)]
        )
        assert code == 0
        rows = {r["group"]: r for r in read_csv(out_dir / "mpi_share_fits.csv")}
        for platform, (a, b, c) in MPI_SHARE_PARAMS.items():
            row = rows[platform]
            assert float(row["a"]) == pytest.approx(a, abs=1e-6)
            assert float(row["b"]) == pytest.approx(b, abs=1e-6)
            assert float(row["c"]) == pytest.approx(c, abs=1e-6)
        tx2 = rows["dibona-tx2"]
        assert float(tx2["critical_lb_only"]) == pytest.approx(76.3, abs=0.1)
        assert float(tx2["critical_lb_plus_com"]) == pytest.approx(60.7, abs=0.1)
        curves = read_csv(out_dir / "mpi_share_curves.csv")
        assert {r["series"] for r in curves} == {"lb", "com"}

    def test_projection_grid_override(self, fixtures_dir, tmp_path):
        out_dir = tmp_path / "proj"
        main(
            ["analyze", "scaling", "--model", "amdahl",
             "--in", str(fixtures_dir / "amdahl_runs.csv"),
             "--project", "1", "--out-dir", str(out_dir)]
        )
        (row,) = read_csv(out_dir / "scaling_projection.csv")
        # Baseline projection: speedup 1 + b with the fitted (near-zero) overhead.
        assert float(row["speedup"]) == pytest.approx(1.0, abs=1e-5)


class TestAnalyzeNetwork:
    def test_weak_link_detection(self, fixtures_dir, tmp_path, capsys):
        out_dir = tmp_path / "net"
        code = main(
            ["analyze", "network", "--in", str(fixtures_dir / "pairwise_8node.csv"),
             "--out-dir", str(out_dir)]
        )
        assert code == 0
        (link,) = read_csv(out_dir / "weak_links.csv")
        assert (link["node_a"], link["node_b"]) == ("node02", "node07")
        assert float(link["deficit_pct"]) == pytest.approx(15.0, abs=0.1)
        medians = read_csv(out_dir / "node_medians.csv")
        assert len(medians) == 8
        assert "1 weak link(s)" in capsys.readouterr().out

    def test_clean_matrix_writes_header_only(self, tmp_path):
        source = tmp_path / "clean.csv"
        lines = ["node_a,node_b,msg_bytes,bandwidth_gbs"]
        for i in range(4):
            for j in range(i + 1, 4):
                lines.append(f"n{i},n{j},4096,10.0")
        source.write_text("\n".join(lines) + "\n")
        out_dir = tmp_path / "out"
        assert main(["analyze", "network", "--in", str(source), "--out-dir", str(out_dir)]) == 0
        assert read_csv(out_dir / "weak_links.csv") == []


class TestAnalyzeRoofline:
    def test_phase_points_classified(self, fixtures_dir, tmp_path):
        out_dir = tmp_path / "roof"
        code = main(
            ["analyze", "roofline", "--spec", str(fixtures_dir / "platforms" / "dibona-tx2.json"),
             "--bandwidth-gbs", "228.62",
             "--points", str(fixtures_dir / "alya_phase_points.csv"),
             "--out-dir", str(out_dir), "--gnuplot"]
        )
        assert code == 0
        points = read_csv(out_dir / "roofline_points.csv")
        assert len(points) == 5
        assert all(r["bound"] == "memory-bound" for r in points)
        curve = read_csv(out_dir / "roofline_curve.csv")
        assert {"intensity", "gflops", "label"} == set(curve[0].keys())
        assert (out_dir / "roofline.gp").exists()

    def test_explicit_peaks(self, tmp_path, capsys):
        out_dir = tmp_path / "roof2"
        code = main(
            ["analyze", "roofline", "--flops-gflops", "32.0", "--bandwidth-gbs", "228.62",
             "--scope", "core", "--out-dir", str(out_dir)]
        )
        assert code == 0
        assert "ridge 0.13997" in capsys.readouterr().out

    def test_counter_columns_accepted(self, tmp_path):
        points = tmp_path / "counters.csv"
        points.write_text(
            "label,flops,loads,stores\n"
            "assembly,9e9,10e9,2.5e9\n"
        )
        out_dir = tmp_path / "roof3"
        code = main(
            ["analyze", "roofline", "--flops-gflops", "32.0", "--bandwidth-gbs", "228.62",
             "--points", str(points), "--out-dir", str(out_dir)]
        )
        assert code == 0
        (row,) = read_csv(out_dir / "roofline_points.csv")
        assert float(row["intensity"]) == pytest.approx(0.09, rel=1e-12)
        assert row["bound"] == "memory-bound"

    def test_needs_peaks(self, tmp_path):
        assert main(["analyze", "roofline", "--out-dir", str(tmp_path / "r")]) == 1


class TestReportCompare:
    def test_time_comparison(self, fixtures_dir, tmp_path, capsys):
        out = tmp_path / "cmp.csv"
        code = main(
            ["report", "compare", "--in", str(fixtures_dir / "energy_node_runs.csv"),
             "--out", str(out)]
        )
        assert code == 0
        text = capsys.readouterr().out
        assert "alya" in text
        rows = read_csv(out)
        alya = {
            (r["platform"], r["compiler"]): r for r in rows if r["app"] == "alya"
        }
        assert alya[("dibona-x86", "intel")]["rank"] == "1"
        assert float(alya[("dibona-x86", "intel")]["delta_pct"]) == 0.0

    def test_rate_comparison(self, fixtures_dir, tmp_path):
        out = tmp_path / "cmp.csv"
        main(["report", "compare", "--in", str(fixtures_dir / "energy_node_runs.csv"),
              "--metric", "rate", "--out", str(out)])
        rows = read_csv(out)
        assert all(r["app"] == "lbc" for r in rows)  # only lbc carries rates


class TestBenchCommands:
    def test_bench_mem_small(self, tmp_path, capsys):
        out = tmp_path / "mem.csv"
        code = main(
            ["bench", "mem", "--elements", "100000", "--threads", "1", "--reps", "2",
             "--pin", "none", "--out", str(out)]
        )
        assert code == 0
        (row,) = read_csv(out)
        assert row["threads"] == "1"
        assert float(row["best_gbs"]) > 0
        assert "best GB/s" in capsys.readouterr().out

    def test_bench_mem_sweep(self, tmp_path):
        out = tmp_path / "sweep.csv"
        code = main(
            ["bench", "mem", "--elements", "100000", "--threads", "1,2", "--reps", "2",
             "--out", str(out)]
        )
        assert code == 0
        assert [r["threads"] for r in read_csv(out)] == ["1", "2"]

    def test_bench_flops(self, tmp_path, capsys):
        out = tmp_path / "flops.csv"
        code = main(
            ["bench", "flops", "--precision", "double", "--mode", "vector",
             "--duration", "0.12", "--out", str(out)]
        )
        assert code == 0
        (row,) = read_csv(out)
        assert row["mode"] == "vector"
        assert float(row["gflops"]) > 0

    def test_thread_cap_env(self, tmp_path, monkeypatch):
        monkeypatch.setenv("PERFCHAR_THREADS", "1")
        out = tmp_path / "capped.csv"
        code = main(
            ["bench", "mem", "--elements", "100000", "--threads", "1,2", "--reps", "2",
             "--out", str(out)]
        )
        assert code == 0
        assert [r["threads"] for r in read_csv(out)] == ["1"]

    def test_sizing_violation_via_cli(self, fixtures_dir, capsys):
        code = main(
            ["bench", "mem", "--elements", "1000", "--reps", "1",
             "--spec", str(fixtures_dir / "platforms" / "dibona-tx2.json")]
        )
        assert code == 1
        assert "SizingError" in capsys.readouterr().err


class TestDeterminismAndAtomicity:
    def test_no_temp_files_left(self, fixtures_dir, tmp_path):
        out_dir = tmp_path / "net"
        main(["analyze", "network", "--in", str(fixtures_dir / "pairwise_8node.csv"),
              "--out-dir", str(out_dir)])
        assert not list(out_dir.glob("*.tmp"))

    def test_repeat_invocation_is_byte_identical(self, fixtures_dir, tmp_path):
        dirs = [tmp_path / "a", tmp_path / "b"]
        for d in dirs:
            main(["analyze", "scaling", "--model", "amdahl",
                  "--in", str(fixtures_dir / "amdahl_runs.csv"), "--out-dir", str(d)])
        for name in ("scaling_fits.csv", "scaling_projection.csv"):
            assert (dirs[0] / name).read_bytes() == (dirs[1] / name).read_bytes()
