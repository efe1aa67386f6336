import json

import numpy as np
import pytest

from intertwine import cli


def run(args, capsys=None):
    code = cli.main(args)
    if capsys is not None:
        return code, capsys.readouterr()
    return code


def load_json(path):
    with open(path) as f:
        return json.load(f)


def as_complex(pair):
    return complex(pair[0], pair[1])


def as_matrix(rows):
    return np.array([[as_complex(z) for z in row] for row in rows])


class TestParsing:
    def test_parse_matrix_plain_numbers(self):
        m = cli.parse_matrix([[0, 1], [1, 0]])
        assert np.array_equal(m, np.array([[0, 1], [1, 0]], dtype=complex))

    def test_parse_matrix_complex_pairs(self):
        m = cli.parse_matrix([[[0, 0.5], [1, 0]], [[1, 0], [0, -0.5]]])
        assert np.array_equal(m, np.array([[0.5j, 1], [1, -0.5j]]))

    def test_parse_matrix_rejects_ragged(self):
        with pytest.raises(cli.ConfigError):
            cli.parse_matrix([[1, 2], [3]])

    def test_parse_matrix_rejects_rectangular(self):
        with pytest.raises(cli.ConfigError):
            cli.parse_matrix([[1, 2, 3], [4, 5, 6]])

    def test_parse_psi0(self):
        psi = cli.parse_psi0("1,0;0,-1")
        assert np.array_equal(psi, np.array([1.0, -1j]))

    def test_parse_psi0_garbage(self):
        with pytest.raises(cli.ConfigError):
            cli.parse_psi0("1;two;3")

    def test_parse_grid(self):
        gammas, jts = cli.parse_grid("0:1:3,0.5:1.5:2")
        assert np.allclose(gammas, [0, 0.5, 1])
        assert np.allclose(jts, [0.5, 1.5])

    def test_parse_grid_garbage(self):
        with pytest.raises(cli.ConfigError):
            cli.parse_grid("0:1:3")
        with pytest.raises(cli.ConfigError):
            cli.parse_grid("0:1:1,0:1:5")


class TestConfigErrors:
    def test_no_source_exits_1(self, tmp_path):
        assert run(["static", "--out", str(tmp_path)]) == 1

    def test_both_sources_exits_1(self, tmp_path):
        path = tmp_path / "h.json"
        path.write_text('{"matrix": [[0, 1], [1, 0]]}')
        assert run(
            ["static", "--model", "quantum-dimer", "--input", str(path),
             "--out", str(tmp_path)]
        ) == 1

    def test_unknown_model_exits_1(self, tmp_path):
        assert run(["static", "--model", "nope", "--out", str(tmp_path)]) == 1

    def test_unknown_waveform_exits_1(self, tmp_path):
        assert run(
            ["floquet", "--model", "quantum-dimer", "--waveform", "sawtooth",
             "--out", str(tmp_path)]
        ) == 1

    def test_missing_input_file_exits_1(self, tmp_path):
        assert run(
            ["static", "--input", str(tmp_path / "missing.json"), "--out", str(tmp_path)]
        ) == 1

    def test_invalid_json_exits_1(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{not json")
        assert run(["static", "--input", str(path), "--out", str(tmp_path)]) == 1

    def test_bad_grid_exits_1(self, tmp_path):
        assert run(
            ["scan", "--model", "quantum-dimer", "--grid", "bogus",
             "--out", str(tmp_path)]
        ) == 1

    def test_bad_psi0_exits_1(self, tmp_path):
        assert run(
            ["trace", "--model", "quantum-dimer", "--psi0", "1,0",
             "--out", str(tmp_path)]
        ) == 1

    def test_unknown_format_exits_1(self, tmp_path):
        assert run(
            ["static", "--model", "quantum-dimer", "--format", "xml",
             "--out", str(tmp_path)]
        ) == 1


class TestStatic:
    def test_builtin_quantum(self, tmp_path, capsys):
        code, cap = run(
            ["static", "--model", "quantum-dimer", "--gamma", "0.5",
             "--out", str(tmp_path)],
            capsys,
        )
        assert code == 0
        assert "phase=symmetric" in cap.out
        report = load_json(tmp_path / "static_report.json")
        assert report["pt_phase"] == "symmetric"
        assert report["conserved_count"] == 2
        assert len(report["operators"]) == 4
        csv = (tmp_path / "liouvillian_spectrum.csv").read_text().splitlines()
        assert csv[0] == "index,re_computed,im_computed,re_predicted,im_predicted"
        assert len(csv) == 5

    def test_raw_matrix_matches_builtin(self, tmp_path):
        # H = J sigma_x + i gamma sigma_z fed in as an explicit matrix
        path = tmp_path / "h.json"
        path.write_text(json.dumps({"matrix": [[[0, 0.5], [1, 0]], [[1, 0], [0, -0.5]]]}))
        out_a, out_b = tmp_path / "a", tmp_path / "b"
        assert run(["static", "--model", "quantum-dimer", "--out", str(out_a)]) == 0
        assert run(["static", "--input", str(path), "--out", str(out_b)]) == 0
        ra = load_json(out_a / "static_report.json")
        rb = load_json(out_b / "static_report.json")
        assert np.allclose(as_matrix(ra["hamiltonian"]), as_matrix(rb["hamiltonian"]))
        for ea, eb in zip(ra["operators"], rb["operators"]):
            assert abs(as_complex(ea["rate"]) - as_complex(eb["rate"])) < 1e-12
            assert np.max(np.abs(as_matrix(ea["matrix"]) - as_matrix(eb["matrix"]))) < 1e-12

    def test_broken_phase_report(self, tmp_path):
        assert run(
            ["static", "--model", "quantum-dimer", "--gamma", "1.5",
             "--out", str(tmp_path)]
        ) == 0
        report = load_json(tmp_path / "static_report.json")
        assert report["pt_phase"] == "broken"
        transient = [op for op in report["operators"] if abs(as_complex(op["rate"])) > 1e-8]
        assert all(op["hermitian"] for op in transient)

    def test_schedule_input_rejected_for_static(self, tmp_path):
        sched = {
            "dim": 2,
            "events": [
                {"segment": {"duration": 0.5, "h": [[0, 1], [1, 0]]}},
                {"kick": {"k": [[0, 1], [1, 0]]}},
            ],
        }
        path = tmp_path / "sched.json"
        path.write_text(json.dumps(sched))
        assert run(["static", "--input", str(path), "--out", str(tmp_path)]) == 1


class TestFloquet:
    def test_builtin_quantum_multipliers(self, tmp_path):
        assert run(
            ["floquet", "--model", "quantum-dimer", "--gamma", "0.5", "--JT", "1",
             "--out", str(tmp_path)]
        ) == 0
        report = load_json(tmp_path / "floquet_report.json")
        assert report["phase"] == "symmetric"
        lams = [as_complex(op["rate"]) for op in report["operators"]]
        assert sum(abs(l - 1) < 1e-8 for l in lams) == 2
        assert min(abs(l - (-0.437 + 0.899j)) for l in lams) < 1e-3
        csv = (tmp_path / "floquet_multipliers.csv").read_text().splitlines()
        assert csv[0] == "label,re_lambda,im_lambda,hermitian,residual"
        assert len(csv) == 5

    def test_schedule_json_matches_builtin(self, tmp_path):
        # quantum dimer square wave written out as an explicit two-segment schedule
        sched = {
            "dim": 2,
            "events": [
                {"segment": {"duration": 0.5,
                             "h": [[[0, 0.5], [1, 0]], [[1, 0], [0, -0.5]]]}},
                {"segment": {"duration": 0.5,
                             "h": [[[0, -0.5], [1, 0]], [[1, 0], [0, 0.5]]]}},
            ],
        }
        path = tmp_path / "sched.json"
        path.write_text(json.dumps(sched))
        out_a, out_b = tmp_path / "a", tmp_path / "b"
        assert run(["floquet", "--model", "quantum-dimer", "--out", str(out_a)]) == 0
        assert run(["floquet", "--input", str(path), "--out", str(out_b)]) == 0
        ra = load_json(out_a / "floquet_report.json")
        rb = load_json(out_b / "floquet_report.json")
        assert np.max(np.abs(as_matrix(ra["propagator"]) - as_matrix(rb["propagator"]))) < 1e-12

    def test_recursive_check_present(self, tmp_path):
        assert run(
            ["floquet", "--model", "classical-dimer", "--gamma", "0.5", "--JT", "1",
             "--out", str(tmp_path)]
        ) == 0
        rec = load_json(tmp_path / "floquet_report.json")["recursive_check"]
        assert rec is not None
        assert isinstance(rec["symmetrized_independent"], bool)


class TestTrace:
    def test_outputs_and_constancy(self, tmp_path):
        assert run(
            ["trace", "--model", "quantum-dimer", "--gamma", "0.5", "--JT", "1",
             "--periods", "4", "--steps-per-period", "8", "--psi0", "1,0;0,0",
             "--format", "csv,json,gnuplot", "--out", str(tmp_path)]
        ) == 0
        assert (tmp_path / "trace.gp").exists()
        report = load_json(tmp_path / "trace_report.json")
        assert report["periods"] == 4
        lines = (tmp_path / "trace.csv").read_text().splitlines()
        rows = [ln.split(",") for ln in lines[1:]]
        for label in report["labels"]:
            assert (tmp_path / f"trace_{label}.dat").exists()
        # the unit-multiplier operators stay at 1 on stroboscopic samples
        unit = {
            lab
            for lab, lam in zip(report["labels"], report["multipliers"])
            if abs(as_complex(lam) - 1) < 1e-8
        }
        assert len(unit) == 2
        for row in rows:
            if row[1] in unit and row[4] == "1":
                assert abs(float(row[2]) - 1.0) < 1e-8
                assert abs(float(row[3])) < 1e-8

    def test_transients_follow_multiplier_power(self, tmp_path):
        assert run(
            ["trace", "--model", "classical-dimer", "--gamma", "0.5", "--JT", "1",
             "--periods", "5", "--steps-per-period", "4", "--out", str(tmp_path)]
        ) == 0
        report = load_json(tmp_path / "trace_report.json")
        rows = [ln.split(",") for ln in
                (tmp_path / "trace.csv").read_text().splitlines()[1:]]
        for lab, lam, norm in zip(
            report["labels"], report["multipliers"], report["normalized"]
        ):
            if not norm:
                continue
            lam = as_complex(lam)
            for row in rows:
                if row[1] == lab and row[4] == "1":
                    got = complex(float(row[2]), float(row[3]))
                    want = lam ** round(float(row[0]))
                    assert abs(got - want) < 1e-7 * max(1.0, abs(want))


class TestScan:
    def test_grid_and_contour(self, tmp_path):
        assert run(
            ["scan", "--model", "classical-dimer", "--grid", "0.5:2:7,1:1.5:2",
             "--out", str(tmp_path)]
        ) == 0
        grid = (tmp_path / "scan_grid.csv").read_text().splitlines()
        assert grid[0] == "gamma_over_j,jt,phase,kappa_ratio"
        assert len(grid) == 1 + 7 * 2
        report = load_json(tmp_path / "scan_report.json")
        assert report["failures"] == []
        assert len(report["contour"]) == 2
        for pt in report["contour"]:
            want = np.arctanh(np.cos(pt["jt"] / 2)) / pt["jt"]
            assert pt["gamma_over_j"] == pytest.approx(want, abs=1e-6)
            assert pt["analytic_gamma_over_j"] == pytest.approx(want, abs=1e-12)

    def test_single_thread_env(self, tmp_path, monkeypatch):
        monkeypatch.setenv("INTERTWINE_THREADS", "1")
        assert run(
            ["scan", "--model", "quantum-dimer", "--grid", "0:1:3,0.5:1:2",
             "--out", str(tmp_path)]
        ) == 0
        assert (tmp_path / "scan_grid.csv").exists()

    def test_requires_model(self, tmp_path):
        assert run(["scan", "--grid", "0:1:3,0.5:1:2", "--out", str(tmp_path)]) == 1


class TestDeterminism:
    def test_repeated_runs_byte_identical(self, tmp_path):
        out_a, out_b = tmp_path / "a", tmp_path / "b"
        args = ["floquet", "--model", "quantum-dimer", "--gamma", "0.5", "--JT", "1"]
        assert run(args + ["--out", str(out_a)]) == 0
        assert run(args + ["--out", str(out_b)]) == 0
        for name in ("floquet_report.json", "floquet_multipliers.csv"):
            assert (out_a / name).read_bytes() == (out_b / name).read_bytes()

    def test_no_raw_numpy_reprs_in_csv(self, tmp_path):
        assert run(
            ["trace", "--model", "quantum-dimer", "--periods", "2",
             "--steps-per-period", "4", "--out", str(tmp_path)]
        ) == 0
        text = (tmp_path / "trace.csv").read_text()
        assert "np.float64" not in text
        assert "(" not in text


class TestVerify:
    def test_passes_at_default_tolerances(self, capsys):
        code, cap = run(["verify"], capsys)
        assert code == 0
        assert "FAIL" not in cap.out
        assert cap.out.count("[PASS]") >= 10

    def test_unreachable_tolerance_exits_3(self, capsys):
        code, cap = run(["verify", "--tol-override", "1e-300"], capsys)
        assert code == 3
        assert "[FAIL]" in cap.out
