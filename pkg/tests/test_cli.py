"""End-to-end tests of the command-line interface."""

import json
import math

import pytest

from entgeo import ghz_state, save_state, state_from_dict
from entgeo.cli import main


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestInvariantsCommand:
    def test_ghz_builtin(self, capsys):
        code, out, _ = run_cli(capsys, "invariants", "--builtin", "ghz",
                               "--format", "structured")
        assert code == 0
        doc = json.loads(out)
        assert doc["b_A"] == pytest.approx(0.0, abs=1e-12)
        assert doc["tau"] == pytest.approx(1.0, abs=1e-12)
        assert doc["G"][2][2] == pytest.approx(1.0, abs=1e-12)

    def test_w_builtin(self, capsys):
        code, out, _ = run_cli(capsys, "invariants", "--builtin", "w",
                               "--format", "structured")
        assert code == 0
        doc = json.loads(out)
        for key in ("b_A", "b_B", "b_C"):
            assert doc[key] == pytest.approx(1 / 3, abs=1e-12)
        assert doc["tau"] == pytest.approx(0.0, abs=1e-12)

    def test_structured_keys(self, capsys):
        _, out, _ = run_cli(capsys, "invariants", "--builtin", "ghz",
                            "--format", "structured")
        doc = json.loads(out)
        assert set(doc) == {"b_A", "b_B", "b_C", "t", "tau",
                            "bloch_A", "bloch_B", "bloch_C", "G"}
        assert len(doc["G"]) == 3 and len(doc["G"][0]) == 3

    def test_malformed_file_exit_2(self, capsys, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text(json.dumps({"n_qubits": 3, "amplitudes": [[1.0, 0.0]] * 4}))
        code, _, err = run_cli(capsys, "invariants", "--input", str(path))
        assert code == 2
        assert "amplitudes" in err

    def test_non_three_qubit_rejected(self, capsys):
        code, _, err = run_cli(capsys, "overlap", "--builtin", "dicke4")
        assert code == 0
        code, _, err = run_cli(capsys, "invariants", "--builtin", "dicke4")
        assert code == 2
        assert "overlap" in err

    def test_missing_source(self, capsys):
        code, _, err = run_cli(capsys, "invariants")
        assert code == 2


class TestOverlapCommand:
    def test_dicke4(self, capsys):
        code, out, _ = run_cli(capsys, "overlap", "--builtin", "dicke4",
                               "--restarts", "8", "--format", "structured")
        assert code == 0
        doc = json.loads(out)
        assert doc["g_squared"] == pytest.approx(0.375, abs=1e-9)
        assert doc["lagrange"] is None

    def test_ghz(self, capsys):
        code, out, _ = run_cli(capsys, "overlap", "--builtin", "ghz",
                               "--restarts", "8", "--format", "structured")
        assert code == 0
        doc = json.loads(out)
        assert doc["g_squared"] == pytest.approx(0.5, abs=1e-9)
        assert doc["geometric_measure"] == pytest.approx(math.log(2), abs=1e-9)
        assert doc["converged"] is True

    def test_deterministic(self, capsys):
        args = ("overlap", "--builtin", "w", "--restarts", "1", "--seed", "5",
                "--format", "structured")
        _, out1, _ = run_cli(capsys, *args)
        _, out2, _ = run_cli(capsys, *args)
        assert out1 == out2

    def test_file_input(self, capsys, tmp_path):
        path = tmp_path / "ghz.json"
        save_state(ghz_state(3), path)
        code, out, _ = run_cli(capsys, "overlap", "--input", str(path),
                               "--restarts", "8", "--format", "structured")
        assert code == 0
        assert json.loads(out)["g_squared"] == pytest.approx(0.5, abs=1e-9)

    def test_canonical_builtin(self, capsys):
        name = f"canonical:0.3,0.4,0,{math.sqrt(0.5)},0.5,0"
        code, out, _ = run_cli(capsys, "overlap", "--builtin", name,
                               "--restarts", "8", "--format", "structured")
        assert code == 0
        assert json.loads(out)["g_squared"] == pytest.approx(0.5, abs=1e-8)

    def test_unknown_builtin(self, capsys):
        code, _, err = run_cli(capsys, "overlap", "--builtin", "nope")
        assert code == 2
        assert "unknown builtin" in err


class TestCanonicalizeCommand:
    def test_ghz(self, capsys):
        code, out, _ = run_cli(capsys, "canonicalize", "--builtin", "ghz",
                               "--format", "structured")
        assert code == 0
        doc = json.loads(out)
        assert doc["params"]["d"] == pytest.approx(1 / math.sqrt(2), abs=1e-6)
        assert doc["params"]["h"] == pytest.approx(1 / math.sqrt(2), abs=1e-6)
        assert doc["infidelity"] < 1e-8

    def test_round_trips_through_state_format(self, capsys):
        code, out, _ = run_cli(capsys, "canonicalize", "--builtin", "w",
                               "--format", "structured")
        assert code == 0
        doc = json.loads(out)
        state = state_from_dict(doc["canonical_state"])
        assert state.n_qubits == 3


class TestVerifyTheoremCommand:
    def test_both_families_pass(self, capsys):
        code, out, _ = run_cli(capsys, "verify-theorem", "--family", "both",
                               "--samples", "100", "--seed", "3",
                               "--format", "structured")
        assert code == 0
        reports = json.loads(out)
        assert len(reports) == 2
        for r in reports:
            assert r["passed"] is True
            assert r["max_g2_error"] <= 1e-7

    def test_impossible_tolerance_exits_1(self, capsys):
        code, out, _ = run_cli(capsys, "verify-theorem", "--family", "h-nonzero",
                               "--samples", "20", "--seed", "1", "--tol", "1e-17")
        assert code == 1
        assert "FAIL" in out
        assert "failing sample" in out

    def test_deterministic(self, capsys):
        args = ("verify-theorem", "--family", "quadrilateral", "--samples", "30",
                "--seed", "2", "--format", "structured")
        _, out1, _ = run_cli(capsys, *args)
        _, out2, _ = run_cli(capsys, *args)
        assert out1 == out2


class TestDemoCommand:
    def test_ghz_sweep_balanced_row(self, capsys):
        code, out, _ = run_cli(capsys, "demo", "--name", "ghz-sweep",
                               "--format", "structured")
        assert code == 0
        rows = json.loads(out)
        balanced = [r for r in rows if abs(r["theta"] - math.pi / 4) < 1e-12]
        assert len(balanced) == 4  # one per qubit count
        for row in balanced:
            assert row["closed_form_g_squared"] == pytest.approx(0.5)
            assert row["numeric_g_squared"] == pytest.approx(0.5, abs=1e-8)

    def test_dicke4(self, capsys):
        code, out, _ = run_cli(capsys, "demo", "--name", "dicke4")
        assert code == 0
        assert "0.375" in out
        assert "does NOT extend" in out

    def test_wn(self, capsys):
        code, out, _ = run_cli(capsys, "demo", "--name", "wn",
                               "--format", "structured")
        assert code == 0
        rows = json.loads(out)
        assert all(r["equivalence_held"] for r in rows)

    def test_quadrilateral(self, capsys):
        code, out, _ = run_cli(capsys, "demo", "--name", "quadrilateral",
                               "--format", "structured")
        assert code == 0
        doc = json.loads(out)
        assert doc["samples"] == 100
        assert doc["max_abs_g_difference"] <= 1e-7

    def test_unknown_name(self, capsys):
        with pytest.raises(SystemExit) as err:
            run_cli(capsys, "demo", "--name", "nope")
        assert err.value.code == 2


class TestInverseSearchCommand:
    def test_runs_and_reports_controls(self, capsys):
        code, out, _ = run_cli(capsys, "inverse-search", "--samples", "10",
                               "--seed", "4", "--format", "structured")
        assert code == 0
        doc = json.loads(out)
        controls = [h for h in doc["hits"] if h["is_control"]]
        assert len(controls) == 3

    def test_deterministic(self, capsys):
        args = ("inverse-search", "--samples", "10", "--seed", "4",
                "--format", "structured")
        _, out1, _ = run_cli(capsys, *args)
        _, out2, _ = run_cli(capsys, *args)
        assert out1 == out2
