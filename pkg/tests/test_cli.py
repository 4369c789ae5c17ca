"""Exit codes, report shapes, and determinism of the command line."""

import json
import subprocess
import sys
from fractions import Fraction

import pytest

from homkit.cli import main
from homkit.lie_algebra import LieAlgebra
from homkit.plane_wave import PlaneWaveData, frame_structure, pw_isometry_algebra
from homkit.reduction import generate_instance

WAVE = PlaneWaveData(
    2,
    ((Fraction(0), Fraction(1, 2)), (Fraction(-1, 2), Fraction(0))),
    ((Fraction(1), Fraction(0)), (Fraction(0), Fraction(-1, 2))),
)


@pytest.fixture
def wave_files(tmp_path):
    f = tmp_path / "f.json"
    h = tmp_path / "h.json"
    f.write_text(json.dumps([[str(x) for x in row] for row in WAVE.F]))
    h.write_text(json.dumps([[str(x) for x in row] for row in WAVE.H]))
    return str(f), str(h)


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


class TestClassify:
    def test_wave_fixture(self, tmp_path, capsys):
        path = tmp_path / "wave_n2.json"
        path.write_text(json.dumps(frame_structure(WAVE).to_json()))
        code, out, _ = run(capsys, "classify", str(path))
        assert code == 0
        report = json.loads(out)
        assert report == {"class": "T1+T3", "degeneracy": "null", "xi_norm": "0"}

    def test_quiet_prints_single_line(self, tmp_path, capsys):
        path = tmp_path / "s.json"
        path.write_text(json.dumps(frame_structure(WAVE).to_json()))
        code, out, _ = run(capsys, "classify", str(path), "--quiet")
        assert code == 0 and out == "T1+T3\n"

    def test_missing_file_is_malformed_input(self, capsys):
        code, _, err = run(capsys, "classify", "no-such-file.json")
        assert code == 2 and "no-such-file.json" in err

    def test_bad_schema_names_file(self, tmp_path, capsys):
        path = tmp_path / "bad.json"
        path.write_text(json.dumps({"metric": [[1]]}))
        code, _, err = run(capsys, "classify", str(path))
        assert code == 2 and "bad.json" in err


class TestJacobi:
    def test_pass(self, tmp_path, capsys):
        so3 = LieAlgebra.from_brackets(3, {(0, 1): {2: 1}, (1, 2): {0: 1}, (2, 0): {1: 1}})
        path = tmp_path / "so3.json"
        path.write_text(json.dumps(so3.to_json()))
        code, out, _ = run(capsys, "jacobi", str(path))
        assert code == 0
        assert json.loads(out)["max_abs_residual"] == "0"

    def test_failure_names_identity(self, tmp_path, capsys):
        bad = LieAlgebra.from_brackets(3, {(0, 1): {2: 1}, (0, 2): {0: 1}})
        path = tmp_path / "bad.json"
        path.write_text(json.dumps(bad.to_json()))
        code, out, _ = run(capsys, "jacobi", str(path))
        assert code == 1
        assert json.loads(out)["failing_identity"] == ["e0", "e1", "e2"]


class TestReductive:
    def test_reductive_split(self, tmp_path, capsys):
        so3 = LieAlgebra.from_brackets(3, {(0, 1): {2: 1}, (1, 2): {0: 1}, (2, 0): {1: 1}})
        path = tmp_path / "so3.json"
        path.write_text(json.dumps(so3.to_json()))
        code, out, _ = run(capsys, "reductive", str(path), "--m", "0,1", "--h", "2")
        assert code == 0
        report = json.loads(out)
        assert report["reductive"] is True and report["h_prime_dim"] == 1

    def test_non_reductive_exits_one(self, tmp_path, capsys):
        algebra = pw_isometry_algebra(WAVE)
        path = tmp_path / "wave.json"
        path.write_text(json.dumps(algebra.to_json()))
        code, out, _ = run(capsys, "reductive", str(path), "--m", "0,1,4,5", "--h", "2,3")
        assert code == 1
        assert json.loads(out)["reductive"] is False


class TestPlanewave:
    def test_verify_passes(self, wave_files, capsys):
        f, h = wave_files
        code, out, _ = run(
            capsys, "planewave", "--n", "2", "--F", f, "--H", h,
            "verify", "--points", "10", "--seed", "1",
        )
        assert code == 0
        report = json.loads(out)
        assert report["verdict"] == "pass" and report["failures"] == []

    def test_verify_fails_on_impossible_tolerance(self, wave_files, capsys):
        f, h = wave_files
        code, out, _ = run(
            capsys, "planewave", "--n", "2", "--F", f, "--H", h,
            "verify", "--points", "4", "--seed", "1", "--tol-r", "0",
        )
        assert code == 1
        assert "r_R" in json.loads(out)["failures"]

    def test_algebra_output_matches_library(self, wave_files, tmp_path, capsys):
        f, h = wave_files
        out_path = tmp_path / "alg.json"
        code, _, _ = run(
            capsys, "planewave", "--n", "2", "--F", f, "--H", h,
            "algebra", "--out", str(out_path),
        )
        assert code == 0
        written = LieAlgebra.from_json(json.loads(out_path.read_text()))
        assert written.f == pw_isometry_algebra(WAVE).f

    def test_asymmetric_profile_rejected(self, tmp_path, capsys):
        f = tmp_path / "f.json"
        h = tmp_path / "h.json"
        f.write_text(json.dumps([["0", "1"], ["-1", "0"]]))
        h.write_text(json.dumps([["0", "1"], ["0", "0"]]))
        code, _, err = run(capsys, "planewave", "--n", "2", "--F", str(f), "--H", str(h),
                           "verify")
        assert code == 2 and "symmetric" in err


class TestReduceAndGen:
    def test_generate_then_reduce(self, tmp_path, capsys):
        ansatz_path = tmp_path / "ansatz.json"
        code, _, _ = run(capsys, "gen", "--case", "deg", "--n", "3", "--seed", "7",
                         "--out", str(ansatz_path))
        assert code == 0
        report_path = tmp_path / "report.json"
        code, _, _ = run(capsys, "reduce", str(ansatz_path), "--case", "deg",
                         "--out", str(report_path))
        assert code == 0
        report = json.loads(report_path.read_text())
        assert report["verdict"] == "plane_wave"
        assert all(v == "0" for v in report["residuals"].values())

    def test_inconsistent_reduce_exits_one(self, tmp_path, capsys):
        data = generate_instance("deg", 2, 1).to_json()
        data["W"] = ["1", "0"]
        path = tmp_path / "bad.json"
        path.write_text(json.dumps(data))
        code, out, _ = run(capsys, "reduce", str(path), "--case", "deg")
        assert code == 1
        assert json.loads(out)["verdict"] == "inconsistent"

    def test_case_mismatch_is_malformed(self, tmp_path, capsys):
        path = tmp_path / "a.json"
        path.write_text(json.dumps(generate_instance("deg", 2, 1).to_json()))
        code, _, err = run(capsys, "reduce", str(path), "--case", "nondeg")
        assert code == 2 and "case" in err

    def test_nondeg_reduce(self, tmp_path, capsys):
        path = tmp_path / "a.json"
        path.write_text(json.dumps(generate_instance("nondeg", 3, 2).to_json()))
        code, out, _ = run(capsys, "reduce", str(path), "--case", "nondeg", "--quiet")
        assert code == 0 and out == "symmetric_space\n"

    def test_env_seed_override(self, tmp_path, capsys, monkeypatch):
        monkeypatch.setenv("HOMKIT_SEED", "11")
        code1, out1, _ = run(capsys, "gen", "--case", "deg", "--n", "2", "--seed", "5")
        monkeypatch.delenv("HOMKIT_SEED")
        code2, out2, _ = run(capsys, "gen", "--case", "deg", "--n", "2", "--seed", "11")
        assert code1 == code2 == 0
        assert out1 == out2

    def test_unknown_flag_exits_two(self, capsys):
        code, _, _ = run(capsys, "gen", "--case", "deg", "--n", "2", "--frobnicate")
        assert code == 2


class TestDeterminism:
    def test_byte_stable_across_processes(self, tmp_path):
        cmd = [sys.executable, "-m", "homkit.cli", "gen", "--case", "deg", "--n", "3",
               "--seed", "13"]
        a = subprocess.run(cmd, capture_output=True, text=True)
        b = subprocess.run(cmd, capture_output=True, text=True)
        assert a.returncode == b.returncode == 0
        assert a.stdout == b.stdout

    def test_verify_byte_stable(self, wave_files, capsys):
        f, h = wave_files
        args = ("planewave", "--n", "2", "--F", f, "--H", h, "verify", "--points", "5",
                "--seed", "3")
        _, out1, _ = run(capsys, *args)
        _, out2, _ = run(capsys, *args)
        assert out1 == out2
