import subprocess
import sys

from crenaudit.cli import main


W3_SPEC = """kind: w_class
coefficients:
  - [0.5773502691896258]
  - [0.5773502691896258]
  - [0.5773502691896258]
"""

BAD_SPEC = """kind: amplitudes
profile: [2, 2]
amplitudes:
  - ["00", 0.5, 0.0]
"""


def run_cli(*argv, capsys):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


class TestStateCommand:
    def test_builtin_family(self, capsys):
        code, out, _ = run_cli("state", "--family", "ou", "--cut", "1", capsys=capsys)
        assert code == 0
        assert "3x3x3" in out
        assert "0.333333333333" in out

    def test_w_spec_schmidt(self, tmp_path, capsys):
        spec = tmp_path / "w3.yaml"
        spec.write_text(W3_SPEC)
        code, out, _ = run_cli("state", "--spec", str(spec), "--cut", "1", capsys=capsys)
        assert code == 0
        assert "0.666666666667" in out
        assert "0.333333333333" in out

    def test_malformed_spec_exits_2(self, tmp_path, capsys):
        spec = tmp_path / "bad.yaml"
        spec.write_text(BAD_SPEC)
        code, _, err = run_cli("state", "--spec", str(spec), capsys=capsys)
        assert code == 2
        assert "amplitudes" in err

    def test_missing_file_exits_2(self, capsys):
        code, _, err = run_cli("state", "--spec", "/does/not/exist.yaml", capsys=capsys)
        assert code == 2


class TestMeasureCommand:
    def test_pure_negativity(self, capsys):
        code, out, _ = run_cli(
            "measure", "--family", "ou", "--measure", "negativity", "--cut", "1",
            capsys=capsys,
        )
        assert code == 0
        assert out.split("\n")[1].split()[2] == "2"

    def test_roof_on_marginal(self, capsys):
        code, out, _ = run_cli(
            "measure", "--family", "ou", "--trace-out", "3", "--measure", "cren",
            capsys=capsys,
        )
        assert code == 0
        value = float(out.split("\n")[1].split()[2])
        assert abs(value - 1.0) <= 1e-6

    def test_bell_concurrence(self, capsys):
        code, out, _ = run_cli(
            "measure", "--family", "max_entangled", "--d", "2",
            "--measure", "concurrence", capsys=capsys,
        )
        assert code == 0
        assert out.split("\n")[1].split()[2] == "1"

    def test_unknown_measure_exits_2(self, capsys):
        code, _, err = run_cli(
            "measure", "--family", "ou", "--measure", "sorcery", capsys=capsys
        )
        assert code == 2
        assert "sorcery" in err


class TestAuditCommand:
    def test_counterexample_verdicts(self, capsys):
        code, out, _ = run_cli(
            "audit", "--family", "ou", "--focus", "1", "--format", "csv",
            capsys=capsys,
        )
        assert code == 0
        rows = {line.split(",")[1]: line for line in out.strip().split("\n")[1:]}
        assert "certified_violation" in rows["ckw"]
        assert "holds" in rows["cren"]

    def test_mixed_input_exits_2(self, capsys):
        code, _, err = run_cli(
            "audit", "--family", "ou", "--trace-out", "3", capsys=capsys
        )
        assert code == 2
        assert "pure" in err


class TestSweepCommand:
    def test_lambda_invariance_rows(self, capsys):
        code, out, _ = run_cli(
            "sweep", "--n", "3", "--d", "2", "--p-grid", "0.5",
            "--lambda-grid", "0,1", "--format", "csv", "--samples", "16",
            capsys=capsys,
        )
        assert code == 0
        rows = out.strip().split("\n")[1:]
        assert len(rows) == 2
        a = rows[0].split(",")
        b = rows[1].split(",")
        assert a[2] == b[2]       # global value identical across lambda
        assert a[3:5] == b[3:5]   # pair values identical across lambda

    def test_zero_weight_rows_vanish(self, capsys):
        code, out, _ = run_cli(
            "sweep", "--n", "3", "--d", "2", "--p-grid", "0",
            "--lambda-grid", "0.5", "--format", "csv", "--samples", "16",
            capsys=capsys,
        )
        assert code == 0
        row = out.strip().split("\n")[1].split(",")
        assert float(row[2]) == 0.0 and float(row[3]) == 0.0

    def test_partition_saturation(self, capsys):
        code, out, _ = run_cli(
            "sweep", "--n", "3", "--d", "2", "--p-grid", "0.5",
            "--lambda-grid", "0.5", "--partition", "1|23", "--format", "csv",
            "--samples", "16", capsys=capsys,
        )
        assert code == 0
        row = out.strip().split("\n")[1]
        assert "saturated" in row


class TestHuntCommand:
    def test_zero_trials(self, capsys):
        code, out, err = run_cli(
            "hunt", "--profile", "2,2,2", "--trials", "0", capsys=capsys
        )
        assert code == 0
        assert "trials=0 candidates=0 certified=0" in err

    def test_negative_trials_exit_2(self, capsys):
        code, _, err = run_cli(
            "hunt", "--profile", "2,2,2", "--trials", "-1", capsys=capsys
        )
        assert code == 2

    def test_bad_profile_exit_2(self, capsys):
        code, _, err = run_cli(
            "hunt", "--profile", "2,x", "--trials", "1", capsys=capsys
        )
        assert code == 2

    def test_bad_grid_exit_2(self, capsys):
        code, _, err = run_cli(
            "sweep", "--n", "3", "--p-grid", "0.5,oops", capsys=capsys
        )
        assert code == 2

    def test_findings_file_is_csv(self, tmp_path, capsys):
        out = tmp_path / "findings.csv"
        code, _, _ = run_cli(
            "hunt", "--profile", "2,2,2", "--trials", "2",
            "--output", str(out), capsys=capsys,
        )
        assert code == 0
        assert out.read_text().startswith("state_id,measure,focus")

    def test_qubit_regime(self, capsys):
        code, out, err = run_cli(
            "hunt", "--profile", "2,2,2", "--trials", "10", capsys=capsys
        )
        assert code == 0
        assert "candidates=0 certified=0" in err


class TestExitCodes:
    def test_numerical_failure_exits_3(self, capsys, monkeypatch):
        from crenaudit import NumericalError
        from crenaudit import cli as cli_module

        def broken(*args, **kwargs):
            raise NumericalError("reconstruction invariant broken")

        monkeypatch.setattr(cli_module, "optimize", broken)
        code, _, err = run_cli(
            "measure", "--family", "ou", "--trace-out", "3", "--measure", "cren",
            capsys=capsys,
        )
        assert code == 3
        assert "numerical failure" in err


class TestDeterminism:
    def test_identical_runs_byte_identical(self, tmp_path):
        out_a = tmp_path / "a.csv"
        out_b = tmp_path / "b.csv"
        argv = [
            "audit", "--family", "kim_sanders", "--format", "csv", "--seed", "0",
        ]
        assert main(argv + ["--output", str(out_a)]) == 0
        assert main(argv + ["--output", str(out_b)]) == 0
        assert out_a.read_bytes() == out_b.read_bytes()

    def test_console_entry_point(self):
        proc = subprocess.run(
            [sys.executable, "-m", "crenaudit.cli", "state", "--family", "ou"],
            capture_output=True,
            text=True,
        )
        assert proc.returncode == 0
        assert "3x3x3" in proc.stdout
