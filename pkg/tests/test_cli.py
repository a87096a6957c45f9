"""Command-line surface: report contents, formats, exit codes."""

import numpy as np
import pytest

from emsync.cli import main
from emsync.fixtures import M_1_TEXT, M_EX_TEXT, M_GM_TEXT, M_NE_TEXT
from emsync.machine import parse_machine


@pytest.fixture(scope="module")
def machine_dir(tmp_path_factory):
    root = tmp_path_factory.mktemp("machines")
    for name, text in (
        ("M_EX", M_EX_TEXT),
        ("M_NE", M_NE_TEXT),
        ("M_GM", M_GM_TEXT),
        ("M_1", M_1_TEXT),
    ):
        (root / f"{name}.em").write_text(text, encoding="utf-8")
    return root


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def kv_lines(out):
    return [tuple(line.split("\t")) for line in out.splitlines()]


class TestReports:
    def test_validate_kv(self, capsys, machine_dir):
        code, out, err = run(
            capsys, "validate", str(machine_dir / "M_EX.em"), "--format", "kv"
        )
        assert code == 0 and err == ""
        assert kv_lines(out) == [
            ("machine", "M_EX"),
            ("states", "2"),
            ("symbols", "2"),
            ("edges", "4"),
            ("classification", "exact"),
        ]

    def test_classify_kv(self, capsys, machine_dir):
        code, out, _ = run(
            capsys, "classify", str(machine_dir / "M_NE.em"), "--format", "kv"
        )
        assert code == 0
        assert out == "classification\tnon-exact\n"

    def test_sync_rate_kv(self, capsys, machine_dir):
        code, out, _ = run(
            capsys, "sync-rate", str(machine_dir / "M_EX.em"), "--format", "kv"
        )
        assert code == 0
        assert out == "src\t0.353553391\n"

    def test_sync_rate_degenerate(self, capsys, machine_dir):
        code, out, _ = run(
            capsys, "sync-rate", str(machine_dir / "M_GM.em"), "--format", "kv"
        )
        assert code == 0
        assert out == "src\t0\n"

    def test_pred_rate_kv(self, capsys, machine_dir):
        code, out, _ = run(
            capsys, "pred-rate", str(machine_dir / "M_NE.em"), "--format", "kv"
        )
        assert code == 0
        assert kv_lines(out) == [
            ("prc", "0.829826533"),
            ("e_m.0", "0.186538596"),
            ("escape", "0"),
        ]

    def test_pred_rate_exact_machine(self, capsys, machine_dir):
        code, out, _ = run(
            capsys, "pred-rate", str(machine_dir / "M_EX.em"), "--format", "kv"
        )
        assert code == 0
        assert kv_lines(out) == [("prc", "0"), ("escape", "0.353553391")]

    def test_bounds_with_oracle(self, capsys, machine_dir):
        code, out, _ = run(
            capsys,
            "bounds",
            str(machine_dir / "M_EX.em"),
            "--length",
            "2",
            "--oracle",
            "--format",
            "kv",
        )
        assert code == 0
        assert kv_lines(out) == [
            ("length", "2"),
            ("nsyn.lower", "0.125"),
            ("nsyn.exact", "0.125"),
            ("nsyn.upper", "0.125"),
        ]

    def test_bounds_without_oracle(self, capsys, machine_dir):
        code, out, _ = run(
            capsys,
            "bounds",
            str(machine_dir / "M_GM.em"),
            "--length",
            "1",
            "--format",
            "kv",
        )
        assert code == 0
        assert kv_lines(out) == [
            ("length", "1"),
            ("nsyn.lower", "0"),
            ("nsyn.upper", "0"),
        ]

    def test_bounds_length_zero(self, capsys, machine_dir):
        code, out, _ = run(
            capsys,
            "bounds",
            str(machine_dir / "M_EX.em"),
            "--length",
            "0",
            "--format",
            "kv",
        )
        assert code == 0
        assert ("nsyn.upper", "1") in kv_lines(out)

    def test_simulate_fixed_length_keys(self, capsys, machine_dir):
        code, out, _ = run(
            capsys,
            "simulate",
            str(machine_dir / "M_NE.em"),
            "--length",
            "6",
            "--runs",
            "50",
            "--seed",
            "1",
            "--format",
            "kv",
        )
        assert code == 0
        keys = [key for key, _ in kv_lines(out)]
        assert keys == [
            "length",
            "runs",
            "seed",
            "q_l.mean.6",
            "q_l.median.6",
            "q_l.p10.6",
            "q_l.p90.6",
        ]

    def test_simulate_sweep_fits_slope(self, capsys, machine_dir):
        code, out, _ = run(
            capsys,
            "simulate",
            str(machine_dir / "M_NE.em"),
            "--sweep",
            "20:100:20",
            "--runs",
            "400",
            "--seed",
            "7",
            "--format",
            "kv",
        )
        assert code == 0
        report = dict(kv_lines(out))
        assert report["length"] == "100"
        for point in (20, 40, 60, 80, 100):
            assert f"q_l.median.{point}" in report
        # M_NE uncertainty decays like exp(-E_M L); the fitted slope should
        # sit near -0.1865 even with a modest sample
        assert abs(float(report["slope"]) + 0.186538596) < 0.05

    def test_human_format_aligns_keys(self, capsys, machine_dir):
        code, out, _ = run(capsys, "validate", str(machine_dir / "M_EX.em"))
        assert code == 0
        lines = out.splitlines()
        assert lines[0] == "machine         M_EX"
        assert lines[-1] == "classification  exact"


class TestGen:
    def test_stdout_machine_parses(self, capsys):
        code, out, err = run(capsys, "gen", "--states", "3", "--symbols", "2", "--seed", "4")
        assert code == 0 and err == ""
        m = parse_machine(out)
        assert m.n == 3 and m.k == 2

    def test_one_state_machine(self, capsys):
        code, out, _ = run(capsys, "gen", "--states", "1", "--symbols", "1")
        assert code == 0
        m = parse_machine(out)
        assert m.n == 1 and m.k == 1
        assert m.delta[0, 0] == 0 and m.probs[0, 0] == 1.0

    def test_deterministic_output(self, capsys):
        _, first, _ = run(capsys, "gen", "--states", "4", "--symbols", "3", "--seed", "9")
        _, second, _ = run(capsys, "gen", "--states", "4", "--symbols", "3", "--seed", "9")
        assert first == second

    def test_out_file_round_trips(self, capsys, tmp_path):
        target = tmp_path / "generated.em"
        code, out, _ = run(
            capsys,
            "gen",
            "--states",
            "3",
            "--symbols",
            "2",
            "--seed",
            "2",
            "--out",
            str(target),
            "--format",
            "kv",
        )
        assert code == 0
        report = dict(kv_lines(out))
        assert report["states"] == "3" and report["out"] == str(target)
        code, out, _ = run(capsys, "validate", str(target), "--format", "kv")
        assert code == 0
        assert ("states", "3") in kv_lines(out)

    def test_impossible_request_exhausts_tries(self, capsys):
        # two states over one symbol are either disconnected or equivalent
        code, out, err = run(
            capsys, "gen", "--states", "2", "--symbols", "1", "--max-tries", "200"
        )
        assert code == 3
        assert err.startswith("error:")


class TestExitCodes:
    def test_sync_rate_on_non_exact_machine(self, capsys, machine_dir):
        code, out, err = run(capsys, "sync-rate", str(machine_dir / "M_NE.em"))
        assert code == 1
        assert out == ""
        assert err.startswith("error:")
        assert "never merges" in err and "(0, 1)" in err

    def test_malformed_machine_file(self, capsys, tmp_path):
        bad = tmp_path / "bad.em"
        bad.write_text("machine x\nsymbols a\nstates 0\nend\n", encoding="utf-8")
        code, _, err = run(capsys, "classify", str(bad))
        assert code == 2
        assert err.startswith("error:") and "line 2" in err

    def test_missing_machine_file(self, capsys, tmp_path):
        code, _, err = run(capsys, "classify", str(tmp_path / "absent.em"))
        assert code == 2
        assert "cannot read" in err

    def test_oracle_budget_exceeded(self, capsys, machine_dir):
        code, _, err = run(
            capsys,
            "bounds",
            str(machine_dir / "M_EX.em"),
            "--length",
            "30",
            "--oracle",
        )
        assert code == 3
        assert "budget" in err

    def test_simulate_requires_length_or_sweep(self, capsys, machine_dir):
        code, _, err = run(capsys, "simulate", str(machine_dir / "M_NE.em"))
        assert code == 2
        assert "--length or --sweep" in err

    @pytest.mark.parametrize("sweep", ["10", "5:1:1", "1:10:0", "a:b:c", "-2:4:1"])
    def test_bad_sweep_values(self, capsys, machine_dir, sweep):
        code, _, err = run(
            capsys, "simulate", str(machine_dir / "M_NE.em"), f"--sweep={sweep}"
        )
        assert code == 2
        assert "sweep" in err


class TestDeterminism:
    def test_simulate_byte_identical(self, capsys, machine_dir):
        argv = (
            "simulate",
            str(machine_dir / "M_NE.em"),
            "--length",
            "30",
            "--runs",
            "200",
            "--seed",
            "13",
            "--format",
            "kv",
        )
        _, first, _ = run(capsys, *argv)
        _, second, _ = run(capsys, *argv)
        assert first == second

    def test_nine_significant_digits(self, capsys, machine_dir):
        _, out, _ = run(
            capsys, "sync-rate", str(machine_dir / "M_EX.em"), "--format", "kv"
        )
        value = out.split("\t")[1].strip()
        assert len(value.replace("0.", "")) == 9
        assert float(value) == pytest.approx(np.sqrt(0.125), abs=1e-9)
