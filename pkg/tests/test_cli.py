import json

import pytest

from twosq.cli import build_parser, dispatch


def run_cli(args, capsys):
    code = dispatch(args)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestCliExamples:
    def test_sieve_window(self, capsys):
        code, out, _ = run_cli(["sieve", "--from", "100", "--to", "120"], capsys)
        assert code == 0
        doc = json.loads(out)
        assert doc["version"] == "v1"
        assert doc["count"] == 8
        assert doc["members"] == [100, 101, 104, 106, 109, 113, 116, 117]

    def test_special_point_value(self, capsys):
        code, out, _ = run_cli(["special", "--fn", "buchstab", "--at", "1.5"], capsys)
        assert code == 0
        assert out.strip() == "0.6666666667"

    def test_weights_lambda(self, capsys):
        code, out, _ = run_cli(["weights", "--k", "1", "--R", "10", "--W", "1"], capsys)
        assert code == 0
        doc = json.loads(out)
        assert doc["lambda"]["1"] == "5/3"
        assert doc["Q_nu"] == "5/3"

    def test_count_modes(self, capsys):
        code, out, _ = run_cli(["count", "--x", "10"], capsys)
        assert code == 0 and json.loads(out)["count"] == 7
        code, out, _ = run_cli(["count", "--x", "100", "--y", "20"], capsys)
        assert code == 0 and json.loads(out)["count"] == 7
        code, out, _ = run_cli(["count", "--x", "40", "--q", "4", "--a", "1"], capsys)
        assert code == 0 and json.loads(out)["count"] == 8

    def test_constants(self, capsys):
        code, out, _ = run_cli(["constants", "--truncation", "100000"], capsys)
        assert code == 0
        doc = json.loads(out)
        assert abs(doc["landau"] - 0.7642235) < 1e-5
        assert doc["tail_bound"] > 0

    def test_admissible(self, capsys):
        code, out, _ = run_cli(["admissible", "--k", "3", "--W", "21"], capsys)
        assert code == 0
        doc = json.loads(out)
        assert doc["forms"] == [[1, 1], [1, 5], [1, 13]]
        assert doc["nu_table"] == {"3": 2, "7": 3}

    def test_maier_demo(self, capsys):
        code, out, _ = run_cli(
            ["maier-demo", "--z", "3", "--a", "1", "--x", "10000", "--Q", "100"], capsys
        )
        assert code == 0
        doc = json.loads(out)
        assert doc["P"] == 3**7
        assert doc["lhs"] == 76

    def test_scan_residues_csv(self, capsys):
        code, out, _ = run_cli(
            ["scan-residues", "--x", "40", "--q", "4", "--format", "csv"], capsys
        )
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0] == "a,count,predicted,ratio,applicable"
        counts = [int(line.split(",")[1]) for line in lines[1:]]
        assert counts == [7, 8, 5, 0]

    def test_special_tabulation_csv(self, capsys):
        code, out, _ = run_cli(
            ["special", "--fn", "halfdim_f", "--from", "0", "--to", "1", "--step", "0.5"], capsys
        )
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0] == "kind,s,value"
        assert all(line.endswith(",0") for line in lines[1:])

    def test_gpy_demo_small(self, capsys):
        code, out, _ = run_cli(
            ["gpy-demo", "--k", "2", "--X", "20000", "--R", "50", "--mass-check"], capsys
        )
        assert code == 0
        doc = json.loads(out)
        assert doc["k"] == 2
        assert doc["mass_check"]["within_bound"] is True


class TestCliBehavior:
    def test_verify_thread_determinism(self, capsys):
        code1, out1, _ = run_cli(["verify", "--threads", "1"], capsys)
        code2, out2, _ = run_cli(["verify", "--threads", "8"], capsys)
        assert code1 == code2 == 0
        assert out1 == out2
        doc = json.loads(out1)
        assert doc["all_ok"] is True
        assert len(doc["checks"]) == 18

    def test_out_file(self, capsys, tmp_path):
        path = tmp_path / "report.json"
        code, out, _ = run_cli(["count", "--x", "10", "--out", str(path)], capsys)
        assert code == 0
        assert out == ""
        assert json.loads(path.read_text())["count"] == 7

    def test_domain_error_exit_code(self, capsys):
        code, _, err = run_cli(["count", "--x", "-5"], capsys)
        assert code == 1
        assert "error" in err

    def test_usage_error_exit_code(self, capsys):
        with pytest.raises(SystemExit) as exc:
            dispatch(["count", "--nonsense", "1"])
        assert exc.value.code == 2
        capsys.readouterr()

    def test_help_exits_zero(self, capsys):
        parser = build_parser()
        for action in parser._subparsers._group_actions:
            for name in action.choices:
                with pytest.raises(SystemExit) as exc:
                    dispatch([name, "--help"])
                assert exc.value.code == 0
                capsys.readouterr()

    def test_paper_strict_couples_R(self, capsys):
        # X = 2^40: R becomes floor(X^(1/10)) = 16
        code, out, _ = run_cli(
            ["weights", "--k", "1", "--X", str(2**40), "--paper-strict", "--R", "999"], capsys
        )
        assert code == 0
        doc = json.loads(out)
        assert doc["R"] == 16

    def test_paper_strict_rejects_violations(self, capsys):
        # k = 4 exceeds (ln X)^(1/5) at X = 10^6
        code, _, err = run_cli(
            ["gpy-demo", "--k", "4", "--X", "1000000", "--paper-strict"], capsys
        )
        assert code == 1
        assert "size condition" in err

    def test_threads_env_fallback(self, capsys, monkeypatch):
        monkeypatch.setenv("TWOSQ_THREADS", "2")
        code, out, _ = run_cli(["count", "--x", "1000"], capsys)
        assert code == 0
        monkeypatch.setenv("TWOSQ_THREADS", "zebra")
        code, _, err = run_cli(["count", "--x", "1000"], capsys)
        assert code == 1

    def test_float_formatting_ten_digits(self, capsys):
        code, out, _ = run_cli(["special", "--fn", "buchstab", "--at", "2.5", "--format", "json"], capsys)
        doc = json.loads(out)
        assert abs(doc["value"] - (1 + __import__("math").log(1.5)) / 2.5) < 1e-9
        assert "0.5621860432" in out
