import csv
import io
import json
import subprocess
import sys

import pytest
from hypothesis import given
from hypothesis import strategies as st

from toeplitz_ergodic import builtin_testfunction, cli
from toeplitz_ergodic.ergodic import BoundReport
from toeplitz_ergodic.oracles import OracleResult


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


class TestParseN:
    def test_range_inclusive(self):
        assert cli.parse_n("1:5") == [1, 2, 3, 4, 5]
        assert cli.parse_n("2:10:4") == [2, 6, 10]

    def test_list_and_scalar(self):
        assert cli.parse_n("5,1,3,3") == [1, 3, 5]
        assert cli.parse_n(7) == [7]
        assert cli.parse_n([4, 2]) == [2, 4]
        assert cli.parse_n({"start": 3, "stop": 5}) == [3, 4, 5]

    @pytest.mark.parametrize("bad", ["0:3", "5:1", "1:4:0", "a,b", "", [], True, "1:2:3:4"])
    def test_rejects(self, bad):
        with pytest.raises(cli.UsageError):
            cli.parse_n(bad)

    @given(st.integers(1, 500), st.integers(0, 500), st.integers(1, 50))
    def test_range_matches_python(self, a, span, step):
        assert cli.parse_n(f"{a}:{a + span}:{step}") == list(range(a, a + span + 1, step))


class TestSweep:
    def test_constant_symbol(self, capsys):
        code, out, err = run(capsys, "sweep", "--symbol", "const:3", "--testfn",
                             "bump:1,0.5,1", "--n", "1:10")
        assert code == 0
        table = rows(out)
        assert [int(r["n"]) for r in table] == list(range(1, 11))
        assert all(float(r["gap"]) == 0 and float(r["bound"]) == 0 for r in table)
        assert json.loads(err)["violations"] == []

    @pytest.mark.parametrize("spec", ["plateau:0,2,0.5", "plateau:0.5,1.5,0.25"])
    def test_shift_gap_constant(self, capsys, spec):
        G = builtin_testfunction(spec)
        code, out, _ = run(capsys, "sweep", "--symbol", "mode:1", "--testfn", spec,
                           "--n", "1:12")
        assert code == 0
        gaps = {float(r["gap"]) for r in rows(out)}
        assert len(gaps) == 1
        assert gaps.pop() == pytest.approx(abs(G(0.0) - G(1.0)), abs=1e-10)

    def test_cos_bound_holds(self, capsys):
        code, out, _ = run(capsys, "sweep", "--symbol", "cos2", "--testfn",
                           "plateau:0.5,1.5,0.25", "--n", "1:200")
        assert code == 0
        assert all(float(r["gap"]) <= float(r["bound"]) for r in rows(out))

    def test_header_and_empty_widom(self, capsys):
        _, out, _ = run(capsys, "sweep", "--symbol", "cos2", "--testfn", "bump:2,2.5,1",
                        "--n", "3")
        lines = out.splitlines()
        assert lines[0] == "n,lhs,rhs,gap,bound,widom_estimate"
        assert lines[1].endswith(",")

    def test_widom_column(self, capsys):
        _, out, _ = run(capsys, "sweep", "--symbol", "mode:1", "--testfn",
                        "plateau:0.5,1.5,0.25", "--n", "1,2", "--widom")
        vals = {r["widom_estimate"] for r in rows(out)}
        assert len(vals) == 1 and float(vals.pop()) == pytest.approx(-1, abs=1e-6)

    def test_json_matches_csv(self, capsys, tmp_path):
        base = ["sweep", "--symbol", "zeta2", "--testfn", "bump:2,2.5,1", "--n", "1:6:2"]
        run(capsys, *base, "--out", str(tmp_path / "a.csv"))
        run(capsys, *base, "--format", "json", "--out", str(tmp_path / "a.json"))
        table = rows((tmp_path / "a.csv").read_text())
        doc = json.loads((tmp_path / "a.json").read_text())
        assert len(table) == len(doc["records"]) == 3
        for r, j in zip(table, doc["records"]):
            for key in ("lhs", "rhs", "gap", "bound"):
                assert float(r[key]) == j[key]
            assert int(r["n"]) == j["n"] and j["widom_estimate"] is None
        assert "max_gap" in doc["summary"]

    def test_bit_stable(self, capsys):
        argv = ["sweep", "--symbol", "cos2shift:4", "--testfn", "plateau:1,3,1", "--n", "1:20"]
        _, first, _ = run(capsys, *argv)
        _, second, _ = run(capsys, *argv, "--jobs", "3")
        assert first == second

    def test_seventeen_digits(self, capsys):
        _, out, _ = run(capsys, "sweep", "--symbol", "zeta2", "--testfn", "bump:2,2.5,1",
                        "--n", "4")
        row = rows(out)[0]
        assert len(row["bound"].replace(".", "").lstrip("0")) >= 16

    def test_config_file_and_override(self, capsys, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"symbol": "const:3", "testfn": "bump:1,0.5,1",
                                   "n": {"start": 1, "stop": 4}, "format": "json"}))
        code, out, _ = run(capsys, "sweep", "--config", str(cfg))
        assert code == 0 and len(json.loads(out)["records"]) == 4
        code, out, _ = run(capsys, "sweep", "--config", str(cfg), "--n", "2", "--format", "csv")
        assert code == 0 and [r["n"] for r in rows(out)] == ["2"]

    def test_config_errors(self, capsys, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text('{"symbol": "cos2", "colour": 1}')
        assert run(capsys, "sweep", "--config", str(bad))[0] == 2
        bad.write_text("not json")
        assert run(capsys, "sweep", "--config", str(bad))[0] == 2
        assert run(capsys, "sweep", "--config", str(tmp_path / "missing.json"))[0] == 2

    def test_violation_exit(self, capsys, monkeypatch):
        from toeplitz_ergodic import ergodic
        monkeypatch.setattr(ergodic, "theorem1_bound",
                            lambda f, G: BoundReport(0.0, 0.0, 0.0, 0.0))
        code, _, _ = run(capsys, "sweep", "--symbol", "cos2", "--testfn", "bump:2,2.5,1",
                         "--n", "1:3")
        assert code == 4


class TestErrors:
    def test_unknown_symbol(self, capsys):
        code, _, err = run(capsys, "sweep", "--symbol", "nope", "--testfn", "bump:1,0.5,1",
                           "--n", "1")
        assert code == 2 and "nope" in err

    def test_unknown_testfn(self, capsys):
        assert run(capsys, "bound", "--symbol", "cos2", "--testfn", "bump")[0] == 2

    def test_missing_settings(self, capsys):
        assert run(capsys, "sweep", "--symbol", "cos2")[0] == 2

    def test_bad_n(self, capsys):
        assert run(capsys, "sweep", "--symbol", "cos2", "--testfn", "bump:1,0.5,1",
                   "--n", "0:4")[0] == 2

    def test_bad_widom_tol(self, capsys):
        assert run(capsys, "sweep", "--symbol", "cos2", "--testfn", "bump:1,0.5,1",
                   "--n", "2", "--widom-tol", "0")[0] == 2

    def test_argparse_usage(self, capsys):
        with pytest.raises(SystemExit) as exc:
            cli.main(["frobnicate"])
        assert exc.value.code == 2

    def test_numerical_failure(self, capsys, tmp_path):
        path = tmp_path / "nan.txt"
        path.write_text("0 1\n1 nan\n2 1\n")
        code, _, err = run(capsys, "bound", "--symbol", f"file:{path}", "--testfn",
                           "bump:1,0.5,1")
        assert code == 3 and "numerical" in err


class TestOtherCommands:
    def test_bound(self, capsys):
        code, out, _ = run(capsys, "bound", "--symbol", "mode:1", "--testfn", "plateau:1,3,1")
        doc = json.loads(out)
        assert code == 0
        assert doc["bound"] == pytest.approx(2 * (doc["c1"] + 2 * doc["c2"]))
        assert doc["m"] == pytest.approx(0, abs=1e-12) and doc["M"] == pytest.approx(1)

    def test_widom(self, capsys):
        code, out, _ = run(capsys, "widom", "--symbol", "const:3", "--testfn", "bump:1,0.5,1")
        assert code == 0 and abs(json.loads(out)["widom_trace"]) <= 1e-10

    def test_verify_filter(self, capsys):
        code, out, _ = run(capsys, "verify", "--filter", "holder")
        lines = out.splitlines()
        assert code == 0
        assert all(ln.startswith(("holder", "trace_holder")) for ln in lines[:-1])
        assert lines[-1].endswith("passed")

    def test_verify_failure_exit(self, capsys, monkeypatch):
        bad = OracleResult("fake", 1.0, 0.0, 1.0, False)
        monkeypatch.setattr(cli, "run_suite", lambda pattern: [bad])
        assert run(capsys, "verify")[0] == 4

    def test_list(self, capsys):
        code, out, _ = run(capsys, "list", "--constants")
        assert code == 0
        assert "zeta2" in out and "plateau:1,3,1" in out and "c1=" in out


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "toeplitz_ergodic.cli", "list"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and "cos2shift:4" in proc.stdout
