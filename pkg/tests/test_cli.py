import json
import shlex
import subprocess
import sys
from pathlib import Path

from twistc.cli import main

GOLDEN = Path(__file__).parent / "golden"
STUB = f"{shlex.quote(sys.executable)} {shlex.quote(str(Path(__file__).parent / 'smt_stub.py'))}"


def run_cli(args, stdin=""):
    proc = subprocess.run(
        [sys.executable, "-m", "twistc.cli", *args],
        input=stdin,
        capture_output=True,
        text=True,
        timeout=120,
    )
    return proc.returncode, proc.stdout, proc.stderr


def test_check_ok(tmp_path):
    f = tmp_path / "ok.tw"
    f.write_text("p or q\n")
    assert main(["check", str(f)]) == 0


def test_check_reports_unbound_with_span(tmp_path, capsys):
    f = tmp_path / "bad.tw"
    f.write_text("bigand $i in (1..2): P($k) end\n")
    code = main(["check", str(f)])
    err = capsys.readouterr().err
    assert code == 1
    assert "unbound variable $k" in err
    assert "line 1" in err


def test_exit_codes_contract(tmp_path):
    sat = tmp_path / "sat.tw"
    sat.write_text("p or q\n")
    unsat = tmp_path / "unsat.tw"
    unsat.write_text("p and not p\n")
    code, _, _ = run_cli(["solve", str(sat)])
    assert code == 0
    code, _, _ = run_cli(["solve", str(unsat)])
    assert code == 20
    # unknown via a tiny conflict budget on a hard instance
    hard = tmp_path / "hard.tw"
    hard.write_text(
        "bigand $p in (1..9): bigor $h in (1..8): X($p,$h) end end\n"
        "bigand $h in (1..8): atmost 1, $p in (1..9): X($p,$h) end end\n"
    )
    code, _, _ = run_cli(["solve", str(hard), "--budget", "3"])
    assert code == 30
    # user error
    bad = tmp_path / "bad.tw"
    bad.write_text("p and\n")
    code, _, _ = run_cli(["solve", str(bad)])
    assert code == 1
    # i/o error
    code, _, _ = run_cli(["solve", str(tmp_path / "missing.tw")])
    assert code == 2


def test_usage_error_is_user_error(tmp_path):
    f = tmp_path / "x.tw"
    f.write_text("p\n")
    code, _, _ = run_cli(["solve", str(f), "--true-only", "--false-only"])
    assert code == 1


def test_dimacs_golden_bytes():
    code, out, _ = run_cli(["dimacs", "corpus/xor.tw"])
    assert code == 0
    golden = (GOLDEN / "xor.dimacs").read_text()
    assert out == golden
    # byte-identical across runs
    _, out2, _ = run_cli(["dimacs", "corpus/xor.tw"])
    assert out2 == out


def test_dimacs_no_comments():
    code, out, _ = run_cli(["dimacs", "corpus/xor.tw", "--no-comments"])
    assert code == 0
    assert out == "p cnf 2 2\n1 2 0\n-1 -2 0\n"


def test_solve_stdin_and_json_schema():
    code, out, _ = run_cli(["solve", "-", "--json", "--limit", "3"], stdin="p or q\n")
    assert code == 0
    doc = json.loads(out)
    assert doc["status"] == "sat"
    assert len(doc["models"]) == 3
    for model in doc["models"]:
        for row in model:
            assert set(row) == {"atom", "value"}
            assert isinstance(row["atom"], str) and isinstance(row["value"], bool)
    schema = json.loads((Path("docs") / "solve-json.schema.json").read_text())
    _check_schema(doc, schema)


def _check_schema(doc, schema):
    """Minimal structural validation against the documented schema."""
    assert schema["type"] == "object"
    for key in schema["required"]:
        assert key in doc
    assert doc["status"] in schema["properties"]["status"]["enum"]


def test_latex_output():
    code, out, _ = run_cli(["latex", "corpus/xor.tw"])
    assert code == 0
    assert r"\bigwedge^{= 1}" in out


def test_smt2_output_and_force(tmp_path):
    code, out, _ = run_cli(["smt2", "corpus/temporal_mutex.tw"])
    assert code == 0
    assert "(set-logic QF_RDL)" in out
    f = tmp_path / "plain.tw"
    f.write_text("p or q\n")
    code, _, _ = run_cli(["smt2", str(f)])
    assert code == 1
    code, out, _ = run_cli(["smt2", str(f), "--force"])
    assert code == 0
    assert "(declare-const p Bool)" in out


def test_count_subcommand(tmp_path):
    code, out, _ = run_cli(["count", "corpus/xor.tw", "--limit", "10"])
    assert code == 0 and out.strip() == "2"


def test_solve_filter_and_polarity(tmp_path):
    f = tmp_path / "two.tw"
    f.write_text("A(1) and not A(2) and B(1)\n")
    code, out, _ = run_cli(["solve", str(f), "--filter", r"^A\(", "--true-only"])
    assert code == 0
    assert out.splitlines() == ["A(1) = true"]


def test_solve_smt_requires_solver(tmp_path, monkeypatch):
    code, _, err = run_cli(["solve", "corpus/kamaji.tw"])
    assert code == 1
    assert "TWISTC_SMT_CMD" in err


def test_solve_smt_env_unsat(tmp_path, monkeypatch):
    f = tmp_path / "uns.tw"
    f.write_text("int x\nformulas:\n(x(1) > 0) and (x(1) < 0)\n")
    proc = subprocess.run(
        [sys.executable, "-m", "twistc.cli", "solve", str(f)],
        capture_output=True,
        text=True,
        env={"TWISTC_SMT_CMD": f"{STUB} trivial", "PATH": "/usr/bin:/bin"},
    )
    assert proc.returncode == 20


def test_external_sat_cmd(tmp_path):
    f = tmp_path / "x.tw"
    f.write_text("p or q\n")
    stub = f"{shlex.quote(sys.executable)} -m twistc.dimacs_tool -"
    code, out, _ = run_cli(["solve", str(f), "--sat-cmd", stub])
    assert code == 0
    assert "= true" in out or "= false" in out


def test_internal_failure_exits_99(tmp_path, monkeypatch, capsys):
    import twistc.cli as cli
    from twistc.sat import InternalSolverError

    class Boom:
        def __init__(self, *a, **kw):
            pass

        def solve(self):
            raise InternalSolverError("model does not satisfy clause [1]")

    monkeypatch.setattr(cli, "Session", Boom)
    f = tmp_path / "x.tw"
    f.write_text("p or q\n")
    assert main(["solve", str(f)]) == 99
    assert "internal error" in capsys.readouterr().err
