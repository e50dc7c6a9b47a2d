import json

import pytest

from catrewire.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_enumerate_lambda(capsys):
    code, out, _ = run(capsys, "enumerate", "--system", "lambda", "--size", "5", "--excess", "0")
    lines = out.splitlines()
    assert code == 0 and len(lines) == 5 and lines[-1] == "count: 4"


def test_enumerate_empty(capsys):
    code, out, _ = run(capsys, "enumerate", "--system", "lambda", "--size", "3", "--excess", "0")
    assert code == 0 and out == "count: 0\n"


def test_enumerate_bad_size(capsys):
    assert run(capsys, "enumerate", "--size", "-1")[0] == 2


def test_enumerate_companion_dump(capsys):
    code, out, _ = run(capsys, "enumerate", "--system", "lambda", "--size", "2", "--companion", "--format", "dump")
    doc = json.loads(out)
    assert doc["schema"] == "v1" and doc["count"] == 2
    assert doc["trees"] == ["@s:st(ds(_))", "@s:sd(ts(_))"]


def test_enumerate_is_deterministic(capsys):
    args = ("enumerate", "--system", "nonseparable", "--size", "4")
    assert run(capsys, *args) == run(capsys, *args)


def test_ceiling_exit(capsys, monkeypatch):
    monkeypatch.setenv("REWIRE_CEILING", "10")
    assert run(capsys, "enumerate", "--system", "nonseparable", "--size", "4")[0] == 3


def test_rewire(capsys):
    code, out, _ = run(capsys, "rewire", "--system", "lambda", "d(t())")
    assert code == 0
    assert out == "@s:sd(ts(_))\nbalanced: yes, defects: internal=0 external=0\n"


def test_rewire_without_diamonds_keeps_the_tree(capsys):
    code, out, _ = run(capsys, "rewire", "--system", "lambda", "bb(t()t())")
    assert out.splitlines() == ["@s:sbb(st(_)st(_))", "balanced: yes, defects: internal=0 external=2"]


def test_rewire_stdin(capsys, monkeypatch):
    import io

    monkeypatch.setattr("sys.stdin", io.StringIO("d(t())\n"))
    assert run(capsys, "rewire")[0] == 0


def test_rewire_negative(capsys):
    code, _, err = run(capsys, "rewire", "--system", "nonseparable", "d(e())")
    assert code == 4 and "not non-negative" in err


def test_invert(capsys):
    code, out, _ = run(capsys, "rewire", "--invert", "@s:sd(ts(_))")
    assert code == 0 and out.splitlines() == ["d(t())", "excess: 0"]


@pytest.mark.parametrize("tree", ["@s:sd(ts(bsb(_st(_))))", "@s:st(ds(_))"])
def test_invert_rejects(capsys, tree):
    code, _, err = run(capsys, "rewire", "--invert", tree)
    assert code == 5 and "unbalanced or internal defects" in err


def test_rewire_syntax_error(capsys):
    assert run(capsys, "rewire", "d(t()")[0] == 2


def test_verify_lambda(capsys):
    code, out, _ = run(capsys, "verify", "--system", "lambda", "--max-size", "8")
    assert code == 0 and out.endswith("all checks passed\n")


def test_verify_bad_system_file(capsys, tmp_path):
    p = tmp_path / "bad.txt"
    p.write_text("bb\nd\n")
    assert run(capsys, "verify", "--system", str(p))[0] == 2


def test_verify_system_file(capsys, tmp_path):
    p = tmp_path / "lam.txt"
    p.write_text("bb\nt\nd\n")
    code, out, _ = run(capsys, "verify", "--system", str(p), "--max-size", "5", "--order", "6",
                       "--format", "dump")
    assert code == 0 and json.loads(out)["ok"]


def test_unknown_system(capsys):
    assert run(capsys, "series", "--system", "no-such-thing")[0] == 2


def test_series_csq(capsys):
    code, out, _ = run(capsys, "series", "--system", "lambda", "--order", "8", "--which", "Csq")
    lines = out.splitlines()
    assert code == 0 and lines[2] == "t^2: 2" and lines[-1] == "t^8: 128"


def test_series_linear(capsys):
    code, out, _ = run(capsys, "series", "--system", "linear-basic", "--order", "5", "--which", "f")
    assert [line.split(": ")[1] for line in out.splitlines()] == ["0", "0", "1", "2", "3", "4"]


def test_series_order_zero(capsys):
    assert run(capsys, "series", "--order", "0")[0] == 2


def test_series_graded(capsys):
    code, out, _ = run(capsys, "series", "--system", "triangulation", "--order", "3", "--which", "f",
                       "--format", "dump")
    doc = json.loads(out)
    assert doc["var"] == "x" and doc["coefficients"] == ["0", "1", "4", "32"]


def test_casebook(capsys):
    code, out, _ = run(capsys, "casebook", "linear-basic")
    assert code == 0 and out.startswith("linear-basic: ok")
    code, out, _ = run(capsys, "casebook", "--list")
    assert len(out.splitlines()) == 6
    assert run(capsys, "casebook", "no-such-case")[0] == 2


def test_seedless_is_accepted(capsys):
    assert run(capsys, "series", "--seedless", "--order", "2")[0] == 0
