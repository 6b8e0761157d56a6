import io
import json
import subprocess
import sys
from fractions import Fraction as Q

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lvint.cli import ParseError, format_system, parse_system_file, parse_system_text, run_command
from lvint.system import InvalidResonance, LVSystem

ONES = "eigenvalues: 1 -1 1\nmatrix: 1 1 1 1 1 1 1 1 1\n"
ZERO2 = "eigenvalues: 2 -1 1\nmatrix:\n  0 0 0\n  0 0 0\n  0 0 0\n"


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code, report = run_command(list(argv), out, err)
    return code, report, out.getvalue(), err.getvalue()


@pytest.fixture
def files(tmp_path):
    paths = {}
    for name, text in {"ones.txt": ONES, "zero2.txt": ZERO2}.items():
        p = tmp_path / name
        p.write_text(text)
        paths[name] = str(p)
    return paths


def test_parse_examples(tmp_path):
    p = tmp_path / "zero.json"
    p.write_text(json.dumps({"eigenvalues": [1, -1, 1], "matrix": ["0"] * 9}))
    assert parse_system_file(p) == LVSystem((1, -1, 1))
    with pytest.raises(InvalidResonance):
        parse_system_text("eigenvalues: 1 1 1\nmatrix: 0 0 0 0 0 0 0 0 0\n")
    text = "# comment\neigenvalues: 1 -1 1\nmatrix: 0 0.5 0 0 0 0 0 0 0\n"
    with pytest.raises(ParseError) as info:
        parse_system_text(text, "bad.txt")
    assert (info.value.line, info.value.column) == (3, 11)
    with pytest.raises(ParseError):
        parse_system_text('{"eigenvalues": [1, -1, 1], "matrix": [0.5, 0, 0, 0, 0, 0, 0, 0, 0]}')


def test_named_parameters_and_fractions():
    s = parse_system_text("eigenvalues: 2 -1 1\na: 1/2\nk: -3\n")
    assert s.params()["a"] == Q(1, 2) and s.params()["k"] == -3 and s.params()["e"] == 0


def test_spec_command_examples(files):
    code, rep, _, _ = run("verify-case", "--resonance", "1:-1:1", "--case", "T3.case2",
                          "--samples", "5", "--order", "6", "--seed", "7")
    assert code == 0 and rep["results"]["verdict"] is True
    code, rep, out, _ = run("check", files["ones.txt"], "--expr", "x*y", "--kind", "fi")
    assert code == 1 and rep["results"]["log_derivative"] != "0" and "holds: false" in out
    code, rep, _, _ = run("dual", files["zero2.txt"], "--json")
    assert code == 0 and rep["results"]["eigenvalues"] == [1, -1, 2]


def test_other_subcommands(files):
    assert run("obstructions", files["ones.txt"], "--order", "4")[0] == 0
    code, rep, _, _ = run("series-integral", files["ones.txt"], "--rho", "1", "1", "0", "--order", "3")
    assert code == 0 and rep["results"]["obstructions"] == []
    code, rep, _, _ = run("combine", files["ones.txt"], "--atoms", "x", "y", "z")
    assert code == 0 and rep["results"]["basis"] == [["1", "0", "-1"]]
    assert run("linearize", files["ones.txt"], "--order", "4")[0] == 0
    code, rep, _, _ = run("theorem1", files["zero2.txt"], "--phi", "x*y^2", "--m", "x*y^2*z^2",
                          "--order", "4")
    assert code == 0 and rep["results"]["prefactor"] == ["0", "-1", "-1"]
    # parameter names in expressions are bound to the system's values
    case2 = files["ones.txt"].replace("ones.txt", "case2.txt")
    with open(case2, "w") as fh:
        fh.write("eigenvalues: 1 -1 1\ne: 2\na: 1\n")
    code, rep, _, _ = run("check", case2, "--expr", "y*(1-e*y)^(-1)", "--kind", "eig:-1")
    assert code == 0 and rep["results"]["holds"] is True
    code, rep, _, _ = run("catalog", "--resonance", "2:-1:1")
    assert code == 0 and rep["results"]["count"] == 15


def test_failures_and_usage_errors(files, tmp_path):
    off = tmp_path / "off.txt"
    off.write_text("eigenvalues: 1 -1 1\nmatrix: 2 1 1 1 1 1 1 1 1\n")
    assert run("obstructions", str(off), "--order", "4")[0] == 1
    assert run("nonsense")[0] == 2
    assert run("catalog", "--resonance", "3:-1:1")[0] == 2
    code, _, _, err = run("check", str(tmp_path / "missing.txt"), "--expr", "x", "--kind", "fi")
    assert code == 2 and "error" in err
    bad = tmp_path / "dec.txt"
    bad.write_text("eigenvalues: 1 -1 1\nmatrix:\n  0 0 0\n  0 0.5 0\n  0 0 0\n")
    code, _, _, err = run("dual", str(bad))
    assert code == 2 and "dec.txt:4:5:" in err


def test_reports_are_byte_identical(files):
    argv = ["verify-case", "--resonance", "2:-1:1", "--case", "T4.case7", "--samples", "2",
            "--seed", "3", "--json"]
    first, second = run(*argv)[2], run(*argv)[2]
    assert first == second and "timing" not in first
    assert run("obstructions", files["ones.txt"])[2] == run("obstructions", files["ones.txt"])[2]


def test_round_trip_of_emitted_system(files):
    _, _, out, _ = run("dual", files["zero2.txt"], "--json")
    text = json.loads(out)["results"]["system"]
    assert parse_system_text(text) == LVSystem((1, -1, 2))


fractions = st.builds(Q, st.integers(-50, 50), st.integers(1, 12))


@settings(max_examples=100, deadline=None)
@given(st.sampled_from([(1, -1, 1), (2, -1, 1), (1, -2, 1), (3, -2, 5)]),
       st.lists(fractions, min_size=9, max_size=9))
def test_round_trip_property(eigs, vals):
    s = LVSystem(eigs, [vals[0:3], vals[3:6], vals[6:9]])
    assert parse_system_text(format_system(s)) == s


def test_module_entry_point(files):
    proc = subprocess.run([sys.executable, "-m", "lvint", "dual", files["zero2.txt"]],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and "eigenvalues: [1, -1, 2]" in proc.stdout
