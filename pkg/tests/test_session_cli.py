import json
from fractions import Fraction

import pytest

from cohnloc.addcat import Matrix
from cohnloc.cli import EXIT_FALSE, EXIT_INPUT, EXIT_OK, main, run
from cohnloc.coeff import Integers
from cohnloc.equality import decide_equal_oracle
from cohnloc.session import SessionError, evaluate, parse_expr, parse_matrix, parse_session
from helpers import GOLDEN, golden_commands, golden_report

Z = Integers()

BASIC = """\
# comment line
ring Z
mat f = [[1, 2], [0, 1]]
expr e = inv(s0) + inv(s0)
s s0 = [[2]]
cx C = {(-1,1),(0,1)} d(-1) = [[2]]
cert K = diag(s0, id1) below(0,1) = [[5]]
"""


def test_session_declarations():
    sess = parse_session(BASIC)
    assert sess.ring == Z
    assert sess.sset[0] == Matrix.from_ints(Z, [[2]])
    assert sess.matrices["f"] == Matrix.from_ints(Z, [[1, 2], [0, 1]])
    assert sess.complexes["C"].d(-1) == Matrix.from_ints(Z, [[2]])
    assert sess.certs["K"].assembled == Matrix.from_ints(Z, [[2, 0], [5, 1]])
    one = evaluate(sess, "id(1)")
    assert decide_equal_oracle(evaluate(sess, "e"), one) is True


def test_matrix_shorthands():
    assert parse_matrix(Z, "zeros(2,1)") == Matrix.zero(Z, 2, 1)
    assert parse_matrix(Z, "eye(2)") == Matrix.identity(Z, 2)
    assert parse_matrix(Z, "0", (1, 3)) == Matrix.zero(Z, 1, 3)


def test_expression_precedence():
    node = parse_expr("a + b * c")
    assert node.op == "add" and node.args[1].op == "mul"
    node = parse_expr("-(a + b)")
    assert node.op == "neg"


@pytest.mark.parametrize("text, line", [
    ("ring Z\nmat f = [[1, 2]\n", 2),
    ("ring Z\nmat f = [[1]]\nmat f = [[2]]\n", 3),
    ("ring Z\nexpr e = inv(nope)\n", 2),
    ("ring Z\nbogus x\n", 2),
    ("ring Z\nmat inv = [[1]]\n", 2),
    ("ring Z\ncx C = {(0,1),(1,1),(2,1)} d(0) = [[1]] d(1) = [[1]]\n", 2),
])
def test_session_errors_name_the_line(text, line):
    with pytest.raises(SessionError) as exc:
        parse_session(text)
    assert exc.value.line == line


def write(tmp_path, text):
    p = tmp_path / "s.cohn"
    p.write_text(text)
    return str(p)


def test_cli_exit_codes(tmp_path):
    path = write(tmp_path, BASIC)
    assert run([path, "eq", "e", "id(1)"])[0] == EXIT_OK
    assert run([path, "eq", "inv(s0)", "id(1)"])[0] == EXIT_FALSE
    assert run([path, "eq", "missing", "id(1)"])[0] == EXIT_INPUT
    assert run([path, "factor", "nope"])[0] == EXIT_INPUT
    assert run([str(tmp_path / "absent.cohn"), "normalize", "e"])[0] == EXIT_INPUT
    assert run([write(tmp_path, "ring Z\nmat f = [[1\n"), "normalize", "f"])[0] == EXIT_INPUT


def test_cli_report_shape(tmp_path):
    path = write(tmp_path, BASIC)
    code, report, _ = run([path, "normalize", "e"])
    assert code == EXIT_OK
    assert set(report) == {"command", "inputs", "result", "witnesses", "timing"}
    assert report["result"]["triple"]["fraction_value"] == [["1"]]


def test_main_writes_json(tmp_path, capsys):
    path = write(tmp_path, BASIC)
    out = tmp_path / "r.json"
    assert main([path, "wrange", "C", "--json", str(out)]) == EXIT_OK
    assert json.loads(out.read_text())["command"] == "wrange"
    assert "unsupported" in json.loads(out.read_text())["result"]["range"]
    assert capsys.readouterr().out


def test_golden_reports_are_current():
    for name, argv in golden_commands():
        code, body = golden_report(argv)
        assert body == (GOLDEN / "reports" / f"{name}.json").read_text(), name
        assert code == int((GOLDEN / "reports" / f"{name}.code").read_text()), name


def test_golden_corpus_covers_every_command():
    from cohnloc.cli import COMMANDS

    used = {argv[1] for _, argv in golden_commands()}
    assert used == set(COMMANDS)
    assert len({argv[0] for _, argv in golden_commands()}) >= 12


def test_fraction_value_matches_hand_arithmetic():
    sess = parse_session("ring Z\ns s0 = [[2]]\nmat three = [[3]]\n")
    from cohnloc.cli import oracle_value

    assert oracle_value(evaluate(sess, "three * inv(s0) * inv(s0)")) == [[str(Fraction(3, 4))]]
