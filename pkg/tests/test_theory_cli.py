import json
from pathlib import Path

import jsonschema
import pytest

from franca.cli import main
from franca.runner import run
from franca.theory import (
    CORPUS_DIR,
    ArgumentDecl,
    ConstDecl,
    DuplicateName,
    ParseError,
    UseBeforeDeclaration,
    parse_theory,
    parse_theory_text,
    show_theory,
)

SCHEMA = json.loads((Path(__file__).parent.parent / "docs" / "report.schema.json").read_text())
CORPUS = sorted(CORPUS_DIR.glob("*.thy"))

SMALL = """theory small
const a, b : o
def P := a => b
argument X premises a, P conclusion b mode meta
check deductive X expect valid
check sat a & !b expect model
check valid a | !a expect valid
"""


def write(tmp_path, name, text):
    p = tmp_path / f"{name}.thy"
    p.write_text(text)
    return str(p)


def test_parse_items():
    tf = parse_theory_text(SMALL)
    assert tf.name == "small"
    assert [i.name for i in tf.items if isinstance(i, ConstDecl)] == ["a", "b"]
    assert any(isinstance(i, ArgumentDecl) and i.label == "X" for i in tf.items)
    checks = tf.checks
    assert [c.kind for c in checks] == ["deductive", "sat", "valid"]
    assert checks[0].expect == "valid" and checks[0].line == 5


def test_parse_errors_carry_position():
    with pytest.raises(DuplicateName):
        parse_theory_text("theory t\nconst a : o\nconst a : o\n")
    with pytest.raises(UseBeforeDeclaration) as exc:
        parse_theory_text("theory t\nconst a : o\ncheck sat a & zz\n")
    assert exc.value.line == 3 and exc.value.col > 0
    with pytest.raises(ParseError):
        parse_theory_text("theory t\nconst a o\n")
    with pytest.raises(ParseError):
        parse_theory_text("theory t\nfrobnicate\n")


@pytest.mark.parametrize("path", CORPUS, ids=lambda p: p.stem)
def test_show_theory_roundtrip(path):
    tf = parse_theory(path)
    again = parse_theory_text(show_theory(tf), path)
    assert show_theory(again) == show_theory(tf)
    assert again.checks == tf.checks


@pytest.mark.parametrize("path", CORPUS, ids=lambda p: p.stem)
def test_corpus_runs_clean(path):
    report = run(parse_theory(path))
    bad = [str(r) for r in report.records if not r.passed]
    assert report.passed, bad


def test_cli_exit_codes(tmp_path, capsys):
    ok = write(tmp_path, "ok", SMALL)
    assert main(["check", ok]) == 0
    out = capsys.readouterr().out
    assert "line 5: check deductive X expect valid -> valid" in out
    bad = write(tmp_path, "bad", SMALL.replace("a | !a expect valid", "a | b expect valid"))
    assert main(["check", bad]) == 1
    broken = write(tmp_path, "broken", "theory broken\nconst a : o\ncheck sat nosuch\n")
    assert main(["check", broken]) == 2
    assert "error" in capsys.readouterr().err
    assert main(["check", str(tmp_path / "missing.thy")]) == 2


def test_cli_json_matches_schema(tmp_path, capsys):
    ok = write(tmp_path, "ok", SMALL)
    assert main(["check", "--json", ok]) == 0
    one = json.loads(capsys.readouterr().out)
    jsonschema.validate(one, SCHEMA)
    assert one["passed"] and len(one["results"]) == 3
    assert main(["check", "--json", ok, str(CORPUS_DIR / "a22.thy")]) == 0
    many = json.loads(capsys.readouterr().out)
    jsonschema.validate(many, SCHEMA)
    assert len(many) == 2


def test_deterministic_output_is_byte_identical(capsys):
    args = ["check", "--json", "--deterministic", str(CORPUS_DIR / "a46.thy"), str(CORPUS_DIR / "graph.thy")]
    main(args)
    first = capsys.readouterr().out
    main(args)
    assert capsys.readouterr().out == first


def test_graph_export(capsys):
    assert main(["graph", str(CORPUS_DIR / "graph.thy"), "--dot"]) == 0
    dot = capsys.readouterr().out
    assert dot.startswith("digraph") and "⊕" in dot and '"A50" -> "A48"' in dot
    assert main(["graph", str(CORPUS_DIR / "graph.thy")]) == 0
    g = json.loads(capsys.readouterr().out)
    assert len(g["nodes"]) == 8 and len(g["attacks"]) == 3 and len(g["supports"]) == 4
    assert all(e["verified"] for e in g["attacks"] + g["supports"])


def test_bound_flag(tmp_path, capsys):
    ok = write(tmp_path, "ok", SMALL)
    assert main(["check", "--bound", "w=1", ok]) == 0
    assert main(["check", "--bound", "w=x", ok]) == 2


def test_faithful_command(capsys):
    assert main(["faithful", "--logic", "KT", "--depth", "1", "--frames", "2", "--json"]) == 0
    rep = json.loads(capsys.readouterr().out)
    assert rep["logic"] == "KT" and rep["formulas"] == 18 and not rep["discrepancies"]
