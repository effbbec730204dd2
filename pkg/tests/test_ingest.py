import json
from pathlib import Path

import pytest
from hypothesis import given, settings, strategies as st

from qalgebroid import ingest
from qalgebroid.cohomology import betti
from qalgebroid.algebroid import build_differential
from qalgebroid.ingest import InputError, Report, emit_report, parse

PROBLEMS = Path(__file__).resolve().parent.parent / "problems"
GOOD = sorted(p for p in PROBLEMS.glob("*.toml") if p.name != "bad_antisymmetry.toml")


@pytest.mark.parametrize("path", GOOD, ids=lambda p: p.stem)
def test_parse_emit_parse_is_idempotent(path):
    pf = ingest.load(path)
    text = ingest.dumps(pf)
    again = parse(text)
    assert again == pf
    assert ingest.dumps(again) == text


def test_sl2_bialgebra_file():
    bl = ingest.load(PROBLEMS / "sl2_bialgebra.toml").bialgebra()
    assert len(bl.g.labels) == 3 and len(bl.g_dual.labels) == 3


def test_all_errors_are_collected():
    with pytest.raises(InputError) as info:
        ingest.load(PROBLEMS / "bad_antisymmetry.toml")
    errs = info.value.errors
    assert len(errs) == 2
    assert any("antisymmetry" in e and "(a,b)" in e for e in errs)
    assert any("undeclared frame index 'c'" in e for e in errs)


def test_syntax_error_reports_position():
    with pytest.raises(InputError) as info:
        parse('format_version = 1\nkind = "weil"\n[lie.frame\n')
    assert "line 3" in info.value.errors[0]


def test_empty_context():
    with pytest.raises(InputError, match="empty context"):
        parse('format_version = 1\nkind = "algebroid"\n[frame]\n')


@pytest.mark.parametrize("text,needle", [
    ('format_version = 2\nkind = "weil"\n[lie.frame]\na = 0\n', "format_version"),
    ('format_version = 1\nkind = "nope"\n', "kind must be"),
    ('format_version = 1\nkind = "weil"\n[lie.frame]\na = 0\n[lie.brackets]\n"a,a,a" = 0.5\n', "0.5"),
    ('format_version = 1\nkind = "weil"\n[lie.frame]\na = "x"\n', "degree of 'a'"),
    ('format_version = 1\nkind = "algebroid"\n[base]\nx = 0\n[frame]\na = 0\n[anchor]\n"a,y" = 1\n',
     "undeclared base coordinate"),
    ('format_version = 1\nkind = "algebroid"\n[base]\nx = 0\ns = 2\n[frame]\na = 0\n[anchor]\n"a,x" = "s"\n',
     "degree"),
    ('format_version = 1\nkind = "weil"\n[lie.frame]\na = 0\n[lie.brackets]\n"a,b" = 1\n', "3 comma-separated"),
])
def test_semantic_errors(text, needle):
    with pytest.raises(InputError) as info:
        parse(text)
    assert any(needle in e for e in info.value.errors), info.value.errors


def test_bytes_and_rationals():
    pf = parse('format_version = 1\nkind = "weil"\n[lie.frame]\na = 0\nb = 0\n'
               '[lie.brackets]\n"a,b,b" = "-2/4"\n'.encode())
    assert pf.data["lie"]["brackets"]["a,b,b"] == "-1/2"
    with pytest.raises(InputError):
        parse(b"\xff\xfe")


names = st.sampled_from(["a", "b", "c", "d"])
consts = st.fractions(min_value=-5, max_value=5, max_denominator=4)


@settings(max_examples=40, deadline=None)
@given(st.dictionaries(st.tuples(names, names, names), consts, max_size=5))
def test_round_trip_on_generated_lie_files(entries):
    # keep one orientation per pair so antisymmetry never conflicts
    rows = []
    for (a, b, c), v in entries.items():
        if a < b:
            rows.append(f'"{a},{b},{c}" = "{v}"')
    text = "format_version = 1\nkind = \"weil\"\n[lie.frame]\na = 0\nb = 0\nc = 0\nd = 0\n[lie.brackets]\n"
    pf = parse(text + "\n".join(rows) + "\n")
    assert parse(ingest.dumps(pf)) == pf


def test_report_text_and_json():
    spec = ingest.load(PROBLEMS / "sl2_algebroid.toml").algebroid()
    r = Report("demo")
    r.betti("ce", betti(build_differential(spec), range(4)))
    r.identity("x = x", True, 3)
    text = emit_report(r).decode()
    assert text.splitlines()[2:6] == ["H^0 1", "H^1 0", "H^2 0", "H^3 1"]
    assert "PASS x = x (witnesses: 3)" in text
    tree = json.loads(emit_report(r, "json"))
    assert [row["betti"] for row in tree["items"][0]["table"]] == [1, 0, 0, 1]
    assert emit_report(r) == emit_report(r)


def test_matrix_dump_uses_exact_rationals():
    from fractions import Fraction

    r = Report("m")
    r.matrix("M", [[Fraction(1, 2), Fraction(-3)]])
    assert "[1/2 -3]" in emit_report(r).decode()
    assert json.loads(emit_report(r, "json"))["items"][0]["rows"] == [["1/2", "-3"]]
