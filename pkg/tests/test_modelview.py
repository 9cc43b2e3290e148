import pytest

from twistc.cnf import tseitin
from twistc.grounder import eval_ground, ground, collect_atoms
from twistc.lang import LangError
from twistc.modelview import (
    InvalidPatternError,
    ModelView,
    apply_filter,
    decode,
    natural_key,
    render_table,
    rows_json,
)
from twistc.parser import parse
from twistc.sat import solve


def _solved(src, enc=None):
    prog, diags = parse(src)
    assert prog is not None, diags
    g = ground(prog)
    db = tseitin(g, enc)
    res = solve(db)
    assert res.status == "sat"
    return g, db, res.model


def test_decode_simple_rows():
    _, db, model = _solved("P(1) and not Q(2)")
    view = decode(model, db)
    assert view.rows == (("P(1)", True), ("Q(2)", False))


def test_decode_hides_generated_atoms():
    _, db, model = _solved("p or (q and r)")
    assert db.n_vars > db.varmap.n_user
    view = decode(model, db)
    assert all(not name.startswith("_") for name, _ in view.rows)
    assert len(view.rows) == 3


def test_decode_hides_counter_vars():
    _, db, model = _solved("atmost 2, $i in (1..6): P($i) end", enc="seqcounter")
    view = decode(model, db)
    assert len(view.rows) == 6
    assert all(name.startswith("P(") for name, _ in view.rows)


def test_natural_ordering():
    assert natural_key("P(2,1)") < natural_key("P(10,1)")
    _, db, model = _solved("P(10) and P(2) and P(1)")
    view = decode(model, db)
    assert [n for n, _ in view.rows] == ["P(1)", "P(2)", "P(10)"]


def test_decoded_rows_satisfy_ground_formula():
    g, db, model = _solved("bigand $i in (1..3): P($i) => Q($i) end\nP(2)\n")
    view = decode(model, db)
    assignment = {a: dict(view.rows)[a.text()] for a in collect_atoms(g)}
    assert eval_ground(g, assignment)


def test_filter_polarity_true_only():
    view = ModelView((("A(1)", True), ("B(1)", False), ("B(2)", True)))
    out = apply_filter(view, "", "true-only")
    assert out.rows == (("A(1)", True), ("B(2)", True))


def test_filter_regex_and_polarity():
    view = ModelView((("P(1,1)", True), ("P(1,2)", False), ("P(2,1)", True)))
    out = apply_filter(view, r"^P\(1,", "true-only")
    assert out.rows == (("P(1,1)", True),)


def test_filter_invalid_pattern_raises_and_view_unchanged():
    view = ModelView((("A", True),))
    with pytest.raises(InvalidPatternError):
        apply_filter(view, "([", "all")
    assert view.rows == (("A", True),)


def test_filter_idempotent():
    view = ModelView((("P(1)", True), ("P(2)", False), ("Q", True)))
    once = apply_filter(view, "P", "true-only")
    twice = apply_filter(once, "P", "true-only")
    assert once == twice


def test_filter_bad_polarity():
    with pytest.raises(LangError):
        apply_filter(ModelView(()), "", "sideways")


def test_render_table_and_json():
    view = ModelView((("P(1)", True), ("Q", False)))
    assert render_table(view) == "P(1) = true\nQ = false"
    assert rows_json(view) == [
        {"atom": "P(1)", "value": True},
        {"atom": "Q", "value": False},
    ]


def test_sudoku_view_has_729_rows_81_true():
    src = open("corpus/sudoku.tw", encoding="utf-8").read()
    _, db, model = _solved(src)
    view = decode(model, db)
    assert len(view.rows) == 729
    assert sum(1 for _, v in view.rows if v) == 81
