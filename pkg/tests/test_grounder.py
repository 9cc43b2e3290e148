import random

import pytest

from twistc.grounder import (
    Env,
    GAnd,
    GCard,
    GFALSE,
    GImpl,
    GLit,
    GNot,
    GroundAtom,
    GroundError,
    GTRUE,
    eval_arith,
    eval_cond,
    eval_set,
    ground,
    normalize_card,
)
from twistc.lang import (
    AConst,
    AVar,
    Bin,
    CmpC,
    InC,
    Int,
    Rat,
    SetLit,
    SetOp,
    SetRange,
    SetValue,
    Sqrt,
    Sym,
    scalar_text,
)
from twistc.parser import parse

from oracles import atoms_of, expand_program, ground_model_set, model_set, random_program


def _parse(src):
    prog, diags = parse(src)
    assert prog is not None, diags
    return prog


def _env(**sets):
    env = Env()
    for name, vals in sets.items():
        env.sets["$" + name] = SetValue.of(vals)
    return env


# -- eval_set ----------------------------------------------------------------


def test_eval_set_range():
    s = eval_set(SetRange(AConst(Int(1)), AConst(Int(9))), Env())
    assert [x.value for x in s] == list(range(1, 10))


def test_eval_set_self_difference_is_empty():
    env = _env(N=[Int(1), Int(2)])
    from twistc.lang import SetName

    s = eval_set(SetOp("diff", SetName("$N"), SetName("$N")), env)
    assert len(s) == 0


def test_eval_set_union_inter_mixed():
    r = SetRange(AConst(Int(1)), AConst(Int(3)))
    lit = SetLit((AConst(Sym("A")), AConst(Sym("B"))))
    u = eval_set(SetOp("union", r, lit), Env())
    assert [scalar_text(x) for x in u] == ["1", "2", "3", "A", "B"]
    i = eval_set(SetOp("inter", r, lit), Env())
    assert len(i) == 0


def test_eval_set_empty_range():
    s = eval_set(SetRange(AConst(Int(1)), AConst(Int(0))), Env())
    assert len(s) == 0


def test_eval_set_non_integer_bound():
    with pytest.raises(GroundError):
        eval_set(SetRange(AConst(Rat(1.5)), AConst(Int(3))), Env())


# -- eval_arith ----------------------------------------------------------------


def test_eval_arith_examples():
    env = Env(binds={"$i": Int(1), "$j": Int(2)})
    assert eval_arith(Bin("+", AVar("$i"), AVar("$j")), env) == Int(3)
    assert eval_arith(Bin("mod", AConst(Int(7)), AConst(Int(3))), Env()) == Int(1)
    v = eval_arith(Sqrt(AConst(Int(9))), Env())
    assert v == Int(3) and v.kind == "int"


def test_eval_arith_int_promotion():
    # exhaustively check the Int-preservation rule on small cases
    for a in range(-4, 5):
        for b in range(-4, 5):
            if b == 0:
                continue
            v = eval_arith(Bin("/", AConst(Int(a)), AConst(Int(b))), Env())
            if a % b == 0:
                assert v.kind == "int" and v.value == a // b
            else:
                assert v.value == a / b


def test_eval_arith_errors():
    with pytest.raises(GroundError):
        eval_arith(Bin("/", AConst(Int(1)), AConst(Int(0))), Env())
    with pytest.raises(GroundError):
        eval_arith(Bin("mod", AConst(Rat(1.5)), AConst(Int(2))), Env())
    with pytest.raises(GroundError):
        eval_arith(Sqrt(AConst(Int(-4))), Env())
    with pytest.raises(GroundError):
        eval_arith(AVar("$nope"), Env())


# -- eval_cond ----------------------------------------------------------------


def test_eval_cond_examples():
    env = Env(binds={"$i": Int(2), "$j": Int(2), "$k": Int(1)})
    assert eval_cond(CmpC("!=", AVar("$i"), AVar("$j")), env) is False
    lhs = AVar("$k")
    rhs = Bin("+", AVar("$i"), AVar("$j"))
    assert eval_cond(CmpC("<", lhs, rhs), env) is True
    dom = SetRange(AConst(Int(1)), AConst(Int(3)))
    assert eval_cond(InC(AConst(Int(2)), dom), Env()) is True


# -- ground --------------------------------------------------------------------


def test_ground_section2_chain():
    prog = _parse("bigand $i in (1..9): P($i) => Q($i+1) end")
    g = ground(prog)
    assert isinstance(g, GAnd) and len(g.children) == 9
    for i, part in enumerate(g.children, start=1):
        assert part == GImpl(
            GLit(GroundAtom("P", (Int(i),))), GLit(GroundAtom("Q", (Int(i + 1),)))
        )


def test_ground_empty_domain_folds():
    assert ground(_parse("bigor $i in (1..0): P($i) end")) == GFALSE
    assert ground(_parse("bigand $i in (1..0): P($i) end")) == GTRUE


def test_ground_predicate_variables():
    prog = _parse("bigand $X in (A,B), $i in (1,2): $X($i) end")
    g = ground(prog)
    texts = [c.atom.text() for c in g.children]
    assert texts == ["A(1)", "A(2)", "B(1)", "B(2)"]


def test_ground_when_filter_count():
    prog = _parse("bigand $i in (1..3), $j in (1..3) when $i != $j : P($i,$j) end")
    g = ground(prog)
    assert len(g.children) == 6


def test_ground_varatom_bound_to_int_is_error():
    prog = _parse("bigand $X in (1..2): $X end")
    with pytest.raises(GroundError) as e:
        ground(prog)
    assert "must be identifiers" in str(e.value)


def test_ground_error_reports_binder_values():
    prog = _parse("bigand $i in (0..2): P(1 / $i) end")
    with pytest.raises(GroundError) as e:
        ground(prog)
    assert "$i=0" in e.value.message


def test_ground_is_deterministic():
    src = "bigand $i in (1..3): atmost 1, $j in (1..3) when $j != $i: P($i,$j) end end"
    assert ground(_parse(src)) == ground(_parse(src))


def test_ground_at_most_one_letter_count_is_5832():
    src = """sets:
  $N = (1..9)
  $L = (A,B,C,D,E,F,G,H,I)
formulas:
  bigand $i in $N, $j in $N, $m in $L:
    P($i,$j,$m) => bigand $n in $L when $m != $n: not P($i,$j,$n) end
  end
"""
    g = ground(_parse(src))
    # independent count of the expected (i,j,m,n) pairs
    expected = 0
    for _i in range(9):
        for _j in range(9):
            for m in range(9):
                for n in range(9):
                    if m != n:
                        expected += 1
    assert expected == 9 * 9 * 9 * 8 == 5832
    pairs = 0
    assert isinstance(g, GAnd) and len(g.children) == 729
    for impl in g.children:
        assert isinstance(impl, GImpl)
        rhs = impl.rhs
        assert isinstance(rhs, GAnd) and len(rhs.children) == 8
        for neg in rhs.children:
            assert isinstance(neg, GNot) and isinstance(neg.child, GLit)
            pairs += 1
    assert pairs == expected


# -- normalize_card ---------------------------------------------------------------


def _lits(*names):
    return tuple(GLit(GroundAtom(n)) for n in names)


def test_normalize_card_folds():
    assert normalize_card(GCard("atleast", 0, _lits("p", "q"))) == GTRUE
    assert normalize_card(GCard("atleast", 3, _lits("p", "q"))) == GFALSE
    assert normalize_card(GCard("atmost", 2, _lits("p", "q"))) == GTRUE
    assert normalize_card(GCard("atmost", -1, _lits("p", "q"))) == GFALSE
    assert normalize_card(GCard("exact", 5, _lits("p", "q", "r", "s"))) == GFALSE
    atl = normalize_card(GCard("atleast", 2, _lits("p", "q")))
    assert atl == GAnd(_lits("p", "q"))
    atm = normalize_card(GCard("atmost", 0, _lits("p", "q")))
    assert atm == GAnd(tuple(GNot(x) for x in _lits("p", "q")))


def test_normalize_card_keeps_nondegenerate():
    c = GCard("atleast", 1, _lits("p", "q", "r"))
    kept = normalize_card(c)
    assert kept == c
    # semantically equivalent to the disjunction
    universe = [x.atom for x in c.items]
    from twistc.grounder import GOr

    assert ground_model_set(kept, universe) == ground_model_set(
        GOr(c.items), universe
    )


# -- oracle equivalence -------------------------------------------------------------


def test_ground_matches_naive_expander_on_random_programs():
    rng = random.Random(2024)
    checked = 0
    for _ in range(120):
        prog = random_program(rng)
        try:
            g = ground(prog)
        except GroundError:
            continue  # programs with evaluation errors are fine to skip here
        expanded = expand_program(prog)
        universe_naive = atoms_of(expanded)
        from twistc.grounder import collect_atoms

        universe_ground = [a.text() for a in collect_atoms(g)]
        assert set(universe_ground) <= set(universe_naive) or set(
            universe_naive
        ) <= set(universe_ground)
        universe = sorted(set(universe_naive) | set(universe_ground))
        if len(universe) > 14:
            continue
        got = _model_set_over(g, universe)
        want = model_set(expanded, universe)
        assert got == want, prog
        checked += 1
    assert checked >= 60


def _model_set_over(g, universe_texts):
    from itertools import product as _product

    from twistc.grounder import collect_atoms, eval_ground

    atom_by_text = {a.text(): a for a in collect_atoms(g)}
    out = set()
    for bits in _product([False, True], repeat=len(universe_texts)):
        m_text = dict(zip(universe_texts, bits))
        m = {atom_by_text[t]: v for t, v in m_text.items() if t in atom_by_text}
        if eval_ground(g, m):
            out.add(frozenset(t for t, v in m_text.items() if v))
    return out
