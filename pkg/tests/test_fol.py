import random

from hybrid_alba import fol
from hybrid_alba.fol import (
    Const, Eq, Exists, FAnd, FImplies, FNot, Forall, Pred, Rel, Var, fo_text, st_formula, st_inequality,
    st_quasi, universal_closure,
)
from hybrid_alba.generators import random_formula, random_inequality, random_quasi
from hybrid_alba.inequalities import Inequality, System
from hybrid_alba.semantics import (
    eval_fo, eval_inequality, eval_quasi, evaluate, random_model,
)
from hybrid_alba.syntax import parse

x, y0 = Var("x"), Var("y0")


def test_st_clauses():
    assert st_formula(parse("<>p")) == Exists("y0", FAnd(Rel(x, y0), Pred("p", y0)))
    assert st_formula(parse("@'i p")) == Pred("p", Const("i"))
    assert st_formula(parse("false")) == FNot(Eq(x, x))
    assert st_formula(parse("true")) == Eq(x, x)
    assert st_formula(parse("'i")) == Eq(x, Const("i"))
    assert st_formula(parse("<^>p")) == Exists("y0", FAnd(Rel(y0, x), Pred("p", y0)))
    assert st_formula(parse("[^]p")) == Forall("y0", FImplies(Rel(y0, x), Pred("p", y0)))


def test_st_fresh_variables_are_distinct():
    assert fo_text(st_formula(parse("[]<>p"))) == "forall y0. (R(x,y0) -> (exists y1. (R(y0,y1) & P_p(y1))))"


def test_st_inequality():
    got = st_inequality(Inequality(parse("p"), parse("q")))
    assert got == Forall("x", FImplies(Pred("p", x), Pred("q", x)))


def test_st_system():
    sys = System((Inequality(parse("'i"), parse("<>'j")),), ("i0", "i1"))
    got = st_quasi(sys)
    want = FImplies(
        Forall("x", FImplies(Eq(x, Const("i")), Exists("y0", FAnd(Rel(x, y0), Eq(y0, Const("j")))))),
        Forall("x", FImplies(Eq(x, Const("i0")), FNot(Eq(x, Const("i1"))))),
    )
    assert got == want
    empty = st_quasi(System((), ("i0", "i1")))
    assert isinstance(empty.left, fol.Verum)


def test_universal_closure():
    f = Rel(Const("i"), Const("i"))
    assert universal_closure(f, {"i"}) == Forall("v_i", Rel(Var("v_i"), Var("v_i")))
    assert universal_closure(f, set()) == f
    closed = universal_closure(FAnd(Pred("p", Const("j")), Eq(Const("i"), Const("j"))), {"i", "j"})
    assert isinstance(closed, Forall) and closed.var == "v_i" and closed.body.var == "v_j"
    assert not fol.constants_of(closed) and not fol.free_vars(closed)


def test_output_fo_closes_over_system_nominals():
    sys = System((Inequality(parse("'i"), parse("<>'j")),), ("i0", "i1"))
    out = fol.output_fo([sys])
    assert not fol.constants_of(out)
    names = []
    g = out
    while isinstance(g, Forall):
        names.append(g.var)
        g = g.body
    assert names == ["v_i", "v_i0", "v_i1", "v_j"]
    # its truth on a frame is the frame validity of the system
    from hybrid_alba.semantics import enumerate_frames, frame_satisfies, frame_valid

    for fr in enumerate_frames(2):
        assert frame_satisfies(fr, out) == frame_valid(fr, sys)


def test_printer_disequality():
    assert fo_text(FNot(Eq(x, Const("i")))) == "x != 'i"


def test_st_correctness_random():
    rng = random.Random(17)
    for _ in range(300):
        f = random_formula(rng, 5)
        m = random_model(rng, rng.randint(1, 4), {"p", "q", "r"}, {"i", "j"})
        t = st_formula(f)
        for w in range(m.frame.size):
            assert eval_fo(m, t, {"x": w}) == evaluate(m, w, f)


def test_st_global_correctness_random():
    rng = random.Random(18)
    for _ in range(150):
        m = random_model(rng, rng.randint(1, 4), {"p", "q", "r"}, {"i", "j"})
        ineq = random_inequality(rng, 3)
        assert eval_fo(m, st_inequality(ineq)) == eval_inequality(m, ineq)
        q = random_quasi(rng, 3)
        assert eval_fo(m, st_quasi(q)) == eval_quasi(m, q)
