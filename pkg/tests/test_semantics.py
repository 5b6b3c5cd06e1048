import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hybrid_alba import fol
from hybrid_alba.generators import random_formula
from hybrid_alba.inequalities import Inequality, QuasiInequality
from hybrid_alba.semantics import (
    BudgetExceeded, Frame, KripkeModel, UninterpretedSymbol, all_models, enumerate_frames, eval_fo,
    eval_fo_naive, eval_inequality, eval_quasi, evaluate, frame_valid, globally_true, random_model, truth_set,
)
from hybrid_alba.syntax import BOT, TOP, parse

reflexive_point = Frame(1, {(0, 0)})
chain = Frame(2, {(0, 1)})


def test_frame_invariants():
    with pytest.raises(ValueError):
        Frame(0)
    with pytest.raises(ValueError):
        Frame(2, {(0, 2)})
    with pytest.raises(ValueError):
        KripkeModel(chain, {}, {"i": 5})


def test_eval_examples():
    m = KripkeModel(reflexive_point, {"p": {0}})
    assert evaluate(m, 0, parse("[]p -> p"))
    m = KripkeModel(chain, {}, {"i": 1})
    assert evaluate(m, 0, parse("<>'i"))
    assert not evaluate(m, 0, parse("<^>'i"))
    assert evaluate(m, 1, parse("<^> true"))
    assert evaluate(m, 0, TOP) and not evaluate(m, 0, BOT)


def test_uninterpreted_symbols():
    m = KripkeModel(chain)
    with pytest.raises(UninterpretedSymbol):
        evaluate(m, 0, parse("'i"))
    with pytest.raises(UninterpretedSymbol):
        truth_set(m, parse("p"))


def test_inequality_and_quasi():
    m = KripkeModel(chain, {"p": {1}, "q": {0, 1}})
    assert eval_inequality(m, Inequality(parse("p"), parse("q")))
    assert not eval_inequality(m, Inequality(parse("q"), parse("p")))
    vacuous = QuasiInequality((Inequality(parse("q"), parse("p")),), Inequality(TOP, BOT))
    assert eval_quasi(m, vacuous)


def test_frame_valid_examples():
    assert frame_valid(Frame(1), parse("[] false"))
    assert frame_valid(reflexive_point, parse("[]p -> p"))
    assert not frame_valid(chain, parse("[]p -> p"))


def test_budget_guard():
    with pytest.raises(BudgetExceeded):
        frame_valid(Frame(3), parse("p & q & r & s & t & u & v"), budget=20)
    assert frame_valid(Frame(3), parse("p | ~p"), budget=3)


def test_enumerate_frames_counts():
    assert len(list(enumerate_frames(1))) == 2
    assert len(list(enumerate_frames(2))) == 2 + 16
    assert sum(1 for f in enumerate_frames(3) if f.size == 3) == 512


def test_random_model_is_deterministic():
    a = random_model(11, 3, {"p", "q"}, {"i"})
    b = random_model(11, 3, {"p", "q"}, {"i"})
    assert a.to_dict() == b.to_dict()
    assert a.to_dict() != random_model(12, 3, {"p", "q"}, {"i"}).to_dict()


@given(st.integers(0, 2**32))
@settings(max_examples=200)
def test_bitmask_matches_pointwise(seed):
    rng = random.Random(seed)
    f = random_formula(rng, 4)
    m = random_model(rng, rng.randint(1, 4), {"p", "q", "r"}, {"i", "j"})
    mask = truth_set(m, f)
    assert all(evaluate(m, w, f) == bool(mask >> w & 1) for w in range(m.frame.size))


@given(st.integers(0, 2**32))
@settings(max_examples=100)
def test_at_is_world_independent(seed):
    rng = random.Random(seed)
    f = parse("@'i " + "(" + str(random_formula(rng, 3)) + ")")
    m = random_model(rng, rng.randint(1, 4), {"p", "q", "r"}, {"i", "j"})
    assert truth_set(m, f) in (0, m.frame.full)


@given(st.integers(0, 2**32))
@settings(max_examples=100)
def test_duality(seed):
    rng = random.Random(seed)
    g = str(random_formula(rng, 3))
    m = random_model(rng, rng.randint(1, 4), {"p", "q", "r"}, {"i", "j"})
    assert truth_set(m, parse(f"<>({g})")) == truth_set(m, parse(f"~[]~({g})"))
    assert truth_set(m, parse(f"<^>({g})")) == truth_set(m, parse(f"~[^]~({g})"))


def test_batch_validity_matches_model_enumeration():
    rng = random.Random(3)
    for _ in range(40):
        f = random_formula(rng, 3, ("p",), ("i",))
        for fr in enumerate_frames(2):
            expected = all(globally_true(m, f) for m in all_models(fr, {"p"}, {"i"}))
            assert frame_valid(fr, f) == expected


def test_frame_valid_on_quasi_inequalities():
    q = QuasiInequality((Inequality(parse("'i"), parse("<>'j")),), Inequality(parse("'j"), parse("<^>'i")))
    for fr in enumerate_frames(2):
        assert frame_valid(fr, q)


def test_fo_evaluators_agree():
    rng = random.Random(5)
    for _ in range(150):
        f = random_formula(rng, 4)
        m = random_model(rng, rng.randint(1, 3), {"p", "q", "r"}, {"i", "j"})
        t = fol.st_formula(f)
        for w in range(m.frame.size):
            assert eval_fo(m, t, {"x": w}) == eval_fo_naive(m, t, {"x": w}) == evaluate(m, w, f)


def test_fo_free_variable_must_be_assigned():
    m = KripkeModel(chain)
    with pytest.raises(UninterpretedSymbol):
        eval_fo(m, fol.Rel(fol.Var("x"), fol.Var("y")), {"x": 0})
