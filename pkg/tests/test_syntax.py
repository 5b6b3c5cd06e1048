import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hybrid_alba import syntax as s
from hybrid_alba.generators import random_formula
from hybrid_alba.syntax import (
    BOT, TOP, And, At, Box, Dia, Implies, InvBox, InvDia, Nom, Not, NominalSupply, Or, ParseError,
    Prop, SortedSubstitution, apply_subst, parse, to_text, vars_and_nominals,
)

p, q = Prop("p"), Prop("q")


def test_parse_golden_formula():
    assert parse("[]<>@'i <>p -> <>[]p") == Implies(Box(Dia(At("i", Dia(p)))), Dia(Box(p)))


def test_parse_constants_and_at():
    assert parse("true") == TOP
    assert parse("@'i ('i & ~false)") == At("i", And(Nom("i"), Not(BOT)))


def test_parse_inverse_modalities():
    assert parse("[^]<^>p") == InvBox(InvDia(p))


def test_precedence_and_associativity():
    assert parse("p | q & p") == Or(p, And(q, p))
    assert parse("p -> q -> p") == Implies(p, Implies(q, p))
    assert parse("p & q & p") == And(And(p, q), p)
    assert parse("~[]p") == Not(Box(p))
    assert parse("@'i p & q") == And(At("i", p), q)


def test_iff_is_sugar():
    assert parse("p <-> q") == And(Implies(p, q), Implies(q, p))


def test_print_examples():
    assert to_text(Box(Dia(TOP))) == "[]<> true"
    assert to_text(Implies(p, q)) == "p -> q"
    assert to_text(At("i", Or(p, Not(q)))) == "@'i (p | ~q)"


def test_print_parenthesizes_left_implication():
    f = Implies(Implies(p, q), p)
    assert to_text(f) == "(p -> q) -> p"
    assert parse(to_text(f)) == f


@pytest.mark.parametrize("text,offset", [("p &", 3), ("(p", 2), ("p q", 2), ("P", 0), ("p $ q", 2), ("@p", 1)])
def test_parse_errors_report_offsets(text, offset):
    with pytest.raises(ParseError) as err:
        parse(text)
    assert err.value.offset == offset
    assert err.value.expected


def test_offset_is_in_bytes():
    with pytest.raises(ParseError) as err:
        parse("◇p")
    assert err.value.offset == 0
    with pytest.raises(ParseError) as err:
        parse("p & ◇")
    assert err.value.offset == 4


def test_reserved_nominals_rejected():
    with pytest.raises(ParseError):
        parse("'n0 & p")
    assert parse("'n0", allow_reserved=True) == Nom("n0")
    assert parse("'no & 'n1x") == And(Nom("no"), Nom("n1x"))


@given(st.integers(0, 2**32), st.integers(0, 6))
@settings(max_examples=300)
def test_round_trip(seed, depth):
    f = random_formula(seed, depth)
    assert parse(to_text(f), allow_reserved=True) == f


def test_substitution_examples():
    sub = SortedSubstitution({"p": Nom("j")})
    assert apply_subst(sub, Dia(Box(p))) == Dia(Box(Nom("j")))
    f = parse("@'i <>p & q")
    assert apply_subst(SortedSubstitution(), f) == f
    assert apply_subst(SortedSubstitution({"p": BOT}), At("i", Dia(p))) == At("i", Dia(BOT))


def test_substitution_is_simultaneous_and_sorted():
    sub = SortedSubstitution({"p": q, "q": p}, {"i": "j"})
    assert apply_subst(sub, parse("@'i (p & q) | 'i")) == parse("@'j (q & p) | 'j")


@given(st.integers(0, 2**32))
@settings(max_examples=100)
def test_substitution_composition(seed):
    import random

    rng = random.Random(seed)
    f = random_formula(rng, 4, ("p", "q"), ("i", "j"))
    g1 = random_formula(rng, 2, ("r",), ("k",))
    g2 = random_formula(rng, 2, ("r",), ("k",))
    s1 = SortedSubstitution({"p": g1}, {"i": "k"})
    s2 = SortedSubstitution({"q": g2}, {"j": "m"})
    composed = SortedSubstitution({"p": g1, "q": g2}, {"i": "k", "j": "m"})
    assert apply_subst(s2, apply_subst(s1, f)) == apply_subst(composed, f)


def test_fresh_nominals():
    sup = NominalSupply(reserved={"i0", "i1"})
    assert sup.fresh() == "n0"
    assert sup.fresh() == "n1"
    assert NominalSupply(reserved={"n0"}).fresh() == "n1"


@given(st.sets(st.integers(0, 30)), st.integers(1, 40))
def test_fresh_never_reserved_or_repeated(reserved, count):
    names = {f"n{k}" for k in reserved}
    sup = NominalSupply(reserved=names)
    out = [s.fresh_nominal(sup) for _ in range(count)]
    assert len(set(out)) == len(out)
    assert not set(out) & names


def test_vars_and_nominals():
    assert vars_and_nominals(parse("[]<>@'i <>p")) == ({"p"}, {"i"})
    assert vars_and_nominals(TOP) == (set(), set())
    f = parse("@'i <>'j")
    assert vars_and_nominals(f) == (set(), {"i", "j"})
    assert s.is_pure(f)


def test_is_base_and_height():
    assert s.is_base(parse("[]p -> @'i p"))
    assert not s.is_base(parse("[^]p"))
    assert s.height(parse("[]<>@'i <>p -> <>[]p")) == 5
    assert s.height(p) == 0


def test_replace_at_and_subformula_at():
    f = parse("[]<>@'i <>p")
    assert s.subformula_at(f, (0, 0)) == At("i", Dia(p))
    assert s.replace_at(f, (0, 0), TOP) == parse("[]<> true")
