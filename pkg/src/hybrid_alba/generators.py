"""Seeded random generators for formulas, inequalities and fragment corpora."""

from __future__ import annotations

import random
from dataclasses import dataclass

from . import syntax as s
from .inequalities import Inequality, QuasiInequality
from .signed import (
    EXTENDED_INDUCTIVE, EXTENDED_SKELETAL, FRAGMENTS, INDUCTIVE, MINUS, PLUS, OrderType,
    classify, flip,
)

VARIABLES = ("p", "q", "r")
NOMINALS = ("i", "j")

_BASE_UNARY = (s.Not, s.Box, s.Dia)
_ALL_UNARY = (s.Not, s.Box, s.Dia, s.InvBox, s.InvDia)


def _rng(seed) -> random.Random:
    return seed if isinstance(seed, random.Random) else random.Random(seed)


def random_formula(seed, depth: int = 4, variables=VARIABLES, nominals=NOMINALS,
                   inverse: bool = True) -> s.Formula:
    """Random formula of height at most ``depth``."""
    rng = _rng(seed)
    unary = _ALL_UNARY if inverse else _BASE_UNARY

    def leaf():
        roll = rng.random()
        if roll < 0.55 and variables:
            return s.Prop(rng.choice(variables))
        if roll < 0.85 and nominals:
            return s.Nom(rng.choice(nominals))
        return rng.choice((s.TOP, s.BOT))

    def go(d):
        if d == 0 or rng.random() < 0.25:
            return leaf()
        roll = rng.random()
        if roll < 0.4:
            return rng.choice(unary)(go(d - 1))
        if roll < 0.5 and nominals:
            return s.At(rng.choice(nominals), go(d - 1))
        return rng.choice(s.BINARY)(go(d - 1), go(d - 1))

    return go(depth)


def random_inequality(seed, depth: int = 4, **kw) -> Inequality:
    rng = _rng(seed)
    return Inequality(random_formula(rng, depth, **kw), random_formula(rng, depth, **kw))


def random_quasi(seed, depth: int = 3, max_antecedent: int = 3, **kw) -> QuasiInequality:
    rng = _rng(seed)
    ante = tuple(random_inequality(rng, depth, **kw) for _ in range(rng.randint(0, max_antecedent)))
    return QuasiInequality(ante, random_inequality(rng, depth, **kw))


def random_restricted_inequality(seed, depth: int = 4, variables=VARIABLES, nominals=NOMINALS) -> Inequality:
    """``i <= g`` or ``g <= ~i`` with ``g`` in the base language."""
    rng = _rng(seed)
    body = random_formula(rng, depth, variables, nominals, inverse=False)
    i = s.Nom(rng.choice(nominals))
    return Inequality(i, body) if rng.random() < 0.5 else Inequality(body, s.Not(i))


def random_restricted_quasi(seed, depth: int = 3, max_antecedent: int = 3, **kw) -> QuasiInequality:
    rng = _rng(seed)
    ante = tuple(random_restricted_inequality(rng, depth, **kw) for _ in range(rng.randint(0, max_antecedent)))
    return QuasiInequality(ante, random_restricted_inequality(rng, depth, **kw))


def random_at_context(seed, depth: int = 3, variables=VARIABLES[:2], nominals=NOMINALS) -> tuple[s.Formula, s.Formula, tuple[int, ...]]:
    """A formula containing exactly one ``@j a`` occurrence, signed positively.

    Returns ``(formula, the @-subformula, its path)``. The siblings along the
    path contain no ``@j`` for the same ``j``-headed hole.
    """
    rng = _rng(seed)
    j = rng.choice(nominals)
    alpha = random_formula(rng, 2, variables, nominals, inverse=False)
    hole = s.At(j, alpha)
    path = []
    positive = True
    frames = []
    for _ in range(rng.randint(0, depth)):
        kind = rng.choice((s.Not, s.Box, s.Dia, s.And, s.Or, s.Implies, s.At))
        if kind is s.Not:
            frames.append((kind, None))
            positive = not positive
        elif kind in (s.Box, s.Dia):
            frames.append((kind, None))
        elif kind is s.At:
            frames.append((kind, rng.choice(nominals)))
        else:
            side = rng.randrange(2)
            sibling = random_formula(rng, 2, variables, nominals, inverse=False)
            frames.append((kind, (side, sibling)))
            if kind is s.Implies and side == 0:
                positive = not positive
    if not positive:
        frames.append((s.Not, None))
    f = hole
    for kind, extra in reversed(frames):
        if kind in (s.Not, s.Box, s.Dia):
            f = kind(f)
            path.insert(0, 0)
        elif kind is s.At:
            f = s.At(extra, f)
            path.insert(0, 0)
        else:
            side, sibling = extra
            f = kind(f, sibling) if side == 0 else kind(sibling, f)
            path.insert(0, side)
    return f, hole, tuple(path)


# --------------------------------------------------------------------------
# fragment corpus

_INNER_CHOICES = {
    PLUS: (s.And, s.Box, s.Not, s.At, s.Or, s.Implies),
    MINUS: (s.Or, s.Dia, s.Not, s.At, s.And),
}
_SRR = {(PLUS, s.Or), (PLUS, s.Implies), (MINUS, s.And)}
_OUTER_CHOICES = {
    PLUS: (s.Or, s.And, s.Dia, s.Not, s.At),
    MINUS: (s.And, s.Or, s.Box, s.Not, s.At, s.Implies),
}
_ANY = (s.Not, s.Box, s.Dia, s.And, s.Or, s.Implies, s.At)
# nodes that are neither outer nor absorbed by the outer segment: they force a root-side segment
_BLOCKING = {PLUS: (s.Box, s.Implies), MINUS: (s.Dia,)}


@dataclass
class _Plan:
    rng: random.Random
    eps: OrderType
    rank: dict
    variables: tuple
    nominals: tuple
    allow_inner_part: bool
    allow_at_part: bool

    def critical_vars(self, sign, allowed):
        return [v for v in allowed if self.eps.critical_sign(v) == sign]

    def quiet_leaf(self, sign, pool):
        """Leaf without a critical occurrence, variables drawn from ``pool``."""
        quiet = [v for v in pool if self.eps.critical_sign(v) != sign]
        roll = self.rng.random()
        if quiet and roll < 0.6:
            return s.Prop(self.rng.choice(quiet))
        if roll < 0.85:
            return s.Nom(self.rng.choice(self.nominals))
        return self.rng.choice((s.TOP, s.BOT))

    def child_signs(self, kind, sign):
        if kind is s.Not:
            return (flip(sign),)
        if kind is s.Implies:
            return (flip(sign), sign)
        if kind in s.BINARY:
            return (sign, sign)
        return (sign,)

    def make(self, kind, kids):
        if kind is s.At:
            return s.At(self.rng.choice(self.nominals), kids[0])
        return kind(*kids)

    def uniform(self, sign, h, pool):
        """Subtree with no critical occurrence (the dual-uniform side of a residual node)."""
        if h == 0 or self.rng.random() < 0.45:
            return self.quiet_leaf(sign, pool)
        kind = self.rng.choice(_ANY)
        return self.make(kind, [self.uniform(c, h - 1, pool) for c in self.child_signs(kind, sign)])

    def crit_leaf(self, sign, allowed):
        crit = self.critical_vars(sign, allowed)
        if crit:
            return s.Prop(self.rng.choice(crit))
        return self.quiet_leaf(sign, [])

    def inner_part(self, sign, h, allowed):
        if h == 0 or self.rng.random() < 0.15:
            return self.crit_leaf(sign, allowed)
        kind = self.rng.choice(_INNER_CHOICES[sign])
        signs = self.child_signs(kind, sign)
        if (sign, kind) in _SRR:
            ordered = sorted(self.variables, key=self.rank.get)
            cut = self.rng.randint(0, len(ordered))
            low, high = ordered[:cut], [v for v in ordered[cut:] if v in allowed]
            through = self.rng.randrange(2)
            kids = [None, None]
            kids[through] = self.inner_part(signs[through], h - 1, high)
            kids[1 - through] = self.uniform(signs[1 - through], h - 1, low)
            return self.make(kind, kids)
        return self.make(kind, [self.inner_part(c, h - 1, allowed) for c in signs])

    def outer_part(self, sign, h, allowed):
        if h == 0 or self.rng.random() < 0.12:
            return self.crit_leaf(sign, allowed)
        if self.allow_inner_part and self.rng.random() < 0.35:
            return self.inner_part(sign, h, allowed)
        kind = self.rng.choice(_OUTER_CHOICES[sign])
        return self.make(kind, [self.outer_part(c, h - 1, allowed) for c in self.child_signs(kind, sign)])

    def at_part(self, sign, h, top=True):
        if h == 0:
            return self.quiet_leaf(sign, self.variables)
        if not top and h >= 2 and self.rng.random() < 0.45:
            return s.At(self.rng.choice(self.nominals), self.outer_part(sign, h - 1, self.variables))
        if not top and self.rng.random() < 0.1:
            return self.quiet_leaf(sign, self.variables)
        kind = self.rng.choice(_BLOCKING[sign] if self.rng.random() < 0.6 else _ANY)
        return self.make(kind, [self.at_part(c, h - 1, False) for c in self.child_signs(kind, sign)])

    def side(self, sign, h):
        if self.allow_at_part and self.rng.random() < 0.6:
            return self.at_part(sign, h)
        return self.outer_part(sign, h, self.variables)


def fragment_formula(seed, fragment: str = EXTENDED_INDUCTIVE, max_vars: int = 3, max_height: int = 5,
                     max_tries: int = 200) -> s.Formula:
    """An implication in ``fragment`` built around planted critical branches.

    Order-type and dependence ranks are drawn at random, each side is grown
    segment by segment from the node tables, and the result is checked
    with :func:`classify`; rejected drafts are regenerated.
    """
    if fragment not in FRAGMENTS:
        raise ValueError(f"unknown fragment {fragment!r}")
    rng = _rng(seed)
    for _ in range(max_tries):
        n = rng.randint(1, max_vars)
        variables = VARIABLES[:n]
        eps = OrderType({v: rng.choice("1d") for v in variables})
        ranks = list(range(n))
        rng.shuffle(ranks)
        plan = _Plan(rng, eps, dict(zip(variables, ranks)), variables, NOMINALS,
                     allow_inner_part=fragment in (EXTENDED_INDUCTIVE, INDUCTIVE),
                     allow_at_part=fragment in (EXTENDED_INDUCTIVE, EXTENDED_SKELETAL))
        h = max_height - 1
        f = s.Implies(plan.side(PLUS, rng.randint(2, h)), plan.side(MINUS, rng.randint(1, h)))
        if not s.prop_vars(f):
            continue
        if fragment in classify(f).fragments:
            return f
    raise RuntimeError(f"could not generate a {fragment} formula in {max_tries} tries")


def fragment_corpus(fragment: str, n: int, seed: int = 0, **kw) -> list[s.Formula]:
    rng = random.Random(seed)
    return [fragment_formula(rng, fragment, **kw) for _ in range(n)]
