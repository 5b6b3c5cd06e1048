"""First-order correspondence language and the standard translation."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Union

from . import syntax as s
from .inequalities import Inequality, QuasiInequality, System


class FOFormula:
    __slots__ = ()

    def __str__(self):
        return fo_text(self)


@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Const:
    """Constant symbol standing for the nominal of the same name."""

    name: str

    def __str__(self):
        return s.nominal_text(self.name)


Term = Union[Var, Const]


@dataclass(frozen=True)
class Rel(FOFormula):
    """``R(source, target)``."""

    source: object
    target: object


@dataclass(frozen=True)
class Pred(FOFormula):
    """Unary predicate for the propositional variable ``name``."""

    name: str
    term: object


@dataclass(frozen=True)
class Eq(FOFormula):
    left: object
    right: object


@dataclass(frozen=True)
class Verum(FOFormula):
    pass


@dataclass(frozen=True)
class FNot(FOFormula):
    arg: FOFormula


@dataclass(frozen=True)
class FAnd(FOFormula):
    left: FOFormula
    right: FOFormula


@dataclass(frozen=True)
class FOr(FOFormula):
    left: FOFormula
    right: FOFormula


@dataclass(frozen=True)
class FImplies(FOFormula):
    left: FOFormula
    right: FOFormula


@dataclass(frozen=True)
class Forall(FOFormula):
    var: str
    body: FOFormula


@dataclass(frozen=True)
class Exists(FOFormula):
    var: str
    body: FOFormula


_FBINARY = (FAnd, FOr, FImplies)


def fo_conjunction(items: Iterable[FOFormula]) -> FOFormula:
    items = list(items)
    if not items:
        return Verum()
    out = items[0]
    for g in items[1:]:
        out = FAnd(out, g)
    return out


# --------------------------------------------------------------------------
# standard translation


class _Fresh:
    def __init__(self):
        self._counter = itertools.count()

    def __call__(self) -> str:
        return f"y{next(self._counter)}"


def st_formula(f: s.Formula, x="x", fresh=None) -> FOFormula:
    """Standard translation of ``f`` at the term ``x`` (a variable name or a term).

    Bound variables are ``y0, y1, ...`` drawn from ``fresh``; a new counter is
    used when none is given.
    """
    if fresh is None:
        fresh = _Fresh()
    if isinstance(x, str):
        x = Var(x)
    return _st(f, x, fresh)


def _st(f, x, fresh):
    if isinstance(f, s.Prop):
        return Pred(f.name, x)
    if isinstance(f, s.Nom):
        return Eq(x, Const(f.name))
    if isinstance(f, s.Bot):
        return FNot(Eq(x, x))
    if isinstance(f, s.Top):
        return Eq(x, x)
    if isinstance(f, s.Not):
        return FNot(_st(f.arg, x, fresh))
    if isinstance(f, s.And):
        return FAnd(_st(f.left, x, fresh), _st(f.right, x, fresh))
    if isinstance(f, s.Or):
        return FOr(_st(f.left, x, fresh), _st(f.right, x, fresh))
    if isinstance(f, s.Implies):
        return FImplies(_st(f.left, x, fresh), _st(f.right, x, fresh))
    if isinstance(f, s.At):
        return _st(f.arg, Const(f.nominal), fresh)
    y = fresh()
    yv = Var(y)
    if isinstance(f, s.Box):
        return Forall(y, FImplies(Rel(x, yv), _st(f.arg, yv, fresh)))
    if isinstance(f, s.Dia):
        return Exists(y, FAnd(Rel(x, yv), _st(f.arg, yv, fresh)))
    if isinstance(f, s.InvBox):
        return Forall(y, FImplies(Rel(yv, x), _st(f.arg, yv, fresh)))
    if isinstance(f, s.InvDia):
        return Exists(y, FAnd(Rel(yv, x), _st(f.arg, yv, fresh)))
    raise TypeError(f"not a formula: {f!r}")


def st_inequality(ineq: Inequality, fresh=None) -> FOFormula:
    """``forall x. (ST_x(lhs) -> ST_x(rhs))``."""
    if fresh is None:
        fresh = _Fresh()
    x = Var("x")
    return Forall("x", FImplies(_st(ineq.lhs, x, fresh), _st(ineq.rhs, x, fresh)))


def st_quasi(q: QuasiInequality | System, fresh=None) -> FOFormula:
    if fresh is None:
        fresh = _Fresh()
    body = fo_conjunction(st_inequality(ineq, fresh) for ineq in q.antecedent)
    return FImplies(body, st_inequality(q.consequent, fresh))


def closure_var(nominal: str) -> str:
    return "v_" + nominal


def universal_closure(f: FOFormula, constants) -> FOFormula:
    """Turn each listed constant into an outermost universally bound variable."""
    constants = sorted(constants)
    if not constants:
        return f
    mapping = {c: Var(closure_var(c)) for c in constants}
    out = _replace_consts(f, mapping)
    for c in reversed(constants):
        out = Forall(closure_var(c), out)
    return out


def _replace_term(t, mapping):
    if isinstance(t, Const) and t.name in mapping:
        return mapping[t.name]
    return t


def _replace_consts(f, mapping):
    if isinstance(f, Rel):
        return Rel(_replace_term(f.source, mapping), _replace_term(f.target, mapping))
    if isinstance(f, Pred):
        return Pred(f.name, _replace_term(f.term, mapping))
    if isinstance(f, Eq):
        return Eq(_replace_term(f.left, mapping), _replace_term(f.right, mapping))
    if isinstance(f, Verum):
        return f
    if isinstance(f, FNot):
        return FNot(_replace_consts(f.arg, mapping))
    if isinstance(f, _FBINARY):
        return type(f)(_replace_consts(f.left, mapping), _replace_consts(f.right, mapping))
    if isinstance(f, (Forall, Exists)):
        return type(f)(f.var, _replace_consts(f.body, mapping))
    raise TypeError(f"not an FO formula: {f!r}")


def constants_of(f: FOFormula) -> frozenset[str]:
    out = set()

    def term(t):
        if isinstance(t, Const):
            out.add(t.name)

    def go(g):
        if isinstance(g, Rel):
            term(g.source), term(g.target)
        elif isinstance(g, Pred):
            term(g.term)
        elif isinstance(g, Eq):
            term(g.left), term(g.right)
        elif isinstance(g, FNot):
            go(g.arg)
        elif isinstance(g, _FBINARY):
            go(g.left), go(g.right)
        elif isinstance(g, (Forall, Exists)):
            go(g.body)

    go(f)
    return frozenset(out)


def free_vars(f: FOFormula) -> frozenset[str]:
    def term(t):
        return {t.name} if isinstance(t, Var) else set()

    if isinstance(f, Rel):
        return frozenset(term(f.source) | term(f.target))
    if isinstance(f, Pred):
        return frozenset(term(f.term))
    if isinstance(f, Eq):
        return frozenset(term(f.left) | term(f.right))
    if isinstance(f, Verum):
        return frozenset()
    if isinstance(f, FNot):
        return free_vars(f.arg)
    if isinstance(f, _FBINARY):
        return free_vars(f.left) | free_vars(f.right)
    return free_vars(f.body) - {f.var}


def output_fo(pure_systems) -> FOFormula:
    """Conjunction over systems of the universal closure of their translations."""
    parts = []
    for system in pure_systems:
        _, noms = system.symbols()
        parts.append(universal_closure(st_quasi(system), noms))
    return fo_conjunction(parts)


# --------------------------------------------------------------------------
# printing


def fo_text(f: FOFormula) -> str:
    if isinstance(f, Rel):
        return f"R({f.source},{f.target})"
    if isinstance(f, Pred):
        return f"P_{f.name}({f.term})"
    if isinstance(f, Eq):
        return f"{f.left} = {f.right}"
    if isinstance(f, Verum):
        return "true"
    if isinstance(f, FNot):
        if isinstance(f.arg, Eq):
            return f"{f.arg.left} != {f.arg.right}"
        return "~" + _wrapped(f.arg)
    if isinstance(f, (Forall, Exists)):
        q = "forall" if isinstance(f, Forall) else "exists"
        return f"{q} {f.var}. {_wrapped(f.body)}"
    op = {FAnd: " & ", FOr: " | ", FImplies: " -> "}[type(f)]
    return _wrapped(f.left) + op + _wrapped(f.right)


def _wrapped(f):
    text = fo_text(f)
    if isinstance(f, _FBINARY + (Eq, Forall, Exists)) or (isinstance(f, FNot) and isinstance(f.arg, Eq)):
        return "(" + text + ")"
    return text
