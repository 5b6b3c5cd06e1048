"""Formulas of the hybrid language with satisfaction operators and inverse modalities.

Concrete syntax (ASCII)::

    p, q1            propositional variables (lowercase identifiers)
    'i, 'k2          nominals
    true, false      constants
    ~ & | -> <->     connectives (<-> is sugar for a conjunction of implications)
    [] <>            box / diamond
    [^] <^>          inverse box / inverse diamond
    @'i phi          satisfaction operator

Unary operators bind tightest, then ``&``, then ``|``, then ``->`` (right
associative) and finally ``<->``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterator, Mapping, Union


class Formula:
    """Base class of all formula nodes (immutable, hashable)."""

    __slots__ = ()

    def __str__(self) -> str:
        return to_text(self)


@dataclass(frozen=True, repr=False)
class Prop(Formula):
    name: str

    def __repr__(self):
        return f"Prop({self.name!r})"


@dataclass(frozen=True, repr=False)
class Nom(Formula):
    name: str

    def __repr__(self):
        return f"Nom({self.name!r})"


@dataclass(frozen=True, repr=False)
class Bot(Formula):
    def __repr__(self):
        return "Bot()"


@dataclass(frozen=True, repr=False)
class Top(Formula):
    def __repr__(self):
        return "Top()"


@dataclass(frozen=True)
class Not(Formula):
    arg: Formula


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Implies(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Box(Formula):
    arg: Formula


@dataclass(frozen=True)
class Dia(Formula):
    arg: Formula


@dataclass(frozen=True)
class InvBox(Formula):
    arg: Formula


@dataclass(frozen=True)
class InvDia(Formula):
    arg: Formula


@dataclass(frozen=True)
class At(Formula):
    nominal: str
    arg: Formula


BOT = Bot()
TOP = Top()

UNARY = (Not, Box, Dia, InvBox, InvDia)
BINARY = (And, Or, Implies)
MODAL = (Box, Dia, InvBox, InvDia)

FormulaLike = Union[Formula, str]


def children(f: Formula) -> tuple[Formula, ...]:
    """Immediate subformulas. The nominal of an ``At`` node is not a subformula."""
    if isinstance(f, BINARY):
        return (f.left, f.right)
    if isinstance(f, (UNARY, At)):
        return (f.arg,)
    return ()


def rebuild(f: Formula, new_children: tuple[Formula, ...]) -> Formula:
    """Return a node of the same kind as ``f`` with replaced children."""
    if isinstance(f, BINARY):
        return type(f)(*new_children)
    if isinstance(f, At):
        return At(f.nominal, new_children[0])
    if isinstance(f, UNARY):
        return type(f)(new_children[0])
    return f


def subformula_at(f: Formula, path: tuple[int, ...]) -> Formula:
    for i in path:
        f = children(f)[i]
    return f


def replace_at(f: Formula, path: tuple[int, ...], new: Formula) -> Formula:
    """Replace the occurrence at ``path`` (child indices from the root)."""
    if not path:
        return new
    kids = list(children(f))
    kids[path[0]] = replace_at(kids[path[0]], path[1:], new)
    return rebuild(f, tuple(kids))


def walk(f: Formula) -> Iterator[Formula]:
    """Pre-order traversal."""
    stack = [f]
    while stack:
        g = stack.pop()
        yield g
        stack.extend(reversed(children(g)))


def height(f: Formula) -> int:
    kids = children(f)
    return 0 if not kids else 1 + max(height(k) for k in kids)


def size(f: Formula) -> int:
    return sum(1 for _ in walk(f))


def vars_and_nominals(f: Formula) -> tuple[frozenset[str], frozenset[str]]:
    props, noms = set(), set()
    for g in walk(f):
        if isinstance(g, Prop):
            props.add(g.name)
        elif isinstance(g, Nom):
            noms.add(g.name)
        elif isinstance(g, At):
            noms.add(g.nominal)
    return frozenset(props), frozenset(noms)


def prop_vars(f: Formula) -> frozenset[str]:
    return vars_and_nominals(f)[0]


def nominals(f: Formula) -> frozenset[str]:
    return vars_and_nominals(f)[1]


def is_pure(f: Formula) -> bool:
    return not any(isinstance(g, Prop) for g in walk(f))


def is_base(f: Formula) -> bool:
    """True when ``f`` uses no inverse modality."""
    return not any(isinstance(g, (InvBox, InvDia)) for g in walk(f))


def conjunction(items, empty: Formula = TOP) -> Formula:
    items = list(items)
    if not items:
        return empty
    out = items[0]
    for g in items[1:]:
        out = And(out, g)
    return out


def disjunction(items, empty: Formula = BOT) -> Formula:
    items = list(items)
    if not items:
        return empty
    out = items[0]
    for g in items[1:]:
        out = Or(out, g)
    return out


# --------------------------------------------------------------------------
# substitution and fresh names


@dataclass(frozen=True)
class SortedSubstitution:
    """Simultaneous replacement of variables by formulas and nominals by nominals."""

    props: Mapping[str, Formula] = field(default_factory=dict)
    noms: Mapping[str, str] = field(default_factory=dict)


def apply_subst(s: SortedSubstitution, f: Formula) -> Formula:
    if not s.props and not s.noms:
        return f
    return _subst(f, s.props, s.noms)


def _subst(f, props, noms):
    if isinstance(f, Prop):
        return props.get(f.name, f)
    if isinstance(f, Nom):
        return Nom(noms[f.name]) if f.name in noms else f
    if isinstance(f, At):
        return At(noms.get(f.nominal, f.nominal), _subst(f.arg, props, noms))
    kids = children(f)
    if not kids:
        return f
    return rebuild(f, tuple(_subst(k, props, noms) for k in kids))


def substitute(f: Formula, var: str, value: Formula) -> Formula:
    return _subst(f, {var: value}, {})


RESERVED_NOMINAL = re.compile(r"n\d+\Z")


class NominalSupply:
    """Source of nominals that are new to a derivation.

    Emits ``n0, n1, ...`` skipping anything in ``reserved``. Confined to a
    single derivation; not thread safe.
    """

    def __init__(self, reserved=(), counter: int = 0):
        self.reserved = set(reserved)
        self.counter = counter

    def fresh(self) -> str:
        while True:
            name = f"n{self.counter}"
            self.counter += 1
            if name not in self.reserved:
                self.reserved.add(name)
                return name

    def reserve(self, names) -> None:
        self.reserved.update(names)


def fresh_nominal(supply: NominalSupply) -> str:
    return supply.fresh()


# --------------------------------------------------------------------------
# printing

# binding strength: larger binds tighter
_PREC = {Implies: 1, Or: 2, And: 3}
_UNARY_TOKEN = {Not: "~", Box: "[]", Dia: "<>", InvBox: "[^]", InvDia: "<^>"}


def nominal_text(name: str) -> str:
    return "'" + name


def to_text(f: Formula) -> str:
    """Render with minimal parentheses; ``parse(to_text(f)) == f``."""
    if isinstance(f, Prop):
        return f.name
    if isinstance(f, Nom):
        return nominal_text(f.name)
    if isinstance(f, Bot):
        return "false"
    if isinstance(f, Top):
        return "true"
    if isinstance(f, (UNARY, At)):
        if isinstance(f, At):
            head = "@" + nominal_text(f.nominal)
        else:
            head = _UNARY_TOKEN[type(f)]
        body = f.arg
        text = to_text(body)
        if isinstance(body, BINARY):
            text = "(" + text + ")"
        if isinstance(f, Not) or (isinstance(body, UNARY + (At,)) and not isinstance(f, At)):
            return head + text
        return head + " " + text
    prec = _PREC[type(f)]
    left, right = to_text(f.left), to_text(f.right)
    lp = _PREC.get(type(f.left), 9)
    rp = _PREC.get(type(f.right), 9)
    if isinstance(f, Implies):
        # right associative
        if lp <= prec:
            left = "(" + left + ")"
        if rp < prec:
            right = "(" + right + ")"
        op = " -> "
    else:
        if lp < prec:
            left = "(" + left + ")"
        if rp <= prec:
            right = "(" + right + ")"
        op = " & " if isinstance(f, And) else " | "
    return left + op + right


def print_formula(f: Formula) -> str:
    return to_text(f)


# --------------------------------------------------------------------------
# parsing


class ParseError(ValueError):
    def __init__(self, message: str, offset: int, expected=()):
        self.offset = offset
        self.expected = frozenset(expected)
        detail = f" (expected one of: {', '.join(sorted(self.expected))})" if self.expected else ""
        super().__init__(f"{message} at offset {offset}{detail}")


_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<iff><->)
  | (?P<imp>->)
  | (?P<invbox>\[\^\])
  | (?P<invdia><\^>)
  | (?P<box>\[\])
  | (?P<dia><>)
  | (?P<at>@)
  | (?P<nom>'[A-Za-z_][A-Za-z0-9_]*)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<punct>[~&|()])
    """,
    re.VERBOSE,
)

_ATOM_START = {"variable", "nominal", "true", "false", "(", "~", "[]", "<>", "[^]", "<^>", "@"}


def _tokenize(text: str):
    out = []
    pos = 0
    n = len(text)
    while pos < n:
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", _byte_offset(text, pos), _ATOM_START)
        kind = m.lastgroup
        val = m.group()
        if kind == "punct":
            kind = val
        elif kind == "ident":
            if val in ("true", "false"):
                kind = val
            elif not val[0].islower():
                raise ParseError(f"variables must be lowercase identifiers, got {val!r}",
                                 _byte_offset(text, pos), {"variable"})
            else:
                kind = "variable"
        elif kind == "nom":
            kind = "nominal"
        if kind != "ws":
            out.append((kind, val, pos))
        pos = m.end()
    out.append(("eof", "", n))
    return out


def _byte_offset(text: str, pos: int) -> int:
    return len(text[:pos].encode("utf-8"))


class _Parser:
    def __init__(self, text: str, allow_reserved: bool):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0
        self.allow_reserved = allow_reserved

    def peek(self):
        return self.toks[self.i][0]

    def take(self, kind=None):
        tok = self.toks[self.i]
        if kind is not None and tok[0] != kind:
            self.fail({kind})
        self.i += 1
        return tok

    def fail(self, expected):
        kind, val, pos = self.toks[self.i]
        what = "end of input" if kind == "eof" else repr(val)
        raise ParseError(f"unexpected {what}", _byte_offset(self.text, pos), expected)

    def parse(self) -> Formula:
        f = self.iff()
        if self.peek() != "eof":
            self.fail({"&", "|", "->", "<->", "end of input"})
        return f

    def iff(self):
        left = self.imp()
        if self.peek() == "iff":
            self.take()
            right = self.imp()
            return And(Implies(left, right), Implies(right, left))
        return left

    def imp(self):
        left = self.disj()
        if self.peek() == "imp":
            self.take()
            return Implies(left, self.imp())
        return left

    def disj(self):
        f = self.conj()
        while self.peek() == "|":
            self.take()
            f = Or(f, self.conj())
        return f

    def conj(self):
        f = self.unary()
        while self.peek() == "&":
            self.take()
            f = And(f, self.unary())
        return f

    def nominal(self) -> str:
        _, val, pos = self.take("nominal")
        name = val[1:]
        if not self.allow_reserved and RESERVED_NOMINAL.match(name):
            raise ParseError(f"nominal {val!r} uses the reserved prefix 'n<digits>",
                             _byte_offset(self.text, pos), {"nominal"})
        return name

    def unary(self):
        kind = self.peek()
        if kind == "~":
            self.take()
            return Not(self.unary())
        if kind == "box":
            self.take()
            return Box(self.unary())
        if kind == "dia":
            self.take()
            return Dia(self.unary())
        if kind == "invbox":
            self.take()
            return InvBox(self.unary())
        if kind == "invdia":
            self.take()
            return InvDia(self.unary())
        if kind == "at":
            self.take()
            name = self.nominal()
            return At(name, self.unary())
        if kind == "variable":
            return Prop(self.take()[1])
        if kind == "nominal":
            return Nom(self.nominal())
        if kind == "true":
            self.take()
            return TOP
        if kind == "false":
            self.take()
            return BOT
        if kind == "(":
            self.take()
            f = self.iff()
            self.take(")")
            return f
        self.fail(_ATOM_START)


def parse(text: str, *, allow_reserved: bool = False) -> Formula:
    """Parse concrete syntax into a :class:`Formula`.

    Nominals of the form ``'n<digits>`` are reserved for generated names and
    rejected unless ``allow_reserved`` is set.
    """
    return _Parser(text, allow_reserved).parse()


def as_formula(f: FormulaLike) -> Formula:
    return parse(f) if isinstance(f, str) else f
