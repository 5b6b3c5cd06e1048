"""Signed generation trees, node roles, branch decomposition and fragment membership."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping

from . import syntax as s
from .inequalities import Inequality

PLUS, MINUS = "+", "-"

OUTER = "outer"
INNER_SRA = "inner-sra"
INNER_SRR = "inner-srr"
LEAF = "leaf"
AT_NOMINAL = "at-nominal"

EXTENDED_INDUCTIVE = "extended-inductive"
EXTENDED_SKELETAL = "extended-skeletal"
INDUCTIVE = "inductive"
SKELETAL = "skeletal"
INNER_INDUCTIVE = "inner-inductive"
FRAGMENTS = (EXTENDED_INDUCTIVE, EXTENDED_SKELETAL, INDUCTIVE, SKELETAL)

_OUTER = {
    (PLUS, s.Or), (PLUS, s.And), (PLUS, s.Dia), (PLUS, s.Not), (PLUS, s.At),
    (MINUS, s.And), (MINUS, s.Or), (MINUS, s.Box), (MINUS, s.Not), (MINUS, s.At), (MINUS, s.Implies),
}
_SRA = {
    (PLUS, s.And), (PLUS, s.Box), (PLUS, s.Not), (PLUS, s.At),
    (MINUS, s.Or), (MINUS, s.Dia), (MINUS, s.Not), (MINUS, s.At),
}
_SRR = {(PLUS, s.Or), (PLUS, s.Implies), (MINUS, s.And)}


def flip(sign: str) -> str:
    return MINUS if sign == PLUS else PLUS


# --------------------------------------------------------------------------
# order-types and dependence orders


@dataclass(frozen=True)
class OrderType:
    """Polarity per variable: ``"1"`` or ``"d"`` (the dual polarity)."""

    values: tuple[tuple[str, str], ...]

    def __init__(self, values: Mapping[str, str] | Iterable[tuple[str, str]] = ()):
        items = dict(values)
        for v, pol in items.items():
            if pol not in ("1", "d"):
                raise ValueError(f"polarity of {v} must be '1' or 'd', got {pol!r}")
        object.__setattr__(self, "values", tuple(sorted(items.items())))

    def __getitem__(self, var: str) -> str:
        for v, pol in self.values:
            if v == var:
                return pol
        raise KeyError(var)

    def __contains__(self, var) -> bool:
        return any(v == var for v, _ in self.values)

    @property
    def variables(self) -> tuple[str, ...]:
        return tuple(v for v, _ in self.values)

    def as_dict(self) -> dict[str, str]:
        return dict(self.values)

    def opposite(self) -> "OrderType":
        return OrderType({v: "d" if pol == "1" else "1" for v, pol in self.values})

    def critical_sign(self, var: str) -> str:
        return PLUS if self[var] == "1" else MINUS

    def is_critical(self, var: str, sign: str) -> bool:
        return self.critical_sign(var) == sign

    def __str__(self):
        return ",".join(f"{v}={pol}" for v, pol in self.values)

    @classmethod
    def parse(cls, text: str) -> "OrderType":
        """Read ``p=1,q=d``."""
        out = {}
        for part in filter(None, (x.strip() for x in text.split(","))):
            var, _, pol = part.partition("=")
            pol = {"1": "1", "d": "d", "∂": "d"}.get(pol.strip())
            if pol is None or not var.strip():
                raise ValueError(f"bad order-type entry {part!r}; expected var=1 or var=d")
            out[var.strip()] = pol
        return cls(out)

    @classmethod
    def all_over(cls, variables) -> Iterator["OrderType"]:
        variables = sorted(variables)
        for pols in itertools.product("1d", repeat=len(variables)):
            yield cls(dict(zip(variables, pols)))


class CyclicOrder(ValueError):
    pass


@dataclass(frozen=True)
class DependenceOrder:
    """Strict partial order; ``(a, b)`` in ``pairs`` means ``a`` is below ``b``."""

    pairs: frozenset = frozenset()

    @classmethod
    def from_pairs(cls, pairs) -> "DependenceOrder":
        """Transitive closure of ``pairs``; raises :class:`CyclicOrder` if not irreflexive."""
        closure = set(pairs)
        while True:
            extra = {(a, d) for a, b in closure for c, d in closure if b == c} - closure
            if not extra:
                break
            closure |= extra
        loops = sorted(a for a, b in closure if a == b)
        if loops:
            raise CyclicOrder(f"dependence constraints are cyclic through {loops[0]}")
        return cls(frozenset(closure))

    def below(self, a: str, b: str) -> bool:
        return (a, b) in self.pairs

    def is_strict_partial_order(self) -> bool:
        irreflexive = all(a != b for a, b in self.pairs)
        transitive = all((a, d) in self.pairs for a, b in self.pairs for c, d in self.pairs if b == c)
        return irreflexive and transitive

    def elimination_order(self, variables) -> list[str]:
        """Maximal elements first; ties broken alphabetically."""
        remaining = sorted(set(variables))
        out = []
        while remaining:
            tops = [v for v in remaining if not any(self.below(v, w) for w in remaining if w != v)]
            pick = tops[0] if tops else remaining[0]
            out.append(pick)
            remaining.remove(pick)
        return out

    def __str__(self):
        return "{" + ", ".join(f"{a}<{b}" for a, b in sorted(self.pairs)) + "}"


# --------------------------------------------------------------------------
# signed trees


@dataclass(frozen=True, eq=False)
class SignedNode:
    sign: str | None
    formula: s.Formula
    path: tuple[int, ...]
    children: tuple["SignedNode", ...] = ()

    @property
    def is_leaf(self) -> bool:
        return not self.children

    @property
    def is_variable(self) -> bool:
        return isinstance(self.formula, s.Prop)

    @property
    def label(self) -> str:
        f = self.formula
        if isinstance(f, s.Prop):
            text = f.name
        elif isinstance(f, s.Nom):
            text = s.nominal_text(f.name)
        elif isinstance(f, s.At):
            text = "@" + s.nominal_text(f.nominal)
        elif isinstance(f, (s.Bot, s.Top)):
            text = s.to_text(f)
        else:
            text = {s.Not: "~", s.And: "&", s.Or: "|", s.Implies: "->", s.Box: "[]",
                    s.Dia: "<>", s.InvBox: "[^]", s.InvDia: "<^>"}[type(f)]
        return (self.sign or "") + text

    def walk(self) -> Iterator["SignedNode"]:
        yield self
        for c in self.children:
            yield from c.walk()

    def __repr__(self):
        return f"SignedNode({self.label} at {self.path})"


def build_signed_tree(f: s.Formula, root_sign: str = PLUS, _path=()) -> SignedNode:
    """Sign every node: same sign under everything except ``~`` and the antecedent of ``->``.

    The nominal of an ``@`` node is represented as an unsigned leaf child in
    position 0 so that paths into the body go through index 1 in the tree
    (formula paths still use index 0 for the body).
    """
    if isinstance(f, s.Not):
        kids = (build_signed_tree(f.arg, flip(root_sign), _path + (0,)),)
    elif isinstance(f, s.Implies):
        kids = (build_signed_tree(f.left, flip(root_sign), _path + (0,)),
                build_signed_tree(f.right, root_sign, _path + (1,)))
    elif isinstance(f, s.At):
        kids = (SignedNode(None, s.Nom(f.nominal), _path),
                build_signed_tree(f.arg, root_sign, _path + (0,)))
    else:
        kids = tuple(build_signed_tree(k, root_sign, _path + (i,)) for i, k in enumerate(s.children(f)))
    return SignedNode(root_sign, f, _path, kids)


def classify_node(n: SignedNode) -> frozenset[str]:
    """Role tags of a node. A node listed in several table cells carries every tag."""
    if n.sign is None:
        return frozenset({AT_NOMINAL})
    if n.is_leaf:
        return frozenset({LEAF})
    key = (n.sign, type(n.formula))
    tags = set()
    if key in _OUTER:
        tags.add(OUTER)
    if key in _SRA:
        tags.add(INNER_SRA)
    if key in _SRR:
        tags.add(INNER_SRR)
    return frozenset(tags)


def is_outer(n: SignedNode) -> bool:
    return OUTER in classify_node(n)


def is_inner(n: SignedNode) -> bool:
    tags = classify_node(n)
    return INNER_SRA in tags or INNER_SRR in tags


def is_srr(n: SignedNode) -> bool:
    return INNER_SRR in classify_node(n)


def is_critical_leaf(n: SignedNode, eps: OrderType) -> bool:
    return n.is_variable and n.sign is not None and eps.is_critical(n.formula.name, n.sign)


def critical_branches(t: SignedNode, eps: OrderType) -> list[tuple[SignedNode, ...]]:
    """Root-to-leaf node sequences ending in critical leaves, left to right."""
    out = []

    def go(n, trail):
        trail = trail + (n,)
        if is_critical_leaf(n, eps):
            out.append(trail)
        for c in n.children:
            go(c, trail)

    go(t, ())
    return out


def has_critical(t: SignedNode, eps: OrderType) -> bool:
    return any(is_critical_leaf(n, eps) for n in t.walk())


# --------------------------------------------------------------------------
# branch decomposition


class NotGood(ValueError):
    def __init__(self, message: str, node: SignedNode | None = None):
        super().__init__(message)
        self.node = node


@dataclass(frozen=True)
class BranchDecomposition:
    """Segments are listed root first; the leaf is kept apart."""

    leaf: SignedNode
    inner: tuple[SignedNode, ...]
    outer: tuple[SignedNode, ...]
    at_part: tuple[SignedNode, ...]

    @property
    def terminator(self) -> SignedNode | None:
        return self.at_part[-1] if self.at_part else None

    @property
    def nodes(self) -> tuple[SignedNode, ...]:
        return self.at_part + self.outer + self.inner + (self.leaf,)

    def to_dict(self) -> dict:
        return {
            "leaf": self.leaf.label,
            "inner": [n.label for n in self.inner],
            "outer": [n.label for n in self.outer],
            "at_part": [n.label for n in self.at_part],
        }


def _splits(internal: tuple[SignedNode, ...], flavor: str):
    """Valid (a, b) splits: the ``a`` nodes nearest the leaf form the inner segment, the next ``b`` the outer one."""
    up = tuple(reversed(internal))  # leaf side first
    n = len(up)
    a_range = range(n + 1)
    if flavor in (EXTENDED_SKELETAL, SKELETAL):
        a_range = range(1)
    elif flavor == INNER_INDUCTIVE:
        a_range = range(n, n + 1)
    for a in a_range:
        if not all(is_inner(x) for x in up[:a]):
            break
        b_max = 0
        while a + b_max < n and is_outer(up[a + b_max]):
            b_max += 1
        for b in range(b_max, -1, -1):
            rest = up[a + b:]
            if rest and flavor in (INDUCTIVE, SKELETAL, INNER_INDUCTIVE):
                continue
            if rest and not isinstance(rest[0].formula, s.At):
                continue
            yield a, b


def decompose_branch(branch, flavor: str = EXTENDED_INDUCTIVE) -> BranchDecomposition:
    """Split a root-to-leaf branch into inner, outer and @-terminated segments for the given fragment flavor.

    Among the admissible splits the shortest inner segment is chosen (it carries the
    fewest side conditions), then the longest outer one.
    """
    branch = tuple(branch)
    leaf, internal = branch[-1], branch[:-1]
    if not leaf.is_variable:
        raise NotGood("branch does not end in a variable", leaf)
    for a, b in _splits(internal, flavor):
        k = len(internal)
        return BranchDecomposition(
            leaf=leaf,
            inner=internal[k - a:],
            outer=internal[k - a - b:k - a],
            at_part=internal[:k - a - b],
        )
    raise NotGood(f"branch to {leaf.label} is not {flavor}", _offender(internal, flavor))


def _offender(internal, flavor):
    up = tuple(reversed(internal))
    allow_inner = flavor not in (EXTENDED_SKELETAL, SKELETAL)
    i = 0
    if allow_inner:
        while i < len(up) and is_inner(up[i]):
            i += 1
    while i < len(up) and is_outer(up[i]):
        i += 1
    return up[i] if i < len(up) else (up[-1] if up else None)


# --------------------------------------------------------------------------
# fragment checks


@dataclass(frozen=True)
class InductiveCheck:
    ok: bool
    violation: str | None = None
    node: SignedNode | None = None
    decompositions: tuple[BranchDecomposition, ...] = ()
    required: frozenset = frozenset()

    def __bool__(self):
        return self.ok


def _srr_obligations(dec: BranchDecomposition, eps: OrderType):
    """Yield (node, side formula tree, violation) for each SRR node of the inner segment."""
    chain = dec.inner + (dec.leaf,)
    for node, below in zip(chain, chain[1:]):
        if not is_srr(node):
            continue
        other = next(c for c in node.children if c is not below)
        yield node, other


def _requirements(t: SignedNode, eps: OrderType, flavor: str):
    """Decompose every critical branch and collect the dependence pairs they demand."""
    decs = []
    pairs = set()
    for br in critical_branches(t, eps):
        try:
            dec = decompose_branch(br, flavor)
        except NotGood as err:
            return InductiveCheck(False, str(err), err.node)
        decs.append(dec)
        target = dec.leaf.formula.name
        for node, other in _srr_obligations(dec, eps):
            if has_critical(other, eps):
                return InductiveCheck(False, f"{node.label} has a side argument with a critical occurrence", node)
            for g in other.walk():
                if g.is_variable:
                    pairs.add((g.formula.name, target))
    return InductiveCheck(True, decompositions=tuple(decs), required=frozenset(pairs))


def check_inductive(t: SignedNode, eps: OrderType, omega: DependenceOrder,
                    flavor: str = EXTENDED_INDUCTIVE) -> InductiveCheck:
    res = _requirements(t, eps, flavor)
    if not res.ok:
        return res
    for a, b in sorted(res.required):
        if not omega.below(a, b):
            return InductiveCheck(False, f"dependence order lacks {a} < {b}", None, res.decompositions, res.required)
    return res


def check_inner_inductive(t: SignedNode, eps: OrderType, omega: DependenceOrder) -> bool:
    """Every critical branch is inner all the way up, with the side conditions met."""
    return check_inductive(t, eps, omega, INNER_INDUCTIVE).ok


def input_trees(ineq: Inequality) -> tuple[SignedNode, SignedNode]:
    """Trees used to classify an input ``lhs <= rhs``: positive lhs, negative rhs."""
    return build_signed_tree(ineq.lhs, PLUS), build_signed_tree(ineq.rhs, MINUS)


def working_trees(ineq: Inequality) -> tuple[SignedNode, SignedNode]:
    """Trees of an inequality inside a system: negative lhs, positive rhs."""
    return build_signed_tree(ineq.lhs, MINUS), build_signed_tree(ineq.rhs, PLUS)


@dataclass(frozen=True)
class Certificate:
    epsilon: OrderType
    omega: DependenceOrder

    def to_dict(self) -> dict:
        return {"epsilon": self.epsilon.as_dict(), "omega_pairs": sorted(list(p) for p in self.omega.pairs)}


@dataclass(frozen=True)
class Classification:
    fragments: frozenset
    certificates: Mapping[str, Certificate] = field(default_factory=dict)
    branches: tuple[BranchDecomposition, ...] = ()

    @property
    def fragment(self) -> str:
        for name in (SKELETAL, INDUCTIVE, EXTENDED_SKELETAL, EXTENDED_INDUCTIVE):
            if name in self.fragments:
                return name
        return "none"

    def certificate(self, flavor: str) -> Certificate | None:
        return self.certificates.get(flavor)

    def to_dict(self) -> dict:
        main = self.certificates.get(EXTENDED_INDUCTIVE)
        return {
            "fragment": sorted(self.fragments),
            "epsilon": main.epsilon.as_dict() if main else None,
            "omega_pairs": sorted(list(p) for p in main.omega.pairs) if main else None,
            "certificates": {k: v.to_dict() for k, v in sorted(self.certificates.items())},
            "branches": [b.to_dict() for b in self.branches],
        }


def as_inequality(obj) -> Inequality:
    """Inputs ``a -> b`` become ``a <= b``; any other formula ``t`` becomes ``true <= t``."""
    if isinstance(obj, Inequality):
        return obj
    f = s.as_formula(obj)
    if isinstance(f, s.Implies):
        return Inequality(f.left, f.right)
    return Inequality(s.TOP, f)


def certify(ineq: Inequality, eps: OrderType, flavor: str) -> Certificate | None:
    """Synthesize a dependence order for ``eps`` or return None."""
    pairs = set()
    for t in input_trees(ineq):
        res = _requirements(t, eps, flavor)
        if not res.ok:
            return None
        pairs |= res.required
    try:
        return Certificate(eps, DependenceOrder.from_pairs(pairs))
    except CyclicOrder:
        return None


def classify(obj) -> Classification:
    """Every fragment membership, with the first order-type that witnesses it."""
    ineq = as_inequality(obj)
    props, _ = ineq.symbols()
    certs: dict[str, Certificate] = {}
    for eps in OrderType.all_over(props):
        for flavor in FRAGMENTS:
            if flavor not in certs:
                cert = certify(ineq, eps, flavor)
                if cert is not None:
                    certs[flavor] = cert
        if len(certs) == len(FRAGMENTS):
            break
    branches = ()
    main = certs.get(EXTENDED_INDUCTIVE)
    if main is not None:
        branches = tuple(d for t in input_trees(ineq)
                         for d in check_inductive(t, main.epsilon, main.omega).decompositions)
    return Classification(frozenset(certs), certs, branches)
