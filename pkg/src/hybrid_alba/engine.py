"""Rewriting systems of inequalities until every propositional variable is eliminated.

A run starts from the first approximation of ``lhs <= rhs`` and pushes each
system through four phases in order:

* ``at-split``: split off the ``@`` node that closes the root-side part of a critical branch,
* ``outer``: decompose outer nodes of nominal-flanked inequalities,
* ``inner``: residuate inner nodes (full mode only),
* ``ackermann``: eliminate variables by substituting their minimal or maximal valuations.

Rules only touch inequalities that contain a critical occurrence for the
active order-type.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator

from . import fol
from . import syntax as s
from .inequalities import Inequality, System
from .signed import (
    EXTENDED_INDUCTIVE, EXTENDED_SKELETAL, MINUS, PLUS, Certificate, DependenceOrder, NotGood,
    OrderType, SignedNode, as_inequality, build_signed_tree, certify, classify, critical_branches,
    decompose_branch, has_critical, is_outer,
)

FULL, RESTRICTED = "full", "restricted"

STAGE_AT = "at-split"
STAGE_OUTER = "outer"
STAGE_INNER = "inner"
STAGE_ACK = "ackermann"
FIRST_APPROXIMATION = "first-approximation"

MAX_STEPS = 20000


class RuleNotApplicable(ValueError):
    pass


class AckermannBlocked(Exception):
    def __init__(self, var: str, witness: Inequality | None, reason: str):
        super().__init__(f"cannot eliminate {var}: {reason}" + (f" in {witness}" if witness else ""))
        self.var = var
        self.witness = witness


class NotInFragment(ValueError):
    pass


@dataclass(frozen=True)
class RuleResult:
    rule: str
    children: tuple[System, ...]
    consumed: tuple[int, ...]
    produced: tuple[tuple[int, ...], ...]


def _replace(sys: System, index: int, new) -> tuple[System, tuple[int, ...]]:
    ante = list(sys.antecedent)
    new = list(new)
    ante[index:index + 1] = new
    return sys.with_antecedent(ante), tuple(range(index, index + len(new)))


def _one(rule, sys, index, new) -> RuleResult:
    child, produced = _replace(sys, index, new)
    return RuleResult(rule, (child,), (index,), (produced,))


def _two(rule, sys, index, first, second) -> RuleResult:
    a, pa = _replace(sys, index, first)
    b, pb = _replace(sys, index, second)
    return RuleResult(rule, (a, b), (index,), (pa, pb))


# --------------------------------------------------------------------------
# first approximation


def first_approximation(ineq: Inequality, head: tuple[str, str] = ("i0", "i1")) -> System:
    return System((Inequality(s.Nom(head[0]), ineq.lhs), Inequality(ineq.rhs, s.Not(s.Nom(head[1])))), head)


def _nominal_side(ineq: Inequality):
    """(side, nominal) for ``i <= t`` ("rhs", i) or ``t <= ~i`` ("lhs", i); else None."""
    if isinstance(ineq.lhs, s.Nom):
        return "rhs", ineq.lhs.name
    if ineq.is_negnominal_rhs:
        return "lhs", ineq.rhs.arg.name
    return None


def _side_tree(ineq: Inequality, side: str) -> SignedNode:
    return build_signed_tree(ineq.rhs, PLUS) if side == "rhs" else build_signed_tree(ineq.lhs, MINUS)


def _rebuild(side: str, nominal: str, body: s.Formula) -> Inequality:
    return Inequality(s.Nom(nominal), body) if side == "rhs" else Inequality(body, s.Not(s.Nom(nominal)))


def _node_at(t: SignedNode, path) -> SignedNode:
    for n in t.walk():
        if n.path == tuple(path) and n.sign is not None:
            return n
    raise RuleNotApplicable(f"no subformula at {path}")


# --------------------------------------------------------------------------
# root-side @ decomposition


def split_at_occurrence(sys: System, target: int, hole) -> RuleResult:
    """Split on the truth value of the ``@`` occurrence at ``hole`` in the target's open side.

    A positively signed occurrence yields ``t(false)`` alone, and ``t(true)``
    together with ``j <= a``; a negatively signed one yields ``t(true)``
    alone, and ``t(false)`` together with ``a <= ~j``.
    """
    ineq = sys.antecedent[target]
    shape = _nominal_side(ineq)
    if shape is None:
        raise RuleNotApplicable(f"{ineq} is not nominal-flanked")
    side, nom = shape
    body = ineq.rhs if side == "rhs" else ineq.lhs
    at = s.subformula_at(body, tuple(hole))
    if not isinstance(at, s.At):
        raise RuleNotApplicable(f"no @ at {tuple(hole)} in {ineq}")
    sign = _node_at(_side_tree(ineq, side), hole).sign
    positive = sign == PLUS
    letter = {("rhs", True): "a", ("rhs", False): "b", ("lhs", False): "c", ("lhs", True): "d"}[side, positive]
    lone = _rebuild(side, nom, s.replace_at(body, tuple(hole), s.BOT if positive else s.TOP))
    kept = _rebuild(side, nom, s.replace_at(body, tuple(hole), s.TOP if positive else s.BOT))
    if positive:
        extracted = Inequality(s.Nom(at.nominal), at.arg)
    else:
        extracted = Inequality(at.arg, s.Not(s.Nom(at.nominal)))
    return _two(f"{STAGE_AT}:decompose-at-{letter}", sys, target, [lone], [kept, extracted])


def find_at_hole(ineq: Inequality, eps: OrderType, flavor: str):
    """Formula path of the ``@`` closing the root-side part of the leftmost critical branch that has one."""
    shape = _nominal_side(ineq)
    if shape is None:
        return None
    tree = _side_tree(ineq, shape[0])
    for br in critical_branches(tree, eps):
        try:
            dec = decompose_branch(br, flavor)
        except NotGood:
            continue
        if dec.at_part:
            return dec.terminator.path
    return None


# --------------------------------------------------------------------------
# outer decomposition


def apply_outer_rule(sys: System, target: int, supply: s.NominalSupply) -> RuleResult:
    """Decompose the root of the open side of a nominal-flanked inequality."""
    ineq = sys.antecedent[target]
    shape = _nominal_side(ineq)
    if shape is None:
        raise RuleNotApplicable(f"{ineq} is not nominal-flanked")
    side, i = shape
    Nom, Not = s.Nom, s.Not
    if side == "rhs":
        f = ineq.rhs
        if isinstance(f, s.Or):
            return _two(f"{STAGE_OUTER}:split-or", sys, target, [Inequality(Nom(i), f.left)], [Inequality(Nom(i), f.right)])
        if isinstance(f, s.And):
            return _one(f"{STAGE_OUTER}:split-and", sys, target, [Inequality(Nom(i), f.left), Inequality(Nom(i), f.right)])
        if isinstance(f, s.Dia):
            j = supply.fresh()
            return _one(f"{STAGE_OUTER}:approx-dia", sys, target,
                        [Inequality(Nom(i), s.Dia(Nom(j))), Inequality(Nom(j), f.arg)])
        if isinstance(f, s.Not):
            return _one(f"{STAGE_OUTER}:residuate-not-right", sys, target, [Inequality(f.arg, Not(Nom(i)))])
        if isinstance(f, s.At):
            return _one(f"{STAGE_OUTER}:approx-at-right", sys, target, [Inequality(Nom(f.nominal), f.arg)])
    else:
        f = ineq.lhs
        if isinstance(f, s.And):
            return _two(f"{STAGE_OUTER}:split-and-left", sys, target,
                        [Inequality(f.left, Not(Nom(i)))], [Inequality(f.right, Not(Nom(i)))])
        if isinstance(f, s.Or):
            return _one(f"{STAGE_OUTER}:split-or-left", sys, target,
                        [Inequality(f.left, Not(Nom(i))), Inequality(f.right, Not(Nom(i)))])
        if isinstance(f, s.Box):
            j = supply.fresh()
            return _one(f"{STAGE_OUTER}:approx-box", sys, target,
                        [Inequality(f.arg, Not(Nom(j))), Inequality(s.Box(Not(Nom(j))), Not(Nom(i)))])
        if isinstance(f, s.Not):
            return _one(f"{STAGE_OUTER}:residuate-not-left", sys, target, [Inequality(Nom(i), f.arg)])
        if isinstance(f, s.At):
            return _one(f"{STAGE_OUTER}:approx-at-left", sys, target, [Inequality(f.arg, Not(Nom(f.nominal)))])
        if isinstance(f, s.Implies):
            j, k = supply.fresh(), supply.fresh()
            return _one(f"{STAGE_OUTER}:approx-implies", sys, target, [
                Inequality(Nom(j), f.left),
                Inequality(f.right, Not(Nom(k))),
                Inequality(s.Implies(Nom(j), Not(Nom(k))), Not(Nom(i))),
            ])
    raise RuleNotApplicable(f"no outer rule for {ineq}")


def _outer_applicable(ineq: Inequality) -> bool:
    shape = _nominal_side(ineq)
    if shape is None:
        return False
    tree = _side_tree(ineq, shape[0])
    return not tree.is_leaf and is_outer(tree)


# --------------------------------------------------------------------------
# inner decomposition


def apply_inner_rule(sys: System, target: int, eps: OrderType | None = None) -> RuleResult:
    """Residuate or split the root of the side that holds the critical occurrences.

    Without an order-type every variable occurrence counts as critical; the
    right-hand side is then preferred.
    """
    ineq = sys.antecedent[target]
    left, right = build_signed_tree(ineq.lhs, MINUS), build_signed_tree(ineq.rhs, PLUS)

    def crit(t):
        return has_critical(t, eps) if eps is not None else any(n.is_variable for n in t.walk())

    if crit(right) and not right.is_leaf:
        res = _inner_right(sys, target, ineq, right, crit)
        if res is not None:
            return res
    if crit(left) and not left.is_leaf:
        res = _inner_left(sys, target, ineq, left, crit)
        if res is not None:
            return res
    raise RuleNotApplicable(f"no inner rule for {ineq}")


def _inner_right(sys, target, ineq, tree, crit):
    a, f = ineq.lhs, ineq.rhs
    tag = STAGE_INNER
    if isinstance(f, s.And):
        return _one(f"{tag}:split-and", sys, target, [Inequality(a, f.left), Inequality(a, f.right)])
    if isinstance(f, s.Box):
        return _one(f"{tag}:residuate-box", sys, target, [Inequality(s.InvDia(a), f.arg)])
    if isinstance(f, s.Not):
        return _one(f"{tag}:residuate-not-right", sys, target, [Inequality(f.arg, s.Not(a))])
    if isinstance(f, s.At):
        return _two(f"{tag}:at-right", sys, target, [Inequality(a, s.BOT)], [Inequality(s.Nom(f.nominal), f.arg)])
    if isinstance(f, s.Or):
        first, second = tree.children
        if crit(first):
            return _one(f"{tag}:residuate-or-first", sys, target, [Inequality(s.And(a, s.Not(f.right)), f.left)])
        if crit(second):
            return _one(f"{tag}:residuate-or-second", sys, target, [Inequality(s.And(a, s.Not(f.left)), f.right)])
    if isinstance(f, s.Implies):
        first, second = tree.children
        if crit(second):
            return _one(f"{tag}:residuate-implies-consequent", sys, target, [Inequality(s.And(a, f.left), f.right)])
        if crit(first):
            return _one(f"{tag}:residuate-implies-antecedent", sys, target, [Inequality(f.left, s.Implies(a, f.right))])
    return None


def _inner_left(sys, target, ineq, tree, crit):
    f, b = ineq.lhs, ineq.rhs
    tag = STAGE_INNER
    if isinstance(f, s.Or):
        return _one(f"{tag}:split-or", sys, target, [Inequality(f.left, b), Inequality(f.right, b)])
    if isinstance(f, s.Dia):
        return _one(f"{tag}:residuate-dia", sys, target, [Inequality(f.arg, s.InvBox(b))])
    if isinstance(f, s.Not):
        return _one(f"{tag}:residuate-not-left", sys, target, [Inequality(s.Not(b), f.arg)])
    if isinstance(f, s.At):
        return _two(f"{tag}:at-left", sys, target, [Inequality(s.TOP, b)], [Inequality(f.arg, s.Not(s.Nom(f.nominal)))])
    if isinstance(f, s.And):
        first, second = tree.children
        if crit(second):
            return _one(f"{tag}:residuate-and-second", sys, target, [Inequality(f.right, s.Implies(f.left, b))])
        if crit(first):
            return _one(f"{tag}:residuate-and-first", sys, target, [Inequality(f.left, s.Implies(f.right, b))])
    return None


# --------------------------------------------------------------------------
# Ackermann elimination


def _signs_of(ineq: Inequality, var: str) -> set[str]:
    out = set()
    for t in (build_signed_tree(ineq.lhs, MINUS), build_signed_tree(ineq.rhs, PLUS)):
        for n in t.walk():
            if n.is_variable and n.formula.name == var:
                out.add(n.sign)
    return out


def ackermann(sys: System, var: str, handedness: str) -> RuleResult:
    """Eliminate ``var`` using the bounds ``t <= var`` (right) or ``var <= t`` (left)."""
    if handedness not in ("right", "left"):
        raise ValueError(f"handedness must be 'right' or 'left', not {handedness!r}")
    right = handedness == "right"
    p = s.Prop(var)
    bounds, bound_idx, rest = [], [], []
    for idx, ineq in enumerate(sys.antecedent):
        side, other = (ineq.rhs, ineq.lhs) if right else (ineq.lhs, ineq.rhs)
        if side == p and var not in s.prop_vars(other):
            bounds.append(other)
            bound_idx.append(idx)
        else:
            rest.append(ineq)
    allowed = MINUS if right else PLUS
    for ineq in rest:
        if _signs_of(ineq, var) - {allowed}:
            raise AckermannBlocked(var, ineq, f"{'right' if right else 'left'} rule needs every other "
                                              f"occurrence to be non-critical")
    theta = s.disjunction(bounds) if right else s.conjunction(bounds)
    new = []
    produced = []
    for ineq in rest:
        if var in ineq.symbols()[0]:
            produced.append(len(new))
            new.append(Inequality(s.substitute(ineq.lhs, var, theta), s.substitute(ineq.rhs, var, theta)))
        else:
            new.append(ineq)
    return RuleResult(f"{STAGE_ACK}:{handedness}:{var}", (sys.with_antecedent(new),), tuple(bound_idx),
                      (tuple(produced),))


# --------------------------------------------------------------------------
# derivations


@dataclass(eq=False)
class Step:
    system: System
    stage: str
    rule: str | None = None
    consumed: tuple[int, ...] = ()
    produced: tuple[tuple[int, ...], ...] = ()
    children: list["Step"] = field(default_factory=list)
    status: str = "open"
    note: str | None = None

    @property
    def rule_stage(self) -> str | None:
        return self.rule.split(":", 1)[0] if self.rule else None


@dataclass
class Derivation:
    root: Step
    checkpoints: list[tuple[str, System]] = field(default_factory=list)

    def steps(self) -> Iterator[Step]:
        stack = [self.root]
        while stack:
            st = stack.pop()
            yield st
            stack.extend(reversed(st.children))

    def leaves(self) -> list[Step]:
        return [st for st in self.steps() if not st.children]

    def applications(self) -> Iterator[Step]:
        return (st for st in self.steps() if st.children)

    def rules(self) -> list[str]:
        return [st.rule for st in self.applications()]

    def to_list(self) -> list[dict]:
        ids = {id(st): k for k, st in enumerate(self.steps())}
        return [{
            "id": ids[id(st)],
            "system": str(st.system),
            "stage": st.stage,
            "rule": st.rule,
            "consumed": list(st.consumed),
            "produced": [list(p) for p in st.produced],
            "children": [ids[id(c)] for c in st.children],
            "status": st.status,
            "note": st.note,
        } for st in self.steps()]


@dataclass
class AlbaOutput:
    status: str
    pure_systems: list[System]
    fo_sentence: fol.FOFormula | None
    trace: Derivation
    input: Inequality
    certificate: Certificate | None
    mode: str
    diagnostic: str | None = None

    @property
    def success(self) -> bool:
        return self.status == "success"

    def to_dict(self) -> dict:
        return {
            "input": str(self.input),
            "mode": self.mode,
            "certificate": self.certificate.to_dict() if self.certificate else None,
            "tree": self.trace.to_list(),
            "status": self.status,
            "diagnostic": self.diagnostic,
            "pure_systems": [str(x) for x in self.pure_systems],
            "fo": fol.fo_text(self.fo_sentence) if self.fo_sentence is not None else None,
        }


class _Runner:
    def __init__(self, cert: Certificate, mode: str, supply: s.NominalSupply):
        self.eps = cert.epsilon
        self.omega = cert.omega
        self.mode = mode
        self.flavor = EXTENDED_INDUCTIVE if mode == FULL else EXTENDED_SKELETAL
        self.supply = supply
        self.checkpoints = []
        self.steps = 0

    def critical(self, ineq: Inequality) -> bool:
        return any(has_critical(t, self.eps) for t in (build_signed_tree(ineq.lhs, MINUS),
                                                       build_signed_tree(ineq.rhs, PLUS)))

    def next_rule(self, sys: System, stage: str) -> RuleResult | None:
        for idx, ineq in enumerate(sys.antecedent):
            if ineq.is_pure or not self.critical(ineq):
                continue
            if stage == STAGE_AT:
                hole = find_at_hole(ineq, self.eps, self.flavor)
                if hole is not None:
                    return split_at_occurrence(sys, idx, hole)
            elif stage == STAGE_OUTER:
                if _outer_applicable(ineq):
                    return apply_outer_rule(sys, idx, self.supply)
            elif stage == STAGE_INNER:
                try:
                    return apply_inner_rule(sys, idx, self.eps)
                except RuleNotApplicable:
                    continue
        return None

    def eliminate(self, sys: System) -> RuleResult:
        present = sys.symbols()[0]
        blocked = []
        for var in self.omega.elimination_order(present):
            if var not in self.eps:
                continue
            hand = "right" if self.eps[var] == "1" else "left"
            try:
                return ackermann(sys, var, hand)
            except AckermannBlocked as err:
                blocked.append(err)
        if blocked:
            raise blocked[0]
        raise AckermannBlocked(sorted(present)[0], None, "variable has no order-type entry")

    def run(self, root: Step) -> None:
        stack = [root]
        order = [STAGE_AT, STAGE_OUTER] + ([STAGE_INNER] if self.mode == FULL else []) + [STAGE_ACK]
        while stack:
            st = stack.pop()
            self.steps += 1
            if self.steps > MAX_STEPS:
                st.status, st.note = "stuck", "step limit reached"
                continue
            stage = st.stage
            sys = st.system
            result = None
            while result is None:
                if stage == STAGE_ACK:
                    if sys.is_pure:
                        st.status = "pure"
                        break
                    try:
                        result = self.eliminate(sys)
                    except AckermannBlocked as err:
                        st.status, st.note = "stuck", f"AckermannBlocked: {err}"
                        break
                else:
                    result = self.next_rule(sys, stage)
                    if result is None:
                        self.checkpoints.append((stage, sys))
                        stage = order[order.index(stage) + 1]
                        st.stage = stage
            if result is None:
                continue
            st.rule, st.consumed, st.produced = result.rule, result.consumed, result.produced
            st.children = [Step(child, stage) for child in result.children]
            stack.extend(reversed(st.children))


def _head_for(ineq: Inequality, supply: s.NominalSupply) -> tuple[str, str]:
    used = ineq.symbols()[1]
    head = ("i0", "i1")
    if used & set(head):
        head = (supply.fresh(), supply.fresh())
    supply.reserve(head)
    return head


def _derive(ineq: Inequality, cert: Certificate, mode: str) -> AlbaOutput:
    supply = s.NominalSupply(reserved=ineq.symbols()[1])
    head = _head_for(ineq, supply)
    system = first_approximation(ineq, head)
    start = Step(System((Inequality(ineq.lhs, ineq.rhs),), head), FIRST_APPROXIMATION,
                 rule=FIRST_APPROXIMATION, consumed=(0,), produced=((0, 1),))
    top = Step(system, STAGE_AT)
    start.children = [top]
    runner = _Runner(cert, mode, supply)
    runner.run(top)
    trace = Derivation(start, runner.checkpoints)
    leaves = trace.leaves()
    stuck = [lf for lf in leaves if lf.status != "pure"]
    if stuck:
        return AlbaOutput("failure", [], None, trace, ineq, cert, mode, stuck[0].note)
    pure = [lf.system for lf in leaves]
    return AlbaOutput("success", pure, fol.output_fo(pure), trace, ineq, cert, mode)


def run_alba(obj, cert="auto", mode: str = FULL, best_effort: bool = True) -> AlbaOutput:
    """Run the correspondence algorithm on ``lhs <= rhs`` (or a formula, read as an implication).

    ``cert`` is ``"auto"`` (classify first), a :class:`Certificate`, or an
    :class:`OrderType` (the dependence order is then synthesized). When no
    certificate exists each order-type is tried in turn and the first success
    is returned; with ``best_effort=False`` :class:`NotInFragment` is raised instead.
    """
    if mode not in (FULL, RESTRICTED):
        raise ValueError(f"mode must be {FULL!r} or {RESTRICTED!r}")
    ineq = as_inequality(obj)
    flavor = EXTENDED_INDUCTIVE if mode == FULL else EXTENDED_SKELETAL
    if isinstance(cert, OrderType):
        cert = certify(ineq, cert, flavor) or Certificate(cert, DependenceOrder())
    if cert == "auto":
        cert = classify(ineq).certificate(flavor)
        if cert is None:
            if not best_effort:
                raise NotInFragment(f"{ineq} is not {flavor}")
            return _best_effort(ineq, mode, flavor)
    return _derive(ineq, cert, mode)


def _best_effort(ineq: Inequality, mode: str, flavor: str) -> AlbaOutput:
    first = None
    for eps in OrderType.all_over(ineq.symbols()[0]):
        out = _derive(ineq, Certificate(eps, DependenceOrder()), mode)
        if out.success:
            out.diagnostic = f"NotInFragment: no {flavor} certificate; succeeded with order-type {eps}"
            return out
        first = first or out
    first.diagnostic = f"NotInFragment: no {flavor} certificate; {first.diagnostic}"
    return first
