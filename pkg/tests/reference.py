"""Slow, independent re-implementations used as test oracles.

Nothing here imports the package's classifier or engine internals; the
fragment definitions are restated clause by clause over plain tuples.
"""

from __future__ import annotations

import itertools

from hybrid_alba import syntax as s

_NAME = {s.And: "and", s.Or: "or", s.Implies: "imp", s.Not: "not", s.Box: "box", s.Dia: "dia",
         s.At: "at", s.InvBox: "ibox", s.InvDia: "idia"}

OUTER = {"+or", "+and", "+dia", "+not", "+at", "-and", "-or", "-box", "-not", "-at", "-imp"}
INNER = {"+and", "+box", "+not", "+at", "-or", "-dia", "-not", "-at", "+or", "+imp", "-and"}
SRR = {"+or", "+imp", "-and"}


def _kids(f, sign):
    """Signed children: list of (formula, sign)."""
    other = "-" if sign == "+" else "+"
    if isinstance(f, s.Not):
        return [(f.arg, other)]
    if isinstance(f, s.Implies):
        return [(f.left, other), (f.right, sign)]
    return [(c, sign) for c in s.children(f)]


def variable_leaves(f, sign):
    """(name, sign) for every variable occurrence."""
    if isinstance(f, s.Prop):
        return [(f.name, sign)]
    return [x for c, sg in _kids(f, sign) for x in variable_leaves(c, sg)]


def branches(f, sign):
    """Each branch to a variable leaf as a list of steps (tag, formula, sign, child index taken)."""
    if isinstance(f, s.Prop):
        return [[("leaf", f, sign, None)]]
    out = []
    for idx, (c, sg) in enumerate(_kids(f, sign)):
        for rest in branches(c, sg):
            out.append([(sign + _NAME[type(f)], f, sign, idx)] + rest)
    return out


def critical(name, sign, eps):
    return (eps[name] == "1") == (sign == "+")


def _side_conditions_hold(inner, eps, omega, leaf):
    for tag, f, sign, idx in inner:
        if tag not in SRR:
            continue
        other, osign = _kids(f, sign)[1 - idx]
        occ = variable_leaves(other, osign)
        if any(critical(n, sg, eps) for n, sg in occ):
            return False
        if any((n, leaf) not in omega for n, _ in occ):
            return False
    return True


def branch_ok(branch, flavor, eps, omega):
    internal = branch[:-1]
    leaf = branch[-1][1].name
    n = len(internal)
    for cut1 in range(n + 1):          # internal[:cut1] ends in @
        for cut2 in range(cut1, n + 1):  # internal[cut1:cut2] is outer, the rest inner
            at_part, outer, inner = internal[:cut1], internal[cut1:cut2], internal[cut2:]
            if flavor in ("extended-skeletal", "skeletal") and inner:
                continue
            if flavor in ("inductive", "skeletal") and at_part:
                continue
            if flavor == "inner-inductive" and (outer or at_part):
                continue
            if not all(t in INNER for t, *_ in inner):
                continue
            if not all(t in OUTER for t, *_ in outer):
                continue
            if at_part and not at_part[-1][0].endswith("at"):
                continue
            if _side_conditions_hold(inner, eps, omega, leaf):
                return True
    return False


def tree_ok(f, sign, flavor, eps, omega):
    for br in branches(f, sign):
        name, sg = br[-1][1].name, br[-1][2]
        if critical(name, sg, eps) and not branch_ok(br, flavor, eps, omega):
            return False
    return True


def strict_partial_orders(variables):
    pairs = [(a, b) for a in variables for b in variables if a != b]
    for bits in range(1 << len(pairs)):
        rel = {pairs[k] for k in range(len(pairs)) if bits >> k & 1}
        if all((a, d) in rel for a, b in rel for c, d in rel if b == c) and all(a != b for a, b in rel):
            yield frozenset(rel)


def memberships(lhs, rhs):
    """Fragments of ``lhs <= rhs`` by exhaustive search over order-types and dependence orders."""
    variables = sorted(s.prop_vars(lhs) | s.prop_vars(rhs))
    orders = list(strict_partial_orders(variables))
    found = set()
    for flavor in ("extended-inductive", "extended-skeletal", "inductive", "skeletal"):
        for pols in itertools.product("1d", repeat=len(variables)):
            eps = dict(zip(variables, pols))
            if any(tree_ok(lhs, "+", flavor, eps, om) and tree_ok(rhs, "-", flavor, eps, om) for om in orders):
                found.add(flavor)
                break
    return found


def rename_generated(text: str) -> str:
    """Replace generated nominals by ``j0, j1, ...`` in order of first appearance."""
    import re

    mapping = {}

    def sub(m):
        return "'" + mapping.setdefault(m.group(1), f"j{len(mapping)}")

    return re.sub(r"'(n\d+)\b", sub, text)
