"""Rendering nominal-flanked inequalities and systems as hybrid formulas."""

from __future__ import annotations

from . import syntax as s
from .inequalities import Inequality, QuasiInequality, System


class UntranslatableShape(ValueError):
    pass


def tr_inequality(ineq: Inequality) -> s.Formula:
    """``i <= g`` becomes ``@i g``; ``g <= ~i`` becomes ``~@i g``.

    When both shapes apply the first one is used.
    """
    if isinstance(ineq.lhs, s.Nom):
        return s.At(ineq.lhs.name, ineq.rhs)
    if ineq.is_negnominal_rhs:
        return s.Not(s.At(ineq.rhs.arg.name, ineq.lhs))
    raise UntranslatableShape(f"{ineq} has neither a nominal left side nor a negated nominal right side")


def tr_quasi(q: System | QuasiInequality) -> s.Formula:
    """Antecedent translations imply the head; a system head ``i0 <= ~i1`` reads ``~@i0 i1``."""
    body = s.conjunction(tr_inequality(x) for x in q.antecedent)
    if isinstance(q, System):
        head = s.Not(s.At(q.head[0], s.Nom(q.head[1])))
    else:
        head = tr_inequality(q.consequent)
    return s.Implies(body, head)


def tr_quasiset(systems) -> s.Formula:
    return s.conjunction(tr_quasi(q) for q in systems)
