"""Inequalities, quasi-inequalities and the systems rewritten by the engine."""

from __future__ import annotations

from dataclasses import dataclass

from .syntax import Formula, Nom, Not, is_pure, to_text, vars_and_nominals


@dataclass(frozen=True)
class Inequality:
    lhs: Formula
    rhs: Formula

    def __str__(self):
        return f"{to_text(self.lhs)} <= {to_text(self.rhs)}"

    @property
    def is_nominal_lhs(self) -> bool:
        return isinstance(self.lhs, Nom)

    @property
    def is_negnominal_rhs(self) -> bool:
        return isinstance(self.rhs, Not) and isinstance(self.rhs.arg, Nom)

    @property
    def is_pure(self) -> bool:
        return is_pure(self.lhs) and is_pure(self.rhs)

    def symbols(self):
        p1, n1 = vars_and_nominals(self.lhs)
        p2, n2 = vars_and_nominals(self.rhs)
        return p1 | p2, n1 | n2


@dataclass(frozen=True)
class QuasiInequality:
    """``antecedent[0] & ... & antecedent[n-1] => consequent``."""

    antecedent: tuple[Inequality, ...]
    consequent: Inequality

    def __str__(self):
        return _quasi_text(self.antecedent, str(self.consequent))

    def symbols(self):
        return _symbols(self.antecedent + (self.consequent,))


@dataclass(frozen=True)
class System:
    """A quasi-inequality whose head is ``i0 <= ~i1``; head stores ``(i0, i1)``."""

    antecedent: tuple[Inequality, ...]
    head: tuple[str, str]

    @property
    def consequent(self) -> Inequality:
        return Inequality(Nom(self.head[0]), Not(Nom(self.head[1])))

    @property
    def is_pure(self) -> bool:
        return all(ineq.is_pure for ineq in self.antecedent)

    def with_antecedent(self, antecedent) -> "System":
        return System(tuple(antecedent), self.head)

    def symbols(self):
        return _symbols(self.antecedent + (self.consequent,))

    def __str__(self):
        return _quasi_text(self.antecedent, str(self.consequent))


def _quasi_text(antecedent, head: str) -> str:
    if not antecedent:
        return f"=> {head}"
    return " & ".join(f"{ineq}" for ineq in antecedent) + f" => {head}"


def _symbols(ineqs):
    props, noms = set(), set()
    for ineq in ineqs:
        p, n = ineq.symbols()
        props |= p
        noms |= n
    return frozenset(props), frozenset(noms)

