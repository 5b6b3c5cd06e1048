"""Finite Kripke frames and models, evaluators, and brute-force validity checks.

Worlds are ``0 .. size-1``. Truth sets are handled as integer bitmasks
(bit ``w`` set iff the formula holds at ``w``).
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterator, Mapping

import numpy as np

from . import fol
from . import syntax as s
from .inequalities import Inequality, QuasiInequality, System

DEFAULT_BUDGET = 20
_CHUNK = 1 << 15


class UninterpretedSymbol(KeyError):
    pass


class BudgetExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class Frame:
    size: int
    relation: frozenset = frozenset()

    def __post_init__(self):
        if self.size < 1:
            raise ValueError("a frame needs at least one world")
        object.__setattr__(self, "relation", frozenset(self.relation))
        for a, b in self.relation:
            if not (0 <= a < self.size and 0 <= b < self.size):
                raise ValueError(f"pair {(a, b)} out of range for {self.size} worlds")

    @cached_property
    def successors(self) -> tuple[int, ...]:
        masks = [0] * self.size
        for a, b in self.relation:
            masks[a] |= 1 << b
        return tuple(masks)

    @cached_property
    def predecessors(self) -> tuple[int, ...]:
        masks = [0] * self.size
        for a, b in self.relation:
            masks[b] |= 1 << a
        return tuple(masks)

    @property
    def full(self) -> int:
        return (1 << self.size) - 1

    @cached_property
    def matrix(self) -> np.ndarray:
        m = np.zeros((self.size, self.size), dtype=bool)
        for a, b in self.relation:
            m[a, b] = True
        return m

    def to_dict(self) -> dict:
        return {"size": self.size, "relation": sorted(list(p) for p in self.relation)}

    def __str__(self):
        pairs = ", ".join(f"{a}->{b}" for a, b in sorted(self.relation))
        return f"W={{0..{self.size - 1}}} R={{{pairs}}}"


@dataclass(frozen=True)
class KripkeModel:
    frame: Frame
    props: Mapping[str, frozenset] = field(default_factory=dict)
    noms: Mapping[str, int] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "props", {k: frozenset(v) for k, v in self.props.items()})
        object.__setattr__(self, "noms", dict(self.noms))
        for name, w in self.noms.items():
            if not 0 <= w < self.frame.size:
                raise ValueError(f"nominal {name} names a world outside the frame")

    @cached_property
    def prop_masks(self) -> dict[str, int]:
        return {k: sum(1 << w for w in v) for k, v in self.props.items()}

    def nominal_world(self, name: str) -> int:
        try:
            return self.noms[name]
        except KeyError:
            raise UninterpretedSymbol(f"nominal {name!r} has no value") from None

    def prop_mask(self, name: str) -> int:
        try:
            return self.prop_masks[name]
        except KeyError:
            raise UninterpretedSymbol(f"variable {name!r} has no value") from None

    def to_dict(self) -> dict:
        return {
            "frame": self.frame.to_dict(),
            "props": {k: sorted(v) for k, v in sorted(self.props.items())},
            "noms": dict(sorted(self.noms.items())),
        }


# --------------------------------------------------------------------------
# modal evaluation


def evaluate(m: KripkeModel, w: int, f: s.Formula) -> bool:
    """Truth of ``f`` at world ``w``, clause by clause."""
    R = m.frame.relation
    W = range(m.frame.size)
    if isinstance(f, s.Prop):
        return bool(m.prop_mask(f.name) >> w & 1)
    if isinstance(f, s.Nom):
        return m.nominal_world(f.name) == w
    if isinstance(f, s.Bot):
        return False
    if isinstance(f, s.Top):
        return True
    if isinstance(f, s.Not):
        return not evaluate(m, w, f.arg)
    if isinstance(f, s.And):
        return evaluate(m, w, f.left) and evaluate(m, w, f.right)
    if isinstance(f, s.Or):
        return evaluate(m, w, f.left) or evaluate(m, w, f.right)
    if isinstance(f, s.Implies):
        return not evaluate(m, w, f.left) or evaluate(m, w, f.right)
    if isinstance(f, s.Dia):
        return any((w, v) in R and evaluate(m, v, f.arg) for v in W)
    if isinstance(f, s.Box):
        return all((w, v) not in R or evaluate(m, v, f.arg) for v in W)
    if isinstance(f, s.InvDia):
        return any((v, w) in R and evaluate(m, v, f.arg) for v in W)
    if isinstance(f, s.InvBox):
        return all((v, w) not in R or evaluate(m, v, f.arg) for v in W)
    if isinstance(f, s.At):
        return evaluate(m, m.nominal_world(f.nominal), f.arg)
    raise TypeError(f"not a formula: {f!r}")


def truth_set(m: KripkeModel, f: s.Formula) -> int:
    fr = m.frame
    return _mask(f, fr.size, fr.full, fr.successors, fr.predecessors, m)


def _mask(f, n, full, succ, pred, m):
    if isinstance(f, s.Prop):
        return m.prop_mask(f.name)
    if isinstance(f, s.Nom):
        return 1 << m.nominal_world(f.name)
    if isinstance(f, s.Bot):
        return 0
    if isinstance(f, s.Top):
        return full
    if isinstance(f, s.Not):
        return full & ~_mask(f.arg, n, full, succ, pred, m)
    if isinstance(f, s.And):
        return _mask(f.left, n, full, succ, pred, m) & _mask(f.right, n, full, succ, pred, m)
    if isinstance(f, s.Or):
        return _mask(f.left, n, full, succ, pred, m) | _mask(f.right, n, full, succ, pred, m)
    if isinstance(f, s.Implies):
        a = _mask(f.left, n, full, succ, pred, m)
        return (full & ~a) | _mask(f.right, n, full, succ, pred, m)
    if isinstance(f, s.At):
        a = _mask(f.arg, n, full, succ, pred, m)
        return full if a >> m.nominal_world(f.nominal) & 1 else 0
    a = _mask(f.arg, n, full, succ, pred, m)
    rel = succ if isinstance(f, (s.Box, s.Dia)) else pred
    out = 0
    if isinstance(f, (s.Dia, s.InvDia)):
        for w in range(n):
            if rel[w] & a:
                out |= 1 << w
    else:
        for w in range(n):
            if not rel[w] & ~a:
                out |= 1 << w
    return out


def globally_true(m: KripkeModel, f: s.Formula) -> bool:
    return truth_set(m, f) == m.frame.full


def eval_inequality(m: KripkeModel, ineq: Inequality) -> bool:
    return truth_set(m, ineq.lhs) & ~truth_set(m, ineq.rhs) == 0


def eval_quasi(m: KripkeModel, q: QuasiInequality | System) -> bool:
    if all(eval_inequality(m, ineq) for ineq in q.antecedent):
        return eval_inequality(m, q.consequent)
    return True


def eval_quasiset(m: KripkeModel, systems) -> bool:
    return all(eval_quasi(m, q) for q in systems)


# --------------------------------------------------------------------------
# first-order evaluation


def eval_fo(m: KripkeModel, f: fol.FOFormula, assignment: Mapping[str, int] | None = None) -> bool:
    """Tarskian truth of ``f`` in ``m``; constants are read from the nominal valuation.

    Subformulas are evaluated as boolean arrays indexed by their free
    variables, so quantifiers become reductions.
    """
    assignment = assignment or {}
    names, arr = _fo_table(f, m)
    missing = [v for v in names if v not in assignment]
    if missing:
        raise UninterpretedSymbol(f"free variable(s) {missing} not assigned")
    return bool(arr[tuple(assignment[v] for v in names)])


def eval_fo_naive(m: KripkeModel, f: fol.FOFormula, assignment: Mapping[str, int] | None = None) -> bool:
    """Reference evaluator: direct recursion over assignments."""
    env = dict(assignment or {})
    R = m.frame.relation
    W = range(m.frame.size)

    def term(t):
        if isinstance(t, fol.Var):
            if t.name not in env:
                raise UninterpretedSymbol(f"free variable {t.name!r} not assigned")
            return env[t.name]
        return m.nominal_world(t.name)

    def go(g):
        if isinstance(g, fol.Rel):
            return (term(g.source), term(g.target)) in R
        if isinstance(g, fol.Pred):
            return bool(m.prop_mask(g.name) >> term(g.term) & 1)
        if isinstance(g, fol.Eq):
            return term(g.left) == term(g.right)
        if isinstance(g, fol.Verum):
            return True
        if isinstance(g, fol.FNot):
            return not go(g.arg)
        if isinstance(g, fol.FAnd):
            return go(g.left) and go(g.right)
        if isinstance(g, fol.FOr):
            return go(g.left) or go(g.right)
        if isinstance(g, fol.FImplies):
            return not go(g.left) or go(g.right)
        saved = env.get(g.var, None)
        had = g.var in env
        results = []
        for v in W:
            env[g.var] = v
            results.append(go(g.body))
            if isinstance(g, fol.Forall) and not results[-1]:
                break
            if isinstance(g, fol.Exists) and results[-1]:
                break
        if had:
            env[g.var] = saved
        else:
            del env[g.var]
        return all(results) if isinstance(g, fol.Forall) else any(results)

    return go(f)


def _fo_term_axis(t, m):
    """(variable name or None, world index or None)."""
    if isinstance(t, fol.Var):
        return t.name, None
    return None, m.nominal_world(t.name)


def _binary_table(t1, t2, m, base):
    """Table for an atom over two terms given the full ``base[a, b]`` matrix."""
    v1, c1 = _fo_term_axis(t1, m)
    v2, c2 = _fo_term_axis(t2, m)
    if v1 is None and v2 is None:
        return (), np.array(base[c1, c2])
    if v1 is None:
        return (v2,), base[c1, :]
    if v2 is None:
        return (v1,), base[:, c2]
    if v1 == v2:
        return (v1,), np.diagonal(base).copy()
    if v1 < v2:
        return (v1, v2), base
    return (v2, v1), base.T


def _align(names, arr, target):
    shape = [arr.shape[names.index(v)] if v in names else 1 for v in target]
    return arr.reshape(shape)


def _fo_table(f, m):
    n = m.frame.size
    if isinstance(f, fol.Rel):
        return _binary_table(f.source, f.target, m, m.frame.matrix)
    if isinstance(f, fol.Eq):
        return _binary_table(f.left, f.right, m, np.eye(n, dtype=bool))
    if isinstance(f, fol.Pred):
        mask = m.prop_mask(f.name)
        col = np.array([bool(mask >> w & 1) for w in range(n)])
        v, c = _fo_term_axis(f.term, m)
        return ((), np.array(col[c])) if v is None else ((v,), col)
    if isinstance(f, fol.Verum):
        return (), np.array(True)
    if isinstance(f, fol.FNot):
        names, arr = _fo_table(f.arg, m)
        return names, ~arr
    if isinstance(f, (fol.FAnd, fol.FOr, fol.FImplies)):
        n1, a1 = _fo_table(f.left, m)
        n2, a2 = _fo_table(f.right, m)
        names = tuple(sorted(set(n1) | set(n2)))
        a1, a2 = _align(n1, a1, names), _align(n2, a2, names)
        if isinstance(f, fol.FAnd):
            out = a1 & a2
        elif isinstance(f, fol.FOr):
            out = a1 | a2
        else:
            out = ~a1 | a2
        return names, np.broadcast_to(out, [n] * len(names)) if out.ndim else out
    if isinstance(f, (fol.Forall, fol.Exists)):
        names, arr = _fo_table(f.body, m)
        if f.var not in names:
            return names, arr
        axis = names.index(f.var)
        red = arr.all(axis=axis) if isinstance(f, fol.Forall) else arr.any(axis=axis)
        return names[:axis] + names[axis + 1:], red
    raise TypeError(f"not an FO formula: {f!r}")


def frame_satisfies(fr: Frame, sentence: fol.FOFormula) -> bool:
    """Truth of a sentence without predicate or constant symbols on ``fr``."""
    return eval_fo(KripkeModel(fr), sentence)


# --------------------------------------------------------------------------
# frame validity by enumerating valuations


def _checked_items(obj) -> list:
    if isinstance(obj, (list, tuple)):
        return list(obj)
    return [obj]


def _symbols_of(item):
    if isinstance(item, s.Formula):
        return s.vars_and_nominals(item)
    return item.symbols()


def valuation_bits(fr: Frame, props, noms) -> float:
    return len(props) * fr.size + len(noms) * math.log2(fr.size)


def frame_valid(fr: Frame, obj, budget: float = DEFAULT_BUDGET) -> bool:
    """Validity on ``fr``: truth under every valuation of the symbols occurring in ``obj``.

    ``obj`` is a formula, an inequality, a quasi-inequality / system, or a
    list of those (validity of each). Raises :class:`BudgetExceeded` when the
    number of valuations would exceed ``2**budget``.
    """
    for item in _checked_items(obj):
        props, noms = _symbols_of(item)
        if valuation_bits(fr, props, noms) > budget:
            raise BudgetExceeded(
                f"{len(props)} variables and {len(noms)} nominals on {fr.size} worlds exceed budget {budget}")
        if not _valid_item(fr, item, sorted(props), sorted(noms)):
            return False
    return True


def _valid_item(fr: Frame, item, props, noms) -> bool:
    n = fr.size
    total = (1 << n) ** len(props) * n ** len(noms)
    for start in range(0, total, _CHUNK):
        idx = np.arange(start, min(total, start + _CHUNK), dtype=np.int64)
        env_p, env_n = {}, {}
        for p in props:
            env_p[p] = idx % (1 << n)
            idx = idx // (1 << n)
        for i in noms:
            env_n[i] = np.left_shift(np.int64(1), idx % n)
            idx = idx // n
        batch = _Batch(fr, env_p, env_n, len(idx))
        if not batch.check(item).all():
            return False
    return True


class _Batch:
    """Evaluates truth sets for a vector of valuations at once."""

    def __init__(self, fr: Frame, props, noms, count: int):
        self.n = fr.size
        self.full = fr.full
        self.succ = fr.successors
        self.pred = fr.predecessors
        self.props = props
        self.noms = noms
        self.count = count

    def check(self, item) -> np.ndarray:
        if isinstance(item, s.Formula):
            return self.mask(item) == self.full
        if isinstance(item, Inequality):
            return self.ineq(item)
        ok = np.ones(self.count, dtype=bool)
        for ineq in item.antecedent:
            ok &= self.ineq(ineq)
        return ~ok | self.ineq(item.consequent)

    def ineq(self, ineq: Inequality) -> np.ndarray:
        return (self.mask(ineq.lhs) & ~self.mask(ineq.rhs) & self.full) == 0

    def mask(self, f):
        full = self.full
        if isinstance(f, s.Prop):
            return self.props[f.name]
        if isinstance(f, s.Nom):
            return self.noms[f.name]
        if isinstance(f, s.Bot):
            return np.zeros(self.count, dtype=np.int64)
        if isinstance(f, s.Top):
            return np.full(self.count, full, dtype=np.int64)
        if isinstance(f, s.Not):
            return full & ~self.mask(f.arg)
        if isinstance(f, s.And):
            return self.mask(f.left) & self.mask(f.right)
        if isinstance(f, s.Or):
            return self.mask(f.left) | self.mask(f.right)
        if isinstance(f, s.Implies):
            return (full & ~self.mask(f.left)) | self.mask(f.right)
        if isinstance(f, s.At):
            hit = (self.mask(f.arg) & self.noms[f.nominal]) != 0
            return np.where(hit, full, 0).astype(np.int64)
        a = self.mask(f.arg)
        rel = self.succ if isinstance(f, (s.Box, s.Dia)) else self.pred
        out = np.zeros(self.count, dtype=np.int64)
        existential = isinstance(f, (s.Dia, s.InvDia))
        for w in range(self.n):
            if existential:
                bit = (a & rel[w]) != 0
            else:
                bit = (rel[w] & ~a & full) == 0
            out |= bit.astype(np.int64) << w
        return out


def enumerate_frames(max_size: int = 3, min_size: int = 1) -> Iterator[Frame]:
    """All frames with ``min_size..max_size`` worlds, ``2**(n*n)`` relations per size."""
    for n in range(min_size, max_size + 1):
        pairs = [(a, b) for a in range(n) for b in range(n)]
        for bits in range(1 << (n * n)):
            yield Frame(n, frozenset(p for k, p in enumerate(pairs) if bits >> k & 1))


def random_frame(rng: random.Random, size: int, density: float = 0.4) -> Frame:
    return Frame(size, frozenset((a, b) for a in range(size) for b in range(size) if rng.random() < density))


def random_model(seed, size: int, variables=(), nominals=(), density: float = 0.4) -> KripkeModel:
    rng = seed if isinstance(seed, random.Random) else random.Random(seed)
    fr = random_frame(rng, size, density)
    props = {p: frozenset(w for w in range(size) if rng.random() < 0.5) for p in sorted(variables)}
    noms = {i: rng.randrange(size) for i in sorted(nominals)}
    return KripkeModel(fr, props, noms)


def all_models(fr: Frame, variables=(), nominals=()) -> Iterator[KripkeModel]:
    """Every valuation of the given symbols on ``fr`` (slow path, for tests)."""
    variables, nominals = sorted(variables), sorted(nominals)
    subsets = list(range(1 << fr.size))
    for pv in itertools.product(subsets, repeat=len(variables)):
        for nv in itertools.product(range(fr.size), repeat=len(nominals)):
            props = {p: frozenset(w for w in range(fr.size) if mask >> w & 1) for p, mask in zip(variables, pv)}
            yield KripkeModel(fr, props, dict(zip(nominals, nv)))
