"""Brute-force certification of correspondence outputs on small frames."""

from __future__ import annotations

from dataclasses import dataclass, field

from . import syntax as s
from .engine import FIRST_APPROXIMATION, AlbaOutput, Step
from .inequalities import Inequality
from .semantics import BudgetExceeded, DEFAULT_BUDGET, Frame, enumerate_frames, frame_satisfies, frame_valid


@dataclass
class CorrespondenceReport:
    frames_checked: int = 0
    skipped: list[Frame] = field(default_factory=list)
    counterexample: Frame | None = None
    modal_valid: bool | None = None
    fo_valid: bool | None = None

    @property
    def ok(self) -> bool:
        return self.counterexample is None

    def to_dict(self) -> dict:
        return {
            "ok": self.ok,
            "frames_checked": self.frames_checked,
            "skipped": len(self.skipped),
            "counterexample": None if self.ok else {
                "frame": self.counterexample.to_dict(),
                "modal_valid": self.modal_valid,
                "fo_valid": self.fo_valid,
            },
        }


def implication_of(ineq: Inequality) -> s.Formula:
    return s.Implies(ineq.lhs, ineq.rhs)


def check_correspondence(out: AlbaOutput, max_worlds: int = 3, budget: float = DEFAULT_BUDGET,
                         frames=None) -> CorrespondenceReport:
    """Compare modal frame validity of the input with truth of the output sentence, frame by frame."""
    if not out.success:
        raise ValueError("no correspondent to check: the run failed")
    report = CorrespondenceReport()
    target = implication_of(out.input)
    for fr in frames if frames is not None else enumerate_frames(max_worlds):
        try:
            modal = frame_valid(fr, target, budget)
        except BudgetExceeded:
            report.skipped.append(fr)
            continue
        first_order = frame_satisfies(fr, out.fo_sentence)
        report.frames_checked += 1
        if modal != first_order:
            report.counterexample, report.modal_valid, report.fo_valid = fr, modal, first_order
            break
    return report


def rule_sound_on(step: Step, frames, budget: float = DEFAULT_BUDGET) -> tuple[bool, Frame | None]:
    """Premise validity equals validity of all conclusions on every given frame.

    The premise of the first approximation is the input inequality itself.
    """
    premise_obj = step.system.antecedent[0] if step.rule == FIRST_APPROXIMATION else step.system
    for fr in frames:
        premise = frame_valid(fr, premise_obj, budget)
        conclusions = all(frame_valid(fr, c.system, budget) for c in step.children)
        if premise != conclusions:
            return False, fr
    return True, None
