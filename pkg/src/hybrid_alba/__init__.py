"""Correspondence for hybrid modal formulas with satisfaction operators."""

from .inequalities import Inequality, QuasiInequality, System
from .syntax import Formula, ParseError, parse, to_text

__all__ = ["Formula", "Inequality", "ParseError", "QuasiInequality", "System", "parse", "to_text"]
