# utils/uislab/errors.py ─────────────────────────────────────────────────────────
"""Exception hierarchy for the uncertain inference lab."""

from __future__ import annotations

from typing import Any, Mapping, Optional


class UISLabError(Exception):
    """Base class for every error raised by the lab."""


# ╭─────────────────────────── Input errors ───────────────────────────╮
class UnknownProposition(UISLabError, KeyError):
    """A formula or evidence string names a proposition outside the space."""

    def __init__(self, name: str):
        super().__init__(name)
        self.name = name

    def __str__(self) -> str:
        return f"unknown proposition: {self.name!r}"


class InvalidFormula(UISLabError, ValueError):
    pass


class InvalidDistribution(UISLabError, ValueError):
    pass


class InvalidPartition(UISLabError, ValueError):
    pass


class NotExclusive(InvalidPartition):
    pass


class NotExhaustive(InvalidPartition):
    pass


class RuleSyntaxError(UISLabError, ValueError):
    """Rule file does not match the grammar."""

    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


class RuleSemanticError(UISLabError, ValueError):
    """Rule file parses but describes an invalid rule set."""

    def __init__(self, message: str, identifier: Optional[str] = None):
        super().__init__(message)
        self.identifier = identifier


class DirectedCycle(RuleSemanticError):
    pass


class DuplicatePrior(RuleSemanticError):
    pass


class MissingPrior(RuleSemanticError):
    pass


class UnknownFamily(UISLabError, ValueError):
    pass


class TooManyLeaves(UISLabError, ValueError):
    pass


class UnboundLeaf(UISLabError, ValueError):
    pass


class DegenerateAnchor(UISLabError, ValueError):
    """CF conversion anchored at a prior of 0 or 1 on its undefined side."""


class ContradictoryCertainty(UISLabError, ValueError):
    """Parallel combination of +1 with -1."""
# ╰─────────────────────────────────────────────────────────────────╯


# ╭─────────────────────────── Numerical errors ───────────────────────────╮
class ZeroConditioningEvent(UISLabError, ArithmeticError):
    pass


class ZeroPriorCell(UISLabError, ArithmeticError):
    pass


class AbsoluteContinuityViolation(UISLabError, ArithmeticError):
    pass


class ZeroDenominator(UISLabError, ArithmeticError):
    pass


class DegenerateMetric(UISLabError, ArithmeticError):
    pass


class DegenerateRegression(UISLabError, ArithmeticError):
    pass


class NotConverged(UISLabError, RuntimeError):
    """IPFP stopped at its iteration cap; `report` holds the FitReport."""

    def __init__(self, message: str, report: Any):
        super().__init__(message)
        self.report = report


class OuterLoopDiverged(UISLabError, RuntimeError):
    """CF fixed point did not settle; `drift` maps consequent -> last move."""

    def __init__(self, message: str, drift: Mapping[str, float]):
        super().__init__(message)
        self.drift = dict(drift)
# ╰─────────────────────────────────────────────────────────────────╯
