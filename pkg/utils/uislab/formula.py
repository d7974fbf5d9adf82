# utils/uislab/formula.py ─────────────────────────────────────────────────────────
"""Boolean formulas over named propositions, their text grammar and formatter.

Text syntax (shared by distributions, constraint lists and rule files)::

    formula := disj
    disj    := conj ("|" conj)*
    conj    := unary ("&" unary)*
    unary   := "!" unary | IDENT | "(" formula ")"

The formatter always emits fully parenthesized groups, e.g. ``(A1 & !A2)``,
so formatted text also matches the stricter rule-file grammar.
"""

from __future__ import annotations

# ── Stdlib
from dataclasses import dataclass
from functools import reduce
from typing import TYPE_CHECKING, Iterable, Tuple, Union

# ── Third-party
import numpy as np
import pyparsing as pp

# ── Local
from utils.uislab.errors import InvalidFormula

if TYPE_CHECKING:  # pragma: no cover
    from utils.uislab.joint import PropositionSpace


# ╭─────────────────────────── Node types ───────────────────────────╮
@dataclass(frozen=True)
class Atom:
    name: str

    def mask(self, space: "PropositionSpace") -> np.ndarray:
        return space.truth(self.name)

    def names(self) -> frozenset[str]:
        return frozenset((self.name,))

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Not:
    child: "Formula"

    def mask(self, space: "PropositionSpace") -> np.ndarray:
        return ~self.child.mask(space)

    def names(self) -> frozenset[str]:
        return self.child.names()

    def __str__(self) -> str:
        return f"!{self.child}"


@dataclass(frozen=True)
class And:
    children: Tuple["Formula", ...]

    def __post_init__(self) -> None:
        if len(self.children) < 2:
            raise InvalidFormula("'and' needs at least two operands")

    def mask(self, space: "PropositionSpace") -> np.ndarray:
        return np.logical_and.reduce([c.mask(space) for c in self.children])

    def names(self) -> frozenset[str]:
        return frozenset().union(*(c.names() for c in self.children))

    def __str__(self) -> str:
        return "(" + " & ".join(str(c) for c in self.children) + ")"


@dataclass(frozen=True)
class Or:
    children: Tuple["Formula", ...]

    def __post_init__(self) -> None:
        if len(self.children) < 2:
            raise InvalidFormula("'or' needs at least two operands")

    def mask(self, space: "PropositionSpace") -> np.ndarray:
        return np.logical_or.reduce([c.mask(space) for c in self.children])

    def names(self) -> frozenset[str]:
        return frozenset().union(*(c.names() for c in self.children))

    def __str__(self) -> str:
        return "(" + " | ".join(str(c) for c in self.children) + ")"


Formula = Union[Atom, Not, And, Or]
# ╰─────────────────────────────────────────────────────────────────╯


# ╭─────────────────────────── Builders ───────────────────────────╮
def atom(name: str) -> Atom:
    return Atom(name)


def neg(f: Formula) -> Formula:
    """Negation; a double negation collapses."""
    return f.child if isinstance(f, Not) else Not(f)


def conj(*parts: Formula) -> Formula:
    return parts[0] if len(parts) == 1 else And(tuple(parts))


def disj(*parts: Formula) -> Formula:
    return parts[0] if len(parts) == 1 else Or(tuple(parts))


def tautology(name: str) -> Formula:
    return Or((Atom(name), Not(Atom(name))))


def literal_name(f: Formula) -> str | None:
    """Name of an atom or negated atom, else None."""
    if isinstance(f, Atom):
        return f.name
    if isinstance(f, Not) and isinstance(f.child, Atom):
        return f.child.name
    return None


def conjuncts(f: Formula) -> Tuple[Formula, ...]:
    """Top-level conjuncts of f (f itself when it is not a conjunction)."""
    if isinstance(f, And):
        return tuple(p for c in f.children for p in conjuncts(c))
    return (f,)
# ╰─────────────────────────────────────────────────────────────────╯


# ╭─────────────────────────── Grammar ───────────────────────────╮
# one token, so a results name on it yields the plain string
IDENT = pp.Regex(r"(?!(?:cf|prob|lower)\b)[A-Za-z_][A-Za-z0-9_]*").set_name("identifier")

_LPAR, _RPAR = pp.Suppress("("), pp.Suppress(")")
_BANG, _AMP, _BAR = pp.Suppress("!"), pp.Suppress("&"), pp.Suppress("|")


def _fold(builder):
    def action(tokens: pp.ParseResults):
        parts = list(tokens)
        return parts[0] if len(parts) == 1 else builder(tuple(parts))
    return action


FORMULA = pp.Forward().set_name("formula")
_ATOM = IDENT.copy().set_parse_action(lambda t: Atom(t[0]))
_OPERAND = _ATOM | (_LPAR + FORMULA + _RPAR)
UNARY = pp.Forward()
UNARY <<= (_BANG + UNARY).set_parse_action(lambda t: Not(t[0])) | _OPERAND
CONJUNCTION = (UNARY + pp.ZeroOrMore(_AMP + UNARY)).set_parse_action(_fold(And))
FORMULA <<= (CONJUNCTION + pp.ZeroOrMore(_BAR + CONJUNCTION)).set_parse_action(_fold(Or))


def parse_formula(text: str) -> Formula:
    """Parse formula text; raises InvalidFormula with the failing column."""
    try:
        return FORMULA.parse_string(text, parse_all=True)[0]
    except pp.ParseException as exc:
        raise InvalidFormula(f"cannot parse formula {text!r} at column {exc.col}: {exc.msg}") from exc


def all_names(formulas: Iterable[Formula]) -> frozenset[str]:
    return reduce(lambda acc, f: acc | f.names(), formulas, frozenset())
# ╰─────────────────────────────────────────────────────────────────╯
