# utils/uislab/rulemodel.py ─────────────────────────────────────────────────────────
"""Rule sets: data model, line-oriented text format, and ME prior fitting.

File format ('#' starts a comment; blank lines ignored)::

    prop A1
    prior A1 = 0.5
    constrain p((A1 & A2)) = 1/9
    constrain p(A2 | A1) = 0.05
    rule C <- (A1 & A2) cf 0.8 lower cf -0.3
    C <- A1 prob 0.9

Numbers accept a fraction form (``1/9``). The ``rule`` keyword is optional.
"""

from __future__ import annotations

# ── Stdlib
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from graphlib import CycleError, TopologicalSorter
from pathlib import Path
from typing import Dict, Iterable, List, Literal, Mapping, Optional, Sequence, Tuple

# ── Third-party
import pyparsing as pp

# ── Local
from utils.uislab import config
from utils.uislab.calculi import prob_from_cf
from utils.uislab.errors import (
    DirectedCycle,
    DuplicatePrior,
    MissingPrior,
    OuterLoopDiverged,
    RuleSemanticError,
    RuleSyntaxError,
)
from utils.uislab.formula import CONJUNCTION, FORMULA, IDENT, Atom, Formula, neg
from utils.uislab.joint import JointDistribution, PropositionSpace, marginal
from utils.uislab.maxent import Conditional, Constraint, Marginal, fit_max_entropy_prior
from utils.uislab.schema import FitReport

logger = logging.getLogger(__name__)


# ╭─────────────────────────── Data model ───────────────────────────╮
@dataclass(frozen=True)
class Strength:
    """A rule strength: a certainty factor or an absolute p(C|antecedent)."""
    kind: Literal["cf", "prob"]
    value: float

    def __post_init__(self) -> None:
        lo = -1.0 if self.kind == "cf" else 0.0
        if self.kind not in ("cf", "prob") or not lo <= self.value <= 1.0:
            raise RuleSemanticError(f"invalid strength {self.kind} {self.value!r}")

    def __str__(self) -> str:
        return f"{self.kind} {self.value!r}"


@dataclass(frozen=True)
class Rule:
    consequent: str
    antecedent: Formula
    upper: Strength
    lower: Optional[Strength] = None

    def __post_init__(self) -> None:
        if self.consequent in self.antecedent.names():
            raise DirectedCycle(f"rule on {self.consequent!r} mentions it in its antecedent", self.consequent)

    def __str__(self) -> str:
        text = f"rule {self.consequent} <- {self.antecedent} {self.upper}"
        return text if self.lower is None else f"{text} lower {self.lower}"


def _topological(space: PropositionSpace, rules: Sequence[Rule]) -> Tuple[str, ...]:
    """All propositions in dependency order, ties broken by declaration order."""
    sorter: TopologicalSorter = TopologicalSorter({name: () for name in space.names})
    for rule in rules:
        sorter.add(rule.consequent, *sorted(rule.antecedent.names(), key=space.index))
    try:
        sorter.prepare()
    except CycleError as exc:
        cycle = exc.args[1]
        raise DirectedCycle(f"directed cycle through {' -> '.join(cycle)}", cycle[0]) from None
    order: List[str] = []
    while sorter.is_active():
        ready = sorted(sorter.get_ready(), key=space.index)
        order.extend(ready)
        sorter.done(*ready)
    return tuple(order)


@dataclass(frozen=True)
class RuleSet:
    space: PropositionSpace
    leaf_priors: Mapping[str, float]
    rules: Tuple[Rule, ...] = ()
    extra_constraints: Tuple[Constraint, ...] = ()
    _order: Tuple[str, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "leaf_priors", dict(self.leaf_priors))
        object.__setattr__(self, "rules", tuple(self.rules))
        object.__setattr__(self, "extra_constraints", tuple(self.extra_constraints))
        self._validate()
        object.__setattr__(self, "_order", _topological(self.space, self.rules))

    def _validate(self) -> None:
        for rule in self.rules:
            for name in sorted(rule.antecedent.names() | {rule.consequent}):
                if name not in self.space:
                    raise RuleSemanticError(f"unknown proposition {name!r}", name)
        for c in self.extra_constraints:
            names = c.target.names() | (c.given.names() if isinstance(c, Conditional) else frozenset())
            for name in sorted(names):
                if name not in self.space:
                    raise RuleSemanticError(f"unknown proposition {name!r} in constraint", name)
        heads = {r.consequent for r in self.rules}
        for name, p in self.leaf_priors.items():
            if name not in self.space:
                raise RuleSemanticError(f"unknown proposition {name!r}", name)
            if name in heads:
                raise RuleSemanticError(f"{name!r} is a consequent and cannot take a prior", name)
            if not 0.0 <= p <= 1.0:
                raise RuleSemanticError(f"prior of {name!r} outside [0, 1]: {p!r}", name)
        for name in self.space.names:
            if name not in heads and name not in self.leaf_priors:
                raise MissingPrior(f"leaf {name!r} has no prior", name)
        if len(self.rules) > config.MAX_RULES:
            logger.warning("rule set has %d rules (soft limit %d)", len(self.rules), config.MAX_RULES)

    @classmethod
    def build(
        cls,
        props: Iterable[str],
        leaf_priors: Mapping[str, float],
        rules: Iterable[Rule] = (),
        extra_constraints: Iterable[Constraint] = (),
    ) -> "RuleSet":
        return cls(PropositionSpace(props), leaf_priors, tuple(rules), tuple(extra_constraints))

    @property
    def consequents(self) -> Tuple[str, ...]:
        heads = {r.consequent for r in self.rules}
        return tuple(n for n in self.space.names if n in heads)

    @property
    def leaves(self) -> Tuple[str, ...]:
        heads = {r.consequent for r in self.rules}
        return tuple(n for n in self.space.names if n not in heads)

    @property
    def outputs(self) -> Tuple[str, ...]:
        """Consequents no other rule uses; these are the scored conclusions."""
        used = set().union(*(r.antecedent.names() for r in self.rules)) if self.rules else set()
        return tuple(c for c in self.consequents if c not in used)

    def consequent_order(self) -> Tuple[str, ...]:
        heads = set(self.consequents)
        return tuple(n for n in self._order if n in heads)

    def rules_for(self, consequent: str) -> Tuple[int, ...]:
        return tuple(i for i, r in enumerate(self.rules) if r.consequent == consequent)
# ╰─────────────────────────────────────────────────────────────────╯


# ╭─────────────────────────── Grammar ───────────────────────────╮
def _to_float(tokens: pp.ParseResults) -> float:
    return float(Fraction(tokens[0]))


NUMBER = pp.Regex(r"[+-]?(\d+(\.\d*)?|\.\d+)([eE][+-]?\d+)?(/\d+)?").set_parse_action(_to_float).set_name("number")
_EQ = pp.Suppress("=")

STRENGTH = pp.Group((pp.Keyword("cf") | pp.Keyword("prob"))("kind") + NUMBER("value"))
PROP_LINE = pp.Keyword("prop")("kw") + IDENT("name")
PRIOR_LINE = pp.Keyword("prior")("kw") + IDENT("name") + _EQ + NUMBER("value")
CONSTRAINT_LINE = (
    pp.Keyword("constrain")("kw")
    + pp.Suppress(pp.Literal("p") + "(")
    + CONJUNCTION("target")
    + pp.Optional(pp.Suppress("|") + CONJUNCTION("given"))
    + pp.Suppress(")")
    + _EQ
    + NUMBER("value")
)
RULE_LINE = (
    pp.Optional(pp.Suppress(pp.Keyword("rule")))
    + IDENT("consequent")
    + pp.Suppress("<-")
    + FORMULA("antecedent")
    + STRENGTH("upper")
    + pp.Optional(pp.Suppress(pp.Keyword("lower")) + STRENGTH("lower"))
)
LINE = PROP_LINE | PRIOR_LINE | CONSTRAINT_LINE | RULE_LINE


def _strength(group: pp.ParseResults) -> Strength:
    return Strength(kind=_item(group, "kind"), value=_item(group, "value"))


def _item(tokens: pp.ParseResults, key: str):
    """Named value as a plain object; named sub-expressions come back wrapped."""
    value = tokens[key]
    while isinstance(value, pp.ParseResults) and len(value) == 1:
        value = value[0]
    return value


def parse(text: str) -> RuleSet:
    """
    Parse rule-set text.

    Raises:
        RuleSyntaxError: malformed line (1-based line and column)
        RuleSemanticError: unknown proposition, duplicate prior, directed cycle, ...
    """
    props: List[str] = []
    priors: Dict[str, float] = {}
    rules: List[Rule] = []
    constraints: List[Constraint] = []

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            tokens = LINE.parse_string(line, parse_all=True)
        except pp.ParseException as exc:
            raise RuleSyntaxError(f"cannot parse {line!r}: {exc.msg}", lineno, exc.col) from None

        kw = _item(tokens, "kw") if "kw" in tokens else None
        try:
            if kw == "prop":
                name = _item(tokens, "name")
                if name in props:
                    raise RuleSemanticError(f"proposition {name!r} declared twice", name)
                props.append(name)
            elif kw == "prior":
                name = _item(tokens, "name")
                if name in priors:
                    raise DuplicatePrior(f"second prior for {name!r} on line {lineno}", name)
                priors[name] = _item(tokens, "value")
            elif kw == "constrain":
                value, target = _item(tokens, "value"), _item(tokens, "target")
                if "given" in tokens:
                    constraints.append(Conditional(target, _item(tokens, "given"), value))
                else:
                    constraints.append(Marginal(target, value))
            else:
                lower = _strength(tokens["lower"]) if "lower" in tokens else None
                rules.append(
                    Rule(_item(tokens, "consequent"), _item(tokens, "antecedent"), _strength(tokens["upper"]), lower)
                )
        except RuleSemanticError:
            raise
        except ValueError as exc:
            raise RuleSyntaxError(str(exc), lineno, 1) from None

    if not props:
        raise RuleSyntaxError("no propositions declared", 1, 1)
    rs = RuleSet.build(props, priors, rules, constraints)
    logger.debug("parsed rule set: %d props, %d rules, %d constraints", len(props), len(rules), len(constraints))
    return rs


def serialize(rs: RuleSet) -> str:
    """Text that parses back to a rule set equal to `rs`."""
    lines = [f"prop {name}" for name in rs.space.names]
    lines += [f"prior {name} = {rs.leaf_priors[name]!r}" for name in rs.space.names if name in rs.leaf_priors]
    for c in rs.extra_constraints:
        if isinstance(c, Conditional):
            lines.append(f"constrain p({c.target} | {c.given}) = {c.value!r}")
        else:
            lines.append(f"constrain p({c.target}) = {c.value!r}")
    lines += [str(r) for r in rs.rules]
    return "\n".join(lines) + "\n"


def load(path: str | Path) -> RuleSet:
    return parse(Path(path).read_text(encoding="utf-8"))


def dump(rs: RuleSet, path: str | Path, header: str = "") -> None:
    body = serialize(rs)
    if header:
        body = "".join(f"# {line}\n" for line in header.splitlines()) + body
    Path(path).write_text(body, encoding="utf-8")
# ╰─────────────────────────────────────────────────────────────────╯


# ╭─────────────────────────── Constraint compilation ───────────────────────────╮
@dataclass(frozen=True)
class CFTarget:
    """A CF-form strength waiting for p_0(consequent) to become a conditional target."""
    consequent: str
    given: Formula
    cf: float

    def resolve(self, p_consequent: float) -> Conditional:
        return Conditional(Atom(self.consequent), self.given, prob_from_cf(self.cf, p_consequent))


@dataclass(frozen=True)
class ConstraintPlan:
    fixed: Tuple[Constraint, ...]
    cf_targets: Tuple[CFTarget, ...]

    def constraints(self, p_consequents: Mapping[str, float]) -> List[Constraint]:
        return list(self.fixed) + [t.resolve(p_consequents[t.consequent]) for t in self.cf_targets]


def compile_constraints(rs: RuleSet) -> ConstraintPlan:
    """Leaf priors and extra constraints verbatim; rule strengths as conditionals."""
    fixed: List[Constraint] = [Marginal(Atom(name), rs.leaf_priors[name]) for name in rs.leaves]
    fixed += list(rs.extra_constraints)
    pending: List[CFTarget] = []
    for rule in rs.rules:
        sides = [(rule.antecedent, rule.upper)]
        if rule.lower is not None:
            sides.append((neg(rule.antecedent), rule.lower))
        for given, strength in sides:
            if strength.kind == "prob":
                fixed.append(Conditional(Atom(rule.consequent), given, strength.value))
            else:
                pending.append(CFTarget(rule.consequent, given, strength.value))
    return ConstraintPlan(tuple(fixed), tuple(pending))


def fit_prior(
    rs: RuleSet,
    tol: float = config.IPFP_TOL,
    max_iters: int = config.IPFP_MAX_ITERS,
    outer_tol: float = config.OUTER_TOL,
    outer_max_iters: int = config.OUTER_MAX_ITERS,
) -> Tuple[JointDistribution, FitReport]:
    """
    ME prior of a rule set.

    CF-form strengths depend on p_0(C), which the fit itself determines, so
    they are resolved by refitting until every p_0(C) moves less than
    `outer_tol`.

    Raises:
        NotConverged: the inner IPFP fit failed (infeasible constraints)
        OuterLoopDiverged: p_0(C) still moving after `outer_max_iters` refits
    """
    plan = compile_constraints(rs)
    dist, report = fit_max_entropy_prior(rs.space, plan.fixed, tol=tol, max_iters=max_iters)
    if not plan.cf_targets:
        logger.info("ME prior fitted in %d cycles (residual %.3g)", report.iterations, report.max_residual)
        return dist, report

    heads = sorted({t.consequent for t in plan.cf_targets}, key=rs.space.index)
    current = {c: marginal(dist, c) for c in heads}
    drift: Dict[str, float] = {}
    for outer in range(1, outer_max_iters + 1):
        dist, report = fit_max_entropy_prior(rs.space, plan.constraints(current), tol=tol, max_iters=max_iters)
        updated = {c: marginal(dist, c) for c in heads}
        drift = {c: abs(updated[c] - current[c]) for c in heads}
        current = updated
        if max(drift.values()) < outer_tol:
            logger.info("ME prior fitted after %d outer refits (last fit %d cycles)", outer, report.iterations)
            return dist, report
        logger.debug("outer refit %d, drift %s", outer, drift)
    raise OuterLoopDiverged(f"p_0 of consequents still moving after {outer_max_iters} refits", drift)
# ╰─────────────────────────────────────────────────────────────────╯
