# utils/uislab/calculi.py ─────────────────────────────────────────────────────────
"""Heuristic uncertain inference systems and CF <-> probability conversions.

MYC is the certainty-factor calculus (min/max/negation, one-sided modus
ponens, parallel combination). TSM is MYC with a modus ponens that also
responds to negative antecedent CFs. CI treats every antecedent of a
consequent as conditionally independent given the consequent and updates
its odds by one likelihood factor per antecedent.
"""

from __future__ import annotations

# ── Stdlib
import logging
from dataclasses import dataclass, field
from enum import Enum
from functools import reduce
from typing import TYPE_CHECKING, Dict, Iterable, List, Mapping, Optional, Tuple

# ── Third-party
import numpy as np

# ── Local
from utils.uislab.errors import (
    ContradictoryCertainty,
    DegenerateAnchor,
    UnboundLeaf,
    ZeroConditioningEvent,
    ZeroDenominator,
)
from utils.uislab.formula import And, Atom, Formula, Not, Or, conjuncts, literal_name, neg
from utils.uislab.joint import JointDistribution, conditional_probability, marginal, probability

if TYPE_CHECKING:  # pragma: no cover
    from utils.uislab.rulemodel import RuleSet

logger = logging.getLogger(__name__)

CertaintyFactor = float


class UISKind(str, Enum):
    MYC = "myc"
    TSM = "tsm"
    CI = "ci"


class TSMLowerMode(str, Enum):
    """Where TSM gets its response to a negative antecedent CF."""
    DECLARED = "declared"  # lower strength read off the prior only for rules declaring one
    MIRROR = "mirror"      # always the mirrored upper strength
    PRIOR = "prior"        # always the lower strength read off the prior


# ╭─────────────────────────── Conversions ───────────────────────────╮
def _clamp(x: float, lo: float, hi: float) -> float:
    return min(hi, max(lo, x))


def prob_from_cf(cf: CertaintyFactor, p0: float) -> float:
    """Piecewise linear map: -1 -> 0, 0 -> p0, +1 -> 1."""
    if cf >= 0.0:
        return _clamp(p0 + cf * (1.0 - p0), 0.0, 1.0)
    return _clamp(p0 * (1.0 + cf), 0.0, 1.0)


def cf_from_probs(p1: float, p0: float) -> CertaintyFactor:
    """Inverse of prob_from_cf for a posterior p1 against the prior p0."""
    if p1 == p0:
        return 0.0
    if p1 > p0:
        if p0 >= 1.0:
            raise DegenerateAnchor(f"cannot express p1={p1!r} as a CF against p0=1")
        return _clamp((p1 - p0) / (1.0 - p0), -1.0, 1.0)
    if p0 <= 0.0:
        raise DegenerateAnchor(f"cannot express p1={p1!r} as a CF against p0=0")
    return _clamp((p1 - p0) / p0, -1.0, 1.0)
# ╰─────────────────────────────────────────────────────────────────╯


# ╭─────────────────────────── MYC / TSM operators ───────────────────────────╮
def cf_and(cfs: Iterable[CertaintyFactor]) -> CertaintyFactor:
    cfs = list(cfs)
    if not cfs:
        raise ValueError("cf_and of an empty list")
    return min(cfs)


def cf_or(cfs: Iterable[CertaintyFactor]) -> CertaintyFactor:
    cfs = list(cfs)
    if not cfs:
        raise ValueError("cf_or of an empty list")
    return max(cfs)


def cf_not(cf: CertaintyFactor) -> CertaintyFactor:
    return -cf


def myc_modus_ponens(rule_cf: CertaintyFactor, antecedent_cf: CertaintyFactor) -> CertaintyFactor:
    return rule_cf * antecedent_cf if antecedent_cf >= 0.0 else 0.0


def tsm_modus_ponens(
    upper_cf: CertaintyFactor,
    lower_cf: Optional[CertaintyFactor],
    antecedent_cf: CertaintyFactor,
) -> CertaintyFactor:
    """MYC modus ponens that also responds below zero (mirrored when no lower strength)."""
    if antecedent_cf >= 0.0:
        out = upper_cf * antecedent_cf
    elif lower_cf is not None:
        out = lower_cf * abs(antecedent_cf)
    else:
        out = -upper_cf * abs(antecedent_cf)
    return _clamp(out, -1.0, 1.0)


def combine_parallel(x: CertaintyFactor, y: CertaintyFactor) -> CertaintyFactor:
    """Combine the CFs two rules assign to one consequent."""
    if x >= 0.0 and y >= 0.0:
        return x + y - x * y
    if x <= 0.0 and y <= 0.0:
        return x + y + x * y
    if abs(x) >= 1.0 and abs(y) >= 1.0:
        raise ContradictoryCertainty(f"cannot combine certain {x!r} with certain {y!r}")
    return _clamp((x + y) / (1.0 - min(abs(x), abs(y))), -1.0, 1.0)


def formula_cf(f: Formula, cfs: Mapping[str, CertaintyFactor]) -> CertaintyFactor:
    """Propagate node CFs through an antecedent expression."""
    if isinstance(f, Atom):
        try:
            return cfs[f.name]
        except KeyError:
            raise UnboundLeaf(f"no certainty factor for {f.name!r}") from None
    if isinstance(f, Not):
        return cf_not(formula_cf(f.child, cfs))
    if isinstance(f, And):
        return cf_and(formula_cf(c, cfs) for c in f.children)
    return cf_or(formula_cf(c, cfs) for c in f.children)
# ╰─────────────────────────────────────────────────────────────────╯


# ╭─────────────────────────── CI calculus ───────────────────────────╮
@dataclass(frozen=True)
class CIParameters:
    """Prior of one consequent and, per antecedent term, p0(term|C) and p0(term|!C)."""
    prior0: float
    likelihood_true: Dict[str, float]
    likelihood_false: Dict[str, float]
    terms: Dict[str, Formula] = field(default_factory=dict)

    def term_prior(self, key: str) -> float:
        return self.likelihood_true[key] * self.prior0 + self.likelihood_false[key] * (1.0 - self.prior0)


def _weights(a: float, prior: float) -> Tuple[float, float]:
    """Evidence weights a/p0 and (1-a)/(1-p0); a null side with no mass weighs 0."""
    if prior > 0.0:
        w_true = a / prior
    elif a == 0.0:
        w_true = 0.0
    else:
        raise ZeroDenominator(f"posterior {a!r} for a term with prior 0")
    if prior < 1.0:
        w_false = (1.0 - a) / (1.0 - prior)
    elif a == 1.0:
        w_false = 0.0
    else:
        raise ZeroDenominator(f"posterior {a!r} for a term with prior 1")
    return w_true, w_false


def ci_update(params: CIParameters, leaf_posteriors: Mapping[str, float]) -> float:
    """
    Posterior probability of the consequent under conditional independence.

    Each term contributes the odds factor
    [p0(A|C) a/p0(A) + p0(!A|C) (1-a)/(1-p0(A))] / [same with !C];
    a = 1 gives the sharp-evidence likelihood ratio and a = p0(A) gives 1.

    Args:
        params: CIParameters of the consequent
        leaf_posteriors: term key -> p1(term); missing keys stay at their prior

    Returns:
        p1(consequent)
    """
    p0 = params.prior0
    if p0 <= 0.0 or p0 >= 1.0:
        return p0
    log_odds = np.log(p0) - np.log1p(-p0)
    for key, lt in params.likelihood_true.items():
        lf = params.likelihood_false[key]
        prior = params.term_prior(key)
        a = float(leaf_posteriors.get(key, prior))
        w1, w0 = _weights(a, prior)
        num = lt * w1 + (1.0 - lt) * w0
        den = lf * w1 + (1.0 - lf) * w0
        if den <= 0.0:
            raise ZeroDenominator(f"likelihood factor for {key!r} has a zero denominator")
        if num <= 0.0:
            return 0.0
        log_odds += np.log(num) - np.log(den)
    odds = float(np.exp(log_odds))
    if np.isinf(odds):
        return 1.0
    return odds / (1.0 + odds)


def _term_key(term: Formula) -> Tuple[str, Formula]:
    """Literals share one factor with their negation; compound terms stand alone."""
    name = literal_name(term)
    if name is not None:
        return name, Atom(name)
    return str(term), term


def term_posterior(term: Formula, posteriors: Mapping[str, float]) -> float:
    """p1 of an antecedent term from node posteriors, inputs treated as independent."""
    if isinstance(term, Atom):
        try:
            return posteriors[term.name]
        except KeyError:
            raise UnboundLeaf(f"no posterior for {term.name!r}") from None
    if isinstance(term, Not):
        return 1.0 - term_posterior(term.child, posteriors)
    parts = [term_posterior(c, posteriors) for c in term.children]
    if isinstance(term, And):
        return float(np.prod(parts))
    return 1.0 - float(np.prod([1.0 - p for p in parts]))


def extract_ci_parameters(prior: JointDistribution, consequent: str, antecedents: Iterable[Formula]) -> CIParameters:
    """Read p0(C) and the per-term likelihoods of every rule on C off the prior."""
    c = Atom(consequent)
    terms: Dict[str, Formula] = {}
    for antecedent in antecedents:
        for term in conjuncts(antecedent):
            key, formula = _term_key(term)
            terms.setdefault(key, formula)
    p0 = probability(prior, c)
    lt: Dict[str, float] = {}
    lf: Dict[str, float] = {}
    for key, formula in terms.items():
        lt[key] = conditional_probability(prior, formula, c) if p0 > 0.0 else 0.0
        lf[key] = conditional_probability(prior, formula, neg(c)) if p0 < 1.0 else 0.0
    return CIParameters(prior0=p0, likelihood_true=lt, likelihood_false=lf, terms=terms)
# ╰─────────────────────────────────────────────────────────────────╯


# ╭─────────────────────────── Rule-tree evaluation ───────────────────────────╮
@dataclass(frozen=True)
class RuleStrength:
    upper_cf: float
    lower_cf: Optional[float]


@dataclass(frozen=True)
class UISModel:
    """Knowledge read once off a fitted prior; shared by all three systems."""
    ruleset: "RuleSet"
    priors: Dict[str, float]
    strengths: Tuple[RuleStrength, ...]
    ci_params: Dict[str, CIParameters]
    tsm_lower: TSMLowerMode = TSMLowerMode.DECLARED

    def _tsm_lower(self, idx: int) -> Optional[float]:
        if self.tsm_lower is TSMLowerMode.MIRROR:
            return None
        if self.tsm_lower is TSMLowerMode.DECLARED and self.ruleset.rules[idx].lower is None:
            return None
        return self.strengths[idx].lower_cf

    def _leaf_values(self, leaf_posteriors: Mapping[str, float]) -> Dict[str, float]:
        missing = [leaf for leaf in self.ruleset.leaves if leaf not in leaf_posteriors]
        if missing:
            raise UnboundLeaf(f"no posterior for input leaves {missing}")
        return {leaf: float(leaf_posteriors[leaf]) for leaf in self.ruleset.leaves}

    def evaluate(self, uis: UISKind, leaf_posteriors: Mapping[str, float]) -> Dict[str, float]:
        uis = UISKind(uis)
        posts = self._leaf_values(leaf_posteriors)
        if uis is UISKind.CI:
            return self._evaluate_ci(posts)
        return self._evaluate_cf(uis, posts)

    def _evaluate_cf(self, uis: UISKind, posts: Dict[str, float]) -> Dict[str, float]:
        cfs = {leaf: cf_from_probs(p, self.priors[leaf]) for leaf, p in posts.items()}
        for node in self.ruleset.consequent_order():
            results: List[float] = []
            for idx in self.ruleset.rules_for(node):
                a = formula_cf(self.ruleset.rules[idx].antecedent, cfs)
                upper = self.strengths[idx].upper_cf
                if uis is UISKind.MYC:
                    results.append(myc_modus_ponens(upper, a))
                else:
                    results.append(tsm_modus_ponens(upper, self._tsm_lower(idx), a))
            cfs[node] = reduce(combine_parallel, results)
            logger.debug("%s: cf(%s) = %.6f", uis.value, node, cfs[node])
        return {node: prob_from_cf(cfs[node], self.priors[node]) for node in self.ruleset.consequents}

    def _evaluate_ci(self, posts: Dict[str, float]) -> Dict[str, float]:
        values = dict(posts)
        for node in self.ruleset.consequent_order():
            params = self.ci_params[node]
            a = {key: term_posterior(term, values) for key, term in params.terms.items()}
            values[node] = ci_update(params, a)
        return {node: values[node] for node in self.ruleset.consequents}


def read_rule_strengths(ruleset: "RuleSet", prior: JointDistribution) -> Tuple[RuleStrength, ...]:
    """Rule CFs from the prior: p0(C|ant) and p0(C|!ant) against p0(C)."""
    out = []
    for rule in ruleset.rules:
        c = Atom(rule.consequent)
        p_c = probability(prior, c)
        upper = cf_from_probs(conditional_probability(prior, c, rule.antecedent), p_c)
        try:
            lower: Optional[float] = cf_from_probs(conditional_probability(prior, c, neg(rule.antecedent)), p_c)
        except ZeroConditioningEvent:
            lower = None
        out.append(RuleStrength(upper_cf=upper, lower_cf=lower))
    return tuple(out)


def build_model(
    ruleset: "RuleSet",
    prior: JointDistribution,
    tsm_lower: TSMLowerMode = TSMLowerMode.DECLARED,
) -> UISModel:
    priors = {name: marginal(prior, name) for name in prior.space.names}
    ci_params = {
        node: extract_ci_parameters(prior, node, [ruleset.rules[i].antecedent for i in ruleset.rules_for(node)])
        for node in ruleset.consequent_order()
    }
    return UISModel(
        ruleset=ruleset,
        priors=priors,
        strengths=read_rule_strengths(ruleset, prior),
        ci_params=ci_params,
        tsm_lower=TSMLowerMode(tsm_lower),
    )


def evaluate(
    uis: UISKind,
    ruleset: "RuleSet",
    prior: JointDistribution,
    leaf_posteriors: Mapping[str, float],
    tsm_lower: TSMLowerMode = TSMLowerMode.DECLARED,
) -> Dict[str, float]:
    """Posterior of every consequent under one UIS."""
    return build_model(ruleset, prior, tsm_lower).evaluate(uis, leaf_posteriors)
# ╰─────────────────────────────────────────────────────────────────╯
