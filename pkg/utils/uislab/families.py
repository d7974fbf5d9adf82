# utils/uislab/families.py ─────────────────────────────────────────────────────────
"""Generators for the rule-set families of the performance experiments.

Topologies follow the case descriptions; strengths and priors come from
FamilyParams (upper cf 0.8, lower cf -0.3, leaf priors 0.5 by default),
since the published cases never list theirs. The cnd-ind cases force their
lower strength down to FamilyParams.forced_lower.

dpth-1 and the extreme-overlap cases are built from another family's fitted
prior, so they are generated on demand and not shipped as fixtures.
"""

from __future__ import annotations

# ── Stdlib
import itertools
import logging
from math import comb
from typing import Callable, Dict, List, Optional, Sequence, Tuple

# ── Local
from utils.uislab.errors import UnknownFamily
from utils.uislab.formula import Atom, Formula, conj, neg
from utils.uislab.joint import JointDistribution, marginal
from utils.uislab.maxent import Constraint, Marginal
from utils.uislab.rulemodel import Rule, RuleSet, Strength, fit_prior
from utils.uislab.schema import FamilyParams

logger = logging.getLogger(__name__)


def _atoms(*names: str) -> Tuple[Atom, ...]:
    return tuple(Atom(n) for n in names)


def _rule(head: str, antecedent: Formula, p: FamilyParams, lower: Optional[float] = None) -> Rule:
    return Rule(head, antecedent, Strength("cf", p.upper), None if lower is None else Strength("cf", lower))


def _leaf_priors(names: Sequence[str], p: FamilyParams) -> Dict[str, float]:
    return {n: p.leaf_prior for n in names}


# ╭─────────────────────────── Depth ───────────────────────────╮
def depth_two(p: FamilyParams) -> RuleSet:
    a, b1, b2, c1, c2, c3, c4 = _atoms("A", "B1", "B2", "C1", "C2", "C3", "C4")
    rules = [
        _rule("A", conj(b1, b2), p),
        _rule("B1", conj(c1, c2), p),
        _rule("B2", conj(c3, c4), p),
    ]
    leaves = ("C1", "C2", "C3", "C4")
    return RuleSet.build(("A", "B1", "B2") + leaves, _leaf_priors(leaves, p), rules)


def depth_one(p: FamilyParams, deep_prior: Optional[JointDistribution] = None) -> RuleSet:
    """The top rule of depth_two with B1, B2 pinned at their fitted depth-two values."""
    if deep_prior is None:
        deep_prior, _ = fit_prior(depth_two(p))
    priors = {name: marginal(deep_prior, name) for name in ("B1", "B2")}
    logger.info("dpth-1 intermediate priors: %s", priors)
    rule = _rule("A", conj(Atom("B1"), Atom("B2")), p)
    return RuleSet.build(("A", "B1", "B2"), priors, [rule])
# ╰─────────────────────────────────────────────────────────────────╯


# ╭─────────────────────────── Bushiness ───────────────────────────╮
def _overlap_target(priors: Sequence[float], positive: bool, correlation: float) -> float:
    """p(Bi & Bj) moved `correlation` of the way from independence to the extreme."""
    pa, pb = priors[0], priors[1]
    independent = pa * pb
    if positive:
        bound = min(pa, pb)
    else:
        # every pair shares the same overlap, so inclusion-exclusion bounds it below
        k = len(priors)
        bound = max(0.0, pa + pb - 1.0, (sum(priors) - 1.0) / comb(k, 2))
    return independent + correlation * (bound - independent)


def bushy(k: int, with_lower: bool, p: FamilyParams, correlated: Optional[str] = None) -> RuleSet:
    leaves = tuple(f"B{i}" for i in range(1, k + 1))
    rule = _rule("A", conj(*_atoms(*leaves)), p, p.lower if with_lower else None)
    extra: List[Constraint] = []
    if correlated is not None:
        target = _overlap_target([p.leaf_prior] * k, correlated == "pos", p.correlation)
        extra = [Marginal(conj(Atom(x), Atom(y)), target) for x, y in itertools.combinations(leaves, 2)]
    return RuleSet.build(("A",) + leaves, _leaf_priors(leaves, p), [rule], extra)
# ╰─────────────────────────────────────────────────────────────────╯


# ╭─────────────────────────── Shared antecedents / conclusions ───────────────────────────╮
def _shared_second(shared: str) -> Formula:
    b2, b3 = Atom("B2"), Atom("B3")
    return conj(b2, b3) if shared == "pos" else conj(neg(b2), b3)


def two_conclusions(shared: str, p: FamilyParams) -> RuleSet:
    leaves = ("B1", "B2", "B3")
    rules = [
        _rule("A1", conj(Atom("B1"), Atom("B2")), p),
        _rule("A2", _shared_second(shared), p),
    ]
    return RuleSet.build(("A1", "A2") + leaves, _leaf_priors(leaves, p), rules)


def one_conclusion(shared: str, p: FamilyParams) -> RuleSet:
    leaves = ("B1", "B2", "B3")
    rules = [
        _rule("A", conj(Atom("B1"), Atom("B2")), p),
        _rule("A", _shared_second(shared), p),
    ]
    return RuleSet.build(("A",) + leaves, _leaf_priors(leaves, p), rules)


def two_layers(shared: str, p: FamilyParams) -> RuleSet:
    base = two_conclusions(shared, p)
    top = _rule("C", conj(Atom("A1"), Atom("A2")), p)
    return RuleSet.build(("C",) + base.space.names, base.leaf_priors, base.rules + (top,))


def conditionally_independent(k: int, p: FamilyParams) -> RuleSet:
    leaves = tuple(f"B{i}" for i in range(1, k + 1))
    rules = [_rule("A", Atom(b), p, p.forced_lower) for b in leaves]
    return RuleSet.build(("A",) + leaves, _leaf_priors(leaves, p), rules)


def extreme_overlap(
    extreme: str, shared: str, p: FamilyParams, base_prior: Optional[JointDistribution] = None
) -> RuleSet:
    """
    Two conclusions sharing an antecedent, with their overlap pushed to an extreme.

    p(A1 & A2) moves `correlation` of the way from p1*p2 toward the Fréchet
    bound, max(0, p1 + p2 - 1) or min(p1, p2), while p(A1) and p(A2) stay
    pinned at their values in the matching two-conclusion family.
    """
    base = two_conclusions(shared, p)
    if base_prior is None:
        base_prior, _ = fit_prior(base)
    p1, p2 = marginal(base_prior, "A1"), marginal(base_prior, "A2")
    bound = max(0.0, p1 + p2 - 1.0) if extreme == "min" else min(p1, p2)
    independent = p1 * p2
    target = independent + p.correlation * (bound - independent)
    logger.info("2cnc-%s-shr-ruls-%s: p(A1)=%.6f p(A2)=%.6f overlap=%.6f", extreme, shared, p1, p2, target)
    extra: List[Constraint] = [
        Marginal(Atom("A1"), p1),
        Marginal(Atom("A2"), p2),
        Marginal(conj(Atom("A1"), Atom("A2")), target),
    ]
    return RuleSet.build(base.space.names, base.leaf_priors, base.rules, extra)
# ╰─────────────────────────────────────────────────────────────────╯


# ╭─────────────────────────── Registry ───────────────────────────╮
Builder = Callable[[FamilyParams], RuleSet]


def _registry() -> Dict[str, Builder]:
    out: Dict[str, Builder] = {
        "dpth-2": depth_two,
        "dpth-1": depth_one,
    }
    for k, (label, lower) in itertools.product((2, 3), (("upr", False), ("u&l", True))):
        out[f"bsh{k}-{label}"] = lambda p, k=k, lower=lower: bushy(k, lower, p)
    for shared in ("pos", "neg"):
        out[f"2cnc-2rls-{shared}"] = lambda p, s=shared: two_conclusions(s, p)
        out[f"1cnc-2rls-{shared}"] = lambda p, s=shared: one_conclusion(s, p)
        out[f"1cnc-2lyrs-{shared}"] = lambda p, s=shared: two_layers(s, p)
    for k in (2, 3):
        out[f"cnd-ind-{k}"] = lambda p, k=k: conditionally_independent(k, p)
    for k, (label, lower), corr in itertools.product((2, 3), (("upr", False), ("u&l", True)), ("pos", "neg")):
        out[f"bsh{k}-{label}-{corr}"] = lambda p, k=k, lower=lower, c=corr: bushy(k, lower, p, c)
    for extreme, shared in itertools.product(("min", "max"), ("pos", "neg")):
        out[f"2cnc-{extreme}-shr-ruls-{shared}"] = lambda p, e=extreme, s=shared: extreme_overlap(e, s, p)
    return out


FAMILIES: Dict[str, Builder] = _registry()

# built from another family's fitted prior
UNSHIPPED = frozenset({"dpth-1"} | {n for n in FAMILIES if "-shr-ruls-" in n})


def family_names() -> List[str]:
    return list(FAMILIES)


def fixture_name(family: str) -> str:
    """File stem for a family ('&' is awkward in shells)."""
    return family.replace("&", "n")


def generate_family(family: str, params: Optional[FamilyParams] = None) -> RuleSet:
    """
    Build one named rule-set family.

    Raises:
        UnknownFamily: `family` is not registered
    """
    try:
        builder = FAMILIES[family]
    except KeyError:
        raise UnknownFamily(f"unknown family {family!r}; expected one of {', '.join(FAMILIES)}") from None
    return builder(params or FamilyParams())
# ╰─────────────────────────────────────────────────────────────────╯
