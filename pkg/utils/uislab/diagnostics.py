# utils/uislab/diagnostics.py ─────────────────────────────────────────────────────────
"""
Two-input comparisons of MYC's and / or / rule-or against MXE: bias tables,
the DeMorgan audit, the one-datum equivalences and the rule-or identities.
"""

from __future__ import annotations

# ── Stdlib
import logging
from typing import Dict, List, Literal, Sequence, Tuple

# ── Third-party
import numpy as np

# ── Local
from utils.uislab.calculi import cf_and, cf_from_probs, cf_or, combine_parallel, prob_from_cf
from utils.uislab.formula import Atom, conj, disj, neg
from utils.uislab.joint import JointDistribution, PropositionSpace, marginal, probability, two_proposition_prior
from utils.uislab.maxent import Marginal, mxe_update
from utils.uislab.schema import (
    BiasRow,
    DeMorganReport,
    DeMorganRow,
    IgnoredEvidenceReport,
    IndependenceCheck,
    OneDatumReport,
)

logger = logging.getLogger(__name__)

CFPair = Tuple[float, float]
Mode = Literal["and", "or", "rule-or"]

A1, A2 = Atom("A1"), Atom("A2")


# ╭─────────────────────────── Priors ───────────────────────────╮
# p(A1) = p(A2) = 1/2 with negative, zero and positive correlation
NEGATIVE_PRIOR = two_proposition_prior(0.5, 0.5, 1 / 9)
INDEPENDENT_PRIOR = two_proposition_prior(0.5, 0.5, 0.25)
POSITIVE_PRIOR = two_proposition_prior(0.5, 0.5, 7 / 18)

PRIORS: Dict[str, JointDistribution] = {
    "negative": NEGATIVE_PRIOR,
    "independent": INDEPENDENT_PRIOR,
    "positive": POSITIVE_PRIOR,
}
# ╰─────────────────────────────────────────────────────────────────╯


def _posteriors(prior: JointDistribution, cfs: CFPair) -> Tuple[float, float]:
    return prob_from_cf(cfs[0], marginal(prior, "A1")), prob_from_cf(cfs[1], marginal(prior, "A2"))


def _mxe(prior: JointDistribution, cfs: CFPair) -> JointDistribution:
    pa, pb = _posteriors(prior, cfs)
    posterior, _ = mxe_update(prior, [Marginal(A1, pa), Marginal(A2, pb)])
    return posterior


# ╭─────────────────────────── Bias tables ───────────────────────────╮
def bias_table(prior: JointDistribution, cf_pairs: Sequence[CFPair], mode: Mode, label: str | None = None) -> List[BiasRow]:
    """
    MYC vs MXE on the conjunction (mode "and") or disjunction of A1 and A2.

    MXE side: CFs -> posteriors against p0(Ai), MXE update, read the
    compound, convert back against its own prior.
    """
    target = conj(A1, A2) if mode == "and" else disj(A1, A2)
    p0 = probability(prior, target)
    rows = []
    for cf1, cf2 in cf_pairs:
        p_mxe = probability(_mxe(prior, (cf1, cf2)), target)
        rule_or = None if mode == "and" else combine_parallel(cf1, cf2)
        if mode == "and":
            cf_myc = cf_and([cf1, cf2])
        elif mode == "or":
            cf_myc = cf_or([cf1, cf2])
        else:
            cf_myc = rule_or
        rows.append(BiasRow(
            label=label,
            cf_a1=cf1, cf_a2=cf2, p0=p0,
            cf_myc=cf_myc, cf_rule_or=rule_or, cf_mxe=cf_from_probs(p_mxe, p0),
            p_myc=prob_from_cf(cf_myc, p0), p_mxe=p_mxe,
        ))
    return rows


TABLE_IDS = ("3-1", "3-2", "3-3", "3-4")


def table_3_4(pair: CFPair = (-0.8, -0.8)) -> List[BiasRow]:
    """rule-or against MXE "or" under negative, zero and positive correlation."""
    return [bias_table(prior, [pair], "rule-or", label=name)[0] for name, prior in PRIORS.items()]


def standard_table(table_id: str) -> List[BiasRow]:
    if table_id == "3-1":
        return bias_table(NEGATIVE_PRIOR, [(0.8, 0.8), (-0.8, 0.8), (-0.8, -0.8)], "and", "negative")
    if table_id == "3-2":
        return bias_table(POSITIVE_PRIOR, [(0.8, 0.8), (0.8, -0.8), (-0.8, -0.8)], "and", "positive")
    if table_id == "3-3":
        return bias_table(
            INDEPENDENT_PRIOR, [(0.8, 0.8), (0.8, -0.8), (0.4, 0.4), (-0.8, -0.8)], "or", "independent"
        )
    if table_id == "3-4":
        return table_3_4()
    raise ValueError(f"unknown table {table_id!r}; expected one of {', '.join(TABLE_IDS)}")
# ╰─────────────────────────────────────────────────────────────────╯


# ╭─────────────────────────── DeMorgan audit ───────────────────────────╮
def demorgan_audit(
    prior: JointDistribution,
    cf_pairs: Sequence[CFPair],
    engine: Literal["rule-or", "mxe"] = "rule-or",
) -> DeMorganReport:
    """
    Belief in (A1 | A2) computed directly and through !(!A1 & !A2).

    The second route takes the CFs of !A1 and !A2, combines them into a
    belief in (!A1 | !A2), complements it into (A1 & A2) and recovers the
    disjunction as p1(A1) + p1(A2) - p1(A1 & A2). Probability calculus makes
    the two routes agree; rule-or does not.
    """
    either, both = disj(A1, A2), conj(A1, A2)
    either_neg = disj(neg(A1), neg(A2))
    rows = []
    for cf_a, cf_b in cf_pairs:
        pa, pb = _posteriors(prior, (cf_a, cf_b))
        if engine == "mxe":
            posterior = _mxe(prior, (cf_a, cf_b))
            direct = probability(posterior, either)
            p_both = 1.0 - probability(posterior, either_neg)
        else:
            direct = prob_from_cf(combine_parallel(cf_a, cf_b), probability(prior, either))
            p_either_neg = prob_from_cf(combine_parallel(-cf_a, -cf_b), probability(prior, either_neg))
            p_both = 1.0 - p_either_neg
            logger.debug("rule-or (%s, %s): p(A1&A2) via complements %.6f (prior %.6f)",
                         cf_a, cf_b, p_both, probability(prior, both))
        via = pa + pb - p_both
        rows.append(DeMorganRow(
            cf_a=cf_a, cf_b=cf_b, p_direct=direct, p_via_complements=via, discrepancy=abs(direct - via)
        ))
    return DeMorganReport(engine=engine, rows=rows, max_discrepancy=max((r.discrepancy for r in rows), default=0.0))
# ╰─────────────────────────────────────────────────────────────────╯


# ╭─────────────────────────── One-datum equivalence ───────────────────────────╮
def one_datum_diagnostic(
    prior: JointDistribution, cf_pair: CFPair, mode: Literal["and", "or"], tol: float = 1e-9
) -> OneDatumReport:
    """
    Check MYC's and / or against MXE fed only the datum MYC keeps.

    and: the smaller CF wins. At or below zero MYC is MXE with that datum
    alone. Above zero the reference is MXE with that datum and the other
    input certain, which matches MYC only when the prior already has the
    kept input implying the other.
    or: the mirror image with the larger CF and the other input certainly
    false, matching MYC only when the other input implies the kept one.
    """
    cfs = list(cf_pair)
    names = ("A1", "A2")
    if mode == "and":
        i = int(np.argmin(cfs))
        target = conj(A1, A2)
        cf_myc = cf_and(cfs)
        one_datum = cfs[i] <= 0.0
    else:
        i = int(np.argmax(cfs))
        target = disj(A1, A2)
        cf_myc = cf_or(cfs)
        one_datum = cfs[i] >= 0.0
    kept, other = names[i], names[1 - i]
    p0 = probability(prior, target)
    p_myc = prob_from_cf(cf_myc, p0)
    datum = Marginal(Atom(kept), prob_from_cf(cfs[i], marginal(prior, kept)))

    if one_datum:
        reference, _ = mxe_update(prior, [datum])
        branch = f"{mode}-one-datum"
        assumption = f"evidence about {other} ignored"
        in_prior = True
    elif mode == "and":
        reference, _ = mxe_update(prior, [Marginal(Atom(other), 1.0), datum])
        branch = "and-implied"
        assumption = f"{kept} implies {other} and {other} is certain"
        in_prior = probability(prior, conj(Atom(kept), neg(Atom(other)))) <= tol
    else:
        reference, _ = mxe_update(prior, [Marginal(Atom(other), 0.0), datum])
        branch = "or-implied"
        assumption = f"{other} implies {kept} and {other} is certainly false"
        in_prior = probability(prior, conj(Atom(other), neg(Atom(kept)))) <= tol

    p_reference = probability(reference, target)
    logger.debug("one-datum %s %s: myc %.6f reference %.6f", mode, cf_pair, p_myc, p_reference)
    return OneDatumReport(
        mode=mode, cf_a1=cfs[0], cf_a2=cfs[1], branch=branch, assumption=assumption,
        assumption_in_prior=in_prior, p_myc=p_myc, p_reference=p_reference,
        holds=abs(p_myc - p_reference) <= tol,
    )
# ╰─────────────────────────────────────────────────────────────────╯


# ╭─────────────────────────── rule-or identities ───────────────────────────╮
def rule_or_identity_sides(a0, a1, b0, b1):
    """Both sides of the positive rule-or identity (arrays or scalars)."""
    a0, a1, b0, b1 = (np.asarray(x, dtype=float) for x in (a0, a1, b0, b1))
    q0 = (1.0 - a0) * (1.0 - b0)
    q1 = (1.0 - a1) * (1.0 - b1)
    lhs = (q0 - q1) / q0
    a = 1.0 - (1.0 - a1) / (1.0 - a0)
    b = 1.0 - (1.0 - b1) / (1.0 - b0)
    return lhs, a + b - a * b


def negative_rule_or_sides(a0, a1, b0, b1):
    """1/A1 + 1/B1 and 1/A0 + 1/B0: what negative rule-or would need equal."""
    a0, a1, b0, b1 = (np.asarray(x, dtype=float) for x in (a0, a1, b0, b1))
    return 1.0 / a1 + 1.0 / b1, 1.0 / a0 + 1.0 / b0


def rule_or_independence_check(samples: int = 100_000, seed: int = 0, tol: float = 1e-12) -> IndependenceCheck:
    """
    Positive rule-or equals the independent-disjunction CF on every sample;
    negative rule-or never matches it.
    """
    rng = np.random.default_rng(seed)
    a0 = rng.uniform(0.0, 1.0, samples)
    b0 = rng.uniform(0.0, 1.0, samples)
    a1 = a0 + (1.0 - a0) * rng.uniform(0.0, 1.0, samples)
    b1 = b0 + (1.0 - b0) * rng.uniform(0.0, 1.0, samples)
    ok = (a0 > 0.0) & (a0 < 1.0) & (b0 > 0.0) & (b0 < 1.0)
    lhs, rhs = rule_or_identity_sides(a0[ok], a1[ok], b0[ok], b1[ok])
    identity_err = float(np.max(np.abs(lhs - rhs), initial=0.0))

    u = rng.uniform(0.001, 0.999, (2, samples))
    left, right = negative_rule_or_sides(a0[ok], a0[ok] * u[0][ok], b0[ok], b0[ok] * u[1][ok])
    violations = int(np.count_nonzero(left <= right))

    logger.info("rule-or check: %d samples, identity error %.3g, %d violations", int(ok.sum()), identity_err, violations)
    return IndependenceCheck(
        samples=int(ok.sum()),
        identity_max_error=identity_err,
        negative_violations=violations,
        passed=identity_err <= tol and violations == 0,
    )
# ╰─────────────────────────────────────────────────────────────────╯


# ╭─────────────────────────── Ignored evidence ───────────────────────────╮
def ignored_evidence_case(inputs: int = 3, p_first: float = 0.99, p_rest: float = 0.01) -> IgnoredEvidenceReport:
    """
    Independent inputs, the first likely and unchanged (CF 0), the rest
    unlikely and then certain (CF 1). MYC's conjunction stays at its prior;
    MXE lands on p0 of the first input.
    """
    names = [f"A{i}" for i in range(1, inputs + 1)]
    space = PropositionSpace(names)
    p = np.array([p_first] + [p_rest] * (inputs - 1))
    bits = (np.arange(space.size)[:, None] >> np.arange(inputs)) & 1
    atoms = np.prod(np.where(bits == 1, p, 1.0 - p), axis=1)
    prior = JointDistribution(space, atoms / atoms.sum())

    target = conj(*(Atom(n) for n in names))
    p0 = probability(prior, target)
    cfs = [0.0] + [1.0] * (inputs - 1)
    evidence = [Marginal(Atom(n), prob_from_cf(cf, marginal(prior, n))) for n, cf in zip(names, cfs)]
    posterior, _ = mxe_update(prior, evidence)
    return IgnoredEvidenceReport(
        inputs=inputs,
        p0=p0,
        p_myc=prob_from_cf(cf_and(cfs), p0),
        p_mxe=probability(posterior, target),
        p_first=p_first,
    )
# ╰─────────────────────────────────────────────────────────────────╯
