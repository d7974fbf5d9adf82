# utils/uislab/harness.py ─────────────────────────────────────────────────────────
"""
Performance experiments: the ζ score, seeded input grids, UIS-vs-MXE sweeps,
the shift regression and case rankings.
"""

from __future__ import annotations

# ── Stdlib
import itertools
import logging
from collections import defaultdict
from concurrent.futures import ThreadPoolExecutor
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

# ── Third-party
import numpy as np
from scipy import stats

# ── Local
from utils.uislab import config
from utils.uislab.calculi import TSMLowerMode, UISKind, UISModel, build_model
from utils.uislab.errors import (
    DegenerateMetric,
    DegenerateRegression,
    NotConverged,
    TooManyLeaves,
    UISLabError,
)
from utils.uislab.formula import Atom
from utils.uislab.joint import JointDistribution, marginal
from utils.uislab.maxent import Marginal, mxe_update
from utils.uislab.rulemodel import RuleSet, fit_prior
from utils.uislab.schema import (
    CaseRank,
    ConsequentOutcome,
    Regression,
    SweepReport,
    TrialResult,
    UISRanking,
)

logger = logging.getLogger(__name__)

ALL_UIS: Tuple[UISKind, ...] = (UISKind.MYC, UISKind.TSM, UISKind.CI)


def _clip01(p: float) -> float:
    return min(1.0, max(0.0, float(p)))


# ╭─────────────────────────── ζ metric ───────────────────────────╮
def expected_sq_error(p_m1: float, p0: float) -> float:
    """Mean squared error of a guess drawn as prob_from_cf(U[-1, 1], p0) against p_m1."""
    return (2 * p0**2 - 6 * p_m1 * p0 + 6 * p_m1**2 + 1 + p0 - 3 * p_m1) / 6


def zeta(p_u1: float, p_m1: float, p0: float) -> float:
    """
    Score a UIS posterior against the MXE posterior.

    1 at zero error, 0 at the random-guess expected error, -1 at the worst
    possible error; piecewise linear in squared error between those anchors.

    Raises:
        DegenerateMetric: anchors collapse and the error is nonzero
    """
    err = (p_u1 - p_m1) ** 2
    mu = expected_sq_error(p_m1, p0)
    worst = max(p_m1, 1.0 - p_m1) ** 2
    if mu <= 0.0 or worst <= mu:
        if err == 0.0:
            return 1.0
        raise DegenerateMetric(f"zeta undefined at p_m1={p_m1!r}, p0={p0!r} (mu={mu!r}, worst={worst!r})")
    if err <= mu:
        return 1.0 - err / mu
    return max(-1.0, -(err - mu) / (worst - mu))
# ╰─────────────────────────────────────────────────────────────────╯


# ╭─────────────────────────── Input grid ───────────────────────────╮
def input_grid(
    leaves: Sequence[str],
    seed: int,
    levels: Sequence[float] = config.DEFAULT_LEVELS,
    jitter: float = config.DEFAULT_JITTER,
) -> List[Dict[str, float]]:
    """
    Every combination of input levels, one trial per combination.

    Each value is drawn uniformly within `jitter` of its level, afresh for
    every trial and leaf, from a generator keyed by (seed, trial, leaf).
    """
    n = len(leaves)
    if not 1 <= n <= config.MAX_LEAVES:
        raise TooManyLeaves(f"input grid needs 1..{config.MAX_LEAVES} leaves, got {n}")
    grid = []
    for trial, combo in enumerate(itertools.product(range(len(levels)), repeat=n)):
        row = {}
        for j, (leaf, level) in enumerate(zip(leaves, combo)):
            value = float(levels[level])
            if jitter > 0:
                value += np.random.default_rng([seed, trial, j]).uniform(-jitter, jitter)
            row[leaf] = _clip01(value)
        grid.append(row)
    return grid
# ╰─────────────────────────────────────────────────────────────────╯


# ╭─────────────────────────── Regression ───────────────────────────╮
def shift_regression(delta_m: Sequence[float], delta_u: Sequence[float]) -> Regression:
    """
    Ordinary least squares of the UIS shift on the MXE shift.

    Raises:
        DegenerateRegression: fewer than 3 points or no spread in delta_m
    """
    x = np.asarray(delta_m, dtype=float)
    y = np.asarray(delta_u, dtype=float)
    if x.size < 3 or x.size != y.size:
        raise DegenerateRegression(f"need at least 3 paired shifts, got {x.size}/{y.size}")
    if np.ptp(x) == 0.0:
        raise DegenerateRegression("MXE shift has zero variance")
    if np.ptp(y) == 0.0:
        intercept = float(y[0])
        return Regression(slope=0.0, intercept=intercept, r_squared=0.0)
    fit = stats.linregress(x, y)
    return Regression(
        slope=float(fit.slope),
        intercept=float(fit.intercept),
        r_squared=min(1.0, max(0.0, float(fit.rvalue) ** 2)),
    )
# ╰─────────────────────────────────────────────────────────────────╯


# ╭─────────────────────────── Sweep ───────────────────────────╮
def _score(
    model: UISModel,
    uis: UISKind,
    index: int,
    assignment: Dict[str, float],
    p_m: Mapping[str, float],
    outputs: Sequence[str],
) -> TrialResult:
    try:
        p_u = model.evaluate(uis, assignment)
        outcomes = []
        for c in outputs:
            p0, pu, pm = _clip01(model.priors[c]), _clip01(p_u[c]), _clip01(p_m[c])
            outcomes.append(ConsequentOutcome(
                consequent=c, p0=p0, p_u1=pu, p_m1=pm,
                delta_u=pu - p0, delta_m=pm - p0, zeta=zeta(pu, pm, p0),
            ))
    except UISLabError as exc:
        logger.warning("%s trial %d failed: %s", uis.value, index, exc)
        return TrialResult(index=index, leaf_assignment=assignment, error=f"{uis.value}: {exc}")
    mean = float(np.mean([o.zeta for o in outcomes]))
    return TrialResult(index=index, leaf_assignment=assignment, outcomes=outcomes, zeta=min(1.0, max(-1.0, mean)))


def _run_trial(
    model: UISModel,
    prior: JointDistribution,
    uis_list: Sequence[UISKind],
    outputs: Sequence[str],
    tol: float,
    max_iters: int,
    index: int,
    assignment: Dict[str, float],
) -> Dict[UISKind, TrialResult]:
    evidence = [Marginal(Atom(leaf), v) for leaf, v in assignment.items()]
    try:
        posterior, _ = mxe_update(prior, evidence, tol=tol, max_iters=max_iters)
    except (NotConverged, ArithmeticError) as exc:
        logger.warning("MXE update failed on trial %d: %s", index, exc)
        return {
            uis: TrialResult(index=index, leaf_assignment=assignment, error=f"mxe: {exc}") for uis in uis_list
        }
    p_m = {c: marginal(posterior, c) for c in outputs}
    return {uis: _score(model, uis, index, assignment, p_m, outputs) for uis in uis_list}


def _summarize(case: str, uis: UISKind, seed: int, trials: List[TrialResult]) -> SweepReport:
    scored = [t for t in trials if t.zeta is not None]
    if not scored:
        raise DegenerateMetric(f"no trial of {uis.value} on {case!r} could be scored")
    dm = [o.delta_m for t in scored for o in t.outcomes]
    du = [o.delta_u for t in scored for o in t.outcomes]
    try:
        regression: Optional[Regression] = shift_regression(dm, du)
    except DegenerateRegression as exc:
        logger.info("no shift regression for %s on %r: %s", uis.value, case, exc)
        regression = None
    mean = float(np.mean([t.zeta for t in scored]))
    return SweepReport(
        case=case,
        uis=uis.value,
        trial_count=len(trials),
        failed_trials=len(trials) - len(scored),
        mean_zeta=min(1.0, max(-1.0, mean)),
        regression=regression,
        seed=seed,
        trials=trials,
    )


def run_sweep(
    rs: RuleSet,
    uis: Iterable[UISKind | str] = ALL_UIS,
    seed: int = 0,
    *,
    case: str = "",
    prior: Optional[JointDistribution] = None,
    levels: Sequence[float] = config.DEFAULT_LEVELS,
    jitter: float = config.DEFAULT_JITTER,
    workers: int = config.SWEEP_WORKERS,
    tsm_lower: TSMLowerMode = TSMLowerMode.DECLARED,
    tol: float = config.IPFP_TOL,
    max_iters: int = config.IPFP_MAX_ITERS,
) -> Dict[UISKind, SweepReport]:
    """
    Compare each UIS against MXE over the full input grid of `rs`.

    Args:
        rs: Rule set under test
        uis: Systems to score
        seed: Master seed of the input grid
        case: Label carried into the reports
        prior: Pre-fitted ME prior (fitted here when omitted)
        levels / jitter: Input grid shape
        workers: Threads evaluating trials; results do not depend on it

    Returns:
        {UISKind: SweepReport} in the requested order
    """
    uis_list = [UISKind(u) for u in uis]
    if prior is None:
        prior, _ = fit_prior(rs, tol=tol, max_iters=max_iters)
    model = build_model(rs, prior, tsm_lower)
    outputs = rs.outputs
    grid = input_grid(rs.leaves, seed, levels, jitter)
    logger.info("sweep %r: %d trials x %d systems", case, len(grid), len(uis_list))

    def job(item: Tuple[int, Dict[str, float]]) -> Dict[UISKind, TrialResult]:
        return _run_trial(model, prior, uis_list, outputs, tol, max_iters, *item)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(job, enumerate(grid)))
    else:
        results = [job(item) for item in enumerate(grid)]

    per_uis: Dict[UISKind, List[TrialResult]] = {u: [r[u] for r in results] for u in uis_list}
    return {u: _summarize(case, u, seed, per_uis[u]) for u in uis_list}


def rank_cases(reports: Iterable[SweepReport], k: int = 3) -> List[UISRanking]:
    """Best and worst k cases per UIS by mean ζ, plus the worst mean ζ."""
    grouped: Dict[str, List[SweepReport]] = defaultdict(list)
    for r in reports:
        grouped[r.uis].append(r)
    out = []
    for uis in [u.value for u in ALL_UIS if u.value in grouped]:
        ordered = sorted(grouped[uis], key=lambda r: (-r.mean_zeta, r.case))
        best = [CaseRank(case=r.case, mean_zeta=r.mean_zeta) for r in ordered[:k]]
        worst = [CaseRank(case=r.case, mean_zeta=r.mean_zeta) for r in reversed(ordered[-k:])]
        out.append(UISRanking(uis=uis, best=best, worst=worst, worst_zeta=ordered[-1].mean_zeta))
    return out
# ╰─────────────────────────────────────────────────────────────────╯
