# utils/uislab/maxent.py ─────────────────────────────────────────────────────────
"""Maximum-entropy priors and minimum cross-entropy updates by IPFP.

Every constraint is realized as a Jeffrey update on a small partition:
a marginal ``p(f) = v`` on ``{f, !f}``; a conditional ``p(t | g) = v`` on
``{t & g, !t & g, !g}`` holding ``p(g)`` at its current value. Cycling
those projections until the residual is within tolerance is the iterative
proportional fitting procedure; started from the uniform distribution it
yields the maximum-entropy distribution.
"""

from __future__ import annotations

# ── Stdlib
import json
import logging
from dataclasses import dataclass
from typing import Iterable, List, Sequence, Tuple, Union

# ── Third-party
import numpy as np

# ── Local
from utils.uislab import config
from utils.uislab.errors import InvalidFormula, NotConverged, ZeroConditioningEvent
from utils.uislab.formula import Formula, parse_formula
from utils.uislab.joint import JointDistribution, PropositionSpace, scale_cells
from utils.uislab.schema import FitReport

logger = logging.getLogger(__name__)


# ╭─────────────────────────── Constraint types ───────────────────────────╮
def _check_value(value: float) -> float:
    value = float(value)
    if not 0.0 <= value <= 1.0:
        raise InvalidFormula(f"constraint value {value!r} outside [0, 1]")
    return value


@dataclass(frozen=True)
class Marginal:
    target: Formula
    value: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "value", _check_value(self.value))

    def __str__(self) -> str:
        return f"p({self.target}) = {self.value!r}"


@dataclass(frozen=True)
class Conditional:
    target: Formula
    given: Formula
    value: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "value", _check_value(self.value))

    def __str__(self) -> str:
        return f"p({self.target} | {self.given}) = {self.value!r}"


Constraint = Union[Marginal, Conditional]


def constraints_to_json(constraints: Sequence[Constraint]) -> str:
    payload = []
    for c in constraints:
        if isinstance(c, Marginal):
            payload.append({"kind": "marginal", "target": str(c.target), "value": c.value})
        else:
            payload.append({"kind": "conditional", "target": str(c.target), "given": str(c.given), "value": c.value})
    return json.dumps(payload)


def constraints_from_json(text: str) -> List[Constraint]:
    out: List[Constraint] = []
    for item in json.loads(text):
        kind = item.get("kind")
        if kind == "marginal":
            out.append(Marginal(parse_formula(item["target"]), item["value"]))
        elif kind == "conditional":
            out.append(Conditional(parse_formula(item["target"]), parse_formula(item["given"]), item["value"]))
        else:
            raise InvalidFormula(f"unknown constraint kind {kind!r}")
    return out
# ╰─────────────────────────────────────────────────────────────────╯


# ╭─────────────────────────── Compiled projections ───────────────────────────╮
class _Projection:
    """A constraint bound to the atom masks of one space."""

    __slots__ = ("constraint", "target_mask", "given_mask", "value")

    def __init__(self, constraint: Constraint, space: PropositionSpace):
        self.constraint = constraint
        self.value = constraint.value
        self.target_mask = constraint.target.mask(space)
        self.given_mask = constraint.given.mask(space) if isinstance(constraint, Conditional) else None

    def apply(self, atoms: np.ndarray) -> np.ndarray:
        v = self.value
        if self.given_mask is None:
            t = self.target_mask
            return scale_cells(atoms, np.array([t, ~t]), np.array([v, 1.0 - v]))
        g = self.given_mask
        pg = atoms[g].sum()
        if pg <= 0.0:
            raise ZeroConditioningEvent(f"cannot fit {self.constraint}: p(given) = 0")
        t = self.target_mask
        cells = np.array([t & g, ~t & g, ~g])
        return scale_cells(atoms, cells, np.array([v * pg, (1.0 - v) * pg, atoms[~g].sum()]))

    def residual(self, atoms: np.ndarray) -> float:
        if self.given_mask is None:
            return abs(atoms[self.target_mask].sum() - self.value)
        pg = atoms[self.given_mask].sum()
        if pg <= 0.0:
            return 1.0
        return abs(atoms[self.given_mask & self.target_mask].sum() / pg - self.value)


def _compile(space: PropositionSpace, constraints: Iterable[Constraint]) -> List[_Projection]:
    return [_Projection(c, space) for c in constraints]
# ╰─────────────────────────────────────────────────────────────────╯


# ╭─────────────────────────── Operations ───────────────────────────╮
def project(dist: JointDistribution, c: Constraint) -> JointDistribution:
    """One Jeffrey projection onto constraint c."""
    return dist.with_atoms(_Projection(c, dist.space).apply(dist.atoms))


def residual(dist: JointDistribution, constraints: Sequence[Constraint]) -> float:
    """Max |achieved - target|; a conditional on a null event counts 1."""
    projections = _compile(dist.space, constraints)
    return max((p.residual(dist.atoms) for p in projections), default=0.0)


def mxe_update(
    prior: JointDistribution,
    constraints: Sequence[Constraint],
    tol: float = config.IPFP_TOL,
    max_iters: int = config.IPFP_MAX_ITERS,
) -> Tuple[JointDistribution, FitReport]:
    """
    Minimum cross-entropy update of `prior` onto `constraints`.

    Args:
        prior: Starting distribution
        constraints: Marginal / Conditional targets
        tol: Residual at which the fit counts as converged
        max_iters: Cap on full cycles over the constraint list

    Returns:
        (posterior, FitReport)

    Raises:
        NotConverged: cap reached; the constraints are likely infeasible
        ZeroPriorCell / ZeroConditioningEvent: a projection hit a null cell
    """
    projections = _compile(prior.space, constraints)
    if not projections:
        return prior, FitReport(iterations=0, max_residual=0.0, converged=True, tolerance=tol)

    atoms = prior.atoms
    worst = float("inf")
    for cycle in range(1, max_iters + 1):
        for proj in projections:
            atoms = proj.apply(atoms)
        worst = max(p.residual(atoms) for p in projections)
        if worst <= tol:
            logger.debug("IPFP converged after %d cycles (residual %.3g)", cycle, worst)
            return prior.with_atoms(atoms), FitReport(
                iterations=cycle, max_residual=worst, converged=True, tolerance=tol
            )
        if cycle % 1000 == 0:
            logger.debug("IPFP cycle %d, residual %.3g", cycle, worst)

    report = FitReport(iterations=max_iters, max_residual=worst, converged=False, tolerance=tol)
    logger.info("IPFP stopped at %d cycles with residual %.3g", max_iters, worst)
    raise NotConverged(
        f"IPFP did not converge in {max_iters} cycles (residual {worst:.3g}); constraints may be infeasible",
        report,
    )


def fit_max_entropy_prior(
    space: PropositionSpace,
    constraints: Sequence[Constraint],
    tol: float = config.IPFP_TOL,
    max_iters: int = config.IPFP_MAX_ITERS,
) -> Tuple[JointDistribution, FitReport]:
    """Maximum-entropy distribution under `constraints` (MXE from uniform)."""
    return mxe_update(JointDistribution.uniform(space), constraints, tol=tol, max_iters=max_iters)
# ╰─────────────────────────────────────────────────────────────────╯
