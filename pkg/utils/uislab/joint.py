# utils/uislab/joint.py ─────────────────────────────────────────────────────────
"""Exact joint distributions over boolean propositions.

Atoms are indexed by truth assignment: bit i of the atom index is the truth
value of proposition i in declaration order, so ``atoms[0b01]`` is the atom
where the first proposition is true and the second false.
"""

from __future__ import annotations

# ── Stdlib
import json
import logging
from functools import cached_property
from typing import Iterable, Mapping, Sequence, Tuple

# ── Third-party
import numpy as np

# ── Local
from utils.uislab import config
from utils.uislab.errors import (
    AbsoluteContinuityViolation,
    InvalidDistribution,
    InvalidPartition,
    NotExclusive,
    NotExhaustive,
    UnknownProposition,
    ZeroConditioningEvent,
    ZeroPriorCell,
)
from utils.uislab.formula import Formula, Not, disj, parse_formula

logger = logging.getLogger(__name__)


# ╭─────────────────────────── Proposition space ───────────────────────────╮
class PropositionSpace:
    """Ordered, distinct proposition names; 2**n truth assignments."""

    def __init__(self, names: Iterable[str], max_props: int = config.MAX_PROPS):
        names = tuple(names)
        if not names:
            raise InvalidDistribution("a proposition space needs at least one proposition")
        if any(not n for n in names):
            raise InvalidDistribution("proposition names must be non-empty")
        if len(set(names)) != len(names):
            raise InvalidDistribution(f"duplicate proposition names in {names}")
        if len(names) > max_props:
            raise InvalidDistribution(f"{len(names)} propositions exceed the cap of {max_props}")
        self.names: Tuple[str, ...] = names
        self._index = {n: i for i, n in enumerate(names)}

    @property
    def n(self) -> int:
        return len(self.names)

    @property
    def size(self) -> int:
        return 1 << len(self.names)

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise UnknownProposition(name) from None

    @cached_property
    def _columns(self) -> np.ndarray:
        idx = np.arange(self.size)
        cols = (idx[None, :] >> np.arange(self.n)[:, None]) & 1
        cols = cols.astype(bool)
        cols.setflags(write=False)
        return cols

    def truth(self, name: str) -> np.ndarray:
        """Boolean vector over atoms: where proposition `name` is true."""
        return self._columns[self.index(name)]

    def mask(self, f: Formula) -> np.ndarray:
        return f.mask(self)

    def __contains__(self, name: object) -> bool:
        return name in self._index

    def __eq__(self, other: object) -> bool:
        return isinstance(other, PropositionSpace) and other.names == self.names

    def __hash__(self) -> int:
        return hash(self.names)

    def __repr__(self) -> str:
        return f"PropositionSpace({list(self.names)})"
# ╰─────────────────────────────────────────────────────────────────╯


# ╭─────────────────────────── Distribution ───────────────────────────╮
class JointDistribution:
    """Immutable probability vector over the atoms of a PropositionSpace."""

    __slots__ = ("space", "atoms")

    def __init__(self, space: PropositionSpace, atoms: Sequence[float] | np.ndarray, *, validate: bool = True):
        vec = np.array(atoms, dtype=float)
        if validate:
            if vec.shape != (space.size,):
                raise InvalidDistribution(f"expected {space.size} atoms, got {vec.shape}")
            if not np.all(np.isfinite(vec)) or np.any(vec < 0):
                raise InvalidDistribution("atoms must be finite and non-negative")
            total = vec.sum()
            if abs(total - 1.0) > config.ATOM_SUM_TOL:
                raise InvalidDistribution(f"atoms sum to {total!r}, not 1")
        vec.setflags(write=False)
        self.space = space
        self.atoms = vec

    @classmethod
    def uniform(cls, space: PropositionSpace) -> "JointDistribution":
        return cls(space, np.full(space.size, 1.0 / space.size), validate=False)

    @classmethod
    def from_assignments(cls, space: PropositionSpace, weights: Mapping[Tuple[bool, ...], float]) -> "JointDistribution":
        """Build from {(truth of prop 0, truth of prop 1, ...): probability}."""
        vec = np.zeros(space.size)
        for truth, p in weights.items():
            vec[sum(1 << i for i, t in enumerate(truth) if t)] = p
        return cls(space, vec)

    def with_atoms(self, atoms: np.ndarray) -> "JointDistribution":
        return JointDistribution(self.space, atoms, validate=False)

    def to_json(self) -> str:
        return json.dumps({"props": list(self.space.names), "atoms": self.atoms.tolist()})

    @classmethod
    def from_json(cls, text: str) -> "JointDistribution":
        try:
            payload = json.loads(text)
            return cls(PropositionSpace(payload["props"]), payload["atoms"])
        except (KeyError, TypeError) as exc:
            raise InvalidDistribution(f"malformed distribution JSON: {exc}") from exc

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, JointDistribution)
            and other.space == self.space
            and np.array_equal(other.atoms, self.atoms)
        )

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        return f"JointDistribution({list(self.space.names)}, {self.atoms.tolist()})"
# ╰─────────────────────────────────────────────────────────────────╯


# ╭─────────────────────────── Event partition ───────────────────────────╮
class EventPartition:
    """Exclusive, exhaustive cells with target probabilities."""

    __slots__ = ("space", "cells", "masks", "targets")

    def __init__(self, space: PropositionSpace, cells: Sequence[Tuple[Formula, float]]):
        if not cells:
            raise InvalidPartition("a partition needs at least one cell")
        masks = np.array([f.mask(space) for f, _ in cells])
        targets = np.array([float(p) for _, p in cells])
        cover = masks.sum(axis=0)
        if np.any(cover > 1):
            raise NotExclusive("partition cells overlap")
        if np.any(cover < 1):
            raise NotExhaustive("partition cells do not cover every atom")
        if np.any(targets < 0):
            raise InvalidPartition("partition targets must be non-negative")
        if abs(targets.sum() - 1.0) > config.PARTITION_SUM_TOL:
            raise InvalidPartition(f"partition targets sum to {targets.sum()!r}, not 1")
        self.space = space
        self.cells = tuple((f, float(p)) for f, p in cells)
        self.masks = masks
        self.targets = targets


def extend_nonexhaustive(space: PropositionSpace, cells: Sequence[Tuple[Formula, float]]) -> EventPartition:
    """Append the complement cell carrying the remaining probability."""
    masks = np.array([f.mask(space) for f, _ in cells])
    if np.any(masks.sum(axis=0) > 1):
        raise NotExclusive("cells overlap; cannot spread the remainder")
    total = sum(float(p) for _, p in cells)
    if total > 1.0 + config.ATOM_SUM_TOL:
        raise InvalidPartition(f"cell targets sum to {total!r} > 1")
    rest = Not(disj(*[f for f, _ in cells]))
    return EventPartition(space, [*cells, (rest, max(0.0, 1.0 - total))])
# ╰─────────────────────────────────────────────────────────────────╯


# ╭─────────────────────────── Operations ───────────────────────────╮
def probability(dist: JointDistribution, f: Formula) -> float:
    """Sum of the atoms where f holds."""
    return float(dist.atoms[f.mask(dist.space)].sum())


def conditional_probability(dist: JointDistribution, target: Formula, given: Formula) -> float:
    g = given.mask(dist.space)
    pg = float(dist.atoms[g].sum())
    if pg <= 0.0:
        raise ZeroConditioningEvent(f"p({given}) = 0")
    return float(dist.atoms[g & target.mask(dist.space)].sum()) / pg


def scale_cells(atoms: np.ndarray, masks: np.ndarray, targets: np.ndarray) -> np.ndarray:
    """Jeffrey scaling of an atom vector; cells given as boolean masks."""
    out = np.array(atoms, dtype=float)
    for mask, target in zip(masks, targets):
        mass = atoms[mask].sum()
        if mass > 0.0:
            out[mask] = atoms[mask] * (target / mass)
        elif target > 0.0:
            raise ZeroPriorCell(f"cell with target {target!r} has zero prior probability")
    return out


def jeffrey_update(dist: JointDistribution, partition: EventPartition) -> JointDistribution:
    if partition.space != dist.space:
        raise InvalidPartition("partition and distribution live on different spaces")
    return dist.with_atoms(scale_cells(dist.atoms, partition.masks, partition.targets))


def _xlogy(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    out = np.zeros_like(x)
    pos = x > 0
    out[pos] = x[pos] * np.log(y[pos])
    return out


def entropy(dist: JointDistribution) -> float:
    """Shannon entropy in nats, 0·ln 0 = 0."""
    return float(-_xlogy(dist.atoms, dist.atoms).sum())


def kl_divergence(dist: JointDistribution, reference: JointDistribution) -> float:
    """KL(dist || reference) in nats."""
    p, q = dist.atoms, reference.atoms
    if np.any((p > 0) & (q <= 0)):
        raise AbsoluteContinuityViolation("dist puts mass where the reference has none")
    pos = p > 0
    return float(max(0.0, np.sum(p[pos] * np.log(p[pos] / q[pos]))))


def marginal(dist: JointDistribution, name: str) -> float:
    return float(dist.atoms[dist.space.truth(name)].sum())


def marginals(dist: JointDistribution) -> dict[str, float]:
    return {name: marginal(dist, name) for name in dist.space.names}


def probability_of(dist: JointDistribution, text: str) -> float:
    """probability() for formula text."""
    return probability(dist, parse_formula(text))


def two_proposition_prior(p_a: float, p_b: float, p_both: float, names: Tuple[str, str] = ("A1", "A2")) -> JointDistribution:
    """Prior over two propositions fixed by both marginals and their overlap."""
    space = PropositionSpace(names)
    # index bit0 = first name, bit1 = second
    atoms = np.array([1.0 - p_a - p_b + p_both, p_a - p_both, p_b - p_both, p_both])
    return JointDistribution(space, atoms)
# ╰─────────────────────────────────────────────────────────────────╯


__all__ = [
    "PropositionSpace",
    "JointDistribution",
    "EventPartition",
    "extend_nonexhaustive",
    "probability",
    "conditional_probability",
    "jeffrey_update",
    "scale_cells",
    "entropy",
    "kl_divergence",
    "marginal",
    "marginals",
    "two_proposition_prior",
]
