"""
Pydantic schemas for fit reports, sweep records and diagnostic tables
"""
from __future__ import annotations

from typing import Dict, List, Literal, Optional

from pydantic import BaseModel, Field, model_validator


UISName = Literal["myc", "tsm", "ci"]


class FitReport(BaseModel):
    """Convergence bookkeeping for an IPFP run"""
    iterations: int = Field(..., ge=0, description="Full cycles over the constraint list")
    max_residual: float = Field(..., ge=0, description="Largest |achieved - target| at exit")
    converged: bool
    tolerance: float = Field(..., gt=0)

    @model_validator(mode="after")
    def _converged_within_tolerance(self) -> "FitReport":
        if self.converged and self.max_residual > self.tolerance:
            raise ValueError("converged report must have residual within tolerance")
        return self


class ConsequentOutcome(BaseModel):
    """One consequent's probabilities in one trial"""
    consequent: str
    p0: float = Field(..., ge=0, le=1)
    p_u1: float = Field(..., ge=0, le=1)
    p_m1: float = Field(..., ge=0, le=1)
    delta_u: float
    delta_m: float
    zeta: float = Field(..., ge=-1, le=1)


class TrialResult(BaseModel):
    """Per-trial record for one UIS"""
    index: int = Field(..., ge=0)
    leaf_assignment: Dict[str, float]
    outcomes: List[ConsequentOutcome] = Field(default_factory=list)
    zeta: Optional[float] = Field(None, ge=-1, le=1, description="Mean zeta over scored consequents")
    error: Optional[str] = Field(None, description="Set when the MXE side or the UIS failed")


class Regression(BaseModel):
    """Least squares of the UIS shift on the MXE shift"""
    slope: float
    intercept: float
    r_squared: float = Field(..., ge=0, le=1)

    @property
    def response(self) -> str:
        if self.slope > 1.0:
            return "over-response"
        if self.slope < 0.0:
            return "reversed"
        return "under-response" if self.slope < 1.0 else "exact"


class SweepReport(BaseModel):
    """Aggregate of one UIS over one rule set"""
    case: str
    uis: UISName
    trial_count: int = Field(..., ge=0)
    failed_trials: int = Field(0, ge=0)
    mean_zeta: float = Field(..., ge=-1, le=1)
    regression: Optional[Regression] = None
    seed: int
    trials: List[TrialResult] = Field(default_factory=list, exclude=True)


class BiasRow(BaseModel):
    """One CF pair of a MYC-vs-MXE bias table"""
    label: Optional[str] = Field(None, description="Prior the row was computed under")
    cf_a1: float
    cf_a2: float
    p0: float = Field(..., description="Prior of the conjunction/disjunction")
    cf_myc: float
    cf_rule_or: Optional[float] = None
    cf_mxe: float
    p_myc: float
    p_mxe: float

    @property
    def impact_ratio(self) -> float:
        """(p_myc - p0) / (p_mxe - p0); 1 is an exact response."""
        denom = self.p_mxe - self.p0
        return float("nan") if denom == 0 else (self.p_myc - self.p0) / denom

    @property
    def misstatement_pct(self) -> float:
        return 100.0 * (self.impact_ratio - 1.0)


class DeMorganRow(BaseModel):
    cf_a: float
    cf_b: float
    p_direct: float
    p_via_complements: float
    discrepancy: float = Field(..., ge=0)


class DeMorganReport(BaseModel):
    engine: Literal["rule-or", "mxe"]
    rows: List[DeMorganRow]
    max_discrepancy: float = Field(..., ge=0)


class OneDatumReport(BaseModel):
    """MYC and/or result against the one-datum MXE reference"""
    mode: Literal["and", "or"]
    cf_a1: float
    cf_a2: float
    branch: str
    assumption: str
    assumption_in_prior: bool = Field(..., description="Prior already has the implication the branch assumes")
    p_myc: float
    p_reference: float
    holds: bool


class IndependenceCheck(BaseModel):
    samples: int
    identity_max_error: float
    negative_violations: int
    passed: bool


class CaseRank(BaseModel):
    case: str
    mean_zeta: float


class UISRanking(BaseModel):
    uis: UISName
    best: List[CaseRank]
    worst: List[CaseRank]
    worst_zeta: float


class FamilyParams(BaseModel):
    """Stand-in strengths and priors for generated rule-set families"""
    upper: float = Field(0.8, ge=-1, le=1, description="Upper rule strength (CF)")
    lower: float = Field(-0.3, ge=-1, le=1, description="Lower rule strength (CF) for u&l cases")
    forced_lower: float = Field(
        -0.8, ge=-1, le=1, description="Lower rule strength (CF) forced down on the cnd-ind cases"
    )
    leaf_prior: float = Field(0.5, gt=0, lt=1, description="Prior of every input leaf")
    correlation: float = Field(
        0.9, ge=0, lt=1, description="How far correlated cases move from independence toward the extreme"
    )


class IgnoredEvidenceReport(BaseModel):
    """N-input conjunction where MYC keeps only the one datum with CF 0"""
    inputs: int = Field(..., ge=2)
    p0: float = Field(..., description="Prior of the conjunction")
    p_myc: float
    p_mxe: float
    p_first: float = Field(..., description="Prior of the unchanged input")
