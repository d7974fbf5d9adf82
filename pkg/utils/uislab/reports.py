"""
Tabular emission of sweeps, bias tables and audits (text, CSV, JSON)
"""
from __future__ import annotations

import json
from typing import Iterable, List, Literal, Mapping, Sequence

import pandas as pd

from utils.uislab.calculi import UISKind
from utils.uislab.schema import BiasRow, DeMorganReport, SweepReport, UISRanking

Format = Literal["text", "csv", "json"]


def render(df: pd.DataFrame, fmt: Format = "text", digits: int = 4) -> str:
    """
    Render a frame in one of the output formats.

    Args:
        df: Frame to emit
        fmt: "text" (aligned columns), "csv" or "json" (list of records)
        digits: Decimals shown in text output; csv/json keep full precision

    Returns:
        The rendered string, newline terminated
    """
    if fmt == "csv":
        return df.to_csv(index=False, lineterminator="\n")
    if fmt == "json":
        return json.dumps(json.loads(df.to_json(orient="records", double_precision=15)), indent=2) + "\n"
    if df.empty:
        return "(no rows)\n"
    return df.to_string(index=False, float_format=lambda v: f"{v:+.{digits}f}", na_rep="") + "\n"


def trials_frame(reports: Mapping[UISKind, SweepReport]) -> pd.DataFrame:
    """One row per (system, trial, scored consequent)."""
    rows: List[dict] = []
    for report in reports.values():
        for trial in report.trials:
            base = {"case": report.case, "uis": report.uis, "trial": trial.index}
            base.update({f"leaf_{k}": v for k, v in trial.leaf_assignment.items()})
            if trial.error is not None:
                rows.append({**base, "error": trial.error})
                continue
            for o in trial.outcomes:
                rows.append({
                    **base,
                    "consequent": o.consequent,
                    "p0": o.p0, "p_u1": o.p_u1, "p_m1": o.p_m1,
                    "delta_u": o.delta_u, "delta_m": o.delta_m,
                    "zeta": o.zeta, "trial_zeta": trial.zeta,
                })
    return pd.DataFrame(rows)


def summary_frame(reports: Iterable[SweepReport]) -> pd.DataFrame:
    rows = []
    for r in reports:
        reg = r.regression
        rows.append({
            "case": r.case,
            "uis": r.uis,
            "trials": r.trial_count,
            "failed": r.failed_trials,
            "mean_zeta": r.mean_zeta,
            "slope": reg.slope if reg else None,
            "intercept": reg.intercept if reg else None,
            "r_squared": reg.r_squared if reg else None,
            "response": reg.response if reg else None,
        })
    return pd.DataFrame(rows)


def summary_json(reports: Iterable[SweepReport]) -> str:
    return json.dumps([r.model_dump(mode="json") for r in reports], indent=2) + "\n"


def bias_frame(rows: Sequence[BiasRow]) -> pd.DataFrame:
    """Column layout of the MYC-vs-MXE comparison tables."""
    out = []
    for r in rows:
        rec = {"prior": r.label, "CF(A1)": r.cf_a1, "CF(A2)": r.cf_a2, "CF_myc": r.cf_myc}
        if r.cf_rule_or is not None:
            rec["CF_rule-or"] = r.cf_rule_or
        rec.update({
            "CF_mxe": r.cf_mxe,
            "p0": r.p0,
            "p_myc": r.p_myc,
            "p_mxe": r.p_mxe,
            "misstated_%": r.misstatement_pct,
        })
        out.append(rec)
    return pd.DataFrame(out)


def demorgan_frame(report: DeMorganReport) -> pd.DataFrame:
    return pd.DataFrame([row.model_dump() for row in report.rows])


def ranking_frame(rankings: Iterable[UISRanking]) -> pd.DataFrame:
    rows = []
    for ranking in rankings:
        for place, rank in enumerate(ranking.best, start=1):
            rows.append({"uis": ranking.uis, "group": "best", "rank": place, "case": rank.case, "mean_zeta": rank.mean_zeta})
        for place, rank in enumerate(ranking.worst, start=1):
            rows.append({"uis": ranking.uis, "group": "worst", "rank": place, "case": rank.case, "mean_zeta": rank.mean_zeta})
    return pd.DataFrame(rows)
