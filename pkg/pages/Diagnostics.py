# pages/Diagnostics.py ─────────────────────────────────────────────────────────
"""DeMorgan audit, one-datum equivalences, rule-or identities, ignored evidence."""

from __future__ import annotations

# ── Third-party
import numpy as np
import pandas as pd
import plotly.express as px
import streamlit as st

# ── Local
import utils.ui as ui
from utils.uislab.diagnostics import (
    PRIORS,
    demorgan_audit,
    ignored_evidence_case,
    one_datum_diagnostic,
    rule_or_independence_check,
)
from utils.uislab.reports import demorgan_frame


# ╭─────────────────────────── Constants ───────────────────────────╮
GRID_STEPS = 9
# ╰─────────────────────────────────────────────────────────────────╯


# ╭──────────────────────── Helpers and caching ──────────────────────╮
def _grid(closed: bool) -> list[float]:
    points = np.linspace(-1.0, 1.0, GRID_STEPS)
    return [float(x) for x in points if closed or abs(x) < 1.0]


@st.cache_data(show_spinner=False)
def load_demorgan(prior_name: str, engine: str) -> pd.DataFrame:
    grid = _grid(closed=False)
    report = demorgan_audit(PRIORS[prior_name], [(a, b) for a in grid for b in grid], engine)
    return demorgan_frame(report)


@st.cache_data(show_spinner=False)
def load_one_datum(prior_name: str, mode: str) -> pd.DataFrame:
    grid = _grid(closed=True)
    rows = [one_datum_diagnostic(PRIORS[prior_name], (a, b), mode).model_dump() for a in grid for b in grid]
    return pd.DataFrame(rows)


@st.cache_data(show_spinner="Sampling…")
def load_rule_or(samples: int, seed: int) -> dict:
    return rule_or_independence_check(samples, seed).model_dump()
# ╰─────────────────────────────────────────────────────────────────╯


# ╭────────────────────────── Render sections ──────────────────────╮
def render_demorgan() -> None:
    ui.section("DeMorgan audit", "p(A1 | A2) directly and through the complements of A1 and A2.")
    c1, c2 = st.columns(2)
    prior_name = c1.selectbox("Prior", list(PRIORS), key="dm_prior")
    engine = c2.radio("Engine", ["rule-or", "mxe"], horizontal=True)
    df = load_demorgan(prior_name, engine)
    st.metric("Max discrepancy", f"{df['discrepancy'].max():.3g}")
    heat = df.pivot(index="cf_b", columns="cf_a", values="discrepancy").sort_index(ascending=False)
    fig = px.imshow(heat, color_continuous_scale="Reds", aspect="auto", labels=dict(color="|Δp|"))
    st.plotly_chart(ui.apply_fig_defaults(fig, x_title="CF(A1)", y_title="CF(A2)"), use_container_width=True)


def render_one_datum() -> None:
    ui.section("One-datum equivalence", "MYC's and / or against MXE fed only the datum MYC keeps.")
    c1, c2 = st.columns(2)
    prior_name = c1.selectbox("Prior", list(PRIORS), key="od_prior")
    mode = c2.radio("Combination", ["and", "or"], horizontal=True)
    df = load_one_datum(prior_name, mode)
    st.metric("Equivalences holding", f"{int(df['holds'].sum())} / {len(df)}")
    st.dataframe(df, use_container_width=True, hide_index=True)


def render_rule_or() -> None:
    ui.section("rule-or identities", "Positive rule-or is the independent-disjunction CF; negative never is.")
    c1, c2 = st.columns(2)
    samples = c1.number_input("Samples", 1_000, 1_000_000, 100_000, step=10_000)
    seed = c2.number_input("Seed", 0, 2**31 - 1, 0, key="ro_seed")
    check = load_rule_or(int(samples), int(seed))
    ui.kpi_group([
        {"label": "Identity max error", "value": f"{check['identity_max_error']:.2e}"},
        {"label": "Negative matches", "value": str(check["negative_violations"])},
        {"label": "Passed", "value": "yes" if check["passed"] else "no"},
    ])


def render_ignored_evidence() -> None:
    ui.section("Ignored evidence", "One likely input unchanged, the others unlikely and then certain.")
    inputs = st.slider("Inputs", 2, 8, 3)
    report = ignored_evidence_case(inputs)
    ui.kpi_group([
        {"label": "Prior of the conjunction", "value": f"{report.p0:.2e}"},
        {"label": "MYC", "value": f"{report.p_myc:.2e}"},
        {"label": "MXE", "value": f"{report.p_mxe:.4f}"},
    ])
# ╰─────────────────────────────────────────────────────────────────╯


def main() -> None:
    ui.configure_page(page_title="Diagnostics", page_icon="🔬")
    ui.render_sidebar()
    demorgan, one_datum, rule_or, ignored = st.tabs(["DeMorgan", "One datum", "rule-or", "Ignored evidence"])
    with demorgan:
        render_demorgan()
    with one_datum:
        render_one_datum()
    with rule_or:
        render_rule_or()
    with ignored:
        render_ignored_evidence()


if __name__ == "__main__":
    main()
