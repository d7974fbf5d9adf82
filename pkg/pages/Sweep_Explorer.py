# pages/Sweep_Explorer.py ─────────────────────────────────────────────────────────
"""Run UIS-vs-MXE sweeps on shipped or pasted rule sets."""

from __future__ import annotations

# ── Std lib
from typing import Dict, List, Tuple

# ── Third-party
import pandas as pd
import plotly.express as px
import plotly.graph_objects as go
import streamlit as st

# ── Local
import utils.ui as ui
from utils.uislab.calculi import TSMLowerMode
from utils.uislab.errors import UISLabError
from utils.uislab.harness import ALL_UIS, rank_cases, run_sweep
from utils.uislab.reports import ranking_frame, summary_frame, trials_frame
from utils.uislab.rulemodel import load, parse
from utils.uislab.schema import SweepReport


# ╭─────────────────────────── Constants ───────────────────────────╮
DEFAULT_CASES = ("bsh3-upr", "dpth-2", "cnd-ind-2")
DEFAULT_LEVELS = "0.05,0.35,0.65,0.95"
CUSTOM_CASE = "custom"
# ╰─────────────────────────────────────────────────────────────────╯


# ╭──────────────────────── Helpers and caching ──────────────────────╮
@st.cache_data(show_spinner="Running sweep…")
def sweep_case(case: str, text: str | None, uis: Tuple[str, ...], seed: int, levels: Tuple[float, ...],
               jitter: float, tsm_lower: str, tol: float, max_iters: int,
               workers: int) -> Tuple[pd.DataFrame, pd.DataFrame, List[dict]]:
    """(summary, trials, report dicts) for one case; cached on every argument."""
    rs = parse(text) if text is not None else load(ui.FIXTURE_DIR / f"{case}.rules")
    reports = run_sweep(
        rs, uis, seed, case=case, levels=levels, jitter=jitter, workers=workers,
        tsm_lower=TSMLowerMode(tsm_lower), tol=tol, max_iters=max_iters,
    )
    return (
        summary_frame(reports.values()),
        trials_frame(reports),
        [r.model_dump() for r in reports.values()],
    )


def _shift_chart(trials: pd.DataFrame) -> None:
    scored = trials.dropna(subset=["delta_m"]) if "delta_m" in trials else pd.DataFrame()
    if scored.empty:
        st.info("No scored trials.")
        return
    fig = px.scatter(
        scored, x="delta_m", y="delta_u", color="uis", facet_col="case",
        hover_data=["trial", "consequent", "zeta"], opacity=0.75,
    )
    lo = float(min(scored["delta_m"].min(), scored["delta_u"].min()))
    hi = float(max(scored["delta_m"].max(), scored["delta_u"].max()))
    fig.add_trace(go.Scatter(x=[lo, hi], y=[lo, hi], mode="lines", name="exact",
                             line=dict(dash="dot", color="grey")), row="all", col="all")
    st.plotly_chart(ui.apply_fig_defaults(fig, x_title="Δ MXE", y_title="Δ UIS"), use_container_width=True)


def _zeta_chart(trials: pd.DataFrame) -> None:
    if "trial_zeta" not in trials:
        return
    per_trial = trials.dropna(subset=["trial_zeta"]).drop_duplicates(["case", "uis", "trial"])
    fig = px.histogram(per_trial, x="trial_zeta", color="uis", barmode="overlay", nbins=40, range_x=[-1, 1])
    st.plotly_chart(ui.apply_fig_defaults(fig, x_title="ζ", y_title="trials"), use_container_width=True)
# ╰─────────────────────────────────────────────────────────────────╯


# ╭────────────────────────── Render sections ──────────────────────╮
def render_controls() -> Dict:
    fixtures = ui.fixture_files()
    c1, c2 = st.columns([2, 1])
    cases = c1.multiselect("Rule sets", fixtures, default=[c for c in DEFAULT_CASES if c in fixtures])
    uis = c2.multiselect("Systems", [u.value for u in ALL_UIS], default=[u.value for u in ALL_UIS])
    c3, c4, c5, c6 = st.columns(4)
    seed = c3.number_input("Seed", 0, 2**31 - 1, 0)
    levels = c4.text_input("Levels", DEFAULT_LEVELS)
    jitter = c5.number_input("Jitter", 0.0, 0.1, 0.01, step=0.005, format="%.3f")
    tsm_lower = c6.selectbox("TSM lower", [m.value for m in TSMLowerMode])
    with st.expander("Paste a rule set"):
        custom = st.text_area("Rules", placeholder="prop C\nprop A\nprior A = 0.5\nrule C <- A cf 0.8")
    return dict(cases=cases, uis=tuple(uis), seed=int(seed), levels=levels, jitter=float(jitter),
                tsm_lower=tsm_lower, custom=custom.strip() or None)


def render_results(controls: Dict, settings: Dict) -> None:
    try:
        levels = tuple(float(x) for x in controls["levels"].split(",") if x.strip())
    except ValueError:
        st.error("Levels must be comma-separated numbers.")
        return
    jobs = [(case, None) for case in controls["cases"]]
    if controls["custom"]:
        jobs.append((CUSTOM_CASE, controls["custom"]))
    if not jobs or not controls["uis"]:
        st.info("Pick at least one rule set and one system.")
        return

    summaries, trials, reports = [], [], []
    for case, text in jobs:
        try:
            s, t, r = sweep_case(case, text, controls["uis"], controls["seed"], levels, controls["jitter"],
                                 controls["tsm_lower"], settings["tol"], settings["max_iters"], settings["workers"])
        except UISLabError as exc:
            st.error(f"{case}: {exc}")
            continue
        summaries.append(s)
        trials.append(t)
        reports.extend(r)
    if not summaries:
        return

    summary = pd.concat(summaries, ignore_index=True)
    all_trials = pd.concat(trials, ignore_index=True)
    ui.section("Summary", "Mean ζ per case and system; slope of Δ UIS on Δ MXE.")
    st.dataframe(summary, use_container_width=True, hide_index=True)

    if len(jobs) > 1:
        ranking = rank_cases([SweepReport(**r) for r in reports])
        with st.expander("Best and worst cases"):
            st.dataframe(ranking_frame(ranking), use_container_width=True, hide_index=True)

    shifts, zetas = st.tabs(["Shifts", "ζ distribution"])
    with shifts:
        _shift_chart(all_trials)
    with zetas:
        _zeta_chart(all_trials)

    st.download_button("Download trials CSV", all_trials.to_csv(index=False).encode("utf-8"),
                       file_name=f"sweep-seed{controls['seed']}.csv", mime="text/csv")
# ╰─────────────────────────────────────────────────────────────────╯


def main() -> None:
    ui.configure_page(page_title="Sweep Explorer", page_icon="🎯")
    settings = ui.render_sidebar()
    controls = render_controls()
    if st.button("Run", type="primary"):
        st.session_state["sweep_controls"] = controls
    if "sweep_controls" in st.session_state:
        render_results(st.session_state["sweep_controls"], settings)


if __name__ == "__main__":
    main()
