# Home.py ─────────────────────────────────────────────────────────
"""UIS Lab home page."""

from __future__ import annotations

# ── Third-party
import streamlit as st

# ── Local
import utils.ui as ui
from utils.uislab.calculi import prob_from_cf
from utils.uislab.families import family_names


# ╭─────────────────────────── Constants ───────────────────────────╮
FEATURES = [
    ("📋 Bias Tables", "MYC and / or / rule-or against MXE under three correlations.", "pages/Bias_Tables.py"),
    ("🎯 Sweep Explorer", "ζ scores and shift regressions over the input grid of any rule set.", "pages/Sweep_Explorer.py"),
    ("🔬 Diagnostics", "DeMorgan audit, one-datum equivalences, rule-or identities.", "pages/Diagnostics.py"),
]

FEATURE_GRID_COLUMNS = 3

ABOUT_TEXT = (
    "Three uncertain-inference systems propagate certainty factors or odds through a rule tree: "
    "MYC with min / max / product, TSM adding a response to negative evidence, and CI assuming "
    "conditional independence. Each is scored against the minimum cross-entropy update of the "
    "maximum-entropy prior that the same rules induce."
)

CF_DEMO_DEFAULT = 0.5
P0_DEMO_DEFAULT = 0.3
# ╰─────────────────────────────────────────────────────────────────╯


# ╭────────────────────────── Render sections ──────────────────────╮
def render_header() -> None:
    ui.configure_page(page_title="UIS Lab", page_icon="🧪", layout="wide")
    ui.render_sidebar()


def render_hero_section() -> None:
    """KPIs and the CF-to-probability map."""
    with st.container():
        c1, c2 = st.columns([2, 1], vertical_alignment="center")

        with c1:
            st.caption("Uncertain inference, checked against exact probability.")
            ui.kpi_group([
                {"label": "Systems", "value": "MYC · TSM · CI"},
                {"label": "Rule-set families", "value": str(len(family_names()))},
                {"label": "Shipped rule files", "value": str(len(ui.fixture_files()))},
            ])
            if st.button("→ Run a sweep", type="primary"):
                ui.go_to("pages/Sweep_Explorer.py")

        with c2:
            st.write("**CF → probability**")
            p0 = st.slider("Prior p0", 0.01, 0.99, P0_DEMO_DEFAULT)
            cf = st.slider("Certainty factor", -1.0, 1.0, CF_DEMO_DEFAULT, step=0.05)
            st.metric("Posterior", f"{prob_from_cf(cf, p0):.3f}")


def render_feature_grid() -> None:
    st.subheader("Explore the lab")
    ui.feature_grid(FEATURES, columns=FEATURE_GRID_COLUMNS)


def render_about_section() -> None:
    st.subheader("About")
    st.write(ABOUT_TEXT)
    st.caption("The same experiments run headless: `python -m utils.uislab.cli --help`")
# ╰─────────────────────────────────────────────────────────────────╯


# ╭─────────────────────────── Main ───────────────────────────╮
def main() -> None:
    render_header()

    render_hero_section()
    st.divider()

    render_feature_grid()
    st.divider()

    render_about_section()


if __name__ == "__main__":
    main()
