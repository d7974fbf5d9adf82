# pages/Bias_Tables.py ─────────────────────────────────────────────────────────
"""MYC and / or / rule-or against MXE on two inputs."""

from __future__ import annotations

# ── Third-party
import pandas as pd
import plotly.express as px
import streamlit as st

# ── Local
import utils.ui as ui
from utils.uislab.diagnostics import PRIORS, TABLE_IDS, bias_table, standard_table
from utils.uislab.reports import bias_frame


# ╭─────────────────────────── Constants ───────────────────────────╮
TABLE_CAPTIONS = {
    "3-1": "Conjunction under negative correlation, p(A1 & A2) = 1/9.",
    "3-2": "Conjunction under positive correlation, p(A1 & A2) = 7/18.",
    "3-3": "Disjunction of independent inputs: max and rule-or.",
    "3-4": "rule-or on two disconfirmations as the correlation changes.",
}
MODES = ("and", "or", "rule-or")
# ╰─────────────────────────────────────────────────────────────────╯


# ╭──────────────────────── Helpers and caching ──────────────────────╮
@st.cache_data(show_spinner=False)
def load_table(table_id: str) -> pd.DataFrame:
    return bias_frame(standard_table(table_id))


@st.cache_data(show_spinner=False)
def load_custom(prior_name: str, mode: str, cf_a1: float, cf_a2: float) -> pd.DataFrame:
    return bias_frame(bias_table(PRIORS[prior_name], [(cf_a1, cf_a2)], mode, label=prior_name))


def _cf_chart(df: pd.DataFrame) -> None:
    long = df.assign(pair=df["CF(A1)"].map("{:+.2f}".format) + " / " + df["CF(A2)"].map("{:+.2f}".format))
    long = long.melt(id_vars=["pair", "prior"], value_vars=["CF_myc", "CF_mxe"], var_name="system", value_name="CF")
    fig = px.bar(long, x="pair", y="CF", color="system", barmode="group", facet_col="prior")
    st.plotly_chart(ui.apply_fig_defaults(fig, x_title="CF(A1) / CF(A2)"), use_container_width=True)
# ╰─────────────────────────────────────────────────────────────────╯


# ╭────────────────────────── Render sections ──────────────────────╮
def render_standard_tables() -> None:
    ui.section("Standard tables", "Built-in priors with p(A1) = p(A2) = 1/2.")
    tabs = st.tabs([f"Table {t}" for t in TABLE_IDS])
    for tab, table_id in zip(tabs, TABLE_IDS):
        with tab:
            df = load_table(table_id)
            st.caption(TABLE_CAPTIONS[table_id])
            st.dataframe(df, use_container_width=True, hide_index=True)
            _cf_chart(df)
            st.download_button(
                "Download CSV",
                df.to_csv(index=False).encode("utf-8"),
                file_name=f"table-{table_id}.csv",
                mime="text/csv",
                key=f"dl_{table_id}",
            )


def render_custom_row() -> None:
    ui.section("Try a pair", "Any CF pair, prior and combination rule.")
    c1, c2, c3, c4 = st.columns(4)
    prior_name = c1.selectbox("Prior", list(PRIORS), index=0)
    mode = c2.selectbox("Combination", MODES)
    cf_a1 = c3.slider("CF(A1)", -1.0, 1.0, 0.8, step=0.05)
    cf_a2 = c4.slider("CF(A2)", -1.0, 1.0, 0.8, step=0.05)
    try:
        row = load_custom(prior_name, mode, cf_a1, cf_a2).iloc[0]
    except Exception as exc:
        st.error(f"Cannot compute this row: {exc}")
        return
    ui.kpi_group([
        {"label": "CF (MYC)", "value": f"{row['CF_myc']:+.3f}"},
        {"label": "CF (MXE)", "value": f"{row['CF_mxe']:+.3f}"},
        {"label": "Misstated", "value": f"{row['misstated_%']:+.1f}%",
         "help": "(p_myc - p0) / (p_mxe - p0) - 1"},
    ])
# ╰─────────────────────────────────────────────────────────────────╯


def main() -> None:
    ui.configure_page(page_title="Bias Tables", page_icon="📋")
    ui.render_sidebar()
    render_standard_tables()
    st.divider()
    render_custom_row()


if __name__ == "__main__":
    main()
