# utils/ui.py ─────────────────────────────────────────────────────────
"""UI utility functions for the UIS Lab Streamlit pages."""

from __future__ import annotations

from pathlib import Path
from typing import Dict, List, Optional, Tuple

import plotly.graph_objects as go
import streamlit as st

from utils.uislab import config


# ╭─────────────────────────── Constants ───────────────────────────╮
DEFAULT_KPI_COLUMNS = 3
DEFAULT_FEATURE_COLUMNS = 3
FIG_TEMPLATE = "plotly_white"
FIXTURE_DIR = Path(__file__).resolve().parents[1] / "fixtures"
SETTINGS_KEY = "lab_settings"
# ╰─────────────────────────────────────────────────────────────────╯


# ╭─────────────────────────── UI Functions ───────────────────────────╮
def configure_page(page_title: str, page_icon: str, layout: str = "wide") -> None:
    """Configure the page and print its title."""
    st.set_page_config(page_title=page_title, page_icon=page_icon, layout=layout)
    st.title(f"{page_icon} {page_title}")


def go_to(page_path: str) -> None:
    """Navigate to a different page."""
    try:
        st.switch_page(page_path)
    except Exception:
        st.warning(f"Page not found: {page_path}")


def section(title: str, subtitle: Optional[str] = None, show_rule: bool = False) -> None:
    """Render a section header with optional subtitle and divider."""
    st.subheader(title)
    if subtitle:
        st.caption(subtitle)
    if show_rule:
        st.divider()


def kpi_group(kpis: List[Dict[str, str]], columns: int = DEFAULT_KPI_COLUMNS) -> None:
    """Render a group of KPI metrics in a grid layout."""
    if not kpis:
        return
    cols = st.columns(min(columns, len(kpis)))
    for i, kpi in enumerate(kpis):
        with cols[i % len(cols)]:
            st.metric(kpi["label"], kpi["value"], help=kpi.get("help"))


def feature_grid(features: List[Tuple[str, str, str]], columns: int = DEFAULT_FEATURE_COLUMNS) -> None:
    """Render a grid of feature cards with navigation buttons."""
    for row_start in range(0, len(features), columns):
        cols = st.columns(columns)
        for i, col in enumerate(cols):
            idx = row_start + i
            if idx >= len(features):
                break
            title, desc, target = features[idx]
            with col:
                with st.container(border=True):
                    st.markdown(f"### {title}")
                    st.caption(desc)
                    if st.button("Open", key=f"open_{idx}", use_container_width=True):
                        go_to(target)


def fixture_files() -> List[str]:
    """Shipped rule files, by stem."""
    return sorted(p.stem for p in FIXTURE_DIR.glob("*.rules"))


def apply_fig_defaults(fig: go.Figure, *, title: str | None = None,
                       x_title: str | None = None, y_title: str | None = None) -> go.Figure:
    fig.update_layout(
        template=FIG_TEMPLATE,
        title=title,
        margin=dict(t=40 if title else 20, b=30, l=40, r=10),
        legend=dict(orientation="h"),
    )
    if x_title:
        fig.update_xaxes(title=x_title)
    if y_title:
        fig.update_yaxes(title=y_title)
    return fig


def render_sidebar() -> Dict[str, float | int]:
    """Solver settings shared by every page; the last values chosen carry over between pages."""
    saved = st.session_state.get(SETTINGS_KEY, {})
    st.sidebar.header("Solver")
    tol = st.sidebar.number_input(
        "IPFP tolerance", 1e-14, 1e-3, float(saved.get("tol", config.IPFP_TOL)), format="%.1e"
    )
    max_iters = st.sidebar.number_input(
        "IPFP cycle cap", 100, 100_000, int(saved.get("max_iters", config.IPFP_MAX_ITERS)), step=100
    )
    workers = st.sidebar.number_input("Sweep threads", 1, 16, int(saved.get("workers", max(1, config.SWEEP_WORKERS))))
    st.sidebar.markdown("---")
    st.sidebar.caption("Defaults come from UISLAB_* environment variables or .env")
    settings = {"tol": float(tol), "max_iters": int(max_iters), "workers": int(workers)}
    st.session_state[SETTINGS_KEY] = settings
    return settings
# ╰─────────────────────────────────────────────────────────────────╯
