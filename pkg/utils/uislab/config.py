# utils/uislab/config.py ─────────────────────────────────────────────────────────
"""Environment-driven defaults for solvers, limits and logging."""

from __future__ import annotations

# ── Stdlib
import os

# ── Third-party
from dotenv import load_dotenv

# ── Initialize environment ──
load_dotenv()


# ╭─────────────────────────── Constants ───────────────────────────╮
IPFP_TOL = float(os.getenv("UISLAB_IPFP_TOL", "1e-9"))
IPFP_MAX_ITERS = int(os.getenv("UISLAB_IPFP_MAX_ITERS", "10000"))

# CF-form rule strengths: fixed point on p_0(consequent)
OUTER_TOL = float(os.getenv("UISLAB_OUTER_TOL", "1e-8"))
OUTER_MAX_ITERS = int(os.getenv("UISLAB_OUTER_MAX_ITERS", "100"))

MAX_PROPS = int(os.getenv("UISLAB_MAX_PROPS", "20"))
MAX_RULES = int(os.getenv("UISLAB_MAX_RULES", "12"))
MAX_LEAVES = int(os.getenv("UISLAB_MAX_LEAVES", "8"))

SWEEP_WORKERS = int(os.getenv("UISLAB_WORKERS", "1"))
LOG_LEVEL = os.getenv("UISLAB_LOG_LEVEL", "WARNING").upper()

# Input grid of the performance experiments
DEFAULT_LEVELS = (0.05, 0.35, 0.65, 0.95)
DEFAULT_JITTER = 0.01

# Tolerances on distribution / partition validity
ATOM_SUM_TOL = 1e-12
PARTITION_SUM_TOL = 1e-9
# ╰─────────────────────────────────────────────────────────────────╯
