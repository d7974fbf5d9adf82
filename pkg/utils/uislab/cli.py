# utils/uislab/cli.py ─────────────────────────────────────────────────────────
"""
Command-line entry point: fit, update, eval, sweep, tables, diagnose, generate.

Exit codes: 0 success, 1 usage / parse / I/O error, 2 numerical non-convergence.
Machine output goes to stdout (or --out); diagnostics go to stderr.

    python -m utils.uislab.cli tables 3-1
    python -m utils.uislab.cli sweep --rules fixtures/bsh3-upr.rules --seed 7 --format csv
"""

from __future__ import annotations

# ── Stdlib
import functools
import json
import logging
import sys
from pathlib import Path
from typing import Callable, Dict, List, Literal, Optional, Sequence, Tuple

# ── Third-party
import click
import pandas as pd
from pydantic import BaseModel, Field, model_validator

# ── Local
from utils.uislab import config
from utils.uislab.calculi import TSMLowerMode, UISKind, build_model
from utils.uislab.diagnostics import (
    PRIORS,
    TABLE_IDS,
    demorgan_audit,
    ignored_evidence_case,
    one_datum_diagnostic,
    rule_or_independence_check,
    standard_table,
)
from utils.uislab.errors import NotConverged, OuterLoopDiverged, UISLabError
from utils.uislab.families import FAMILIES, fixture_name, generate_family
from utils.uislab.formula import Atom, parse_formula
from utils.uislab.harness import rank_cases, run_sweep
from utils.uislab.joint import JointDistribution, marginal, probability
from utils.uislab.maxent import Marginal, mxe_update
from utils.uislab.reports import (
    bias_frame,
    demorgan_frame,
    ranking_frame,
    render,
    summary_frame,
    summary_json,
    trials_frame,
)
from utils.uislab.rulemodel import dump, fit_prior, load, serialize
from utils.uislab.schema import FamilyParams

logger = logging.getLogger(__name__)

FORMATS = ("text", "csv", "json")


# ╭─────────────────────────── Run configuration ───────────────────────────╮
class RunConfig(BaseModel):
    """Validated options shared by every command"""
    command: str
    inputs: List[str] = Field(default_factory=list, description="Rule / prior files")
    uis: List[UISKind] = Field(default_factory=lambda: [UISKind.MYC, UISKind.TSM, UISKind.CI])
    seed: Optional[int] = Field(None, ge=0)
    tol: float = Field(config.IPFP_TOL, gt=0)
    max_iters: int = Field(config.IPFP_MAX_ITERS, gt=0)
    fmt: Literal["text", "csv", "json"] = "text"
    out: Optional[str] = None

    @model_validator(mode="after")
    def _seed_for_sweep(self) -> "RunConfig":
        if self.command == "sweep" and self.seed is None:
            raise ValueError("sweep needs --seed")
        return self
# ╰─────────────────────────────────────────────────────────────────╯


# ╭─────────────────────────── Helpers ───────────────────────────╮
def _fail(message: str, code: int) -> None:
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def handle_errors(fn: Callable) -> Callable:
    """Map library errors onto the exit-code contract."""
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except NotConverged as exc:
            report = exc.report
            if report is not None:
                click.echo(report.model_dump_json(), err=True)
            _fail(str(exc), 2)
        except OuterLoopDiverged as exc:
            click.echo(json.dumps(exc.drift), err=True)
            _fail(str(exc), 2)
        except (UISLabError, OSError, ValueError) as exc:
            _fail(str(exc), 1)
    return wrapper


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
        logger.info("wrote %s", out)
    else:
        click.echo(text, nl=False)


def _split(text: str) -> List[str]:
    return [part.strip() for part in text.split(",") if part.strip()]


def parse_evidence(text: str) -> Dict[str, float]:
    """'A1=0.9,A2=0.1' -> {'A1': 0.9, 'A2': 0.1}"""
    evidence = {}
    for item in _split(text):
        name, sep, value = item.partition("=")
        if not sep:
            raise ValueError(f"evidence item {item!r} is not NAME=prob")
        p = float(value)
        if not 0.0 <= p <= 1.0:
            raise ValueError(f"evidence for {name.strip()!r} outside [0, 1]: {p!r}")
        evidence[name.strip()] = p
    return evidence


def parse_cf_pair(text: str) -> Tuple[float, float]:
    parts = [float(x) for x in _split(text)]
    if len(parts) != 2 or not all(-1.0 <= x <= 1.0 for x in parts):
        raise ValueError(f"CF pair {text!r} must be two numbers in [-1, 1]")
    return parts[0], parts[1]


def _load_prior(path: str) -> JointDistribution:
    return JointDistribution.from_json(Path(path).read_text(encoding="utf-8"))


def solver_options(fn: Callable) -> Callable:
    fn = click.option("--max-iters", type=int, default=config.IPFP_MAX_ITERS, show_default=True,
                      help="IPFP cycle cap")(fn)
    fn = click.option("--tol", type=float, default=config.IPFP_TOL, show_default=True,
                      help="IPFP residual tolerance")(fn)
    return fn


def output_options(fn: Callable) -> Callable:
    fn = click.option("--out", type=str, default=None, help="Write output here instead of stdout")(fn)
    fn = click.option("--format", "fmt", type=click.Choice(FORMATS), default="text", show_default=True)(fn)
    return fn
# ╰─────────────────────────────────────────────────────────────────╯


class UISLabGroup(click.Group):
    """Usage errors exit 1 rather than click's default 2, which is reserved here."""

    def main(self, *args, **kwargs):
        kwargs["standalone_mode"] = False
        try:
            return super().main(*args, **kwargs)
        except click.ClickException as exc:
            exc.show()
            sys.exit(1)
        except click.Abort:
            click.echo("Aborted!", err=True)
            sys.exit(1)


@click.group(cls=UISLabGroup)
@click.option("-v", "--verbose", count=True, help="-v for progress, -vv for solver traces")
def cli(verbose: int) -> None:
    """Compare MYC, TSM and CI against minimum cross-entropy inference."""
    level = {0: config.LOG_LEVEL, 1: "INFO"}.get(verbose, "DEBUG")
    logging.basicConfig(level=level, stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")


# ╭─────────────────────────── fit / update / eval ───────────────────────────╮
@cli.command()
@click.option("--rules", required=True, type=str, help="Rule-set file")
@click.option("--out", type=str, default=None, help="Write the prior JSON here instead of stdout")
@solver_options
@handle_errors
def fit(rules: str, out: Optional[str], tol: float, max_iters: int) -> None:
    """Fit the ME prior of a rule set; prints {"props", "atoms", "fit"} JSON."""
    cfg = RunConfig(command="fit", inputs=[rules], tol=tol, max_iters=max_iters, out=out)
    rs = load(rules)
    prior, report = fit_prior(rs, tol=cfg.tol, max_iters=cfg.max_iters)
    logger.info("fit: %d cycles, residual %.3g", report.iterations, report.max_residual)
    payload = {**json.loads(prior.to_json()), "fit": report.model_dump()}
    _emit(json.dumps(payload) + "\n", cfg.out)


@cli.command()
@click.option("--prior", "prior_path", required=True, type=str, help="Prior JSON from `fit`")
@click.option("--evidence", required=True, type=str, help="NAME=prob,...")
@click.option("--query", "queries", multiple=True, required=True, help="Formula to report (repeatable)")
@solver_options
@output_options
@handle_errors
def update(prior_path: str, evidence: str, queries: Sequence[str], tol: float, max_iters: int,
           fmt: str, out: Optional[str]) -> None:
    """MXE-update a prior on leaf evidence and print query probabilities."""
    cfg = RunConfig(command="update", inputs=[prior_path], tol=tol, max_iters=max_iters, fmt=fmt, out=out)
    prior = _load_prior(prior_path)
    constraints = [Marginal(Atom(name), p) for name, p in parse_evidence(evidence).items()]
    posterior, report = mxe_update(prior, constraints, tol=cfg.tol, max_iters=cfg.max_iters)
    logger.info("update converged in %d cycles", report.iterations)
    rows = []
    for text in queries:
        f = parse_formula(text)
        rows.append({"query": str(f), "prior": probability(prior, f), "posterior": probability(posterior, f)})
    _emit(render(pd.DataFrame(rows), cfg.fmt, digits=6), cfg.out)


@cli.command("eval")
@click.option("--rules", required=True, type=str, help="Rule-set file")
@click.option("--evidence", required=True, type=str, help="Leaf posteriors NAME=prob,...")
@click.option("--prior", "prior_path", type=str, default=None, help="Prior JSON (fitted when omitted)")
@click.option("--uis", "uis_text", default="myc,tsm,ci", show_default=True)
@click.option("--tsm-lower", type=click.Choice([m.value for m in TSMLowerMode]), default="declared",
              show_default=True)
@solver_options
@output_options
@handle_errors
def evaluate(rules: str, evidence: str, prior_path: Optional[str], uis_text: str, tsm_lower: str,
             tol: float, max_iters: int, fmt: str, out: Optional[str]) -> None:
    """Consequent posteriors under MXE and each UIS for one evidence set."""
    cfg = RunConfig(command="eval", inputs=[rules], uis=_split(uis_text), tol=tol, max_iters=max_iters,
                    fmt=fmt, out=out)
    rs = load(rules)
    prior = _load_prior(prior_path) if prior_path else fit_prior(rs, tol=cfg.tol, max_iters=cfg.max_iters)[0]
    leaf_posteriors = parse_evidence(evidence)
    posterior, _ = mxe_update(
        prior, [Marginal(Atom(n), p) for n, p in leaf_posteriors.items()], tol=cfg.tol, max_iters=cfg.max_iters
    )
    model = build_model(rs, prior, TSMLowerMode(tsm_lower))
    results = {u: model.evaluate(u, leaf_posteriors) for u in cfg.uis}
    rows = []
    for c in rs.consequents:
        row = {"consequent": c, "p0": marginal(prior, c), "mxe": marginal(posterior, c)}
        row.update({u.value: results[u][c] for u in cfg.uis})
        rows.append(row)
    _emit(render(pd.DataFrame(rows), cfg.fmt, digits=6), cfg.out)
# ╰─────────────────────────────────────────────────────────────────╯


# ╭─────────────────────────── sweep ───────────────────────────╮
@cli.command()
@click.option("--rules", "rule_files", multiple=True, required=True, help="Rule-set file (repeatable)")
@click.option("--uis", "uis_text", default="myc,tsm,ci", show_default=True)
@click.option("--seed", type=int, default=None, help="Master seed (required)")
@click.option("--levels", default=",".join(str(x) for x in config.DEFAULT_LEVELS), show_default=True)
@click.option("--jitter", type=float, default=config.DEFAULT_JITTER, show_default=True)
@click.option("--workers", type=int, default=config.SWEEP_WORKERS, show_default=True)
@click.option("--tsm-lower", type=click.Choice([m.value for m in TSMLowerMode]), default="declared",
              show_default=True)
@solver_options
@output_options
@handle_errors
def sweep(rule_files: Sequence[str], uis_text: str, seed: Optional[int], levels: str, jitter: float,
          workers: int, tsm_lower: str, tol: float, max_iters: int, fmt: str, out: Optional[str]) -> None:
    """
    Score each UIS against MXE over the 4^n input grid.

    csv lists every trial; json gives one summary per (case, UIS); text adds
    the best / worst case ranking when several rule files are given.
    """
    cfg = RunConfig(command="sweep", inputs=list(rule_files), uis=_split(uis_text), seed=seed, tol=tol,
                    max_iters=max_iters, fmt=fmt, out=out)
    grid_levels = [float(x) for x in _split(levels)]
    all_reports = []
    trial_frames = []
    for path in cfg.inputs:
        rs = load(path)
        reports = run_sweep(
            rs, cfg.uis, cfg.seed, case=Path(path).stem, levels=grid_levels, jitter=jitter,
            workers=workers, tsm_lower=TSMLowerMode(tsm_lower), tol=cfg.tol, max_iters=cfg.max_iters,
        )
        all_reports.extend(reports.values())
        trial_frames.append(trials_frame(reports))

    if cfg.fmt == "csv":
        text = render(pd.concat(trial_frames, ignore_index=True), "csv")
    elif cfg.fmt == "json":
        text = summary_json(all_reports)
    else:
        text = render(summary_frame(all_reports), "text")
        if len(cfg.inputs) > 1:
            text += "\n" + render(ranking_frame(rank_cases(all_reports)), "text")
    _emit(text, cfg.out)
# ╰─────────────────────────────────────────────────────────────────╯


# ╭─────────────────────────── tables / diagnose / generate ───────────────────────────╮
@cli.command()
@click.argument("table_id", type=click.Choice(TABLE_IDS + ("all",)))
@output_options
@handle_errors
def tables(table_id: str, fmt: str, out: Optional[str]) -> None:
    """Emit the MYC-vs-MXE comparison tables with their built-in priors."""
    ids = TABLE_IDS if table_id == "all" else (table_id,)
    if fmt == "text":
        text = "".join(f"Table {t}\n{render(bias_frame(standard_table(t)), 'text')}\n" for t in ids)
    else:
        frames = [bias_frame(standard_table(t)).assign(table=t) for t in ids]
        text = render(pd.concat(frames, ignore_index=True), fmt)
    _emit(text, out)


@cli.command()
@click.argument("check", type=click.Choice(["demorgan", "one-datum", "rule-or", "ignored-evidence"]))
@click.option("--prior", "prior_name", type=click.Choice(list(PRIORS)), default="independent", show_default=True)
@click.option("--cf", "cf_pairs", multiple=True, help="CF pair 'x,y' (repeatable; default a 9x9 grid)")
@click.option("--mode", type=click.Choice(["and", "or"]), default="and", show_default=True)
@click.option("--engine", type=click.Choice(["rule-or", "mxe"]), default="rule-or", show_default=True)
@click.option("--samples", type=int, default=100_000, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--inputs", "n_inputs", type=int, default=3, show_default=True)
@output_options
@handle_errors
def diagnose(check: str, prior_name: str, cf_pairs: Sequence[str], mode: str, engine: str, samples: int,
             seed: int, n_inputs: int, fmt: str, out: Optional[str]) -> None:
    """DeMorgan audit, one-datum equivalence, rule-or identities, ignored evidence."""
    prior = PRIORS[prior_name]
    grid = [-1.0, -0.75, -0.5, -0.25, 0.0, 0.25, 0.5, 0.75, 1.0]
    if cf_pairs:
        pairs = [parse_cf_pair(p) for p in cf_pairs]
    elif check == "demorgan":
        # rule-or cannot combine +1 with -1
        pairs = [(x, y) for x in grid for y in grid if abs(x) < 1.0 and abs(y) < 1.0]
    else:
        pairs = [(x, y) for x in grid for y in grid]

    if check == "demorgan":
        report = demorgan_audit(prior, pairs, engine)
        text = render(demorgan_frame(report), fmt, digits=6)
        click.echo(f"max discrepancy ({engine}): {report.max_discrepancy:.3g}", err=True)
    elif check == "one-datum":
        rows = [one_datum_diagnostic(prior, pair, mode).model_dump() for pair in pairs]
        text = render(pd.DataFrame(rows), fmt, digits=6)
        click.echo(f"{sum(r['holds'] for r in rows)}/{len(rows)} equivalences hold", err=True)
    elif check == "rule-or":
        text = render(pd.DataFrame([rule_or_independence_check(samples, seed).model_dump()]), fmt)
    else:
        text = render(pd.DataFrame([ignored_evidence_case(n_inputs).model_dump()]), fmt, digits=6)
    _emit(text, out)


@cli.command()
@click.argument("family", type=click.Choice(list(FAMILIES) + ["all"]))
@click.option("--out-dir", type=str, default=None, help="Write <family>.rules files here")
@click.option("--upper", type=float, default=0.8, show_default=True)
@click.option("--lower", type=float, default=-0.3, show_default=True)
@click.option("--forced-lower", type=float, default=-0.8, show_default=True, help="Lower strength on cnd-ind cases")
@click.option("--leaf-prior", type=float, default=0.5, show_default=True)
@click.option("--correlation", type=float, default=0.9, show_default=True)
@handle_errors
def generate(family: str, out_dir: Optional[str], upper: float, lower: float, forced_lower: float,
             leaf_prior: float, correlation: float) -> None:
    """Write rule-set families as rule files."""
    params = FamilyParams(
        upper=upper, lower=lower, forced_lower=forced_lower, leaf_prior=leaf_prior, correlation=correlation
    )
    names = list(FAMILIES) if family == "all" else [family]
    if out_dir is None:
        if len(names) > 1:
            raise click.UsageError("'all' needs --out-dir")
        click.echo(serialize(generate_family(family, params)), nl=False)
        return
    Path(out_dir).mkdir(parents=True, exist_ok=True)
    for name in names:
        path = Path(out_dir) / f"{fixture_name(name)}.rules"
        lower = params.forced_lower if name.startswith("cnd-ind") else params.lower
        header = f"{name}: upper cf {params.upper}, lower cf {lower}, leaf priors {params.leaf_prior}"
        dump(generate_family(name, params), path, header=header)
        click.echo(str(path), err=True)
# ╰─────────────────────────────────────────────────────────────────╯


def main() -> None:
    cli()


if __name__ == "__main__":
    main()
