"""
Command-line interface.

Subcommands ``stats``, ``fit``, ``scores`` read an interval CSV and write
``report.json`` (plus ``loadings.csv``, ``scores.csv`` and ``factors.svg``
where relevant) into ``--out``.  ``synth`` generates a reference-case dataset.

Exit codes: 0 ok, 2 input error, 3 numerical failure, 4 non-convergence
(results are still written).
"""

from __future__ import annotations

import csv
import hashlib
import logging
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

import click
import numpy as np

from . import __version__
from .core import DistributionModel, IntervalDataset, column_moments, standardize
from .errors import (
    DegenerateVariableError,
    GenerationError,
    IntervalFAError,
    NumericalError,
)
from .factor import ExtractionMethod, FactorModel, extract, kaiser_count
from .io import emit_csv, ingest_csv, write_json
from .plot import write_factor_plane
from .scores import CORRELATION_TARGET, FactorScores, OptConfig, estimate_anderson_rubin, estimate_bartlett
from .stats import CovDef, SymbolicSummary, correlation_matrix
from .synth import EXPECTED_FACTOR_COUNTS, ModePolicy, SynthConfig, case_spec, generate_dataset

log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_NUMERIC = 3
EXIT_NOT_CONVERGED = 4

SCORE_METHODS = ("none", "bartlett", "anderson-rubin")


@dataclass
class RunReport:
    """Everything a pipeline run produced, plus the settings that produced it."""

    config: dict
    data: IntervalDataset
    summary: SymbolicSummary
    model_fit: FactorModel | None = None
    scores: FactorScores | None = None
    timings: dict = field(default_factory=dict)

    @property
    def converged(self) -> bool:
        ok = self.model_fit is None or self.model_fit.converged
        if self.scores is not None:
            ok = ok and self.scores.all_converged
            if self.scores.method == "anderson-rubin":
                ok = ok and self.scores.max_abs_correlation <= CORRELATION_TARGET
        return ok

    def to_dict(self) -> dict:
        s = self.summary
        out = {
            "tool": "intervalfa",
            "version": __version__,
            "config": self.config,
            "data": {"n": self.data.n, "p": self.data.p, "variables": list(self.data.names), "has_mode": self.data.has_mode},
            "summary": {
                "model": s.model.value,
                "covdef": s.covdef.value,
                "means": s.means,
                "variances": s.variances,
                "covariance": s.covariance,
                "correlation": s.correlation,
            },
            "factor_model": None,
            "scores": None,
        }
        fm = self.model_fit
        if fm is not None:
            out["factor_model"] = {
                "method": fm.method.value,
                "n_factors": fm.n_factors,
                "eigenvalues": fm.eigenvalues,
                "kaiser_count": kaiser_count(np.linalg.eigvalsh(s.correlation)),
                "loadings": fm.loadings,
                "communalities": fm.communalities,
                "specific_variances": fm.specific_variances,
                "cumulative_explained": fm.cumulative_explained,
                "converged": fm.converged,
                "iterations": fm.iterations,
            }
        sc = self.scores
        if sc is not None:
            entry = {
                "method": sc.method,
                "model": sc.model.value,
                "objective": sc.objective,
                "penalty": sc.penalty,
                "penalty_term": sc.penalty_term,
                "converged": sc.all_converged,
                "units_not_converged": int(np.sum(~np.asarray(sc.converged))) if sc.converged.ndim else int(not sc.converged),
                "max_abs_correlation": sc.max_abs_correlation if sc.m > 1 else None,
            }
            means, variances = column_moments(sc.to_dataset(), sc.model)
            entry["score_means"] = means
            entry["score_variances"] = variances
            out["scores"] = entry
        return out


def _sha256(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _resolve_factors(factors: str, R) -> int:
    if factors == "auto":
        return max(1, kaiser_count(np.linalg.eigvalsh(R)))
    try:
        k = int(factors)
    except ValueError:
        raise click.BadParameter(f"expected 'auto' or an integer, got {factors!r}", param_hint="--factors") from None
    return k


def run_pipeline(
    data: IntervalDataset,
    model="uniform",
    covdef="cov3",
    extract_method: str | None = None,
    factors: str = "auto",
    scores: str = "none",
    opt: OptConfig | None = None,
    config: dict | None = None,
) -> RunReport:
    """Moments and correlations, then optionally factors, then optionally scores."""
    model = DistributionModel.parse(model)
    covdef = CovDef.parse(covdef)
    opt = opt or OptConfig()
    timings = {}
    clock = time.perf_counter()

    def lap(name):
        nonlocal clock
        now = time.perf_counter()
        timings[name] = round((now - clock) * 1000.0, 3)
        clock = now

    summary = correlation_matrix(data, model, covdef)
    lap("stats")
    report = RunReport(config=dict(config or {}), data=data, summary=summary, timings=timings)
    if extract_method is None:
        return report
    m = _resolve_factors(factors, summary.correlation)
    report.model_fit = extract(summary.correlation, m, ExtractionMethod.parse(extract_method))
    lap("extract")
    if scores == "none":
        return report
    z = standardize(data, model)
    bart = estimate_bartlett(z, report.model_fit, model, opt)
    lap("bartlett")
    if scores == "bartlett":
        report.scores = bart
    else:
        report.scores = estimate_anderson_rubin(z, report.model_fit, model, opt, bartlett=bart)
        lap("anderson_rubin")
    return report


def _write_loadings(fm: FactorModel, names, path):
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["variable"] + [f"F{k + 1}" for k in range(fm.n_factors)] + ["communality", "specific_variance"])
        for j, name in enumerate(names):
            w.writerow([name] + [repr(float(v)) for v in fm.loadings[j]] + [repr(float(fm.communalities[j])), repr(float(fm.specific_variances[j]))])


def scores_dataset(sc: FactorScores, units=None) -> IntervalDataset:
    """Scores as a dataset with a mode column (the center under the symmetric laws)."""
    ds = sc.to_dataset(units=units)
    if ds.has_mode:
        return ds
    return IntervalDataset(ds.lower, ds.upper, sc.centers, names=ds.names, units=units)


def write_outputs(report: RunReport, out: Path) -> None:
    out.mkdir(parents=True, exist_ok=True)
    write_json(report.to_dict(), out / "report.json")
    write_json(report.timings, out / "timings.json")
    if report.model_fit is not None:
        _write_loadings(report.model_fit, report.data.names, out / "loadings.csv")
    sc = report.scores
    if sc is not None:
        emit_csv(scores_dataset(sc, report.data.units), out / "scores.csv")
        if sc.m >= 2:
            labels = report.data.units if report.data.units is not None and report.data.n <= 60 else None
            write_factor_plane(out / "factors.svg", sc.lower, sc.upper, labels=labels)


def _fail(code: int, message: str):
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _guarded(fn):
    """Map package exceptions onto exit codes."""

    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except (NumericalError, DegenerateVariableError, GenerationError) as exc:
            _fail(EXIT_NUMERIC, str(exc))
        except IntervalFAError as exc:
            _fail(EXIT_INPUT, str(exc))

    wrapper.__name__ = fn.__name__
    wrapper.__doc__ = fn.__doc__
    return wrapper


_model_opt = click.option("--model", type=click.Choice(["uniform", "symtri", "tri"]), default="uniform", show_default=True, help="Within-interval law.")
_covdef_opt = click.option("--covdef", type=click.Choice(["cov1", "cov2", "cov3"]), default="cov3", show_default=True)
_out_opt = click.option("--out", "out", type=click.Path(file_okay=False, path_type=Path), default=Path("out"), show_default=True, help="Output directory.")
_format_opt = click.option("--format", "fmt", type=click.Choice(["auto", "pairs", "triplets"]), default="auto", show_default=True, help="CSV column layout.")
_input_arg = click.argument("input_path", metavar="INPUT", type=click.Path(dir_okay=False, path_type=Path))


def _fit_options(default_scores):
    def deco(fn):
        for opt in reversed(
            [
                click.option("--extract", "extract_method", type=click.Choice(["pcf", "paf"]), default="paf", show_default=True),
                click.option("--factors", default="auto", show_default=True, help="'auto' (eigenvalues > 1) or a count."),
                click.option("--scores", "score_method", type=click.Choice(SCORE_METHODS), default=default_scores, show_default=True),
                click.option("--seed", type=int, default=0, show_default=True, help="Seed of the Anderson-Rubin restarts."),
                click.option("--restarts", type=click.IntRange(min=0), default=20, show_default=True),
                click.option("--penalty", type=click.FloatRange(min=0, min_open=True), default=None, help="Correlation penalty [default: 1e4 * n]."),
                click.option("--max-iter", type=click.IntRange(min=1), default=500, show_default=True),
                click.option("--tol", type=click.FloatRange(min=0, min_open=True), default=1e-8, show_default=True),
            ]
        ):
            fn = opt(fn)
        return fn

    return deco


def _load(input_path: Path, fmt: str, model: str) -> IntervalDataset:
    if not input_path.exists():
        raise click.BadParameter(f"no such file: {input_path}", param_hint="INPUT")
    data = ingest_csv(input_path, fmt)
    if DistributionModel.parse(model).needs_mode and not data.has_mode:
        raise click.UsageError("--model tri needs '<name>.mode' columns for every variable")
    log.info("read %d units x %d variables from %s", data.n, data.p, input_path)
    return data


def _finish(report: RunReport, out: Path) -> None:
    write_outputs(report, out)
    fm, sc = report.model_fit, report.scores
    parts = [f"n={report.data.n}", f"p={report.data.p}"]
    if fm is not None:
        parts.append(f"factors={fm.n_factors}")
        parts.append(f"explained={fm.cumulative_explained[-1]:.4f}")
    if sc is not None:
        parts.append(f"objective={sc.objective:.6g}")
        if sc.m > 1:
            parts.append(f"max_abs_score_corr={sc.max_abs_correlation:.3g}")
    click.echo(" ".join(parts))
    click.echo(f"wrote {out}")
    if not report.converged:
        _fail(EXIT_NOT_CONVERGED, "optimiser did not converge; results written anyway")


@click.group()
@click.version_option(__version__, prog_name="intervalfa")
@click.option("-v", "--verbose", is_flag=True, help="Log progress to stderr.")
def main(verbose):
    """Factor analysis of interval-valued data."""
    logging.basicConfig(level=logging.INFO if verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")


@main.command("stats")
@_input_arg
@_model_opt
@_covdef_opt
@_format_opt
@_out_opt
@_guarded
def cmd_stats(input_path, model, covdef, fmt, out):
    """Symbolic means, variances, covariances and correlations."""
    data = _load(input_path, fmt, model)
    config = {"command": "stats", "input": str(input_path), "input_sha256": _sha256(input_path), "format": fmt, "model": model, "covdef": covdef}
    _finish(run_pipeline(data, model, covdef, config=config), out)


def _analysis(command, input_path, model, covdef, fmt, out, extract_method, factors, score_method, seed, restarts, penalty, max_iter, tol):
    data = _load(input_path, fmt, model)
    opt = OptConfig(max_iter=max_iter, tol=tol, restarts=restarts, penalty=penalty, seed=seed)
    config = {
        "command": command,
        "input": str(input_path),
        "input_sha256": _sha256(input_path),
        "format": fmt,
        "model": model,
        "covdef": covdef,
        "extract": extract_method,
        "factors": factors,
        "scores": score_method,
        "seed": seed,
        "restarts": restarts,
        "penalty": opt.penalty_for(data.n),
        "max_iter": max_iter,
        "tol": tol,
    }
    report = run_pipeline(data, model, covdef, extract_method, factors, score_method, opt, config)
    _finish(report, out)


@main.command("fit")
@_input_arg
@_model_opt
@_covdef_opt
@_format_opt
@_out_opt
@_fit_options("none")
@_guarded
def cmd_fit(input_path, model, covdef, fmt, out, **kw):
    """Extract interval factors (optionally with scores)."""
    _analysis("fit", input_path, model, covdef, fmt, out, **kw)


@main.command("scores")
@_input_arg
@_model_opt
@_covdef_opt
@_format_opt
@_out_opt
@_fit_options("bartlett")
@_guarded
def cmd_scores(input_path, model, covdef, fmt, out, **kw):
    """Extract factors and estimate interval-valued factor scores."""
    _analysis("scores", input_path, model, covdef, fmt, out, **kw)


@main.command("synth")
@click.option("--case", "case_id", type=click.IntRange(1, 6), required=True, help="Reference block structure.")
@click.option("--n", "n", type=click.IntRange(min=2), default=100, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@_model_opt
@click.option("--mode-policy", type=click.Choice([p.value for p in ModePolicy]), default=None, help="[default: random for tri, none otherwise]")
@click.option("--extract", "extract_method", type=click.Choice(["pcf", "paf"]), default="paf", show_default=True)
@_out_opt
@_guarded
def cmd_synth(case_id, n, seed, model, mode_policy, extract_method, out):
    """Generate a reference-case dataset and count its factors."""
    model_ = DistributionModel.parse(model)
    policy = ModePolicy(mode_policy) if mode_policy else (ModePolicy.RANDOM if model_.needs_mode else ModePolicy.NONE)
    if model_.needs_mode and policy is ModePolicy.NONE:
        raise click.UsageError("--model tri needs a mode policy other than 'none'")
    spec_c, spec_r = case_spec(case_id)
    data = generate_dataset(SynthConfig(n, spec_c, spec_r, seed=seed, mode_policy=policy))
    out.mkdir(parents=True, exist_ok=True)
    emit_csv(data, out / "data.csv")
    config = {
        "command": "synth",
        "case": case_id,
        "n": n,
        "seed": seed,
        "model": model,
        "mode_policy": policy.value,
        "covdef": "cov3",
        "extract": extract_method,
        "factors": "auto",
    }
    report = run_pipeline(data, model_, "cov3", extract_method, "auto", "none", config=config)
    payload = report.to_dict()
    payload["case"] = {"id": case_id, "factor_count": report.model_fit.n_factors, "expected_factor_count": EXPECTED_FACTOR_COUNTS[case_id]}
    write_json(payload, out / "report.json")
    write_json(report.timings, out / "timings.json")
    _write_loadings(report.model_fit, data.names, out / "loadings.csv")
    click.echo(f"case={case_id} n={n} seed={seed} factors={report.model_fit.n_factors}")
    click.echo(f"wrote {out}")
    if not report.converged:
        _fail(EXIT_NOT_CONVERGED, "factor extraction did not converge; results written anyway")


if __name__ == "__main__":
    main()
