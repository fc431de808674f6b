"""End-to-end frontier runs and their persisted outputs."""

from __future__ import annotations

import json
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .errors import ComputeError, IoError, StageError
from .frontier import (
    FrontierResult,
    efficient_frontier,
    improvement_ratio,
    refine_max_mean,
)
from .interference import SampleMatrix, sample_interference
from .portfolio import (
    EvaluatedPortfolio,
    Portfolio,
    evaluate_many,
    evaluate_portfolio,
    sample_portfolios,
    single_band_portfolio,
)
from .scenario import ScenarioFile, scenario_to_dict

VARIANCE_NORMALISATION = "population (divide by N)"


@dataclass
class RunReport:
    scenario: ScenarioFile
    samples: SampleMatrix
    frontier: FrontierResult
    baselines: tuple  # EvaluatedPortfolio per band, ids follow the sampled cloud
    refined: EvaluatedPortfolio
    best_baseline: EvaluatedPortfolio
    improvement_pct: float
    sampled_improvement_pct: float
    elapsed_s: float

    @property
    def cloud(self) -> tuple:
        return self.frontier.cloud

    @property
    def baseline_ids(self) -> frozenset:
        return frozenset(b.id for b in self.baselines)


class _Stage:
    def __init__(self, name: str):
        self.name = name

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc, tb):
        if exc is not None and isinstance(exc, ComputeError) and not isinstance(exc, StageError):
            raise StageError(self.name, exc) from exc
        return False


def baseline_sweep(scenario: ScenarioFile, samples: SampleMatrix | None = None, first_id: int = 0) -> list:
    """Evaluate every single-band allocation."""
    if samples is None:
        samples = sample_interference(scenario.interference_model(), scenario.run.draws, scenario.run.seed)
    singles = [single_band_portfolio(scenario.m, i) for i in range(scenario.m)]
    return evaluate_many(singles, scenario.link_scenario(), samples, first_id=first_id)


def run_frontier(scenario: ScenarioFile) -> RunReport:
    """Sample interference once, evaluate random and single-band portfolios
    against it, extract the frontier and refine the max-mean allocation."""
    t0 = time.perf_counter()
    run = scenario.run
    with _Stage("interference"):
        link = scenario.link_scenario()
        samples = sample_interference(scenario.interference_model(), run.draws, run.seed)
    with _Stage("portfolios"):
        randoms = sample_portfolios(scenario.m, run.portfolios, run.seed)
        cloud = evaluate_many(randoms, link, samples)
    with _Stage("baselines"):
        baselines = baseline_sweep(scenario, samples, first_id=len(cloud))
    with _Stage("frontier"):
        result = efficient_frontier(cloud + baselines)
    with _Stage("refine"):
        refined_p = refine_max_mean(
            link, samples, result.max_mean.portfolio, tol=run.refine_tol, max_iters=run.refine_max_iters
        )
        refined = EvaluatedPortfolio(-1, refined_p, evaluate_portfolio(refined_p, link, samples))
        if refined.mean < result.max_mean.mean:
            # the ascent never accepts a worse point; guard against re-evaluation rounding
            refined = EvaluatedPortfolio(-1, result.max_mean.portfolio, result.max_mean.stats)
    with _Stage("improvement"):
        best = max(baselines, key=lambda e: (e.mean, -e.id))
        improvement = improvement_ratio(refined.mean, best.mean)
        sampled = improvement_ratio(result.max_mean.mean, best.mean)
    return RunReport(
        scenario=scenario,
        samples=samples,
        frontier=result,
        baselines=tuple(baselines),
        refined=refined,
        best_baseline=best,
        improvement_pct=improvement,
        sampled_improvement_pct=sampled,
        elapsed_s=time.perf_counter() - t0,
    )


def _portfolio_dict(e: EvaluatedPortfolio, with_bands: bool = True) -> dict:
    d = {
        "weights": list(e.portfolio.weights),
        "mean_bps": e.stats.mean,
        "sd_bps": e.stats.sd,
        "variance_bps2": e.stats.variance,
    }
    if e.id >= 0:
        d = {"id": e.id, **d}
    if with_bands:
        d["band_means_bps"] = list(e.stats.band_means)
        d["band_sds_bps"] = list(e.stats.band_sds)
        d["band_correlation"] = [list(r) for r in e.stats.band_correlation]
    return d


def report_to_dict(report: RunReport) -> dict:
    """JSON-ready report. Wall-clock timing is left out so that identical
    scenarios give byte-identical files."""
    s = report.scenario
    g = s.geometry
    f = report.frontier
    return {
        "tool": {"name": "ptload", "version": __version__},
        "scenario": scenario_to_dict(s),
        "geometry": {
            "bands": g.count,
            "subcarriers_per_band": g.subcarriers_per_band,
            "bandwidth_per_band_hz": g.bandwidth_per_band,
        },
        "seed": s.run.seed,
        "variance_normalisation": VARIANCE_NORMALISATION,
        "cloud": [
            {"id": e.id, "weights": list(e.portfolio.weights), "mean_bps": e.mean, "sd_bps": e.sd}
            for e in f.cloud
        ],
        "frontier_ids": [e.id for e in f.frontier],
        "max_mean": _portfolio_dict(f.max_mean),
        "min_sd": _portfolio_dict(f.min_sd),
        "refined_max_mean": _portfolio_dict(report.refined),
        "baselines": [_portfolio_dict(b) for b in report.baselines],
        "best_baseline_id": report.best_baseline.id,
        "improvement_pct": report.improvement_pct,
        "sampled_improvement_pct": report.sampled_improvement_pct,
    }


def write_report(report: RunReport, path: str | Path) -> None:
    _write(path, json.dumps(report_to_dict(report), indent=1, allow_nan=False) + "\n")


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def cloud_csv(report: RunReport) -> str:
    m = report.scenario.m
    header = ["id"] + [f"w_{i + 1}" for i in range(m)] + ["mean_bps", "sd_bps", "on_frontier", "is_single_band"]
    on_front = report.frontier.frontier_ids
    singles = report.baseline_ids
    lines = [",".join(header)]
    for e in sorted(report.cloud, key=lambda e: e.id):
        row = [str(e.id)] + [_fmt(w) for w in e.portfolio.weights]
        row += [_fmt(e.mean), _fmt(e.sd), str(int(e.id in on_front)), str(int(e.id in singles))]
        lines.append(",".join(row))
    return "\n".join(lines) + "\n"


def export_cloud(report: RunReport, path: str | Path) -> None:
    """One CSV row per evaluated portfolio (sampled + single-band), by id."""
    _write(path, cloud_csv(report))


def _write(path, text: str) -> None:
    try:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc.strerror}") from None


def summary_lines(report: RunReport) -> list[str]:
    """Human-readable summary; rates in Mbps with one decimal."""

    def mbps(x):
        return f"{x / 1e6:.1f} Mbps"

    def weights(p: Portfolio):
        return "[" + ", ".join(f"{w:.3f}" for w in p.weights) + "]"

    s = report.scenario
    f = report.frontier
    out = [
        f"scenario: {s.name or '(unnamed)'}  bands={s.m}  W={s.geometry.bandwidth_per_band / 1e6:g} MHz  "
        f"portfolios={s.run.portfolios}  draws={s.run.draws}  seed={s.run.seed}",
        f"frontier: {len(f.frontier)} of {len(f.cloud)} portfolios",
        f"max-mean (sampled): {weights(f.max_mean.portfolio)}  mean {mbps(f.max_mean.mean)}  SD {mbps(f.max_mean.sd)}",
        f"max-mean (refined): {weights(report.refined.portfolio)}  mean {mbps(report.refined.mean)}  "
        f"SD {mbps(report.refined.sd)}",
        f"min-SD:             {weights(f.min_sd.portfolio)}  mean {mbps(f.min_sd.mean)}  SD {mbps(f.min_sd.sd)}",
    ]
    for b in report.baselines:
        band = int(np.argmax(b.portfolio.weights)) + 1
        out.append(f"single band {band}: mean {mbps(b.mean)}  SD {mbps(b.sd)}")
    out.append(f"improvement over best single band: {report.improvement_pct:.1f}% "
               f"(sampled max-mean {report.sampled_improvement_pct:.1f}%)")
    out.append(f"elapsed: {report.elapsed_s:.2f} s")
    return out
