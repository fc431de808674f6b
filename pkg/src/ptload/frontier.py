"""Efficient frontier on the mean-SD plane and max-mean refinement."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import AllBandsUnusable, EmptyCloud, NonFinite, ValidationError, ZeroBaseline
from .interference import InterferenceModel, SampleMatrix
from .portfolio import EvaluatedPortfolio, Portfolio, mean_throughput
from .radio import LinkScenario


@dataclass(frozen=True)
class FrontierResult:
    cloud: tuple
    frontier: tuple  # ascending SD, strictly increasing mean
    max_mean: EvaluatedPortfolio
    min_sd: EvaluatedPortfolio

    @property
    def frontier_ids(self) -> frozenset:
        return frozenset(e.id for e in self.frontier)


def dominates(a: EvaluatedPortfolio, b: EvaluatedPortfolio) -> bool:
    """``a`` has mean >= and SD <= ``b``'s with at least one strict."""
    return a.mean >= b.mean and a.sd <= b.sd and (a.mean > b.mean or a.sd < b.sd)


def efficient_frontier(cloud: Sequence[EvaluatedPortfolio]) -> FrontierResult:
    """Upper-left boundary of the cloud.

    Sort by (SD asc, mean desc, id asc) and keep each point whose mean
    strictly beats every point before it. Exact (mean, SD) duplicates keep
    the lowest id.
    """
    cloud = tuple(cloud)
    if not cloud:
        raise EmptyCloud("cannot extract a frontier from an empty cloud")
    ordered = sorted(cloud, key=lambda e: (e.sd, -e.mean, e.id))
    frontier = []
    best = -math.inf
    for e in ordered:
        if e.mean > best:
            frontier.append(e)
            best = e.mean
    return FrontierResult(cloud=cloud, frontier=tuple(frontier), max_mean=frontier[-1], min_sd=frontier[0])


def select_max_mean(f: FrontierResult) -> EvaluatedPortfolio:
    if not f.frontier:
        raise EmptyCloud("frontier is empty")
    return f.frontier[-1]


def select_min_variance(f: FrontierResult) -> EvaluatedPortfolio:
    if not f.frontier:
        raise EmptyCloud("frontier is empty")
    return f.frontier[0]


def refine_max_mean(
    scenario: LinkScenario,
    samples: SampleMatrix,
    start: Portfolio,
    tol: float = 1e-7,
    max_iters: int = 10_000,
    initial_step: float = 0.125,
) -> Portfolio:
    """Derivative-free ascent of the sample-mean throughput over the simplex.

    Each iteration tries every pairwise transfer of ``min(step, w_i)`` weight
    from band ``i`` to band ``j`` and takes the best strict improvement. When
    none improves, the step halves; the search stops once a step of ``tol``
    finds nothing, or after ``max_iters`` iterations.
    """
    if not tol > 0:
        raise ValidationError(f"tol must be > 0, got {tol!r}")
    m = start.m
    w = np.asarray(start.weights, dtype=float)
    if m == 1:
        return start

    def objective(ws):
        vals = mean_throughput(ws, scenario, samples)
        if not np.all(np.isfinite(vals)):
            raise NonFinite("mean throughput evaluated to a non-finite value")
        return vals

    best = objective(w[None, :])[0]
    pairs = [(i, j) for i in range(m) for j in range(m) if i != j]
    step = max(initial_step, tol)
    for _ in range(max_iters):
        cands = []
        for i, j in pairs:
            d = min(step, w[i])
            if d <= 0:
                continue
            c = w.copy()
            c[i] = 0.0 if d == w[i] else c[i] - d
            c[j] += d
            cands.append(c)
        if cands:
            vals = objective(np.asarray(cands))
            k = int(np.argmax(vals))
            if vals[k] > best:
                w, best = cands[k], vals[k]
                continue
        if step <= tol:
            break
        step = max(step / 2, tol)
    return Portfolio.from_array(w)


def _constant_levels(model: InterferenceModel) -> np.ndarray:
    levels = []
    for i, marg in enumerate(model.marginals):
        if marg.kind != "constant":
            raise ValidationError(f"water filling needs constant interference; band {i} is {marg.kind}")
        levels.append(marg.params[0])
    return np.asarray(levels)


def water_filling(scenario: LinkScenario, interference: InterferenceModel) -> Portfolio:
    """Closed-form optimum for deterministic parallel channels.

    Maximises ``sum_i W_i log2(1 + p_i / L_i)`` with ``L_i = (I_i + N_i) / g_i``:
    ``p_i = max(0, nu * W_i - L_i)``, ``nu`` fixed by the power budget via
    active-set elimination. With equal bandwidths this is the textbook
    ``p_i = max(0, nu - L_i)``.
    """
    if interference.m != scenario.m:
        raise ValidationError(f"interference has {interference.m} bands, scenario has {scenario.m}")
    levels = _constant_levels(interference)
    gains = scenario.gains
    usable = gains > 0
    if not usable.any():
        raise AllBandsUnusable("every sub-band has zero channel gain")
    bw = scenario.bandwidths / scenario.bandwidths.max()
    floor = np.full(scenario.m, np.inf)
    floor[usable] = (levels[usable] + scenario.noise_powers[usable]) / gains[usable]

    active = usable.copy()
    while True:
        nu = (scenario.total_power + floor[active].sum()) / bw[active].sum()
        p = np.where(active, nu * bw - floor, 0.0)
        if np.all(p[active] > 0) or active.sum() == 1:
            break
        # drop the band with the highest per-bandwidth floor
        ratio = np.where(active, floor / bw, -np.inf)
        active[int(np.argmax(ratio))] = False
    p = np.clip(p, 0.0, None)
    return Portfolio.from_array(p)


def improvement_ratio(candidate_mean: float, baseline_mean: float) -> float:
    """Percentage gain of ``candidate_mean`` over ``baseline_mean``."""
    if not baseline_mean > 0:
        raise ZeroBaseline(f"baseline mean must be > 0, got {baseline_mean!r}")
    return 100.0 * (candidate_mean - baseline_mean) / baseline_mean
