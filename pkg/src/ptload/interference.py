"""Stochastic per-sub-band interference power.

Each band's interference follows its own marginal law; cross-band dependence
is imposed with a Gaussian copula. One :class:`SampleMatrix` is drawn per run
and reused for every portfolio (common random numbers).

Random streams
--------------
Draws come from ``numpy.random.Philox`` bit generators keyed by
``SeedSequence(seed, spawn_key=(STREAM_INTERFERENCE, column))``: one
independent counter-based stream per sub-band column. A column's latent
normals therefore do not depend on how many other columns exist or on the
order in which columns are generated.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
from scipy import special, stats

from .errors import (
    EmptyTrace,
    NegativePower,
    NonNumericValue,
    NotPSD,
    ShapeMismatch,
    ValidationError,
)

STREAM_INTERFERENCE = 0
STREAM_PORTFOLIOS = 1

PSD_TOL = 1e-10

KINDS = ("constant", "lognormal", "gamma", "empirical")


def stream(seed: int, *key: int) -> np.random.Generator:
    """Named, seeded Philox stream; ``key`` selects the sub-stream."""
    if isinstance(seed, bool) or not isinstance(seed, (int, np.integer)):
        raise ValidationError(f"seed must be an integer, got {seed!r}")
    if not 0 <= int(seed) < 2**64:
        raise ValidationError(f"seed must fit in an unsigned 64-bit integer, got {seed}")
    ss = np.random.SeedSequence(int(seed), spawn_key=tuple(key))
    return np.random.Generator(np.random.Philox(ss))


@dataclass(frozen=True)
class InterferenceMarginal:
    """Marginal law of one band's interference power (watts).

    Use the ``constant``/``lognormal``/``gamma``/``empirical`` constructors.
    """

    kind: str
    params: tuple = ()
    samples: tuple = field(default=(), repr=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValidationError(f"unknown interference kind {self.kind!r}; expected one of {KINDS}")
        p = self.params
        if self.kind == "constant":
            (level,) = p
            if not (math.isfinite(level) and level >= 0):
                raise ValidationError(f"constant level must be finite and >= 0, got {level!r}")
        elif self.kind == "lognormal":
            log_mean, log_sd = p
            if not math.isfinite(log_mean):
                raise ValidationError(f"lognormal log_mean must be finite, got {log_mean!r}")
            if not (math.isfinite(log_sd) and log_sd > 0):
                raise ValidationError(f"lognormal log_sd must be finite and > 0, got {log_sd!r}")
        elif self.kind == "gamma":
            shape, scale = p
            if not (math.isfinite(shape) and shape > 0):
                raise ValidationError(f"gamma shape must be finite and > 0, got {shape!r}")
            if not (math.isfinite(scale) and scale > 0):
                raise ValidationError(f"gamma scale must be finite and > 0, got {scale!r}")
        else:
            if len(self.samples) == 0:
                raise EmptyTrace("empirical marginal needs at least one sample")
            arr = np.asarray(self.samples, dtype=float)
            if not np.all(np.isfinite(arr)):
                raise ValidationError("empirical samples must be finite")
            if np.any(arr < 0):
                raise NegativePower("empirical samples must be >= 0")

    @classmethod
    def constant(cls, level: float) -> InterferenceMarginal:
        return cls("constant", (float(level),))

    @classmethod
    def lognormal(cls, log_mean: float, log_sd: float) -> InterferenceMarginal:
        return cls("lognormal", (float(log_mean), float(log_sd)))

    @classmethod
    def gamma(cls, shape: float, scale: float) -> InterferenceMarginal:
        return cls("gamma", (float(shape), float(scale)))

    @classmethod
    def empirical(cls, samples: Iterable[float]) -> InterferenceMarginal:
        return cls("empirical", (), tuple(float(s) for s in samples))

    def ppf(self, z: np.ndarray) -> np.ndarray:
        """Map standard-normal latents ``z`` to interference powers."""
        if self.kind == "constant":
            return np.full(z.shape, self.params[0])
        if self.kind == "lognormal":
            log_mean, log_sd = self.params
            return np.exp(log_mean + log_sd * z)
        if self.kind == "gamma":
            shape, scale = self.params
            # upper tail via isf so large latents do not round to u == 1 (ppf -> inf)
            lower = stats.gamma.ppf(special.ndtr(z), shape, scale=scale)
            upper = stats.gamma.isf(special.ndtr(-z), shape, scale=scale)
            return np.where(z > 0, upper, lower)
        u = special.ndtr(z)
        ordered = np.sort(np.asarray(self.samples, dtype=float))
        idx = np.minimum((u * ordered.size).astype(np.int64), ordered.size - 1)
        return ordered[idx]

    def cdf(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if self.kind == "constant":
            return (x >= self.params[0]).astype(float)
        if self.kind == "lognormal":
            log_mean, log_sd = self.params
            return stats.lognorm.cdf(x, log_sd, scale=math.exp(log_mean))
        if self.kind == "gamma":
            shape, scale = self.params
            return stats.gamma.cdf(x, shape, scale=scale)
        ordered = np.sort(np.asarray(self.samples, dtype=float))
        return np.searchsorted(ordered, x, side="right") / ordered.size


def interference_moments(marginal: InterferenceMarginal) -> tuple[float, float]:
    """Mean and variance (population moments for empirical traces)."""
    if marginal.kind == "constant":
        return marginal.params[0], 0.0
    if marginal.kind == "lognormal":
        mu, s = marginal.params
        mean = math.exp(mu + s * s / 2)
        return mean, math.expm1(s * s) * mean * mean
    if marginal.kind == "gamma":
        k, theta = marginal.params
        return k * theta, k * theta * theta
    arr = np.asarray(marginal.samples, dtype=float)
    return float(arr.mean()), float(arr.var())


def _validate_correlation(corr: np.ndarray, m: int) -> np.ndarray:
    corr = np.asarray(corr, dtype=float)
    if corr.shape != (m, m):
        raise ValidationError(f"correlation must be {m}x{m}, got shape {corr.shape}")
    if not np.all(np.isfinite(corr)):
        raise ValidationError("correlation entries must be finite")
    bad = np.argwhere(np.abs(corr) > 1)
    if bad.size:
        i, j = bad[0]
        raise ValidationError(f"correlation[{i}][{j}] = {corr[i, j]} is outside [-1, 1]")
    if not np.array_equal(np.diag(corr), np.ones(m)):
        raise ValidationError("correlation diagonal must be exactly 1")
    if not np.array_equal(corr, corr.T):
        raise ValidationError("correlation must be symmetric")
    return corr


@dataclass(frozen=True)
class InterferenceModel:
    marginals: tuple
    correlation: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "marginals", tuple(self.marginals))
        if not self.marginals:
            raise ValidationError("interference model needs at least one marginal")
        corr = _validate_correlation(self.correlation, len(self.marginals))
        corr = corr.copy()
        corr.setflags(write=False)
        object.__setattr__(self, "correlation", corr)

    @property
    def m(self) -> int:
        return len(self.marginals)

    @classmethod
    def independent(cls, marginals: Sequence[InterferenceMarginal]) -> InterferenceModel:
        return cls(tuple(marginals), np.eye(len(marginals)))


def copula_factor(corr: np.ndarray) -> np.ndarray:
    """Matrix ``A`` with ``A @ A.T == corr`` for a PSD correlation matrix.

    Uses an eigendecomposition so singular (e.g. perfectly correlated) matrices
    are accepted.

    Raises:
        NotPSD: if the smallest eigenvalue is below ``-1e-10``.
    """
    vals, vecs = np.linalg.eigh(corr)
    if vals.min() < -PSD_TOL:
        raise NotPSD(f"correlation matrix is not positive semi-definite (min eigenvalue {vals.min():.3e})")
    return vecs * np.sqrt(np.clip(vals, 0.0, None))


@dataclass(frozen=True)
class SampleMatrix:
    draws: np.ndarray  # (n, m), watts
    seed: int

    def __post_init__(self):
        d = np.ascontiguousarray(self.draws, dtype=float)
        if d.ndim != 2:
            raise ShapeMismatch(f"sample matrix must be 2-D, got {d.ndim}-D")
        if not np.all(np.isfinite(d)) or np.any(d < 0):
            raise ValidationError("interference samples must be finite and >= 0")
        d.setflags(write=False)
        object.__setattr__(self, "draws", d)

    @property
    def n(self) -> int:
        return self.draws.shape[0]

    @property
    def m(self) -> int:
        return self.draws.shape[1]


def latent_normals(model: InterferenceModel, n_draws: int, seed: int) -> np.ndarray:
    """Correlated standard normals, shape ``(n_draws, m)``."""
    if isinstance(n_draws, bool) or not isinstance(n_draws, (int, np.integer)) or n_draws < 1:
        raise ValidationError(f"n_draws must be a positive integer, got {n_draws!r}")
    factor = copula_factor(model.correlation)
    indep = np.empty((n_draws, model.m))
    for col in range(model.m):
        indep[:, col] = stream(seed, STREAM_INTERFERENCE, col).standard_normal(n_draws)
    if np.array_equal(model.correlation, np.eye(model.m)):
        return indep
    return indep @ factor.T


def sample_interference(model: InterferenceModel, n_draws: int, seed: int) -> SampleMatrix:
    z = latent_normals(model, n_draws, seed)
    draws = np.empty_like(z)
    for col, marginal in enumerate(model.marginals):
        draws[:, col] = marginal.ppf(z[:, col])
    return SampleMatrix(draws, int(seed))


def _read_rows(source) -> list[tuple[int, list[str]]]:
    if isinstance(source, (str, Path)):
        with open(source, newline="") as fh:
            rows = list(csv.reader(fh))
    else:
        rows = [list(map(str, row)) for row in source]
    return [(i + 1, row) for i, row in enumerate(rows) if any(cell.strip() for cell in row)]


def load_empirical(source, column: int, header: bool = False) -> InterferenceMarginal:
    """Build an empirical marginal from one column of a CSV trace.

    ``source`` is a path or an iterable of rows. Values are watts, one row per
    draw, one column per sub-band.
    """
    rows = _read_rows(source)
    where = str(source) if isinstance(source, (str, Path)) else "<rows>"
    if header and rows:
        rows = rows[1:]
    if not rows:
        raise EmptyTrace(f"{where}: trace has no data rows")
    values = []
    for line, row in rows:
        if column < 0 or column >= len(row):
            raise ValidationError(f"{where}:{line}: column {column} not present")
        cell = row[column].strip()
        try:
            value = float(cell)
        except ValueError:
            raise NonNumericValue(f"{where}:{line}: column {column}: {cell!r} is not numeric") from None
        if not math.isfinite(value):
            raise NonNumericValue(f"{where}:{line}: column {column}: {cell!r} is not finite")
        if value < 0:
            raise NegativePower(f"{where}:{line}: column {column}: negative power {value}")
        values.append(value)
    return InterferenceMarginal.empirical(values)
