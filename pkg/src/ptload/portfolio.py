"""Power-allocation portfolios and their throughput statistics."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import IndexOutOfRange, ShapeMismatch, ValidationError
from .interference import STREAM_PORTFOLIOS, SampleMatrix, stream
from .radio import LinkScenario, band_rates

WEIGHT_SUM_TOL = 1e-12

# elements per evaluation block (portfolios x draws x bands)
_BLOCK_ELEMENTS = 1 << 22


@dataclass(frozen=True)
class Portfolio:
    """Normalised power weights; band ``i`` gets ``weights[i] * P_total``."""

    weights: tuple

    def __post_init__(self):
        w = tuple(float(x) for x in self.weights)
        if not w:
            raise ValidationError("portfolio needs at least one weight")
        if any(not math.isfinite(x) or x < 0 for x in w):
            raise ValidationError(f"portfolio weights must be finite and >= 0, got {w}")
        if abs(math.fsum(w) - 1.0) > WEIGHT_SUM_TOL:
            raise ValidationError(f"portfolio weights must sum to 1, got {math.fsum(w)!r}")
        object.__setattr__(self, "weights", w)

    @property
    def m(self) -> int:
        return len(self.weights)

    def powers(self, total_power: float) -> np.ndarray:
        return np.asarray(self.weights) * total_power

    @classmethod
    def from_array(cls, w: np.ndarray) -> Portfolio:
        """Build from a raw non-negative vector, renormalising to sum 1."""
        w = np.asarray(w, dtype=float)
        return cls(tuple(w / math.fsum(w)))


@dataclass(frozen=True)
class ThroughputStats:
    mean: float  # bit/s
    variance: float  # (bit/s)^2, population normalisation
    sd: float
    band_means: tuple
    band_sds: tuple
    band_correlation: tuple  # m x m, row-major nested tuples


@dataclass(frozen=True)
class EvaluatedPortfolio:
    id: int
    portfolio: Portfolio
    stats: ThroughputStats

    @property
    def mean(self) -> float:
        return self.stats.mean

    @property
    def sd(self) -> float:
        return self.stats.sd


def sample_portfolios(m: int, n: int, seed: int) -> list[Portfolio]:
    """``n`` portfolios uniform on the (m-1)-simplex (flat Dirichlet).

    Each is a vector of unit-rate exponentials divided by its sum.
    """
    if m < 1 or n < 1:
        raise ValidationError(f"need m >= 1 and n >= 1, got m={m}, n={n}")
    if m == 1:
        return [Portfolio((1.0,)) for _ in range(n)]
    e = stream(seed, STREAM_PORTFOLIOS).standard_exponential((n, m))
    return [Portfolio.from_array(row) for row in e]


def single_band_portfolio(m: int, band: int) -> Portfolio:
    if not 0 <= band < m:
        raise IndexOutOfRange(f"band index {band} out of range for {m} bands")
    w = [0.0] * m
    w[band] = 1.0
    return Portfolio(tuple(w))


def combine_variance(band_sds: Sequence[float], correlation) -> float:
    """Total variance from per-band SDs and their correlation matrix.

    Sum of the per-band variances plus ``sd_i * sd_j * rho_ij`` over all
    ordered pairs ``i != j``.
    """
    sds = np.asarray(band_sds, dtype=float)
    rho = np.asarray(correlation, dtype=float)
    m = sds.size
    if sds.ndim != 1 or rho.shape != (m, m):
        raise ShapeMismatch(f"band_sds has {m} entries but correlation has shape {rho.shape}")
    total = float(np.sum(sds * sds))
    for i in range(m):
        for j in range(m):
            if i != j:
                total += sds[i] * sds[j] * rho[i, j]
    return total


def _check_shapes(m_weights: int, scenario: LinkScenario, samples: SampleMatrix) -> None:
    if not (m_weights == scenario.m == samples.m):
        raise ShapeMismatch(
            f"band count mismatch: portfolio {m_weights}, scenario {scenario.m}, samples {samples.m}"
        )


def evaluate_weights(weights: np.ndarray, scenario: LinkScenario, samples: SampleMatrix) -> dict:
    """Batch evaluation of a ``(P, m)`` weight matrix.

    Returns arrays keyed ``mean``, ``variance``, ``band_means``, ``band_sds``,
    ``band_correlation`` with leading axis ``P``.
    """
    weights = np.atleast_2d(np.asarray(weights, dtype=float))
    n_port, m = weights.shape
    _check_shapes(m, scenario, samples)
    bw, gains, noise = scenario.bandwidths, scenario.gains, scenario.noise_powers
    draws = samples.draws
    n = samples.n

    out_mean = np.empty(n_port)
    out_var = np.empty(n_port)
    out_bmean = np.empty((n_port, m))
    out_bsd = np.empty((n_port, m))
    out_corr = np.empty((n_port, m, m))

    block = max(1, _BLOCK_ELEMENTS // (n * m))
    for start in range(0, n_port, block):
        stop = min(start + block, n_port)
        powers = weights[start:stop, None, :] * scenario.total_power
        rates = band_rates(powers, bw, gains, noise, draws[None, :, :])  # (b, n, m)

        total = rates.sum(axis=2)
        out_mean[start:stop] = total.mean(axis=1)
        # two-pass moments on data shifted by the first draw: constant series
        # give exactly zero deviations
        t_shift = total - total[:, :1]
        t_dev = t_shift - t_shift.mean(axis=1)[:, None]
        out_var[start:stop] = np.einsum("bn,bn->b", t_dev, t_dev) / n

        b_mean = rates.mean(axis=1)
        shifted = rates - rates[:, :1, :]
        dev = shifted - shifted.mean(axis=1)[:, None, :]
        cov = np.einsum("bni,bnj->bij", dev, dev) / n
        b_var = np.einsum("bii->bi", cov).copy()
        b_sd = np.sqrt(b_var)
        denom = b_sd[:, :, None] * b_sd[:, None, :]
        with np.errstate(invalid="ignore", divide="ignore"):
            corr = np.where(denom > 0, cov / denom, 0.0)
        corr = np.clip(corr, -1.0, 1.0)
        idx = np.arange(m)
        corr[:, idx, idx] = 1.0

        out_bmean[start:stop] = b_mean
        out_bsd[start:stop] = b_sd
        out_corr[start:stop] = corr

    return {
        "mean": out_mean,
        "variance": out_var,
        "band_means": out_bmean,
        "band_sds": out_bsd,
        "band_correlation": out_corr,
    }


def _stats_at(batch: dict, k: int) -> ThroughputStats:
    var = float(batch["variance"][k])
    return ThroughputStats(
        mean=float(batch["mean"][k]),
        variance=var,
        sd=math.sqrt(var),
        band_means=tuple(float(x) for x in batch["band_means"][k]),
        band_sds=tuple(float(x) for x in batch["band_sds"][k]),
        band_correlation=tuple(tuple(float(x) for x in row) for row in batch["band_correlation"][k]),
    )


def evaluate_portfolio(p: Portfolio, scenario: LinkScenario, samples: SampleMatrix) -> ThroughputStats:
    """Monte Carlo throughput statistics of one portfolio over the shared draws."""
    _check_shapes(p.m, scenario, samples)
    return _stats_at(evaluate_weights(np.asarray([p.weights]), scenario, samples), 0)


def evaluate_many(
    portfolios: Sequence[Portfolio],
    scenario: LinkScenario,
    samples: SampleMatrix,
    first_id: int = 0,
) -> list[EvaluatedPortfolio]:
    if not portfolios:
        return []
    for p in portfolios:
        _check_shapes(p.m, scenario, samples)
    batch = evaluate_weights(np.asarray([p.weights for p in portfolios]), scenario, samples)
    return [
        EvaluatedPortfolio(first_id + k, p, _stats_at(batch, k)) for k, p in enumerate(portfolios)
    ]


def mean_throughput(weights: np.ndarray, scenario: LinkScenario, samples: SampleMatrix) -> np.ndarray:
    """Sample-mean objective only; cheaper than :func:`evaluate_weights`."""
    weights = np.atleast_2d(np.asarray(weights, dtype=float))
    _check_shapes(weights.shape[1], scenario, samples)
    bw, gains, noise = scenario.bandwidths, scenario.gains, scenario.noise_powers
    n, m = samples.n, samples.m
    out = np.empty(weights.shape[0])
    block = max(1, _BLOCK_ELEMENTS // (n * m))
    for start in range(0, weights.shape[0], block):
        stop = min(start + block, weights.shape[0])
        powers = weights[start:stop, None, :] * scenario.total_power
        rates = band_rates(powers, bw, gains, noise, samples.draws[None, :, :])
        out[start:stop] = rates.sum(axis=2).mean(axis=1)
    return out
