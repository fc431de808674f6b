"""Per-sub-band link math: SINR, Shannon capacity, total throughput.

All powers are linear watts.
"""

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DegenerateDenominator, EmptyScenario, ValidationError


@dataclass(frozen=True)
class SubbandSpec:
    bandwidth: float  # Hz
    channel_gain: float  # |H|^2, linear
    noise_power: float  # W

    def __post_init__(self):
        if not (math.isfinite(self.bandwidth) and self.bandwidth > 0):
            raise ValidationError(f"bandwidth must be finite and > 0, got {self.bandwidth!r}")
        if not (math.isfinite(self.channel_gain) and self.channel_gain >= 0):
            raise ValidationError(f"channel_gain must be finite and >= 0, got {self.channel_gain!r}")
        if not (math.isfinite(self.noise_power) and self.noise_power >= 0):
            raise ValidationError(f"noise_power must be finite and >= 0, got {self.noise_power!r}")


@dataclass(frozen=True)
class LinkScenario:
    subbands: tuple
    total_power: float  # W

    def __post_init__(self):
        object.__setattr__(self, "subbands", tuple(self.subbands))
        if not self.subbands:
            raise EmptyScenario("scenario has no sub-bands")
        if not (math.isfinite(self.total_power) and self.total_power > 0):
            raise ValidationError(f"total_power must be finite and > 0, got {self.total_power!r}")

    @property
    def m(self) -> int:
        return len(self.subbands)

    @property
    def bandwidths(self) -> np.ndarray:
        return np.array([s.bandwidth for s in self.subbands], dtype=float)

    @property
    def gains(self) -> np.ndarray:
        return np.array([s.channel_gain for s in self.subbands], dtype=float)

    @property
    def noise_powers(self) -> np.ndarray:
        return np.array([s.noise_power for s in self.subbands], dtype=float)


def sinr(allocated_power: float, spec: SubbandSpec, interference: float) -> float:
    if allocated_power < 0 or interference < 0:
        raise ValidationError("allocated power and interference must be non-negative")
    denom = interference + spec.noise_power
    if denom == 0:
        raise DegenerateDenominator("interference + noise power is zero")
    return allocated_power * spec.channel_gain / denom


def subband_capacity(spec: SubbandSpec, gamma: float) -> float:
    """Shannon rate ``W log2(1 + gamma)`` in bit/s."""
    if gamma < 0:
        raise ValidationError(f"SINR must be non-negative, got {gamma!r}")
    return spec.bandwidth * math.log2(1.0 + gamma)


def total_throughput(per_band: Sequence[float]) -> float:
    if len(per_band) == 0:
        raise EmptyScenario("no per-band rates to sum")
    if any(r < 0 for r in per_band):
        raise ValidationError("per-band rates must be non-negative")
    return math.fsum(per_band)


def band_rates(
    powers: np.ndarray,
    bandwidths: np.ndarray,
    gains: np.ndarray,
    noise: np.ndarray,
    interference: np.ndarray,
) -> np.ndarray:
    """Vectorised ``W_i log2(1 + p_i g_i / (I_i + N_i))``.

    ``powers`` broadcasts against ``interference`` along the trailing band axis.
    """
    denom = interference + noise
    if np.any(denom == 0):
        raise DegenerateDenominator("interference + noise power is zero for some draw")
    return bandwidths * np.log2(1.0 + powers * gains / denom)
