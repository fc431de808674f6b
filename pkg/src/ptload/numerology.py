"""OFDM carrier and sub-band geometry from NR-style numerology."""

from dataclasses import dataclass

from .errors import IndivisiblePartition, ValidationError

BASE_SPACING_HZ = 15_000
MAX_MU = 6


@dataclass(frozen=True)
class Numerology:
    mu: int
    fft_size: int
    payload_subcarriers: int

    def __post_init__(self):
        for name in ("mu", "fft_size", "payload_subcarriers"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, int):
                raise ValidationError(f"numerology.{name} must be an integer, got {value!r}")
        if not 0 <= self.mu <= MAX_MU:
            raise ValidationError(f"numerology.mu must be in [0, {MAX_MU}], got {self.mu}")
        if self.fft_size < 1:
            raise ValidationError(f"numerology.fft_size must be positive, got {self.fft_size}")
        if self.payload_subcarriers < 1:
            raise ValidationError(
                f"numerology.payload_subcarriers must be positive, got {self.payload_subcarriers}"
            )
        if self.payload_subcarriers > self.fft_size:
            raise ValidationError(
                "numerology.payload_subcarriers must not exceed fft_size "
                f"({self.payload_subcarriers} > {self.fft_size})"
            )


@dataclass(frozen=True)
class SubbandGeometry:
    count: int
    subcarriers_per_band: int
    bandwidth_per_band: int  # Hz


def subcarrier_spacing(n: Numerology) -> int:
    """Subcarrier spacing in Hz, ``15 kHz * 2**mu``."""
    return BASE_SPACING_HZ << n.mu


def carrier_bandwidth(n: Numerology) -> int:
    return n.payload_subcarriers * subcarrier_spacing(n)


def partition_subbands(n: Numerology, m: int) -> SubbandGeometry:
    """Split the payload subcarriers into ``m`` contiguous, equal, guard-free sub-bands.

    Raises:
        IndivisiblePartition: if ``payload_subcarriers`` is not a multiple of ``m``.
    """
    if isinstance(m, bool) or not isinstance(m, int) or m < 1:
        raise ValidationError(f"band count must be a positive integer, got {m!r}")
    per_band, rem = divmod(n.payload_subcarriers, m)
    if rem:
        raise IndivisiblePartition(
            f"{n.payload_subcarriers} payload subcarriers cannot be split into {m} equal sub-bands"
        )
    return SubbandGeometry(
        count=m,
        subcarriers_per_band=per_band,
        bandwidth_per_band=per_band * subcarrier_spacing(n),
    )
