"""Scenario files (JSON) and their validation.

Schema::

    {
      "name": "...",                      # optional
      "description": "...",               # optional
      "calibration": {...},               # optional, echoed verbatim
      "numerology": {"mu": 4, "fft_size": 2048, "payload_subcarriers": 1200},
      "bands": [
        {"channel_gain": 1.0, "noise_power_w": 1e-3,
         "interference": {"kind": "lognormal", "log_mean": -6.0, "log_sd": 1.0}},
        ...
      ],
      "correlation": [[1, 0, 0], [0, 1, 0], [0, 0, 1]],   # optional, identity
      "total_power_w": 1.0,
      "run": {"portfolios": 5000, "draws": 10000, "seed": 42,
              "refine_tol": 1e-7, "refine_max_iters": 10000}   # all optional
    }

Interference kinds and their keys: ``constant`` (``level``), ``lognormal``
(``log_mean``, ``log_sd``), ``gamma`` (``shape``, ``scale``), ``empirical``
(either inline ``samples`` or ``trace`` + ``column`` [+ ``header``], the trace
path being relative to the scenario file). Bands are an equal partition of the
numerology's payload subcarriers, so ``len(bands)`` is the sub-band count.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any

import numpy as np

from .errors import MissingField, ParseError, ScenarioError, ValidationError
from .interference import InterferenceMarginal, InterferenceModel, copula_factor, load_empirical
from .numerology import Numerology, SubbandGeometry, partition_subbands
from .radio import LinkScenario, SubbandSpec

DEFAULT_PORTFOLIOS = 5000
DEFAULT_DRAWS = 10_000
DEFAULT_SEED = 42
DEFAULT_REFINE_TOL = 1e-7
DEFAULT_REFINE_MAX_ITERS = 10_000

_TOP_KEYS = {"name", "description", "calibration", "numerology", "bands", "correlation", "total_power_w", "run"}
_RUN_KEYS = {"portfolios", "draws", "seed", "refine_tol", "refine_max_iters"}
_KIND_KEYS = {
    "constant": {"level"},
    "lognormal": {"log_mean", "log_sd"},
    "gamma": {"shape", "scale"},
}


@dataclass(frozen=True)
class RunParams:
    portfolios: int = DEFAULT_PORTFOLIOS
    draws: int = DEFAULT_DRAWS
    seed: int = DEFAULT_SEED
    refine_tol: float = DEFAULT_REFINE_TOL
    refine_max_iters: int = DEFAULT_REFINE_MAX_ITERS


@dataclass(frozen=True)
class BandConfig:
    channel_gain: float
    noise_power_w: float
    interference: InterferenceMarginal
    # set when an empirical marginal came from a CSV trace; kept for round-trips
    trace: dict | None = None


@dataclass(frozen=True)
class ScenarioFile:
    numerology: Numerology
    bands: tuple
    correlation: tuple
    total_power_w: float
    run: RunParams = field(default_factory=RunParams)
    name: str | None = None
    description: str | None = None
    calibration: dict | None = None

    @property
    def m(self) -> int:
        return len(self.bands)

    @property
    def geometry(self) -> SubbandGeometry:
        return partition_subbands(self.numerology, self.m)

    def link_scenario(self) -> LinkScenario:
        w = float(self.geometry.bandwidth_per_band)
        return LinkScenario(
            [SubbandSpec(w, b.channel_gain, b.noise_power_w) for b in self.bands],
            self.total_power_w,
        )

    def interference_model(self) -> InterferenceModel:
        return InterferenceModel(tuple(b.interference for b in self.bands), np.asarray(self.correlation, dtype=float))

    def with_run(self, **overrides) -> ScenarioFile:
        """Copy with some run parameters replaced; ``None`` values are ignored."""
        given = {k: v for k, v in overrides.items() if v is not None}
        run = replace(self.run, **given)
        _validate_run(run)
        return replace(self, run=run)


def _require(obj: dict, key: str, where: str) -> Any:
    if key not in obj:
        raise MissingField(f"{where}.{key}" if where else key)
    return obj[key]


def _obj(value: Any, where: str) -> dict:
    if not isinstance(value, dict):
        raise ValidationError(f"{where}: expected an object, got {type(value).__name__}")
    return value


def _int(value: Any, where: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ValidationError(f"{where}: expected an integer, got {value!r}")
    return value


def _num(value: Any, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ValidationError(f"{where}: expected a number, got {value!r}")
    value = float(value)
    if not math.isfinite(value):
        raise ValidationError(f"{where}: must be finite, got {value!r}")
    return value


def _reject_unknown(obj: dict, allowed: set, where: str) -> None:
    extra = sorted(set(obj) - allowed)
    if extra:
        raise ValidationError(f"{where}: unknown field(s) {', '.join(extra)}")


def _validate_run(run: RunParams) -> None:
    if run.portfolios < 1:
        raise ValidationError(f"run.portfolios must be >= 1, got {run.portfolios}")
    if run.draws < 1:
        raise ValidationError(f"run.draws must be >= 1, got {run.draws}")
    if not 0 <= run.seed < 2**64:
        raise ValidationError(f"run.seed must be an unsigned 64-bit integer, got {run.seed}")
    if not run.refine_tol > 0:
        raise ValidationError(f"run.refine_tol must be > 0, got {run.refine_tol}")
    if run.refine_max_iters < 1:
        raise ValidationError(f"run.refine_max_iters must be >= 1, got {run.refine_max_iters}")


def _parse_interference(raw: Any, where: str, base_dir: Path) -> tuple[InterferenceMarginal, dict | None]:
    raw = _obj(raw, where)
    kind = _require(raw, "kind", where)
    if not isinstance(kind, str):
        raise ValidationError(f"{where}.kind: expected a string, got {kind!r}")
    kind = kind.lower()
    try:
        if kind in _KIND_KEYS:
            keys = _KIND_KEYS[kind]
            _reject_unknown(raw, keys | {"kind"}, where)
            vals = {k: _num(_require(raw, k, where), f"{where}.{k}") for k in sorted(keys)}
            if kind == "constant":
                return InterferenceMarginal.constant(vals["level"]), None
            if kind == "lognormal":
                return InterferenceMarginal.lognormal(vals["log_mean"], vals["log_sd"]), None
            return InterferenceMarginal.gamma(vals["shape"], vals["scale"]), None
        if kind == "empirical":
            _reject_unknown(raw, {"kind", "samples", "trace", "column", "header"}, where)
            if "samples" in raw:
                samples = raw["samples"]
                if not isinstance(samples, list):
                    raise ValidationError(f"{where}.samples: expected a list")
                vals = [_num(v, f"{where}.samples[{i}]") for i, v in enumerate(samples)]
                return InterferenceMarginal.empirical(vals), None
            trace = _require(raw, "trace", where)
            if not isinstance(trace, str):
                raise ValidationError(f"{where}.trace: expected a path string")
            column = _int(raw.get("column", 0), f"{where}.column")
            header = raw.get("header", False)
            if not isinstance(header, bool):
                raise ValidationError(f"{where}.header: expected true/false")
            path = Path(trace)
            if not path.is_absolute():
                path = base_dir / path
            try:
                marg = load_empirical(path, column, header=header)
            except OSError as exc:
                raise ParseError(f"{where}.trace: cannot read {path}: {exc.strerror}") from None
            return marg, {"trace": trace, "column": column, "header": header}
    except ScenarioError as exc:
        if str(exc).startswith(where):
            raise
        raise type(exc)(f"{where}: {exc}") from None
    raise ValidationError(f"{where}.kind: unknown interference kind {kind!r}")


def _lowest_interference(marg: InterferenceMarginal) -> float:
    if marg.kind == "constant":
        return marg.params[0]
    if marg.kind == "empirical":
        return min(marg.samples)
    # continuous laws with support reaching down to 0
    return 0.0


def scenario_from_dict(data: Any, base_dir: Path | str = ".") -> ScenarioFile:
    """Validate a decoded scenario object and resolve defaults."""
    base_dir = Path(base_dir)
    data = _obj(data, "scenario")
    _reject_unknown(data, _TOP_KEYS, "scenario")

    num_raw = _obj(_require(data, "numerology", ""), "numerology")
    _reject_unknown(num_raw, {"mu", "fft_size", "payload_subcarriers"}, "numerology")
    numerology = Numerology(
        mu=_int(_require(num_raw, "mu", "numerology"), "numerology.mu"),
        fft_size=_int(_require(num_raw, "fft_size", "numerology"), "numerology.fft_size"),
        payload_subcarriers=_int(
            _require(num_raw, "payload_subcarriers", "numerology"), "numerology.payload_subcarriers"
        ),
    )

    bands_raw = _require(data, "bands", "")
    if not isinstance(bands_raw, list) or not bands_raw:
        raise ValidationError("bands: expected a non-empty list")
    bands = []
    for i, b in enumerate(bands_raw):
        where = f"bands[{i}]"
        b = _obj(b, where)
        _reject_unknown(b, {"channel_gain", "noise_power_w", "interference"}, where)
        gain = _num(_require(b, "channel_gain", where), f"{where}.channel_gain")
        noise = _num(_require(b, "noise_power_w", where), f"{where}.noise_power_w")
        if gain < 0:
            raise ValidationError(f"{where}.channel_gain: must be >= 0, got {gain}")
        if noise < 0:
            raise ValidationError(f"{where}.noise_power_w: must be >= 0, got {noise}")
        marg, trace = _parse_interference(_require(b, "interference", where), f"{where}.interference", base_dir)
        if noise == 0 and _lowest_interference(marg) == 0:
            raise ValidationError(f"{where}: noise_power_w is 0 and interference can be 0 (zero SINR denominator)")
        bands.append(BandConfig(gain, noise, marg, trace))
    m = len(bands)

    try:
        partition_subbands(numerology, m)
    except ValidationError as exc:
        raise type(exc)(f"bands: {exc}") from None

    if "correlation" in data:
        corr_raw = data["correlation"]
        if not isinstance(corr_raw, list) or len(corr_raw) != m:
            raise ValidationError(f"correlation: expected a {m}x{m} matrix")
        rows = []
        for i, row in enumerate(corr_raw):
            if not isinstance(row, list) or len(row) != m:
                raise ValidationError(f"correlation[{i}]: expected a row of {m} numbers")
            rows.append([_num(v, f"correlation[{i}][{j}]") for j, v in enumerate(row)])
        corr = np.asarray(rows)
    else:
        corr = np.eye(m)
    for i in range(m):
        for j in range(m):
            if abs(corr[i, j]) > 1:
                raise ValidationError(f"correlation[{i}][{j}]: coefficient {corr[i, j]} outside [-1, 1]")
            if corr[i, j] != corr[j, i]:
                raise ValidationError(f"correlation[{i}][{j}]: matrix is not symmetric")
        if corr[i, i] != 1:
            raise ValidationError(f"correlation[{i}][{i}]: diagonal must be 1")
    try:
        copula_factor(corr)
    except ValidationError as exc:
        raise type(exc)(f"correlation: {exc}") from None

    total_power = _num(_require(data, "total_power_w", ""), "total_power_w")
    if total_power <= 0:
        raise ValidationError(f"total_power_w: must be > 0, got {total_power}")

    run_raw = _obj(data.get("run", {}), "run")
    _reject_unknown(run_raw, _RUN_KEYS, "run")
    run = RunParams(
        portfolios=_int(run_raw.get("portfolios", DEFAULT_PORTFOLIOS), "run.portfolios"),
        draws=_int(run_raw.get("draws", DEFAULT_DRAWS), "run.draws"),
        seed=_int(run_raw.get("seed", DEFAULT_SEED), "run.seed"),
        refine_tol=_num(run_raw.get("refine_tol", DEFAULT_REFINE_TOL), "run.refine_tol"),
        refine_max_iters=_int(run_raw.get("refine_max_iters", DEFAULT_REFINE_MAX_ITERS), "run.refine_max_iters"),
    )
    _validate_run(run)

    for key in ("name", "description"):
        if key in data and not isinstance(data[key], str):
            raise ValidationError(f"{key}: expected a string")
    calibration = data.get("calibration")
    if calibration is not None:
        _obj(calibration, "calibration")

    return ScenarioFile(
        numerology=numerology,
        bands=tuple(bands),
        correlation=tuple(tuple(float(v) for v in row) for row in corr),
        total_power_w=total_power,
        run=run,
        name=data.get("name"),
        description=data.get("description"),
        calibration=calibration,
    )


def load_scenario(path: str | Path) -> ScenarioFile:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ParseError(f"{path}: cannot read: {exc.strerror}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None
    try:
        return scenario_from_dict(data, base_dir=path.parent)
    except ScenarioError as exc:
        raise type(exc)(f"{path}: {exc}") from None


def _interference_to_dict(band: BandConfig) -> dict:
    marg = band.interference
    if band.trace is not None:
        return {"kind": "empirical", **band.trace}
    if marg.kind == "constant":
        return {"kind": "constant", "level": marg.params[0]}
    if marg.kind == "lognormal":
        return {"kind": "lognormal", "log_mean": marg.params[0], "log_sd": marg.params[1]}
    if marg.kind == "gamma":
        return {"kind": "gamma", "shape": marg.params[0], "scale": marg.params[1]}
    return {"kind": "empirical", "samples": list(marg.samples)}


def scenario_to_dict(s: ScenarioFile) -> dict:
    out: dict = {}
    if s.name is not None:
        out["name"] = s.name
    if s.description is not None:
        out["description"] = s.description
    if s.calibration is not None:
        out["calibration"] = s.calibration
    out["numerology"] = {
        "mu": s.numerology.mu,
        "fft_size": s.numerology.fft_size,
        "payload_subcarriers": s.numerology.payload_subcarriers,
    }
    out["bands"] = [
        {"channel_gain": b.channel_gain, "noise_power_w": b.noise_power_w, "interference": _interference_to_dict(b)}
        for b in s.bands
    ]
    out["correlation"] = [list(row) for row in s.correlation]
    out["total_power_w"] = s.total_power_w
    out["run"] = {
        "portfolios": s.run.portfolios,
        "draws": s.run.draws,
        "seed": s.run.seed,
        "refine_tol": s.run.refine_tol,
        "refine_max_iters": s.run.refine_max_iters,
    }
    return out


def write_scenario(s: ScenarioFile, path: str | Path) -> None:
    """Write ``s`` as JSON. Trace paths are written as given, so keep the
    output next to the original scenario when empirical traces are used."""
    Path(path).write_text(json.dumps(scenario_to_dict(s), indent=2) + "\n")
