"""
Scenario description and its strict JSON form.

A scenario file is a JSON object whose keys mirror :class:`Scenario`.
Every key is optional; unknown keys are rejected. Nested objects
(``bounds``, ``env``, ``source``, ``source.laser``) are strict as well.
SNR values may be numbers or the strings ``"inf"``/``"Infinity"`` for a
noiseless channel.

Example::

    {
      "mode": "static",
      "node_count": 100,
      "bounds": {"origin": [0, 0, 0], "size": [500, 500, 500]},
      "source_positions": [[-250, -250, -2], [750, -250, -2], [250, 750, -2]],
      "control_bit_count": 16,
      "snr_sweep_db": [5, 10, 15, 20, 25, 30, 35, 40],
      "freq_khz": 8.0,
      "env": {"temperature_c": 10, "salinity_ppt": 35, "pressure_kg_cm2": 1, "spreading_factor": 2},
      "source": {"base_sl_db": 210, "jitter_table": [[0, 0.04], [45, 0.015], [90, 0.008]]},
      "baseline": false,
      "jitter_direction_deg": null,
      "seed": 20220101,
      "trials_per_node": 10
    }
"""

from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError, OptolocError
from .geometry import Position3D
from .propagation import WaterEnv, absorption
from .source_link import LaserParams, SourceModel

STATIC = "static"
DYNAMIC = "dynamic"

DEFAULT_SNR_SWEEP = (5.0, 10.0, 15.0, 20.0, 25.0, 30.0, 35.0, 40.0)
# Plasma triangle enclosing the 500 x 500 m deployment footprint, 2 m deep.
DEFAULT_STATIC_SOURCES = (
    Position3D(-250.0, -250.0, -2.0),
    Position3D(750.0, -250.0, -2.0),
    Position3D(250.0, 750.0, -2.0),
)
DEFAULT_DYNAMIC_SOURCE = Position3D(250.0, 250.0, -2.0)


@dataclass(frozen=True)
class Bounds:
    """Deployment box hanging below ``origin``.

    Nodes are drawn with ``x`` in ``origin.x + [0, size_x]``, ``y`` in
    ``origin.y + [0, size_y]`` and depth ``z`` in ``origin.z - [0, size_z]``.
    """

    origin: Position3D = Position3D(0.0, 0.0, 0.0)
    size: tuple = (500.0, 500.0, 500.0)

    def __post_init__(self):
        size = tuple(float(s) for s in self.size)
        if len(size) != 3 or any(not (s >= 0 and math.isfinite(s)) for s in size):
            raise ConfigurationError(f"bounds size must be three finite non-negative extents, got {self.size}")
        object.__setattr__(self, "size", size)
        object.__setattr__(self, "origin", Position3D.of(self.origin))

    def scaled(self, factor):
        sx, sy, sz = self.size
        return Bounds(self.origin, (sx * factor, sy * factor, sz * factor))


@dataclass(frozen=True)
class Scenario:
    mode: str = STATIC
    node_count: int = 100
    bounds: Bounds = field(default_factory=Bounds)
    source_positions: tuple = DEFAULT_STATIC_SOURCES
    control_bit_count: int = 16
    snr_sweep_db: tuple = DEFAULT_SNR_SWEEP
    freq_khz: float = 8.0
    env: WaterEnv = field(default_factory=WaterEnv)
    source: SourceModel = field(default_factory=SourceModel)
    baseline: bool = False
    #: Fixed angle for the jitter lookup; ``None`` uses the true geometry.
    jitter_direction_deg: float | None = None
    #: Uniform range for the random dynamic-mode legs D_AB and D_BC.
    dynamic_leg_range_m: tuple = (5.0, 50.0)
    seed: int = 20220101
    trials_per_node: int = 10

    def __post_init__(self):
        object.__setattr__(
            self, "source_positions", tuple(Position3D.of(p) for p in self.source_positions)
        )
        object.__setattr__(self, "snr_sweep_db", tuple(float(s) for s in self.snr_sweep_db))
        object.__setattr__(self, "dynamic_leg_range_m", tuple(float(v) for v in self.dynamic_leg_range_m))
        self.validate()

    def validate(self):
        if self.mode not in (STATIC, DYNAMIC):
            raise ConfigurationError(f"mode must be 'static' or 'dynamic', got {self.mode!r}")
        if not _is_int(self.node_count) or self.node_count < 1:
            raise ConfigurationError("node_count must be an integer >= 1")
        if not _is_int(self.trials_per_node) or self.trials_per_node < 1:
            raise ConfigurationError("trials_per_node must be an integer >= 1")
        if not _is_int(self.control_bit_count) or self.control_bit_count < 1:
            raise ConfigurationError("control_bit_count must be an integer >= 1")
        if not _is_int(self.seed) or not 0 <= self.seed < 2 ** 64:
            raise ConfigurationError("seed must be an integer in [0, 2**64)")
        if not self.snr_sweep_db:
            raise ConfigurationError("snr_sweep_db must not be empty")
        if any(math.isnan(s) for s in self.snr_sweep_db):
            raise ConfigurationError("snr_sweep_db contains NaN")
        try:
            absorption(self.freq_khz, self.env)
        except OptolocError as exc:
            raise ConfigurationError(str(exc)) from exc
        if self.env.spreading_factor != 2.0:
            raise ConfigurationError("range inversion requires spherical spreading (spreading_factor = 2)")
        if self.jitter_direction_deg is not None and not 0 <= self.jitter_direction_deg <= 90:
            raise ConfigurationError("jitter_direction_deg must lie in [0, 90]")
        if any(p.z >= 0 for p in self.source_positions):
            raise ConfigurationError("plasma source positions must be below the surface (z < 0)")
        if self.mode == STATIC:
            if len(self.source_positions) < 3:
                raise ConfigurationError("static mode needs at least 3 source positions")
            xy = np.array([(p.x, p.y) for p in self.source_positions])
            if np.linalg.matrix_rank(xy[:-1] - xy[-1], tol=1e-6 * max(1.0, np.abs(xy).max())) < 2:
                raise ConfigurationError("static source positions are collinear in the x-y plane")
        else:
            if len(self.source_positions) != 1:
                raise ConfigurationError("dynamic mode takes exactly one source position")
            lo, hi = self.dynamic_leg_range_m if len(self.dynamic_leg_range_m) == 2 else (0, -1)
            if not 0 < lo <= hi:
                raise ConfigurationError("dynamic_leg_range_m must be [lo, hi] with 0 < lo <= hi")

    @property
    def effective_source(self):
        return self.source.without_jitter() if self.baseline else self.source

    def replace(self, **changes):
        return dataclasses.replace(self, **changes)

    def to_dict(self):
        return {
            "mode": self.mode,
            "node_count": self.node_count,
            "bounds": {"origin": list(self.bounds.origin), "size": list(self.bounds.size)},
            "source_positions": [list(p) for p in self.source_positions],
            "control_bit_count": self.control_bit_count,
            "snr_sweep_db": [_snr_to_json(s) for s in self.snr_sweep_db],
            "freq_khz": self.freq_khz,
            "env": dataclasses.asdict(self.env),
            "source": {
                "base_sl_db": self.source.base_sl_db,
                "laser": dataclasses.asdict(self.source.laser),
                "jitter_table": [list(b) for b in self.source.jitter_table],
                "beam_axis": list(self.source.beam_axis),
            },
            "baseline": self.baseline,
            "jitter_direction_deg": self.jitter_direction_deg,
            "dynamic_leg_range_m": list(self.dynamic_leg_range_m),
            "seed": self.seed,
            "trials_per_node": self.trials_per_node,
        }

    @classmethod
    def from_dict(cls, data):
        if not isinstance(data, dict):
            raise ConfigurationError("scenario must be a JSON object")
        _reject_unknown(data, {f.name for f in dataclasses.fields(cls)}, "scenario")
        kw = dict(data)
        try:
            if "mode" in kw and "source_positions" not in kw and kw["mode"] == DYNAMIC:
                kw["source_positions"] = (DEFAULT_DYNAMIC_SOURCE,)
            if "source_positions" in kw:
                sp = kw["source_positions"]
                # A lone [x, y, z] is accepted for the dynamic single source.
                if len(sp) == 3 and all(isinstance(v, (int, float)) for v in sp):
                    sp = [sp]
                kw["source_positions"] = tuple(Position3D.of(p) for p in sp)
            if "bounds" in kw:
                b = kw["bounds"]
                _reject_unknown(b, {"origin", "size"}, "bounds")
                kw["bounds"] = Bounds(Position3D.of(b.get("origin", (0, 0, 0))), tuple(b.get("size", (500, 500, 500))))
            if "env" in kw:
                _reject_unknown(kw["env"], {f.name for f in dataclasses.fields(WaterEnv)}, "env")
                kw["env"] = WaterEnv(**kw["env"])
            if "source" in kw:
                kw["source"] = _source_from_dict(kw["source"])
            if "snr_sweep_db" in kw:
                kw["snr_sweep_db"] = tuple(_snr_from_json(s) for s in kw["snr_sweep_db"])
            if "baseline" in kw and not isinstance(kw["baseline"], bool):
                raise ConfigurationError("baseline must be true or false")
            return cls(**kw)
        except ConfigurationError:
            raise
        except (OptolocError, TypeError, ValueError) as exc:
            raise ConfigurationError(f"invalid scenario: {exc}") from exc

    @classmethod
    def from_json(cls, text):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigurationError(f"scenario is not valid JSON: {exc}") from exc
        return cls.from_dict(data)

    @classmethod
    def load(cls, path):
        try:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise ConfigurationError(f"cannot read scenario file {path}: {exc}") from exc
        return cls.from_json(text)

    def dumps(self):
        return json.dumps(self.to_dict(), indent=2)


def default_dynamic_scenario(**changes):
    return Scenario(mode=DYNAMIC, source_positions=(DEFAULT_DYNAMIC_SOURCE,), **changes)


def _is_int(v):
    return isinstance(v, (int, np.integer)) and not isinstance(v, bool)


def _reject_unknown(data, allowed, where):
    if not isinstance(data, dict):
        raise ConfigurationError(f"{where} must be a JSON object")
    unknown = sorted(set(data) - set(allowed))
    if unknown:
        raise ConfigurationError(f"unknown key(s) in {where}: {', '.join(unknown)}")


def _source_from_dict(d):
    _reject_unknown(d, {"base_sl_db", "laser", "jitter_table", "beam_axis"}, "source")
    kw = dict(d)
    if "laser" in kw:
        _reject_unknown(kw["laser"], {f.name for f in dataclasses.fields(LaserParams)}, "source.laser")
        kw["laser"] = LaserParams(**kw["laser"])
    if "jitter_table" in kw:
        kw["jitter_table"] = tuple(tuple(b) for b in kw["jitter_table"])
    if "beam_axis" in kw:
        kw["beam_axis"] = tuple(kw["beam_axis"])
    return SourceModel(**kw)


def _snr_from_json(v):
    if isinstance(v, str):
        if v.strip().lower() in ("inf", "+inf", "infinity", "+infinity"):
            return math.inf
        raise ConfigurationError(f"unrecognised SNR value {v!r}")
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigurationError(f"SNR values must be numbers, got {v!r}")
    return float(v)


def _snr_to_json(v):
    return "inf" if math.isinf(v) and v > 0 else v
