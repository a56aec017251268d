"""Domain types, configuration validation and JSON mapping.

All internal quantities are SI: Joules, seconds, Watts, bits, metres.
Field names carry their unit so the JSON form mirrors the dataclasses
one-to-one and dotted override paths (``irs.element_count``) work on both.
"""
from __future__ import annotations

import dataclasses
import json
import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any, Union

import numpy as np

logger = logging.getLogger(__name__)

SCHEMA_VERSION = "ptvsim.config/1"

Point = tuple[float, float, float]


class ScenarioKind(str, Enum):
    BASELINE = "Baseline"
    WET_ONLY = "WetOnly"
    MEC_ONLY = "MecOnly"
    IRS_WET = "IrsWet"
    IRS_MEC_WET = "IrsMecWet"
    MEC_WET = "MecWet"

    @property
    def uses_irs(self) -> bool:
        return self in (ScenarioKind.IRS_WET, ScenarioKind.IRS_MEC_WET)

    @property
    def harvests(self) -> bool:
        return self not in (ScenarioKind.BASELINE, ScenarioKind.MEC_ONLY)

    @property
    def offloads(self) -> bool:
        return self in (ScenarioKind.MEC_ONLY, ScenarioKind.IRS_MEC_WET, ScenarioKind.MEC_WET)


class UplinkModel(str, Enum):
    PER_BIT = "per_bit"
    RATE = "rate"


@dataclass(frozen=True)
class VehicleGeometry:
    """AP, IRS centre and device positions inside the box ``[0, box]``."""

    ap_position_m: Point = (0.5, 1.5, 2.4)
    irs_center_m: Point = (5.0, 0.0, 2.0)
    device_position_m: Point = (3.0, 1.5, 1.0)
    box_m: Point = (10.0, 3.0, 2.5)


@dataclass(frozen=True)
class IrsPanel:
    """Reflecting surface; ``phase_shift_rad`` is one common phase or one per element."""

    element_count: int = 64
    amplitude: float = 1.0
    phase_shift_rad: Union[float, tuple[float, ...]] = math.pi / 2


@dataclass(frozen=True)
class ChannelParams:
    alpha_los: float = 2.4
    alpha_nlos: float = 3.0
    reference_distance_m: float = 1.0
    # Freeze AP->IRS small-scale coefficients to 1 (sensitivity studies).
    fixed_ap_irs_fading: bool = False


@dataclass(frozen=True)
class TimeFrame:
    tti_seconds: float = 1e-3
    energy_fraction: float = 0.25
    horizon_tti: int = 50


@dataclass(frozen=True)
class HarvestModel:
    p_th_watts: float = 1e-5
    p_max_watts: float = 0.04
    efficiency: float = 0.8


@dataclass(frozen=True)
class EnergyCostModel:
    xi_joule_per_cycle3: float = 1e-28
    psi_cycles_per_bit: float = 1e3
    e_ckt_joules: float = 2e-6
    e_bit_joules: float = 5e-11
    device_tx_power_watts: float = 0.01
    uplink_bandwidth_hz: float = 1e6
    noise_power_watts: float = 1e-10
    uplink_model: UplinkModel = UplinkModel.PER_BIT


@dataclass(frozen=True)
class TaskModel:
    l_min_bits: int = 40_000
    l_max_bits: int = 50_000
    offload_fraction: float = 0.75


@dataclass(frozen=True)
class GridParams:
    """Decision-grid thresholds and the optional adaptive-offload mode."""

    adaptive: bool = False
    e_low_joules: float = 3e-4
    z_tight_seconds: float = 1e-2
    deadline_slack_seconds: float = 5e-3


@dataclass(frozen=True)
class ScenarioConfig:
    scenario_kind: ScenarioKind = ScenarioKind.IRS_MEC_WET
    geometry: VehicleGeometry = field(default_factory=VehicleGeometry)
    irs: IrsPanel = field(default_factory=IrsPanel)
    channel: ChannelParams = field(default_factory=ChannelParams)
    time: TimeFrame = field(default_factory=TimeFrame)
    harvest: HarvestModel = field(default_factory=HarvestModel)
    costs: EnergyCostModel = field(default_factory=EnergyCostModel)
    task: TaskModel = field(default_factory=TaskModel)
    grid: GridParams = field(default_factory=GridParams)
    ap_tx_power_watts: float = 1.0
    initial_energy_joules: float = 1e-3
    iterations: int = 1000
    master_seed: int = 0

    def replace(self, **changes: Any) -> "ScenarioConfig":
        return dataclasses.replace(self, **changes)

    @property
    def effective_offload_fraction(self) -> float:
        return self.task.offload_fraction if self.scenario_kind.offloads else 0.0

    @property
    def effective_element_count(self) -> int:
        return self.irs.element_count if self.scenario_kind.uses_irs else 0


@dataclass(frozen=True)
class Violation:
    path: str
    reason: str

    def __str__(self) -> str:
        return f"{self.path}: {self.reason}"


class ConfigError(ValueError):
    """Raised with every violated invariant of a configuration."""

    def __init__(self, violations: list[Violation]):
        self.violations = list(violations)
        super().__init__("invalid configuration:\n" + "\n".join(f"  {v}" for v in self.violations))


def link_distances(geometry: VehicleGeometry) -> tuple[float, float, float]:
    """Euclidean (AP-device, AP-IRS, IRS-device) distances in metres."""
    ap = np.asarray(geometry.ap_position_m, dtype=float)
    irs = np.asarray(geometry.irs_center_m, dtype=float)
    dev = np.asarray(geometry.device_position_m, dtype=float)
    d_ap_dev = float(np.linalg.norm(ap - dev))
    d_ap_irs = float(np.linalg.norm(ap - irs))
    d_irs_dev = float(np.linalg.norm(irs - dev))
    for name, d in (("ap-device", d_ap_dev), ("ap-irs", d_ap_irs), ("irs-device", d_irs_dev)):
        if not d > 0.0:
            raise ValueError(f"degenerate geometry: {name} points coincide")
    return d_ap_dev, d_ap_irs, d_irs_dev


def time_split(time: TimeFrame) -> tuple[float, float]:
    """Energy and information sub-slot durations; they sum to ``tti_seconds`` exactly."""
    tau, gamma = time.tti_seconds, time.energy_fraction
    # subtract the larger share from tau: exact by Sterbenz, so the parts re-add to tau
    if gamma <= 0.5:
        tau_i = (1.0 - gamma) * tau
        return tau - tau_i, tau_i
    tau_v = gamma * tau
    return tau_v, tau - tau_v


def _geometry_violations(g: VehicleGeometry) -> list[Violation]:
    out = []
    for name in ("ap_position_m", "irs_center_m", "device_position_m", "box_m"):
        p = getattr(g, name)
        if len(p) != 3 or not all(math.isfinite(c) for c in p):
            out.append(Violation(f"geometry.{name}", "must be three finite coordinates"))
    if out:
        return out
    if any(b <= 0 for b in g.box_m):
        out.append(Violation("geometry.box_m", "box dimensions must be positive"))
        return out
    for name in ("ap_position_m", "irs_center_m", "device_position_m"):
        p = getattr(g, name)
        if any(c < 0 or c > b for c, b in zip(p, g.box_m)):
            out.append(Violation(f"geometry.{name}", "position outside the vehicle box"))
    pairs = (
        ("ap_position_m", "device_position_m"),
        ("ap_position_m", "irs_center_m"),
        ("irs_center_m", "device_position_m"),
    )
    for a, b in pairs:
        if math.dist(getattr(g, a), getattr(g, b)) <= 0:
            out.append(Violation(f"geometry.{b}", f"coincides with {a}"))
    return out


def config_violations(config: ScenarioConfig) -> list[Violation]:
    """Every invariant violated by ``config`` (empty when valid)."""
    v: list[Violation] = []

    def check(ok: bool, path: str, reason: str) -> None:
        if not ok:
            v.append(Violation(path, reason))

    check(isinstance(config.scenario_kind, ScenarioKind), "scenario_kind", "unknown scenario kind")
    v.extend(_geometry_violations(config.geometry))

    irs = config.irs
    n_ok = isinstance(irs.element_count, (int, np.integer)) and irs.element_count >= 0
    check(n_ok, "irs.element_count", "must be a non-negative integer")
    check(0.0 <= irs.amplitude <= 1.0, "irs.amplitude", "amplitude out of [0,1]")
    if isinstance(irs.phase_shift_rad, tuple):
        check(
            not n_ok or len(irs.phase_shift_rad) == irs.element_count,
            "irs.phase_shift_rad",
            "per-element phase vector length must equal element_count",
        )
        check(all(math.isfinite(p) for p in irs.phase_shift_rad), "irs.phase_shift_rad", "must be finite")
    else:
        check(math.isfinite(irs.phase_shift_rad), "irs.phase_shift_rad", "must be finite")

    ch = config.channel
    check(ch.alpha_los >= 2.0, "channel.alpha_los", "pathloss exponent must be >= 2")
    check(ch.alpha_nlos >= 2.0, "channel.alpha_nlos", "pathloss exponent must be >= 2")
    check(ch.reference_distance_m > 0, "channel.reference_distance_m", "must be positive")

    t = config.time
    check(t.tti_seconds > 0, "time.tti_seconds", "must be positive")
    check(0.0 <= t.energy_fraction <= 1.0, "time.energy_fraction", "energy_fraction out of [0,1]")
    check(
        isinstance(t.horizon_tti, (int, np.integer)) and t.horizon_tti >= 0,
        "time.horizon_tti",
        "must be a non-negative integer",
    )

    h = config.harvest
    check(0.0 <= h.p_th_watts < h.p_max_watts, "harvest", "require 0 <= p_th_watts < p_max_watts")
    check(0.0 < h.efficiency <= 1.0, "harvest.efficiency", "efficiency out of (0,1]")

    c = config.costs
    for name in (
        "xi_joule_per_cycle3",
        "psi_cycles_per_bit",
        "e_ckt_joules",
        "e_bit_joules",
        "device_tx_power_watts",
        "uplink_bandwidth_hz",
        "noise_power_watts",
    ):
        check(getattr(c, name) > 0, f"costs.{name}", "must be strictly positive")
    check(isinstance(c.uplink_model, UplinkModel), "costs.uplink_model", "unknown uplink model")

    k = config.task
    check(0 < k.l_min_bits <= k.l_max_bits, "task", "require 0 < l_min_bits <= l_max_bits")
    check(0.0 <= k.offload_fraction <= 1.0, "task.offload_fraction", "offload_fraction out of [0,1]")

    gp = config.grid
    check(gp.e_low_joules > 0, "grid.e_low_joules", "threshold must be positive")
    check(gp.z_tight_seconds > 0, "grid.z_tight_seconds", "threshold must be positive")
    check(gp.deadline_slack_seconds >= 0, "grid.deadline_slack_seconds", "must be non-negative")

    check(config.ap_tx_power_watts > 0, "ap_tx_power_watts", "must be positive")
    check(config.initial_energy_joules >= 0, "initial_energy_joules", "must be non-negative")
    check(
        isinstance(config.iterations, (int, np.integer)) and config.iterations >= 1,
        "iterations",
        "must be a positive integer",
    )
    check(
        isinstance(config.master_seed, (int, np.integer)) and 0 <= config.master_seed < 2**64,
        "master_seed",
        "must be an unsigned 64-bit integer",
    )

    if isinstance(config.scenario_kind, ScenarioKind) and config.scenario_kind.uses_irs and n_ok:
        check(irs.element_count > 0, "irs.element_count", "IRS scenario requires N > 0")
    return v


def validate_config(config: ScenarioConfig) -> ScenarioConfig:
    """Return ``config`` unchanged if valid, else raise :class:`ConfigError` listing all violations."""
    violations = config_violations(config)
    if violations:
        raise ConfigError(violations)
    if config.time.energy_fraction >= 0.5:
        logger.warning(
            "energy_fraction=%s leaves the information sub-slot no longer than the energy sub-slot",
            config.time.energy_fraction,
        )
    return config


# -- JSON mapping -----------------------------------------------------------

_SECTIONS = {
    "geometry": VehicleGeometry,
    "irs": IrsPanel,
    "channel": ChannelParams,
    "time": TimeFrame,
    "harvest": HarvestModel,
    "costs": EnergyCostModel,
    "task": TaskModel,
    "grid": GridParams,
}


def _plain(value: Any) -> Any:
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, tuple):
        return [_plain(x) for x in value]
    return value


def config_to_dict(config: ScenarioConfig) -> dict[str, Any]:
    out: dict[str, Any] = {"schema": SCHEMA_VERSION}
    for f in dataclasses.fields(config):
        value = getattr(config, f.name)
        if dataclasses.is_dataclass(value):
            out[f.name] = {sf.name: _plain(getattr(value, sf.name)) for sf in dataclasses.fields(value)}
        else:
            out[f.name] = _plain(value)
    return out


def _coerce(value: Any, default: Any, path: str, errors: list[Violation]) -> Any:
    try:
        if isinstance(default, Enum):
            return type(default)(value)
        if isinstance(default, bool):
            if not isinstance(value, bool):
                raise TypeError("expected a boolean")
            return value
        if isinstance(default, int):
            if isinstance(value, float) and value.is_integer():
                value = int(value)
            if isinstance(value, bool) or not isinstance(value, int):
                raise TypeError("expected an integer")
            return value
        if isinstance(default, tuple):
            return tuple(float(x) for x in value)
        if isinstance(default, float):
            if isinstance(value, list):
                return tuple(float(x) for x in value)
            if isinstance(value, bool):
                raise TypeError("expected a number")
            return float(value)
    except (TypeError, ValueError) as exc:
        errors.append(Violation(path, f"bad value {value!r}: {exc}"))
        return default
    return value


def config_from_dict(data: dict[str, Any]) -> ScenarioConfig:
    """Build and validate a config from its JSON mapping.

    Missing fields take their defaults; unknown fields and type errors are
    reported together with invariant violations.
    """
    errors: list[Violation] = []
    if data.get("schema") != SCHEMA_VERSION:
        errors.append(Violation("schema", f"expected {SCHEMA_VERSION!r}, got {data.get('schema')!r}"))
    base = ScenarioConfig()
    kwargs: dict[str, Any] = {}
    for key, value in data.items():
        if key == "schema":
            continue
        if key in _SECTIONS:
            cls = _SECTIONS[key]
            default_section = getattr(base, key)
            if not isinstance(value, dict):
                errors.append(Violation(key, "must be an object"))
                continue
            section_kwargs = {}
            names = {f.name for f in dataclasses.fields(cls)}
            for sk, sv in value.items():
                if sk not in names:
                    errors.append(Violation(f"{key}.{sk}", "unknown field"))
                    continue
                section_kwargs[sk] = _coerce(sv, getattr(default_section, sk), f"{key}.{sk}", errors)
            kwargs[key] = cls(**section_kwargs)
        elif key in {f.name for f in dataclasses.fields(ScenarioConfig)}:
            kwargs[key] = _coerce(value, getattr(base, key), key, errors)
        else:
            errors.append(Violation(key, "unknown field"))
    if errors:
        raise ConfigError(errors)
    return validate_config(ScenarioConfig(**kwargs))


def apply_overrides(data: dict[str, Any], overrides: list[str]) -> dict[str, Any]:
    """Apply ``key=value`` dotted-path overrides to a config mapping (copy)."""
    data = json.loads(json.dumps(data))
    for item in overrides:
        if "=" not in item:
            raise ConfigError([Violation(item, "override must look like key=value")])
        path, raw = item.split("=", 1)
        try:
            value = json.loads(raw)
        except json.JSONDecodeError:
            value = raw
        node = data
        parts = path.strip().split(".")
        for part in parts[:-1]:
            node = node.setdefault(part, {})
            if not isinstance(node, dict):
                raise ConfigError([Violation(path, "override path crosses a scalar")])
        node[parts[-1]] = value
    return data


def load_config(path: str | Path) -> ScenarioConfig:
    with open(path) as fh:
        return config_from_dict(json.load(fh))


def dump_config(config: ScenarioConfig, path: str | Path) -> None:
    with open(path, "w") as fh:
        json.dump(config_to_dict(config), fh, indent=2, sort_keys=True)
        fh.write("\n")
