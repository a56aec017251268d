"""Named experiments reproducing the published trajectory and ratio figures."""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from typing import Any

from .model import ScenarioConfig, ScenarioKind, config_to_dict

K = ScenarioKind


@dataclass(frozen=True)
class Series:
    label: str
    kind: ScenarioKind
    element_count: int | None = None  # None keeps the base config's N

    def apply(self, base: ScenarioConfig) -> ScenarioConfig:
        cfg = base.replace(scenario_kind=self.kind)
        if self.element_count is not None:
            cfg = cfg.replace(irs=dataclasses.replace(cfg.irs, element_count=self.element_count))
        return cfg


@dataclass(frozen=True)
class Preset:
    name: str
    title: str
    overrides: dict[str, dict[str, Any]]
    series: tuple[Series, ...]
    sweep_bits: tuple[int, ...] = ()

    def base_dict(self) -> dict[str, Any]:
        data = config_to_dict(ScenarioConfig())
        for section, values in self.overrides.items():
            data[section].update(values)
        return data


_TRAJECTORY_SERIES = (
    Series("Baseline", K.BASELINE),
    Series("WetOnly", K.WET_ONLY),
    Series("MecOnly", K.MEC_ONLY),
    Series("IrsMecWet", K.IRS_MEC_WET),
)

PRESETS: dict[str, Preset] = {
    "fig3": Preset(
        "fig3",
        "Device energy, P_max = 0.004 W, mu = 0.75",
        {"harvest": {"p_max_watts": 0.004}, "task": {"offload_fraction": 0.75},
         "time": {"energy_fraction": 0.25}, "irs": {"element_count": 64}},
        _TRAJECTORY_SERIES,
    ),
    "fig4": Preset(
        "fig4",
        "Device energy, P_max = 0.04 W, mu = 0.75",
        {"harvest": {"p_max_watts": 0.04}, "task": {"offload_fraction": 0.75},
         "time": {"energy_fraction": 0.25}, "irs": {"element_count": 64}},
        _TRAJECTORY_SERIES + (Series("IrsMecWet-N200", K.IRS_MEC_WET, element_count=200),),
    ),
    "fig6": Preset(
        "fig6",
        "Gain-to-consumption ratio, N = 64, P_max = 0.04 W, mu = 0.5",
        {"harvest": {"p_max_watts": 0.04}, "task": {"offload_fraction": 0.5},
         "time": {"energy_fraction": 0.25}, "irs": {"element_count": 64}},
        (
            Series("WetOnly", K.WET_ONLY),
            Series("IrsWet", K.IRS_WET),
            Series("MecOnly", K.MEC_ONLY),
            Series("IrsMecWet", K.IRS_MEC_WET),
        ),
        sweep_bits=tuple(range(20_000, 50_001, 2_000)),
    ),
}


def preset_config(name: str, **changes: Any) -> ScenarioConfig:
    """Base config of a preset (before per-series scenario kind)."""
    from .model import config_from_dict

    cfg = config_from_dict(PRESETS[name].base_dict())
    return cfg.replace(**changes) if changes else cfg
