"""Task generation, offload split and the battery/deadline decision grid."""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .model import TaskModel
from .rng import Substream


class ComputeMode(str, Enum):
    LOCAL = "LocalCompute"
    OFFLOAD = "Offload"


class WetPriority(int, Enum):
    NONE = 0
    LOW = 1
    HIGH = 2


@dataclass(frozen=True)
class TaskDraw:
    l: int
    l_o: int
    l_c: int


@dataclass(frozen=True)
class ResourceClass:
    compute_mode: ComputeMode
    wet_priority: WetPriority


def draw_task_size(task: TaskModel, stream: Substream) -> int:
    """Uniform integer number of bits in ``[l_min_bits, l_max_bits]``."""
    return int(stream.integers(task.l_min_bits, task.l_max_bits, 1)[0])


def offloaded_bits(l, mu: float):
    """round-half-up(mu * l); works elementwise on arrays."""
    return np.floor(np.asarray(l, dtype=float) * mu + 0.5).astype(np.int64)


def split_task(l: int, mu: float) -> TaskDraw:
    if not 0.0 <= mu <= 1.0:
        raise ValueError(f"offload fraction {mu} out of [0,1]")
    l_o = int(offloaded_bits(l, mu))
    return TaskDraw(l=l, l_o=l_o, l_c=l - l_o)


def decision_grid_classify(
    battery: float, deadline_slack: float, e_low: float, z_tight: float
) -> ResourceClass:
    """Map (battery level, deadline slack) onto the four-cell grid.

    Ample battery with loose deadline computes locally without WET; a low
    battery always raises WET priority; a tight deadline always offloads.
    """
    if e_low <= 0 or z_tight <= 0:
        raise ValueError("grid thresholds must be positive")
    high_battery = battery >= e_low
    loose = deadline_slack >= z_tight
    if high_battery:
        if loose:
            return ResourceClass(ComputeMode.LOCAL, WetPriority.NONE)
        return ResourceClass(ComputeMode.OFFLOAD, WetPriority.LOW)
    if loose:
        return ResourceClass(ComputeMode.LOCAL, WetPriority.HIGH)
    return ResourceClass(ComputeMode.OFFLOAD, WetPriority.HIGH)
