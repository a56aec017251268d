"""Time-stepped trajectories, Monte Carlo aggregation and data-size sweeps.

Iterations are processed in fixed-size chunks whose contents never depend
on the worker count, and all cross-iteration reductions run over the full
iteration-ordered array, so results are bit-identical for any number of
workers.
"""
from __future__ import annotations

import dataclasses
import functools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .channel import LinkBudget, combine_gain, uplink_rate
from .energy import EnergyLedger, OffloadError, transmission_energy
from .model import ScenarioConfig, UplinkModel, link_distances, time_split, validate_config
from .rng import StreamRole, complex_normal_grid, stream_key, uniform_grid, uniform_to_integers
from .scheduler import ComputeMode, decision_grid_classify, offloaded_bits

CHUNK = 50
Z95 = 1.959963984540054


class RatioError(ArithmeticError):
    """Gain-to-consumption ratio requested with zero total consumption."""


@dataclass(frozen=True)
class Trajectory:
    energy_series: np.ndarray
    ledger_series: list[EnergyLedger]
    depletion_slot: int | None


@dataclass(frozen=True)
class AggregateResult:
    """Per-slot statistics over independent trajectories.

    Energy arrays have ``horizon + 1`` entries (slot 0 is the initial
    level); ledger means have ``horizon`` entries, one per simulated slot.
    """

    mean_series: np.ndarray
    ci_low: np.ndarray
    ci_high: np.ndarray
    mean_e_v: np.ndarray
    mean_e_o: np.ndarray
    mean_e_c: np.ndarray
    final_energies: np.ndarray
    depleted_fraction: float
    iterations: int
    master_seed: int

    @property
    def half_width(self) -> np.ndarray:
        return self.ci_high - self.mean_series


@dataclass(frozen=True)
class RatioPoint:
    l_bits: int
    ratio_mean: float
    ratio_ci_low: float
    ratio_ci_high: float


@dataclass
class _Block:
    energy: np.ndarray  # (I, H+1)
    e_v: np.ndarray  # (I, H)
    e_o: np.ndarray
    e_lc: np.ndarray
    e_tr: np.ndarray
    e_ckt: float
    depletion: np.ndarray  # (I,), -1 when never depleted


@functools.lru_cache(maxsize=128)
def _gain_grid(
    master_seed: int,
    scenario_id: int,
    start: int,
    stop: int,
    horizon: int,
    n_elements: int,
    irs,
    channel,
    geometry,
) -> np.ndarray:
    its = np.arange(start, stop, dtype=np.uint64)
    budget = LinkBudget.from_distances(link_distances(geometry), channel)
    direct = complex_normal_grid(stream_key(master_seed, scenario_id, StreamRole.DIRECT), its, horizon, 1)[..., 0]
    if n_elements:
        if channel.fixed_ap_irs_fading:
            g = np.ones((its.size, horizon, n_elements), complex)
        else:
            g = complex_normal_grid(stream_key(master_seed, scenario_id, StreamRole.AP_IRS), its, horizon, n_elements)
        f = complex_normal_grid(stream_key(master_seed, scenario_id, StreamRole.IRS_DEV), its, horizon, n_elements)
    else:
        g = f = np.zeros((its.size, horizon, 0), complex)
    gain = combine_gain(direct, g, f, irs, budget)
    gain.setflags(write=False)
    return gain


def _task_grid(config: ScenarioConfig, scenario_id: int, its: np.ndarray, horizon: int) -> np.ndarray:
    u = uniform_grid(stream_key(config.master_seed, scenario_id, StreamRole.TASK), its, horizon, 1)[..., 0]
    return uniform_to_integers(u, config.task.l_min_bits, config.task.l_max_bits)


def _simulate_block(config: ScenarioConfig, start: int, stop: int, scenario_id: int) -> _Block:
    kind = config.scenario_kind
    horizon = config.time.horizon_tti
    its = np.arange(start, stop, dtype=np.uint64)
    n_it = its.size
    tau_v, _ = time_split(config.time)
    costs = config.costs
    mu = config.effective_offload_fraction
    rate_model = costs.uplink_model is UplinkModel.RATE

    l = _task_grid(config, scenario_id, its, horizon)

    gain = None
    if kind.harvests or (kind.offloads and rate_model):
        gain = _gain_grid(
            config.master_seed, scenario_id, start, stop, horizon,
            config.effective_element_count, config.irs, config.channel, config.geometry,
        )

    if kind.harvests:
        p_rx = config.ap_tx_power_watts * gain
        h = config.harvest
        e_v = np.where(p_rx >= h.p_th_watts, np.minimum(h.efficiency * p_rx, h.p_max_watts), 0.0) * tau_v
    else:
        e_v = np.zeros((n_it, horizon))

    rate = None
    if kind.offloads and rate_model:
        rate = uplink_rate(costs.device_tx_power_watts, gain, costs.uplink_bandwidth_hz, costs.noise_power_watts)

    def terms(l_o: np.ndarray, l_c: np.ndarray, r):
        l_o_f = l_o.astype(float)
        l_c_f = l_c.astype(float)
        e_o = costs.xi_joule_per_cycle3 * (costs.psi_cycles_per_bit * l_o_f) ** 3
        e_lc = costs.xi_joule_per_cycle3 * (costs.psi_cycles_per_bit * l_c_f) ** 3
        e_tr = transmission_energy(l_o_f, costs, r) if np.any(l_o) else np.zeros(l_o.shape)
        return e_o, e_lc, np.asarray(e_tr, dtype=float)

    adaptive = config.grid.adaptive and kind.offloads
    e_ckt = costs.e_ckt_joules
    energy = np.empty((n_it, horizon + 1))
    energy[:, 0] = config.initial_energy_joules
    depletion = np.full(n_it, -1, dtype=np.int64)

    if not adaptive:
        l_o = offloaded_bits(l, mu)
        e_o, e_lc, e_tr = terms(l_o, l - l_o, rate)
    else:
        e_o = np.empty((n_it, horizon))
        e_lc = np.empty((n_it, horizon))
        e_tr = np.empty((n_it, horizon))

    gp = config.grid
    for t in range(horizon):
        if adaptive:
            offload = np.array([
                decision_grid_classify(e, gp.deadline_slack_seconds, gp.e_low_joules, gp.z_tight_seconds).compute_mode
                is ComputeMode.OFFLOAD
                for e in energy[:, t]
            ])
            l_o = np.where(offload, offloaded_bits(l[:, t], mu), 0)
            e_o[:, t], e_lc[:, t], e_tr[:, t] = terms(l_o, l[:, t] - l_o, None if rate is None else rate[:, t])
        e_g = e_v[:, t] + e_o[:, t]
        e_c = e_ckt + e_lc[:, t] + e_tr[:, t]
        nxt = energy[:, t] + e_g - e_c
        hit = nxt < 0.0
        depletion[hit & (depletion < 0)] = t + 1
        energy[:, t + 1] = np.where(hit, 0.0, nxt)

    return _Block(energy, e_v, e_o, e_lc, e_tr, e_ckt, depletion)


def _simulate_chunk(args) -> _Block:
    return _simulate_block(*args)


def _run(config: ScenarioConfig, workers: int, scenario_id: int) -> _Block:
    validate_config(config)
    n = config.iterations
    jobs = [(config, s, min(s + CHUNK, n), scenario_id) for s in range(0, n, CHUNK)]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            blocks = list(pool.map(_simulate_chunk, jobs))
    else:
        blocks = [_simulate_chunk(j) for j in jobs]
    return _Block(
        energy=np.concatenate([b.energy for b in blocks]),
        e_v=np.concatenate([b.e_v for b in blocks]),
        e_o=np.concatenate([b.e_o for b in blocks]),
        e_lc=np.concatenate([b.e_lc for b in blocks]),
        e_tr=np.concatenate([b.e_tr for b in blocks]),
        e_ckt=blocks[0].e_ckt,
        depletion=np.concatenate([b.depletion for b in blocks]),
    )


def simulate_trajectory(config: ScenarioConfig, iteration_index: int, scenario_id: int = 0) -> Trajectory:
    """One battery trajectory, reproducible from (master_seed, scenario_id, iteration_index)."""
    validate_config(config)
    b = _simulate_block(config, iteration_index, iteration_index + 1, scenario_id)
    ledgers = [
        EnergyLedger(
            e_v=float(b.e_v[0, t]),
            e_o=float(b.e_o[0, t]),
            e_lc=float(b.e_lc[0, t]),
            e_tr=float(b.e_tr[0, t]),
            e_ckt=b.e_ckt,
        )
        for t in range(config.time.horizon_tti)
    ]
    slot = int(b.depletion[0])
    return Trajectory(b.energy[0].copy(), ledgers, slot if slot >= 0 else None)


def _mean_ci(samples: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    n = samples.shape[0]
    mean = np.mean(samples, axis=0)
    if n > 1:
        half = Z95 * np.std(samples, axis=0, ddof=1) / np.sqrt(n)
    else:
        half = np.zeros_like(mean)
    return mean, mean - half, mean + half


def monte_carlo(config: ScenarioConfig, workers: int = 1, scenario_id: int = 0) -> AggregateResult:
    """Mean battery trajectory with a 95% normal-approximation band."""
    b = _run(config, workers, scenario_id)
    mean, lo, hi = _mean_ci(b.energy)
    return AggregateResult(
        mean_series=mean,
        ci_low=lo,
        ci_high=hi,
        mean_e_v=np.mean(b.e_v, axis=0),
        mean_e_o=np.mean(b.e_o, axis=0),
        mean_e_c=np.mean(b.e_ckt + b.e_lc + b.e_tr, axis=0),
        final_energies=b.energy[:, -1].copy(),
        depleted_fraction=float(np.mean(b.depletion >= 0)),
        iterations=config.iterations,
        master_seed=config.master_seed,
    )


def gain_consumption_ratios(config: ScenarioConfig, workers: int = 1, scenario_id: int = 0) -> np.ndarray:
    """Per-iteration ratio of summed gains to summed consumption."""
    b = _run(config, workers, scenario_id)
    gains = np.sum(b.e_v + b.e_o, axis=1)
    costs = np.sum(b.e_ckt + b.e_lc + b.e_tr, axis=1)
    if np.any(costs <= 0):
        raise RatioError("total consumption is zero; gain-to-consumption ratio undefined")
    return gains / costs


def ratio_sweep(
    config: ScenarioConfig, data_sizes, workers: int = 1, scenario_id: int = 0
) -> list[RatioPoint]:
    """Mean per-iteration gain/consumption ratio with the task size pinned to each value."""
    sizes = list(data_sizes)
    if not sizes:
        raise ValueError("data_sizes must be non-empty")
    out = []
    for l in sizes:
        cfg = config.replace(task=dataclasses.replace(config.task, l_min_bits=int(l), l_max_bits=int(l)))
        mean, lo, hi = _mean_ci(gain_consumption_ratios(cfg, workers, scenario_id))
        out.append(RatioPoint(int(l), float(mean), float(lo), float(hi)))
    return out


__all__ = [
    "AggregateResult",
    "OffloadError",
    "RatioError",
    "RatioPoint",
    "Trajectory",
    "gain_consumption_ratios",
    "monte_carlo",
    "ratio_sweep",
    "simulate_trajectory",
]
