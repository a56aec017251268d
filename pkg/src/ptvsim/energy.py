"""Per-slot energy terms and the battery recursion."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import EnergyCostModel, HarvestModel, UplinkModel


class OffloadError(ArithmeticError):
    """Offloading requested over a link with zero capacity."""


@dataclass(frozen=True)
class EnergyLedger:
    """Gains and consumptions of one slot, in Joules."""

    e_v: float
    e_o: float
    e_lc: float
    e_tr: float
    e_ckt: float

    @property
    def e_g(self) -> float:
        return self.e_v + self.e_o

    @property
    def e_c(self) -> float:
        return self.e_ckt + self.e_lc + self.e_tr


def harvested_energy(p_rx, tau_v: float, model: HarvestModel):
    """Thresholded, saturating harvester: 0 below ``p_th``, else ``min(eta*P, p_max) * tau_v``.

    Works on scalars and arrays; the threshold is inclusive.
    """
    p = np.asarray(p_rx, dtype=float)
    power = np.where(p >= model.p_th_watts, np.minimum(model.efficiency * p, model.p_max_watts), 0.0)
    out = power * tau_v
    return float(out) if out.ndim == 0 else out


def _cubic(bits, costs: EnergyCostModel):
    b = np.asarray(bits, dtype=float)
    out = costs.xi_joule_per_cycle3 * (costs.psi_cycles_per_bit * b) ** 3
    return float(out) if out.ndim == 0 else out


def local_compute_energy(l_c, costs: EnergyCostModel):
    """CPU energy for ``l_c`` bits: xi * (psi * l_c)**3."""
    return _cubic(l_c, costs)


def offload_saved_energy(l_o, costs: EnergyCostModel):
    """Energy the device would have spent computing the offloaded bits."""
    return _cubic(l_o, costs)


def transmission_energy(l_o, costs: EnergyCostModel, rate=None):
    """Uplink energy for ``l_o`` bits.

    The per-bit model charges ``e_bit_joules`` per bit; the rate model
    charges the device transmit power for ``l_o / rate`` seconds.
    """
    bits = np.asarray(l_o, dtype=float)
    if costs.uplink_model is UplinkModel.PER_BIT:
        out = costs.e_bit_joules * bits
    else:
        if rate is None:
            raise ValueError("rate-based uplink model needs an uplink rate")
        r = np.broadcast_to(np.asarray(rate, dtype=float), bits.shape)
        if np.any((r <= 0) & (bits > 0)):
            raise OffloadError("cannot offload over a zero-rate uplink")
        with np.errstate(divide="ignore", invalid="ignore"):
            out = np.where(bits > 0, costs.device_tx_power_watts * bits / r, 0.0)
    return float(out) if out.ndim == 0 else out


def slot_ledger(
    *,
    l_c: float,
    l_o: float,
    p_rx: float,
    tau_v: float,
    harvest: HarvestModel,
    costs: EnergyCostModel,
    harvest_on: bool,
    offload_on: bool,
    rate: float | None = None,
) -> EnergyLedger:
    """Assemble one slot's ledger under the scenario switches.

    With offloading off the whole task is computed locally.
    """
    if not offload_on:
        l_c, l_o = l_c + l_o, 0
    return EnergyLedger(
        e_v=harvested_energy(p_rx, tau_v, harvest) if harvest_on else 0.0,
        e_o=offload_saved_energy(l_o, costs),
        e_lc=local_compute_energy(l_c, costs),
        e_tr=transmission_energy(l_o, costs, rate) if l_o else 0.0,
        e_ckt=costs.e_ckt_joules,
    )


def energy_step(energy: float, ledger: EnergyLedger) -> tuple[float, bool]:
    """Next battery level and whether the zero floor was hit."""
    nxt = energy + ledger.e_g - ledger.e_c
    if nxt < 0.0:
        return 0.0, True
    return nxt, False
