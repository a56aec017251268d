"""Pathloss, Rayleigh small-scale fading and the IRS composite link."""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .model import ChannelParams, IrsPanel
from .rng import Substream

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ChannelRealization:
    """Small-scale coefficients for one slot.

    ``cascade_ap_irs[n]`` and ``cascade_irs_dev[n]`` are the AP->element and
    element->device coefficients of element ``n``.
    """

    direct_coeff: complex
    cascade_ap_irs: np.ndarray
    cascade_irs_dev: np.ndarray

    @property
    def element_count(self) -> int:
        return len(self.cascade_ap_irs)


def pathloss_gain(distance: float, exponent: float, reference_distance: float = 1.0) -> float:
    """Linear power gain ``(d / d_ref) ** -exponent``, clamped to 1 inside ``d_ref``."""
    if distance < reference_distance:
        logger.warning(
            "distance %.4g m is inside the reference distance %.4g m; gain clamped to 1",
            distance,
            reference_distance,
        )
        return 1.0
    return float((distance / reference_distance) ** (-exponent))


def draw_small_scale(stream: Substream, n: int | None = None):
    """Zero-mean, unit-variance complex Gaussian draw(s); power is Exp(1)."""
    if n is None:
        return complex(stream.complex_normal(1)[0])
    return stream.complex_normal(n)


def draw_realization(
    direct: Substream, ap_irs: Substream, irs_dev: Substream, element_count: int,
    fixed_ap_irs: bool = False,
) -> ChannelRealization:
    g = np.ones(element_count, complex) if fixed_ap_irs else ap_irs.complex_normal(element_count)
    return ChannelRealization(
        direct_coeff=draw_small_scale(direct),
        cascade_ap_irs=g,
        cascade_irs_dev=irs_dev.complex_normal(element_count),
    )


@dataclass(frozen=True)
class LinkBudget:
    """Large-scale power gains of the three links."""

    direct: float
    ap_irs: float
    irs_dev: float

    @classmethod
    def from_distances(cls, distances: tuple[float, float, float], params: ChannelParams) -> "LinkBudget":
        d_ap_dev, d_ap_irs, d_irs_dev = distances
        ref = params.reference_distance_m
        return cls(
            direct=pathloss_gain(d_ap_dev, params.alpha_nlos, ref),
            ap_irs=pathloss_gain(d_ap_irs, params.alpha_los, ref),
            irs_dev=pathloss_gain(d_irs_dev, params.alpha_nlos, ref),
        )

    def mean_gain(self, irs: IrsPanel, element_count: int | None = None) -> float:
        """Expected effective gain under i.i.d. zero-mean fading (incoherent sum)."""
        n = irs.element_count if element_count is None else element_count
        return self.direct + irs.amplitude**2 * n * self.ap_irs * self.irs_dev


def _reflection(irs: IrsPanel, n: int) -> np.ndarray | complex:
    phase = irs.phase_shift_rad
    if isinstance(phase, tuple):
        if len(phase) != n:
            raise ValueError(f"per-element phase vector has {len(phase)} entries, expected {n}")
        return irs.amplitude * np.exp(1j * np.asarray(phase))
    return irs.amplitude * np.exp(1j * phase)


def combine_gain(
    direct: np.ndarray,
    ap_irs: np.ndarray,
    irs_dev: np.ndarray,
    irs: IrsPanel,
    budget: LinkBudget,
) -> np.ndarray:
    """Vectorised effective gain; cascade arrays carry elements on the last axis."""
    field = np.sqrt(budget.direct) * np.asarray(direct)
    n = np.shape(ap_irs)[-1]
    if n:
        refl = _reflection(irs, n)
        if np.ndim(refl) == 0:
            cascade = refl * np.sum(ap_irs * irs_dev, axis=-1)
        else:
            cascade = np.sum(refl * ap_irs * irs_dev, axis=-1)
        field = field + np.sqrt(budget.ap_irs * budget.irs_dev) * cascade
    return np.abs(field) ** 2


def effective_channel(
    realization: ChannelRealization,
    irs: IrsPanel,
    distances: tuple[float, float, float],
    params: ChannelParams,
) -> float:
    """Power gain of direct plus reflected paths for one realisation."""
    if realization.element_count != irs.element_count or len(realization.cascade_irs_dev) != irs.element_count:
        raise ValueError(
            f"realisation has {realization.element_count} cascade pairs, IRS has {irs.element_count} elements"
        )
    budget = LinkBudget.from_distances(distances, params)
    return float(
        combine_gain(
            realization.direct_coeff,
            np.asarray(realization.cascade_ap_irs, dtype=complex),
            np.asarray(realization.cascade_irs_dev, dtype=complex),
            irs,
            budget,
        )
    )


def received_power(p_tx: float, gain):
    return p_tx * gain


def uplink_rate(device_tx_power: float, gain, bandwidth: float, noise_power: float):
    """Shannon rate in bits/s."""
    return bandwidth * np.log2(1.0 + device_tx_power * np.asarray(gain) / noise_power)
