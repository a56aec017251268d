import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ptvsim.energy import (
    EnergyLedger,
    OffloadError,
    energy_step,
    harvested_energy,
    local_compute_energy,
    offload_saved_energy,
    slot_ledger,
    transmission_energy,
)
from ptvsim.model import EnergyCostModel, HarvestModel, UplinkModel

H = HarvestModel(p_th_watts=1e-5, p_max_watts=0.04, efficiency=0.8)
C = EnergyCostModel()
TAU_V = 2.5e-4


def test_harvest_examples():
    assert harvested_energy(H.p_th_watts / 2, TAU_V, H) == 0.0
    assert harvested_energy(0.03, TAU_V, H) == pytest.approx(6.0e-6, rel=1e-12)
    assert harvested_energy(3.625, TAU_V, H) == pytest.approx(1.0e-5, rel=1e-12)
    # threshold is inclusive
    assert harvested_energy(H.p_th_watts, TAU_V, H) == pytest.approx(0.8 * 1e-5 * TAU_V)


def test_harvest_vectorised_matches_scalar():
    p = np.array([0.0, 5e-6, 1e-5, 0.01, 0.05, 10.0])
    np.testing.assert_array_equal(harvested_energy(p, TAU_V, H), [harvested_energy(x, TAU_V, H) for x in p])


@given(st.floats(0, 100), st.floats(0, 100))
def test_harvest_monotone_and_bounded(a, b):
    lo, hi = sorted((a, b))
    assert harvested_energy(lo, TAU_V, H) <= harvested_energy(hi, TAU_V, H)
    assert harvested_energy(hi, TAU_V, H) <= H.p_max_watts * TAU_V


def test_compute_energy_examples():
    assert local_compute_energy(0, C) == 0.0
    assert local_compute_energy(11_250, C) == pytest.approx(1.4238e-7, rel=1e-4)
    assert offload_saved_energy(33_750, C) == pytest.approx(3.8443e-6, rel=1e-4)
    assert offload_saved_energy(0, C) == 0.0
    assert local_compute_energy(2 * 12_345, C) == 8 * local_compute_energy(12_345, C)


@given(st.integers(0, 10**6))
def test_offload_saving_mirrors_local_cost(bits):
    assert offload_saved_energy(bits, C) == local_compute_energy(bits, C)


@given(st.integers(1, 10**6), st.integers(1, 10**6))
def test_compute_energy_superadditive(a, b):
    assert local_compute_energy(a, C) + local_compute_energy(b, C) < local_compute_energy(a + b, C)


def test_transmission_energy():
    assert transmission_energy(0, C) == 0.0
    assert transmission_energy(33_750, C) == pytest.approx(1.6875e-6, rel=1e-12)
    rate_costs = EnergyCostModel(device_tx_power_watts=0.01, uplink_model=UplinkModel.RATE)
    assert transmission_energy(33_750, rate_costs, rate=1e8) == pytest.approx(3.375e-6, rel=1e-12)
    assert transmission_energy(0, rate_costs, rate=0.0) == 0.0
    with pytest.raises(OffloadError):
        transmission_energy(10, rate_costs, rate=0.0)


def test_slot_ledger_baseline():
    led = slot_ledger(l_c=45_000, l_o=0, p_rx=1.0, tau_v=TAU_V, harvest=H, costs=C,
                      harvest_on=False, offload_on=False)
    assert led.e_g == 0.0
    assert led.e_c == pytest.approx(2e-6 + 9.1125e-6, rel=1e-12)
    assert led.e_c == pytest.approx(1.11125e-5, rel=1e-12)


def test_slot_ledger_offload_off_computes_everything_locally():
    led = slot_ledger(l_c=11_250, l_o=33_750, p_rx=0.0, tau_v=TAU_V, harvest=H, costs=C,
                      harvest_on=False, offload_on=False)
    assert led.e_o == 0.0 and led.e_tr == 0.0
    assert led.e_lc == pytest.approx(local_compute_energy(45_000, C))


def test_slot_ledger_mec_only():
    led = slot_ledger(l_c=11_250, l_o=33_750, p_rx=0.0, tau_v=TAU_V, harvest=H, costs=C,
                      harvest_on=False, offload_on=True)
    assert led.e_g == pytest.approx(3.8443e-6, rel=1e-4)
    assert led.e_c == pytest.approx(2e-6 + 1.4238e-7 + 1.6875e-6, rel=1e-4)
    assert led.e_c == pytest.approx(3.8299e-6, rel=1e-4)


def test_slot_ledger_wet_below_threshold():
    led = slot_ledger(l_c=45_000, l_o=0, p_rx=H.p_th_watts * 0.9, tau_v=TAU_V, harvest=H, costs=C,
                      harvest_on=True, offload_on=False)
    assert led.e_g == 0.0


def test_energy_step():
    assert energy_step(1e-3, EnergyLedger(2e-4, 0.0, 0.0, 0.0, 3e-4)) == (pytest.approx(9e-4), False)
    led = EnergyLedger(1e-5, 2e-6, 4e-6, 3e-6, 5e-6)
    assert energy_step(5e-4, led) == (5e-4, False)
    assert energy_step(1e-6, EnergyLedger(0.0, 0.0, 0.0, 0.0, 5e-6)) == (0.0, True)


@given(st.floats(0, 1e-2), st.floats(0, 1e-4), st.floats(0, 1e-4), st.floats(0, 1e-4))
def test_energy_step_balance(e, ev, eo, ec):
    led = EnergyLedger(ev, eo, ec, 0.0, 1e-7)
    nxt, depleted = energy_step(e, led)
    assert nxt >= 0.0
    if not depleted:
        assert nxt - e == pytest.approx(led.e_g - led.e_c, abs=4 * np.spacing(max(e, nxt, 1e-12)))
