import json

import numpy as np
import pytest

from cfsec.capacity import mac_sum_capacity
from cfsec.channel import PowerAllocation, PowerBudget, miso_collapse
from cfsec.coeff_search import best_coefficient_matrix, brute_force_best
from cfsec.errors import InvalidArgumentError
from cfsec.secrecy import (baseline_rates, baselines_to_csv, secrecy_rate,
                           twoway_jammer_rate)

R_REF = 0.5 * np.log2(15.5 / 2.1)
C_REF = 0.5 * np.log2(15.5)
RS_REF = (2 * R_REF - C_REF) / 2


def test_reference_channel_report():
    rep = secrecy_rate([[0.9, 0.8]], PowerBudget(10.0))
    assert rep.r_cf == pytest.approx(R_REF, abs=1e-12)
    assert rep.mac_sum == pytest.approx(C_REF, abs=1e-12)
    assert rep.per_user_secrecy == pytest.approx(RS_REF, abs=1e-12)
    assert rep.coefficient_matrix == ((1, 1),)
    assert rep.downlink_rate == pytest.approx(0.5 * np.log2(7.4))
    d = json.loads(rep.to_json())
    assert d["coefficient_matrix"] == [[1, 1]] and d["allocation"] == [10.0, 10.0]


def test_zero_channel():
    rep = secrecy_rate(np.zeros((1, 2)), PowerBudget(10.0))
    assert rep.per_user_secrecy == 0.0 and not rep.feasible


def test_miso_reduction():
    P = PowerBudget(2.0)
    miso = secrecy_rate(miso_collapse([(3, 4), (5, 0)]), P)
    siso = secrecy_rate([[5, 5]], P)
    assert miso == siso


def test_noise_variance_scales_snr():
    a = secrecy_rate([[0.9, 0.8]], PowerBudget(20.0, noise_variance=2.0), (20.0, 20.0))
    b = secrecy_rate([[0.9, 0.8]], PowerBudget(10.0), (10.0, 10.0))
    assert a.per_user_secrecy == pytest.approx(b.per_user_secrecy)


def test_leakage_modes_differ_only_below_full_power():
    H, budget = [[0.8, 0.5]], PowerBudget(10.0)
    full_b = secrecy_rate(H, budget, leakage="budget")
    full_a = secrecy_rate(H, budget, leakage="allocated")
    assert full_b.per_user_secrecy == full_a.per_user_secrecy
    red_b = secrecy_rate(H, budget, (7.7, 10.0), leakage="budget")
    red_a = secrecy_rate(H, budget, (7.7, 10.0), leakage="allocated")
    assert red_a.mac_sum < red_b.mac_sum
    assert red_b.mac_sum_allocated == pytest.approx(red_a.mac_sum)
    # allocated leakage is the tighter bound
    assert red_a.per_user_secrecy >= red_b.per_user_secrecy
    with pytest.raises(InvalidArgumentError):
        secrecy_rate(H, budget, leakage="bogus")


def test_reduced_power_beats_full_power():
    H, budget = [[0.8, 0.5]], PowerBudget(10.0)
    for mode in ("budget", "allocated"):
        full = secrecy_rate(H, budget, leakage=mode).per_user_secrecy
        reduced = secrecy_rate(H, budget, (7.7, 10.0), leakage=mode).per_user_secrecy
        assert reduced > full


def test_drop_half_flag():
    rep = secrecy_rate([[0.9, 0.8]], PowerBudget(10.0), literal=True)
    assert rep.r_cf == pytest.approx(2 * R_REF)
    assert rep.per_user_secrecy == pytest.approx((4 * R_REF - C_REF) / 2)


def test_allocation_checked():
    with pytest.raises(InvalidArgumentError):
        secrecy_rate([[1, 1]], PowerBudget(1.0), (2.0, 1.0))
    with pytest.raises(InvalidArgumentError):
        secrecy_rate([[1, 1]], PowerBudget(1.0), (1.0, 1.0, 1.0))


def test_secrecy_invariants_random(rng):
    for _ in range(300):
        L = int(rng.integers(2, 4))
        eta = int(rng.integers(1, 3))
        H = rng.standard_normal((eta, L))
        P = float(rng.choice([1.0, 3.16, 10.0, 100.0]))
        powers = tuple(rng.uniform(0.1 * P, P, size=L))
        for mode in ("budget", "allocated"):
            rep = secrecy_rate(H, PowerBudget(P), powers, leakage=mode, with_downlink=False)
            assert 0.0 <= rep.per_user_secrecy <= rep.r_cf + 1e-12
            if rep.per_user_secrecy > 0:
                # common rate point lies outside the MAC region of the allocation
                assert L * rep.r_cf > rep.mac_sum_allocated


def test_twoway_examples():
    expected = 0.5 * np.log2(10.5) - 0.5 * np.log2(21 / 11)
    assert twoway_jammer_rate(1, 1, 10) == pytest.approx(expected, abs=1e-12)
    assert twoway_jammer_rate(1, 1, 1e-3) == 0.0
    assert twoway_jammer_rate(1, 0, 10) == 0.0


def test_twoway_h2_zero_nonpositive_for_all_a():
    # oracle: every admissible a in a box gives R - 1/2 log2(1 + P) <= 0
    for P in (1.0, 10.0, 100.0):
        h = np.sqrt(P) * np.array([[1.0, 0.0]])
        best = brute_force_best(h + 1e-300, 1.0, 10)
        assert best.rate - 0.5 * np.log2(1 + P) <= 0
        assert twoway_jammer_rate(1, 0, P) == 0.0


def test_baselines_p10():
    b = baseline_rates(10.0)
    cf = 0.5 * np.log2(10.5)
    assert b.r_cf_total == pytest.approx(cf)
    assert b.r_s_hs == pytest.approx(cf - 1)
    assert b.r_s_ks == 0.0 and b.r_s_kp == 0.0
    assert b.r_s_cf == pytest.approx(cf - 0.5 * np.log2(21 / 11))


def test_baselines_clamps_and_ordering():
    assert baseline_rates(2.0).r_s_hs == 0.0
    b = baseline_rates(1000.0)
    assert b.r_s_cf > b.r_s_hs > b.r_s_ks > b.r_s_kp > 0
    assert all(baseline_rates(p).ordered() for p in np.logspace(-1, 4, 60))


def test_baselines_csv():
    text = baselines_to_csv([baseline_rates(10.0)])
    assert text.splitlines()[0] == "P,R_CF,R_s_CF,R_s_HS,R_s_KS,R_s_KP"
