import numpy as np
import pytest

from cfsec.channel import PowerBudget
from cfsec.errors import InvalidArgumentError
from cfsec.power_alloc import GridSpec, optimize_power, power_levels
from cfsec.secrecy import secrecy_rate


def test_power_levels_end_at_budget():
    lv = power_levels(1.0, 10.0, 0.1)
    assert lv[0] == 1.0 and lv[-1] == 10.0 and len(lv) == 91
    assert power_levels(0.3, 1.0, 0.3)[-1] == 1.0


def test_reference_channel_full_power_optimal():
    alloc, rep = optimize_power([[0.9, 0.8]], PowerBudget(10.0))
    assert alloc.powers == (10.0, 10.0)
    assert rep.per_user_secrecy == pytest.approx(secrecy_rate([[0.9, 0.8]],
                                                              PowerBudget(10.0)).per_user_secrecy)


def test_symmetric_channel_full_power():
    for P in (1.0, 10.0):
        alloc, _ = optimize_power([[1, 1]], PowerBudget(P), GridSpec(P / 20))
        assert alloc.powers == (P, P)


def test_allocated_leakage_variant():
    # with the tighter leakage term the trade-off moves to a lower power
    alloc, rep = optimize_power([[0.8, 0.5]], PowerBudget(10.0), leakage="allocated")
    assert alloc.powers == pytest.approx((5.4, 10.0))
    assert rep.per_user_secrecy > secrecy_rate([[0.8, 0.5]], PowerBudget(10.0),
                                               leakage="allocated").per_user_secrecy


def test_objective_not_below_full_power(rng):
    for _ in range(10):
        H = rng.standard_normal((1, 2))
        budget = PowerBudget(3.0)
        _, rep = optimize_power(H, budget, GridSpec(0.3), with_downlink=False)
        full = secrecy_rate(H, budget, with_downlink=False).per_user_secrecy
        assert rep.per_user_secrecy >= full


def test_refinement_monotone_and_deterministic():
    H, budget = [[0.8, 0.5]], PowerBudget(10.0)
    a1, r1, trace = optimize_power(H, budget, GridSpec(0.5, 2), return_trace=True,
                                   leakage="allocated")
    assert len(trace) == 3
    assert all(y >= x for x, y in zip(trace, trace[1:]))
    a2, r2, _ = optimize_power(H, budget, GridSpec(0.5, 2), return_trace=True,
                               leakage="allocated")
    assert a1 == a2 and r1 == r2


def test_three_users_runs():
    alloc, rep = optimize_power([[1.0, 0.9, 1.1]], PowerBudget(10.0), GridSpec(3.0))
    assert len(alloc) == 3 and rep.per_user_secrecy >= 0


def test_guards():
    with pytest.raises(InvalidArgumentError):
        optimize_power(np.ones((1, 5)), PowerBudget(1.0))
    with pytest.raises(InvalidArgumentError):
        optimize_power(np.ones((1, 4)), PowerBudget(100.0), GridSpec(0.01))
    with pytest.raises(InvalidArgumentError):
        GridSpec(0.0)
    with pytest.raises(InvalidArgumentError):
        GridSpec(0.1, -1)
    with pytest.raises(InvalidArgumentError):
        optimize_power([[1, 1]], PowerBudget(1.0), GridSpec(0.1, min_power=2.0))
