import logging

import numpy as np
import pytest
from scipy.stats import ortho_group

from cfsec.capacity import downlink_multicast_rate, mac_region_2user, mac_sum_capacity
from cfsec.coeff_search import best_coefficient_matrix
from cfsec.errors import InvalidArgumentError

log = logging.getLogger(__name__)


def test_mac_sum_examples():
    assert mac_sum_capacity(np.zeros((1, 2))) == 0.0
    h = np.sqrt(10) * np.array([[0.9, 0.8]])
    assert mac_sum_capacity(h) == pytest.approx(0.5 * np.log2(15.5), abs=1e-12)
    assert mac_sum_capacity(np.eye(2)) == pytest.approx(1.0)


def test_mac_sum_orthogonal_invariance(rng):
    for _ in range(50):
        H = rng.standard_normal((3, 4))
        Q = ortho_group.rvs(3, random_state=rng)
        assert mac_sum_capacity(Q @ H) == pytest.approx(mac_sum_capacity(H), abs=1e-10)


def test_mac_region_reference_channel():
    reg = mac_region_2user(np.sqrt(10) * np.array([[0.9, 0.8]]))
    c1, c2 = 0.5 * np.log2(9.1), 0.5 * np.log2(7.4)
    assert reg.user_capacities == pytest.approx((c1, c2))
    assert reg.sum_capacity == pytest.approx(0.5 * np.log2(15.5))
    r1 = [v[0] for v in reg.vertices]
    assert r1 == sorted(r1)
    assert all(min(v) >= 0 for v in reg.vertices)
    assert reg.vertices[2] == pytest.approx((reg.sum_capacity - c2, c2))
    assert reg.contains(0.5, 0.5) and not reg.contains(1.0, 1.0)
    assert reg.to_csv().splitlines()[0] == "R1,R2"
    assert len(reg.to_csv().splitlines()) == 6


def test_mac_region_degenerate_and_symmetric():
    assert mac_region_2user([[0, 0]]).vertices == ((0.0, 0.0),)
    reg = mac_region_2user([[1, 1]])
    assert reg.user_capacities == pytest.approx((0.5, 0.5))
    flipped = sorted((b, a) for a, b in reg.vertices)
    assert flipped == pytest.approx(sorted(reg.vertices))


def test_mac_region_rejects_shape():
    with pytest.raises(InvalidArgumentError):
        mac_region_2user([[1, 1, 1]])


def test_downlink_examples():
    assert downlink_multicast_rate([[0.9, 0.8]], 10) == pytest.approx(0.5 * np.log2(7.4))
    assert downlink_multicast_rate([[1, 1]], 1) == pytest.approx(0.5)
    H = np.array([[1.0, 1.0], [0.0, 0.0]])
    assert downlink_multicast_rate(H, 10) == pytest.approx(0.5 * np.log2(11), abs=1e-9)


def test_downlink_two_antennas_against_angle_sweep(rng):
    # oracle: dense sweep of the beamforming angle on the unit circle
    theta = np.linspace(0, np.pi, 200_001)
    W = np.stack([np.cos(theta), np.sin(theta)])
    for _ in range(20):
        H = rng.standard_normal((2, 3))
        P = 10.0
        best = np.max(np.min(np.abs(W.T @ H), axis=1))
        oracle = 0.5 * np.log2(1 + P * best ** 2)
        assert downlink_multicast_rate(H, P) == pytest.approx(oracle, abs=1e-4)


def test_downlink_is_deterministic(rng):
    H = rng.standard_normal((3, 3))
    assert downlink_multicast_rate(H, 5.0) == downlink_multicast_rate(H, 5.0)


def test_downlink_not_limiting_empirically(rng):
    # the uplink is expected to be the bottleneck; violations are only logged
    violations = 0
    for _ in range(1000):
        H = rng.standard_normal((1, 2))
        P = float(rng.choice([1.0, 3.16, 10.0, 100.0]))
        r_cf = best_coefficient_matrix(H, P).rate
        if downlink_multicast_rate(H, P) < r_cf - 1e-12:
            violations += 1
    if violations:
        log.warning("downlink below computation rate in %d of 1000 draws", violations)
    assert violations <= 1000
