import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.stats import special_ortho_group

from cfsec.channel import (ChannelMatrix, MisoUserChannels, PowerAllocation, PowerBudget,
                           channel_to_json, effective_channel, miso_collapse,
                           parse_channel_json)
from cfsec.errors import InvalidArgumentError


@pytest.mark.parametrize("H, powers, expected", [
    ([[1, 1]], (1, 1), [[1, 1]]),
    ([[0.8, 0.5]], (4, 1), [[1.6, 0.5]]),
    (np.eye(2), (9, 4), [[3, 0], [0, 2]]),
])
def test_effective_channel_examples(H, powers, expected):
    np.testing.assert_allclose(effective_channel(H, PowerAllocation(powers)), expected)


def test_effective_channel_dimension_mismatch():
    with pytest.raises(InvalidArgumentError):
        effective_channel([[1, 1]], (1, 1, 1))


@given(st.lists(st.floats(-5, 5), min_size=2, max_size=4), st.floats(0.1, 100))
def test_effective_channel_unit_and_full_power(row, P):
    H = np.array([row])
    np.testing.assert_array_equal(effective_channel(H, (1.0,) * len(row)), H)
    np.testing.assert_allclose(effective_channel(H, PowerAllocation.full(len(row), P)),
                               H * np.sqrt(P))


@pytest.mark.parametrize("vecs, expected", [
    ([(3, 4), (0, 1)], [[5, 1]]),
    ([(1,), (1,)], [[1, 1]]),
    ([(0, 0), (1, 0)], [[0, 1]]),
])
def test_miso_collapse_examples(vecs, expected):
    np.testing.assert_allclose(miso_collapse(vecs), expected)


def test_miso_collapse_rejects_empty():
    with pytest.raises(InvalidArgumentError):
        miso_collapse([])


@settings(max_examples=50)
@given(st.integers(0, 2**32 - 1))
def test_miso_collapse_rotation_invariant(seed):
    rng = np.random.default_rng(seed)
    vecs = list(rng.standard_normal((3, 3)))
    Q = special_ortho_group.rvs(3, random_state=seed)
    rotated = [vecs[0], Q @ vecs[1], vecs[2]]
    out = miso_collapse(vecs)
    assert np.all(out >= 0)
    np.testing.assert_allclose(miso_collapse(rotated), out, rtol=1e-12)


def test_channel_matrix_invariants():
    with pytest.raises(InvalidArgumentError):
        ChannelMatrix([[1.0]])  # single user
    with pytest.raises(InvalidArgumentError):
        ChannelMatrix([[1.0, np.nan]])
    H = ChannelMatrix([[1, 2], [3, 4]])
    assert (H.n_antennas, H.n_users) == (2, 2)
    with pytest.raises(ValueError):
        H.entries[0, 0] = 5.0


def test_power_types_validate():
    with pytest.raises(InvalidArgumentError):
        PowerBudget(0.0)
    with pytest.raises(InvalidArgumentError):
        PowerBudget(1.0, noise_variance=-1)
    with pytest.raises(InvalidArgumentError):
        PowerAllocation((1.0, 0.0))
    with pytest.raises(InvalidArgumentError):
        PowerAllocation((1.0, 11.0)).check(PowerBudget(10.0))
    with pytest.raises(InvalidArgumentError):
        MisoUserChannels(([1.0, np.inf], [1.0]))


def test_snr_conversion():
    b = PowerBudget.from_snr_db(5.0, noise_variance=2.0)
    assert b.P == pytest.approx(2.0 * 10 ** 0.5)
    assert b.snr == pytest.approx(10 ** 0.5)


def test_channel_json_roundtrip():
    H, b = parse_channel_json('{"H": [[0.9, 0.8]], "P": 10, "noise_var": 1}')
    assert H.tolist() == [[0.9, 0.8]] and b.P == 10
    H2, b2 = parse_channel_json(channel_to_json(H, b))
    assert H2.tolist() == H.tolist() and b2 == b
    assert json.loads(channel_to_json(H, b))["noise_var"] == 1


@pytest.mark.parametrize("text", ["not json", "[1, 2]", '{"P": 1}', '{"H": [[1]]}'])
def test_channel_json_rejects(text):
    with pytest.raises(InvalidArgumentError):
        parse_channel_json(text)
