import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from privsc.channel import ChannelConfig, transmit
from privsc.codec import BitFrame


def frame(n=64, width=8, seed=0):
    return BitFrame(np.random.default_rng(seed).integers(0, 2, n), width)


def test_p_zero_is_identity_and_p_one_complements():
    f = frame()
    rx, tap = transmit(f, ChannelConfig(0.0, 1))
    assert rx == f and tap == f
    rx, _ = transmit(f, ChannelConfig(1.0, 1))
    assert np.array_equal(rx.bits, 1 - f.bits)


def test_no_tap():
    assert transmit(frame(), ChannelConfig(0.1, 1, eavesdrop_tap=False))[1] is None


def test_separate_tap_probability():
    f = frame()
    rx, tap = transmit(f, ChannelConfig(1.0, 1, tap_p=0.0))
    assert tap == f and rx != f


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 40), st.floats(0, 1), st.integers(0, 2**32), st.integers(0, 100))
def test_length_preserved_and_deterministic(n_words, p, seed, frame_id):
    f = BitFrame(np.zeros(n_words * 4, dtype=np.uint8), 4)
    cfg = ChannelConfig(p, seed)
    a = transmit(f, cfg, frame_id)
    b = transmit(f, cfg, frame_id)
    assert len(a[0]) == len(f) and a[0] == b[0] and a[1] == b[1]


def test_flips_nested_in_p():
    f = frame(4096, 8)
    prev = None
    for p in (0.0, 0.01, 0.05, 0.1, 0.3):
        rx, _ = transmit(f, ChannelConfig(p, 9), 3)
        flips = set(np.flatnonzero(rx.bits != f.bits))
        if prev is not None:
            assert prev <= flips
        prev = flips


def test_frame_ids_give_independent_draws():
    f = frame(4096, 8)
    a, _ = transmit(f, ChannelConfig(0.5, 9), 1)
    b, _ = transmit(f, ChannelConfig(0.5, 9), 2)
    assert a != b


def test_input_frame_untouched():
    f = frame()
    before = f.bits.copy()
    transmit(f, ChannelConfig(0.5, 2))
    assert np.array_equal(f.bits, before)


@pytest.mark.parametrize("p", [0.01, 0.1, 0.3])
def test_flip_rate_within_three_sigma(p):
    n = 200_000
    f = BitFrame(np.zeros(n, dtype=np.uint8), 8)
    rx, _ = transmit(f, ChannelConfig(p, 5))
    sigma = np.sqrt(p * (1 - p) / n)
    assert abs(rx.bits.mean() - p) <= 3 * sigma


def test_config_validation():
    with pytest.raises(ValueError):
        ChannelConfig(1.5)
    with pytest.raises(ValueError):
        ChannelConfig(0.1, tap_p=-0.1)
    with pytest.raises(ValueError):
        ChannelConfig(0.1, rng_seed=-1)
    assert ChannelConfig(0.2).tap_probability == 0.2
