import math

import numpy as np
import pytest

from rbcom_sim.errors import FrameTooShort
from rbcom_sim.framing import (
    Frame,
    SymbolAlphabet,
    build_alphabet,
    default_ss_length,
    detect_ss,
    frame_length,
    make_ss,
    plan_multiaccess_frames,
)
from rbcom_sim.physics import C_LIGHT


class TestFrameLength:
    def test_200m_100mhz(self):
        # floor((400 / c) * 1e8) worked by hand
        assert frame_length(200.0, 100e6) == 133

    def test_10m_100mhz(self):
        assert frame_length(10.0, 100e6) == 6

    def test_too_short(self):
        with pytest.raises(FrameTooShort):
            frame_length(1.0, 100e6)

    def test_matches_slot_counting(self):
        rng = np.random.default_rng(5)
        for _ in range(1000):
            d = rng.uniform(3.5, 500.0)
            b = rng.uniform(1e7, 1e9)
            t_round = 2.0 * d / C_LIGHT
            # count whole symbol slots fitting in the round trip
            slots = 0
            while (slots + 1) / b <= t_round:
                slots += 1
            if slots < 2:
                with pytest.raises(FrameTooShort):
                    frame_length(d, b)
            else:
                assert frame_length(d, b) == slots


class TestAlphabet:
    def test_binary(self):
        alph = build_alphabet(2, 0.1)
        assert np.allclose(alph.levels, [0.9, 1.0])

    def test_four_level(self):
        alph = build_alphabet(4, 0.3)
        assert np.allclose(alph.levels, [0.7, 0.8, 0.9, 1.0], atol=1e-15)

    def test_full_depth_rejected(self):
        with pytest.raises(ValueError):
            build_alphabet(2, 1.0)

    def test_order_one_rejected(self):
        with pytest.raises(ValueError):
            build_alphabet(1, 0.1)

    def test_max_level_exact_and_uniform(self):
        rng = np.random.default_rng(9)
        for _ in range(50):
            m = int(rng.integers(2, 17))
            depth = rng.uniform(0.01, 0.99)
            alph = build_alphabet(m, depth)
            levels = alph.levels
            assert levels[-1] == 1.0
            gaps = np.diff(levels)
            assert np.all(np.abs(gaps - alph.spacing) < 1e-15)

    def test_slicing_ties_go_low(self):
        alph = build_alphabet(2, 0.1)
        # midpoint 0.95 is equidistant; lower level wins
        assert alph.slice_indices(np.array([0.95]))[0] == 0
        assert alph.slice_indices(np.array([0.951]))[0] == 1
        assert alph.slice_indices(np.array([np.nan]))[0] == -1

    def test_gray_adjacent_levels_one_bit(self):
        alph = build_alphabet(8, 0.5)
        bits = alph.gray_bits(np.arange(8))
        flips = np.sum(bits[1:] != bits[:-1], axis=1)
        assert np.all(flips == 1)


class TestFrameContainer:
    def test_counts(self):
        alph = build_alphabet(2, 0.1)
        ss = make_ss(4, alph, seed=0)
        frame = Frame(ss=ss, payload=alph.levels[np.zeros(6, dtype=int)])
        assert frame.n_symbols == 10
        assert len(frame.symbols) == 10

    def test_needs_payload(self):
        alph = build_alphabet(2, 0.1)
        with pytest.raises(ValueError):
            Frame(ss=make_ss(4, alph, seed=0), payload=np.array([]))


class TestMakeSs:
    def test_deterministic(self):
        alph = build_alphabet(2, 0.1)
        a = make_ss(16, alph, seed=42)
        b = make_ss(16, alph, seed=42)
        assert np.array_equal(a, b)

    def test_levels_are_extremes(self):
        alph = build_alphabet(4, 0.3)
        ss = make_ss(16, alph, seed=1)
        assert len(ss) == 16
        assert set(np.unique(ss)) <= {alph.levels[0], alph.levels[-1]}

    def test_rejects_short(self):
        with pytest.raises(ValueError):
            make_ss(3, build_alphabet(2, 0.1), seed=0)

    def test_autocorrelation_sidelobes(self):
        # brute-force correlation over all nonzero lags
        alph = build_alphabet(2, 0.1)
        ss = make_ss(32, alph, seed=7)
        dev = ss - ss.mean()
        main = float(dev @ dev)
        for lag in range(1, 32):
            side = abs(float(dev[lag:] @ dev[:-lag]))
            assert side < main


class TestDetectSs:
    def test_exact_embedding(self):
        alph = build_alphabet(2, 0.1)
        ss = make_ss(16, alph, seed=3)
        signal = np.full(64, ss.mean())
        signal[7:23] = ss
        assert detect_ss(signal, ss, 0.9) == 7

    def test_constant_signal_not_found(self):
        alph = build_alphabet(2, 0.1)
        ss = make_ss(16, alph, seed=3)
        assert detect_ss(np.ones(64), ss, 0.9) is None

    def test_signal_too_short(self):
        alph = build_alphabet(2, 0.1)
        ss = make_ss(16, alph, seed=3)
        with pytest.raises(ValueError):
            detect_ss(np.ones(8), ss, 0.9)

    def test_noiseless_always_exact_offset(self):
        alph = build_alphabet(2, 0.1)
        ss = make_ss(24, alph, seed=11)
        rng = np.random.default_rng(13)
        for _ in range(50):
            offset = int(rng.integers(0, 40))
            signal = np.full(80, ss.mean())
            signal[offset:offset + 24] = ss
            assert detect_ss(signal, ss, 0.99) == offset

    def test_scale_invariance(self):
        alph = build_alphabet(2, 0.1)
        ss = make_ss(16, alph, seed=3)
        signal = np.full(64, ss.mean())
        signal[11:27] = ss
        assert detect_ss(signal * 123.4, ss, 0.9) == 11

    def test_awgn_detection_rate(self):
        # Monte Carlo regression bound: 20 dB SNR on the correlated
        # (zero-mean) part, threshold 0.8
        alph = build_alphabet(2, 0.1)
        ss = make_ss(32, alph, seed=5)
        sigma = np.std(ss) / 10.0
        rng = np.random.default_rng(29)
        hits = 0
        trials = 2000
        for _ in range(trials):
            offset = int(rng.integers(0, 64))
            clean = np.full(128, ss.mean())
            clean[offset:offset + 32] = ss
            noisy = clean + rng.normal(0.0, sigma, size=128)
            if detect_ss(noisy, ss, 0.8) == offset:
                hits += 1
        assert hits / trials >= 0.99


class TestMultiaccess:
    def _distance_for(self, n, b_mod):
        return (n + 0.5) * C_LIGHT / (2.0 * b_mod)

    def test_lcm_of_two(self):
        b = 100e6
        d = [self._distance_for(100, b), self._distance_for(150, b)]
        per_user, ap = plan_multiaccess_frames(d, b)
        assert per_user == [100, 150]
        assert ap == 300

    def test_single_user(self):
        b = 100e6
        per_user, ap = plan_multiaccess_frames([200.0], b)
        assert per_user == [133]
        assert ap == 133

    def test_empty(self):
        with pytest.raises(ValueError):
            plan_multiaccess_frames([], 100e6)

    def test_ap_divisible_by_every_user(self):
        rng = np.random.default_rng(31)
        b = 100e6
        for _ in range(200):
            k = int(rng.integers(1, 7))
            ns = rng.integers(2, 501, size=k)
            d = [self._distance_for(int(n), b) for n in ns]
            per_user, ap = plan_multiaccess_frames(d, b)
            assert per_user == list(ns)
            assert all(ap % n == 0 for n in per_user)


def test_default_ss_length():
    assert default_ss_length(133) == 16
    assert default_ss_length(10) == 9
