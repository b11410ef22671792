import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import stats

from semra.channel import (
    ChannelParams,
    CodingParams,
    bit_error_prob,
    draw_pathloss_gains,
    mc_drop_prob,
    snr,
    triplet_drop_prob,
)

# 50-digit evaluation of (1 - sqrt(10/11))/2, frozen before implementation.
RAYLEIGH_BER_AT_10 = 0.023268705377203842
# Direct binomial summation 1 - (0.9^8 + 8*0.1*0.9^7).
DROP_8_1_AT_01 = 0.18689527


def binom_tail_direct(ber: float, l_t: int, l_e: int) -> float:
    """Independent brute-force oracle for the drop probability."""
    return math.fsum(
        math.comb(l_t, k) * ber**k * (1.0 - ber) ** (l_t - k)
        for k in range(l_e + 1, l_t + 1)
    )


class TestSnr:
    def test_zero_power(self):
        assert snr(0.0, ChannelParams(1.0, 0.5)) == 0.0

    def test_arithmetic_identity(self):
        assert snr(2.0, ChannelParams(1.0, 0.5)) == 1.0

    @given(st.floats(min_value=0.0, max_value=1e6, allow_nan=False, allow_subnormal=False),
           st.floats(min_value=1e-9, max_value=1e3),
           st.floats(min_value=1e-9, max_value=1e3))
    def test_linearity(self, power, gain, noise):
        params = ChannelParams(noise, gain)
        np.testing.assert_allclose(snr(2.0 * power, params), 2.0 * snr(power, params),
                                   rtol=1e-12)

    def test_rejects_negative_power(self):
        with pytest.raises(ValueError):
            snr(-1.0, ChannelParams(1.0, 1.0))

    def test_broadcasts_over_users(self):
        params = ChannelParams(1e-7, np.array([1e-7, 1e-6]))
        np.testing.assert_allclose(snr(10.0, params), [10.0, 100.0])

    def test_param_validation(self):
        with pytest.raises(ValueError):
            ChannelParams(0.0, 1.0)
        with pytest.raises(ValueError):
            ChannelParams(1.0, -1.0)
        with pytest.raises(ValueError):
            ChannelParams(1.0, 1.0, "rician")


class TestBitErrorProb:
    def test_rayleigh_no_signal(self):
        assert bit_error_prob(0.0, "rayleigh") == 0.5

    def test_awgn_no_signal(self):
        assert bit_error_prob(0.0, "awgn") == 0.5

    def test_rayleigh_at_10(self):
        np.testing.assert_allclose(bit_error_prob(10.0, "rayleigh"),
                                   RAYLEIGH_BER_AT_10, rtol=1e-12)

    @pytest.mark.parametrize("fading", ["awgn", "rayleigh"])
    def test_strictly_decreasing_and_bounded(self, fading):
        # snr capped where erfc is still representable in float64
        grid = np.concatenate([[0.0], np.logspace(-3, 2.4, 40)])
        vals = bit_error_prob(grid, fading)
        assert np.all(np.diff(vals) < 0)
        assert np.all(vals > 0)
        assert np.all(vals <= 0.5)

    def test_awgn_matches_gaussian_tail(self):
        # Q(sqrt(2 snr)) via the standard normal survival function.
        for g in [0.1, 1.0, 4.0]:
            np.testing.assert_allclose(bit_error_prob(g, "awgn"),
                                       stats.norm.sf(np.sqrt(2.0 * g)), rtol=1e-12)

    def test_rejects_negative_snr(self):
        with pytest.raises(ValueError):
            bit_error_prob(-0.1, "rayleigh")


class TestTripletDropProb:
    def test_error_free_channel(self):
        assert triplet_drop_prob(0.0, CodingParams(8, 1)) == 0.0

    def test_all_bits_flipped(self):
        assert triplet_drop_prob(1.0, CodingParams(8, 1)) == 1.0

    def test_derived_value(self):
        np.testing.assert_allclose(triplet_drop_prob(0.1, CodingParams(8, 1)),
                                   DROP_8_1_AT_01, rtol=1e-12)

    @pytest.mark.parametrize("l_t,l_e", [(8, 1), (64, 3), (512, 26)])
    def test_matches_direct_summation(self, l_t, l_e):
        coding = CodingParams(l_t, l_e)
        for ber in [1e-4, 0.01, 0.05, 0.2, 0.7, 0.999]:
            np.testing.assert_allclose(triplet_drop_prob(ber, coding),
                                       binom_tail_direct(ber, l_t, l_e), rtol=1e-10)

    @pytest.mark.parametrize("l_t,l_e", [(8, 1), (64, 3), (512, 26)])
    def test_matches_scipy_survival(self, l_t, l_e):
        coding = CodingParams(l_t, l_e)
        bers = np.array([1e-4, 0.01, 0.05, 0.2, 0.7])
        np.testing.assert_allclose(triplet_drop_prob(bers, coding),
                                   stats.binom.sf(l_e, l_t, bers), rtol=1e-9)

    def test_monotone_in_ber(self):
        coding = CodingParams(512, 26)
        bers = np.linspace(0.0, 1.0, 201)
        drops = triplet_drop_prob(bers, coding)
        assert np.all(np.diff(drops) >= -1e-12)

    @given(st.integers(1, 64), st.floats(min_value=0.0, max_value=1.0, allow_nan=False))
    def test_single_tail_term_is_power(self, l_t, ber):
        # l_e = l_t - 1 leaves only the all-bits-wrong term.
        drop = triplet_drop_prob(ber, CodingParams(l_t, l_t - 1))
        assert abs(drop - ber**l_t) < 1e-12

    def test_complement_identity(self):
        coding = CodingParams(512, 26)
        for ber in [0.01, 0.05, 0.1, 0.3, 0.9]:
            head = math.fsum(
                math.comb(coding.l_t, k) * ber**k * (1 - ber) ** (coding.l_t - k)
                for k in range(0, coding.l_e + 1)
            )
            assert abs(triplet_drop_prob(ber, coding) + head - 1.0) < 1e-12

    def test_stable_at_large_codeword(self):
        coding = CodingParams(4096, 200)
        bers = np.linspace(0.0, 1.0, 51)
        drops = triplet_drop_prob(bers, coding)
        assert np.all(np.isfinite(drops))
        assert np.all((drops >= 0) & (drops <= 1))
        assert np.all(np.diff(drops) >= -1e-12)

    def test_rejects_invalid_ber(self):
        with pytest.raises(ValueError):
            triplet_drop_prob(1.5, CodingParams(8, 1))
        with pytest.raises(ValueError):
            triplet_drop_prob(-0.1, CodingParams(8, 1))

    def test_coding_validation(self):
        with pytest.raises(ValueError):
            CodingParams(8, 8)
        with pytest.raises(ValueError):
            CodingParams(0, 0)
        with pytest.raises(ValueError):
            CodingParams(8, -1)

    def test_end_to_end_monotone_in_power(self):
        params = ChannelParams(1e-5, 3e-7, "rayleigh")
        coding = CodingParams(512, 26)
        powers = np.linspace(0.0, 600.0, 121)
        drops = triplet_drop_prob(bit_error_prob(snr(powers, params), params.fading), coding)
        assert np.all(np.diff(drops) <= 1e-12)


class TestMcDropProb:
    def test_error_free(self):
        assert mc_drop_prob(0.0, CodingParams(8, 1), trials=1000, seed=0) == 0.0

    def test_certain_drop(self):
        assert mc_drop_prob(1.0, CodingParams(8, 1), trials=1000, seed=0) == 1.0

    def test_deterministic_per_seed(self):
        coding = CodingParams(64, 3)
        a = mc_drop_prob(0.05, coding, trials=10_000, seed=42)
        b = mc_drop_prob(0.05, coding, trials=10_000, seed=42)
        assert a == b

    def test_agrees_with_analytic(self):
        coding = CodingParams(8, 1)
        p = triplet_drop_prob(0.1, coding)
        est = mc_drop_prob(0.1, coding, trials=100_000, seed=7)
        assert abs(est - p) <= 3.0 * math.sqrt(p * (1 - p) / 100_000)

    def test_rejects_zero_trials(self):
        with pytest.raises(ValueError):
            mc_drop_prob(0.1, CodingParams(8, 1), trials=0, seed=0)


class TestDrawPathlossGains:
    def test_bounds_and_shape(self):
        gains = draw_pathloss_gains(100, seed=0, low=1e-7, high=1e-6)
        assert gains.shape == (100,)
        assert np.all((gains >= 1e-7) & (gains <= 1e-6))

    def test_deterministic(self):
        np.testing.assert_array_equal(draw_pathloss_gains(5, seed=3),
                                      draw_pathloss_gains(5, seed=3))

    def test_validation(self):
        with pytest.raises(ValueError):
            draw_pathloss_gains(0, seed=0)
        with pytest.raises(ValueError):
            draw_pathloss_gains(2, seed=0, low=1e-6, high=1e-7)
