import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from semra.channel import ChannelParams, CodingParams, bit_error_prob, snr, triplet_drop_prob
from semra.corpus import ImageRecord, SemanticTriplet
from semra.quality import (
    QualityReport,
    aggregate_users,
    batch_total,
    quality_upper_bound,
    transmission_quality,
)

CHAN = ChannelParams(1e-5, 3e-7, "rayleigh")
CODING = CodingParams(512, 26)

# Composite oracle value for importances [0.9, 0.6, 0.3] with (l_t, l_e) =
# (8, 1) at bit error probabilities [0.01, 0.1, 0.5]: sum I_j (1 - P_d_j)
# with P_d from direct binomial summation, evaluated at 50 digits.
COMPOSED_TOTAL = 1.39598864303443137


def record_of(*importances):
    return ImageRecord("img", tuple(
        SemanticTriplet("s", "r", "o", i) for i in importances))


def rayleigh_power_for_ber(ber: float, chan: ChannelParams) -> float:
    """Invert the Rayleigh BER curve to the transmit power achieving it."""
    root = 1.0 - 2.0 * ber
    gamma = root**2 / (1.0 - root**2)
    return gamma * chan.noise_power / chan.pathloss_gain


class TestTransmissionQuality:
    def test_metric_arithmetic(self):
        # Huge power delivers the first triplet, zero power degrades the
        # second to the no-signal drop probability.
        rec = record_of(0.8, 0.5)
        rep = transmission_quality(rec, np.array([1e9, 0.0]), CHAN, CODING)
        drop_at_zero = triplet_drop_prob(0.5, CODING)
        np.testing.assert_allclose(rep.per_triplet_drop, [0.0, drop_at_zero], atol=1e-12)
        np.testing.assert_allclose(rep.per_triplet_contrib,
                                   [0.8, 0.5 * (1 - drop_at_zero)], rtol=1e-12)
        np.testing.assert_allclose(rep.total, rep.per_triplet_contrib.sum(), rtol=1e-15)

    def test_zero_allocation_uniform_degradation(self):
        rec = record_of(0.9, 0.4, 0.2)
        rep = transmission_quality(rec, np.zeros(3), CHAN, CODING)
        drop = triplet_drop_prob(0.5, CODING)
        np.testing.assert_allclose(rep.per_triplet_drop, drop)
        np.testing.assert_allclose(rep.total, (1 - drop) * 1.5, rtol=1e-12)

    def test_composed_with_channel_oracle(self):
        rec = record_of(0.9, 0.6, 0.3)
        coding = CodingParams(8, 1)
        powers = np.array([rayleigh_power_for_ber(b, CHAN) for b in (0.01, 0.1, 0.5)])
        rep = transmission_quality(rec, powers, CHAN, coding)
        np.testing.assert_allclose(rep.total, COMPOSED_TOTAL, rtol=1e-9)

    def test_length_mismatch(self):
        with pytest.raises(ValueError, match="does not match record"):
            transmission_quality(record_of(0.5), np.array([1.0, 2.0]), CHAN, CODING)

    def test_monotone_in_each_power(self):
        rec = record_of(0.7, 0.5, 0.2)
        base = np.array([50.0, 80.0, 10.0])
        total = transmission_quality(rec, base, CHAN, CODING).total
        for j in range(3):
            for bump in [1.0, 50.0, 500.0]:
                powers = base.copy()
                powers[j] += bump
                assert transmission_quality(rec, powers, CHAN, CODING).total >= total - 1e-12

    def test_additive_over_triplets(self):
        rec = record_of(0.7, 0.5, 0.2)
        powers = np.array([120.0, 60.0, 30.0])
        rep = transmission_quality(rec, powers, CHAN, CODING)
        sub = ImageRecord("img", rec.triplets[:2])
        sub_rep = transmission_quality(sub, powers[:2], CHAN, CODING)
        np.testing.assert_allclose(rep.total - rep.per_triplet_contrib[2],
                                   sub_rep.total, rtol=1e-12)

    @settings(max_examples=30, deadline=None)
    @given(st.lists(st.floats(min_value=0.0, max_value=1.0, allow_nan=False),
                    min_size=1, max_size=6),
           st.lists(st.floats(min_value=0.0, max_value=1e4, allow_nan=False),
                    min_size=6, max_size=6))
    def test_bounded_by_upper_bound(self, importances, powers):
        rec = record_of(*importances)
        rep = transmission_quality(rec, np.array(powers[: rec.n]), CHAN, CODING)
        assert -1e-12 <= rep.total <= quality_upper_bound(rec) + 1e-12


class TestAggregateUsers:
    def test_singleton(self):
        rep = QualityReport(np.array([0.0]), np.array([2.1]), 2.1)
        assert aggregate_users([rep]) == 2.1

    def test_additivity(self):
        reps = [QualityReport(np.zeros(1), np.zeros(1), 1.0),
                QualityReport(np.zeros(1), np.zeros(1), 0.5)]
        assert aggregate_users(reps) == 1.5

    def test_commutative(self):
        reps = [QualityReport(np.zeros(1), np.zeros(1), t) for t in (0.3, 1.2, 0.9)]
        assert aggregate_users(reps) == aggregate_users(list(reversed(reps)))

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            aggregate_users([])


class TestQualityUpperBound:
    def test_sum(self):
        assert quality_upper_bound(record_of(0.8, 0.5)) == pytest.approx(1.3)

    def test_single(self):
        assert quality_upper_bound(record_of(1.0)) == 1.0

    def test_dominates_any_allocation(self):
        rec = record_of(0.9, 0.1)
        for p in ([0, 0], [1e3, 1e3], [1e9, 0]):
            rep = transmission_quality(rec, np.array(p, dtype=float), CHAN, CODING)
            assert rep.total <= quality_upper_bound(rec) + 1e-12


class TestBatchTotal:
    def test_matches_single_record_path(self):
        rec = record_of(0.7, 0.5, 0.2)
        powers = np.array([[120.0, 60.0, 30.0], [10.0, 0.0, 500.0]])
        imps = np.tile(rec.importances(), (2, 1))
        gains = np.array([CHAN.pathloss_gain, CHAN.pathloss_gain])
        batch = batch_total(powers, imps, gains, CHAN.noise_power, CHAN.fading, CODING)
        for row in range(2):
            rep = transmission_quality(rec, powers[row], CHAN, CODING)
            np.testing.assert_allclose(batch[row], rep.total, rtol=1e-12)

    def test_zero_importance_padding_contributes_nothing(self):
        powers = np.array([[100.0, 400.0, 300.0]])
        imps = np.array([[0.6, 0.0, 0.0]])
        with_pad = batch_total(powers, imps, np.array([3e-7]), 1e-5, "rayleigh", CODING)
        alone = batch_total(powers[:, :1], imps[:, :1], np.array([3e-7]), 1e-5,
                            "rayleigh", CODING)
        np.testing.assert_allclose(with_pad, alone, rtol=1e-12)
