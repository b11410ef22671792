"""Wireless link model: SNR, BPSK bit error probability, triplet drop probability.

Users are served on disjoint time slots, so per-link SNR has no interference
term. A triplet encoded into an ``l_t``-bit codeword is dropped when more
than ``l_e`` of its bits arrive in error, which makes the drop probability a
binomial tail in the bit error probability.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import erfc, gammaln, logsumexp

FADING_KINDS = ("awgn", "rayleigh")

# Rows fed to the binomial tail are chunked so the (rows x tail-terms)
# work matrix stays well under memory limits even for l_t = 4096.
_TAIL_CHUNK_ELEMS = 2**22


@dataclass(frozen=True)
class ChannelParams:
    """Noise floor, composite pathloss gain, and fading law for a link.

    ``pathloss_gain`` may be a scalar (one user) or an array with one entry
    per user; operations broadcast over it.
    """

    noise_power: float
    pathloss_gain: float | np.ndarray
    fading: str = "rayleigh"

    def __post_init__(self):
        if not self.noise_power > 0:
            raise ValueError(f"noise_power must be > 0, got {self.noise_power!r}")
        gain = np.asarray(self.pathloss_gain, dtype=float)
        if not np.all(gain > 0):
            raise ValueError("pathloss_gain entries must be > 0")
        if self.fading not in FADING_KINDS:
            raise ValueError(f"fading must be one of {FADING_KINDS}, got {self.fading!r}")

    def for_user(self, user: int) -> "ChannelParams":
        """Scalar-gain view of one user's link."""
        gain = np.asarray(self.pathloss_gain, dtype=float)
        if gain.ndim == 0:
            return self
        return ChannelParams(self.noise_power, float(gain[user]), self.fading)


@dataclass(frozen=True)
class CodingParams:
    """Fixed codeword length ``l_t`` and correctable-bit budget ``l_e``."""

    l_t: int
    l_e: int

    def __post_init__(self):
        if self.l_t < 1:
            raise ValueError(f"l_t must be >= 1, got {self.l_t}")
        if not 0 <= self.l_e < self.l_t:
            raise ValueError(f"l_e must satisfy 0 <= l_e < l_t, got l_e={self.l_e}, l_t={self.l_t}")


def snr(power, params: ChannelParams):
    """Linear receive SNR: ``power * pathloss_gain / noise_power``.

    Broadcasts over array-valued power and per-user gains; linear in power.
    """
    power = np.asarray(power, dtype=float)
    if np.any(power < 0):
        raise ValueError("power must be >= 0")
    value = power * np.asarray(params.pathloss_gain, dtype=float) / params.noise_power
    return float(value) if value.ndim == 0 else value


def bit_error_prob(snr_linear, fading: str):
    """BPSK bit error probability at a linear SNR.

    awgn: coherent detection, Q(sqrt(2*snr)) = erfc(sqrt(snr))/2.
    rayleigh: average over Rayleigh fading, (1 - sqrt(snr/(1+snr)))/2.

    Both equal 1/2 at snr=0, decrease strictly in snr, and tend to 0.
    """
    s = np.asarray(snr_linear, dtype=float)
    if np.any(s < 0):
        raise ValueError("snr must be >= 0")
    if fading == "awgn":
        value = 0.5 * erfc(np.sqrt(s))
    elif fading == "rayleigh":
        value = 0.5 * (1.0 - np.sqrt(s / (1.0 + s)))
    else:
        raise ValueError(f"fading must be one of {FADING_KINDS}, got {fading!r}")
    return float(value) if value.ndim == 0 else value


def triplet_drop_prob(ber, coding: CodingParams):
    """Probability that bit errors exceed the correction capability.

    Computes ``sum_{k=l_e+1}^{l_t} C(l_t, k) ber^k (1-ber)^(l_t-k)`` with the
    per-term probabilities evaluated in log space, which stays accurate for
    codeword lengths of 4096 bits and beyond. Monotone non-decreasing in ber.
    Accepts scalar or array ber.
    """
    b = np.asarray(ber, dtype=float)
    if np.any((b < 0) | (b > 1) | ~np.isfinite(b)):
        raise ValueError("ber must lie in [0, 1]")
    scalar = b.ndim == 0
    b = np.atleast_1d(b)
    shape = b.shape
    b = b.ravel()

    # ber = 0 -> no errors; ber = 1 -> all l_t bits flipped, which exceeds
    # l_e < l_t. Interior values go through the log-space tail sum.
    out = np.where(b >= 1.0, 1.0, 0.0)
    interior = np.flatnonzero((b > 0.0) & (b < 1.0))
    if interior.size:
        ks = np.arange(coding.l_e + 1, coding.l_t + 1, dtype=float)
        log_comb = gammaln(coding.l_t + 1) - gammaln(ks + 1) - gammaln(coding.l_t - ks + 1)
        chunk = max(1, _TAIL_CHUNK_ELEMS // ks.size)
        for start in range(0, interior.size, chunk):
            idx = interior[start : start + chunk]
            bi = b[idx][:, None]
            log_pmf = log_comb + ks * np.log(bi) + (coding.l_t - ks) * np.log1p(-bi)
            out[idx] = np.exp(logsumexp(log_pmf, axis=1))
    np.clip(out, 0.0, 1.0, out=out)
    return float(out[0]) if scalar else out.reshape(shape)


def mc_drop_prob(ber: float, coding: CodingParams, trials: int, seed: int) -> float:
    """Monte Carlo estimate of the triplet drop probability.

    Draws ``trials`` binomial bit-error counts and returns the fraction that
    exceed ``l_e``. Deterministic per seed; serves as an independent check on
    :func:`triplet_drop_prob`.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    rng = np.random.default_rng(seed)
    errors = rng.binomial(coding.l_t, ber, size=trials)
    return float(np.mean(errors > coding.l_e))


def draw_pathloss_gains(num_users: int, seed: int, low: float = 1e-7, high: float = 1e-6) -> np.ndarray:
    """Per-user composite gains, log-uniform on [low, high], seeded."""
    if num_users < 1:
        raise ValueError("num_users must be >= 1")
    if not 0 < low <= high:
        raise ValueError("need 0 < low <= high")
    rng = np.random.default_rng(seed)
    return np.exp(rng.uniform(np.log(low), np.log(high), size=num_users))
