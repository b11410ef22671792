"""Semantic transmission quality: importance-weighted triplet delivery.

The quality of one image transmission under a power allocation is
``sum_j I_j * (1 - P_d_j)`` where ``I_j`` is the j-th triplet's importance
and ``P_d_j`` its drop probability at the allocated power.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import ChannelParams, CodingParams, bit_error_prob, snr, triplet_drop_prob
from .corpus import ImageRecord


@dataclass(frozen=True)
class QualityReport:
    """Per-triplet drop probabilities and contributions for one transmission."""

    per_triplet_drop: np.ndarray
    per_triplet_contrib: np.ndarray
    total: float


def transmission_quality(
    record: ImageRecord,
    powers: np.ndarray,
    chan: ChannelParams,
    coding: CodingParams,
) -> QualityReport:
    """Evaluate one record's transmission under a per-triplet power vector.

    ``chan`` must describe a single link (scalar gain). A triplet allocated
    zero power is still transmitted, at bit error probability 1/2.
    """
    powers = np.asarray(powers, dtype=float)
    if powers.shape != (record.n,):
        raise ValueError(f"allocation length {powers.shape} does not match record N={record.n}")
    drops = triplet_drop_prob(bit_error_prob(snr(powers, chan), chan.fading), coding)
    drops = np.atleast_1d(drops)
    contribs = record.importances() * (1.0 - drops)
    return QualityReport(drops, contribs, float(contribs.sum()))


def aggregate_users(reports: list[QualityReport]) -> float:
    """Sum of per-user totals. The multi-user objective is an unweighted sum."""
    if not reports:
        raise ValueError("aggregate_users requires at least one report")
    return float(sum(r.total for r in reports))


def quality_upper_bound(record: ImageRecord) -> float:
    """Best achievable quality: every triplet delivered, ``sum_j I_j``."""
    return float(record.importances().sum())


def batch_total(
    powers: np.ndarray,
    importances: np.ndarray,
    gains,
    noise_power: float,
    fading: str,
    coding: CodingParams,
) -> np.ndarray:
    """Vectorized totals for a batch of transmissions.

    ``powers`` and ``importances`` are (B, N) with zero-importance padding
    allowed; ``gains`` is scalar or (B,). Returns the (B,) quality totals.
    """
    powers = np.asarray(powers, dtype=float)
    importances = np.asarray(importances, dtype=float)
    gains = np.asarray(gains, dtype=float)
    if gains.ndim == 1:
        gains = gains[:, None]
    s = powers * gains / noise_power
    drops = triplet_drop_prob(bit_error_prob(s, fading), coding)
    return (importances * (1.0 - drops)).sum(axis=1)
