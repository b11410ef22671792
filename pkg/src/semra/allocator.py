"""Power allocators on the budget simplex: static baselines and a grid oracle.

Every allocator returns a non-negative vector summing to the full budget;
the objective is monotone in each entry, so optimal allocations saturate it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import ChannelParams, CodingParams, bit_error_prob, snr, triplet_drop_prob
from .corpus import ImageRecord

GRID_ORACLE_MAX_N = 4


@dataclass(frozen=True)
class Budget:
    total_power: float

    def __post_init__(self):
        if not self.total_power > 0:
            raise ValueError(f"total_power must be > 0, got {self.total_power!r}")


def equal_allocation(n: int, budget: Budget) -> np.ndarray:
    """Split the budget evenly across n triplets."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return np.full(n, budget.total_power / n)


def importance_allocation(importances, budget: Budget) -> np.ndarray:
    """Split the budget proportionally to importance weights."""
    imps = np.asarray(importances, dtype=float)
    if np.any(imps < 0):
        raise ValueError("importances must be >= 0")
    total = imps.sum()
    if total <= 0:
        raise ValueError("importance_allocation requires at least one positive importance")
    return budget.total_power * imps / total


def softmax_fractions(logits, mask=None) -> np.ndarray:
    """Stable softmax onto the unit simplex, optionally masked.

    With a boolean ``mask``, the softmax runs over active entries only and
    masked entries get exactly 0. Works on 1-D vectors and (B, N) batches
    (mask per row). Invariant to adding a constant to all active logits.
    """
    z = np.asarray(logits, dtype=float)
    if not np.all(np.isfinite(z)):
        raise ValueError("logits must be finite")
    if mask is None:
        shifted = z - z.max(axis=-1, keepdims=True)
        e = np.exp(shifted)
        return e / e.sum(axis=-1, keepdims=True)
    mask = np.asarray(mask, dtype=bool)
    neg = np.where(mask, z, -np.inf)
    shifted = neg - neg.max(axis=-1, keepdims=True)
    e = np.where(mask, np.exp(shifted), 0.0)
    return e / e.sum(axis=-1, keepdims=True)


def softmax_allocation(logits, budget: Budget) -> np.ndarray:
    """Map unconstrained logits to powers on the budget simplex."""
    return budget.total_power * softmax_fractions(logits)


def _compositions(parts: int, total: int):
    """All tuples of non-negative ints of length ``parts`` summing to ``total``,
    in lexicographically ascending order."""
    if parts == 1:
        yield (total,)
        return
    for k in range(total + 1):
        for rest in _compositions(parts - 1, total - k):
            yield (k,) + rest


def grid_oracle(
    record: ImageRecord,
    budget: Budget,
    chan: ChannelParams,
    coding: CodingParams,
    resolution: int = 100,
) -> tuple[np.ndarray, float]:
    """Exhaustive search over budget compositions on a simplex grid.

    Enumerates every split of the budget into ``resolution`` equal units
    across the record's triplets and returns the best allocation and its
    quality. Ties break toward the lexicographically smallest allocation.
    Guarded to N <= 4; the grid has C(resolution + N - 1, N - 1) points.
    """
    n = record.n
    if n > GRID_ORACLE_MAX_N:
        raise ValueError(f"grid_oracle supports N <= {GRID_ORACLE_MAX_N}, got N={n}")
    if resolution < 2:
        raise ValueError("resolution must be >= 2")
    unit = budget.total_power / resolution
    # Grid points only take resolution+1 distinct per-axis powers, so the
    # channel chain is evaluated once per level and gathered per composition.
    levels = np.arange(resolution + 1) * unit
    level_drop = triplet_drop_prob(bit_error_prob(snr(levels, chan), chan.fading), coding)
    comps = np.array(list(_compositions(n, resolution)), dtype=np.intp)
    imps = record.importances()
    totals = (imps[None, :] * (1.0 - level_drop[comps])).sum(axis=1)
    best = int(np.argmax(totals))  # first max = lexicographically smallest
    return comps[best] * unit, float(totals[best])
