"""Benjamini-Hochberg false discovery rate adjustment."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence


@dataclass(frozen=True)
class AdjustedPValues:
    raw: list[float]
    adjusted: list[float]


def bh_adjust(p_values: Sequence[float]) -> AdjustedPValues:
    """Step-up BH adjustment: sort ascending, adjusted_(i) is the running
    minimum over j >= i of min(1, p_(j) * m / j), mapped back to input order.
    """
    raw = [float(p) for p in p_values]
    for p in raw:
        if not 0.0 <= p <= 1.0:
            raise ValueError(f"p-values must lie in [0, 1], got {p}")
    m = len(raw)
    if m == 0:
        return AdjustedPValues(raw=[], adjusted=[])
    order = sorted(range(m), key=lambda i: raw[i])
    adjusted = [0.0] * m
    running = 1.0
    for pos in range(m - 1, -1, -1):
        idx = order[pos]
        running = min(running, raw[idx] * m / (pos + 1))
        adjusted[idx] = running
    return AdjustedPValues(raw=raw, adjusted=adjusted)
