"""Mann-Whitney U test and small summary helpers."""

from __future__ import annotations

import math
from typing import Optional, Sequence

import numpy as np

from boolhyper.errors import DomainError


def midranks(values: Sequence[float]) -> tuple[np.ndarray, np.ndarray]:
    """1-based ranks with ties given their mean rank, plus the tie group sizes."""
    x = np.asarray(values, dtype=float)
    order = np.argsort(x, kind="mergesort")
    ranks = np.empty(x.size, dtype=float)
    sorted_x = x[order]
    groups = []
    start = 0
    for stop in range(1, x.size + 1):
        if stop == x.size or sorted_x[stop] != sorted_x[start]:
            ranks[order[start:stop]] = (start + stop + 1) / 2.0
            groups.append(stop - start)
            start = stop
    return ranks, np.array(groups, dtype=float)


def mann_whitney_u(sample_a: Sequence[float], sample_b: Sequence[float]) -> tuple[float, float]:
    """U statistic of ``sample_a`` and its two-sided p-value.

    The p-value uses the normal approximation with tie-corrected variance and
    a 0.5 continuity correction. If every observation is tied the variance
    vanishes and p is 1.
    """
    n1, n2 = len(sample_a), len(sample_b)
    if n1 == 0 or n2 == 0:
        raise DomainError("both samples must be nonempty")
    ranks, ties = midranks(list(sample_a) + list(sample_b))
    u = float(ranks[:n1].sum() - n1 * (n1 + 1) / 2.0)
    total = n1 + n2
    tie_term = float((ties**3 - ties).sum()) / (total * (total - 1)) if total > 1 else 0.0
    var = n1 * n2 / 12.0 * ((total + 1) - tie_term)
    if var <= 0:
        return u, 1.0
    z = max(abs(u - n1 * n2 / 2.0) - 0.5, 0.0) / math.sqrt(var)
    return u, min(1.0, math.erfc(z / math.sqrt(2.0)))


def describe(values: Sequence[float]) -> dict[str, Optional[float]]:
    """Count, mean, median and sample standard deviation (``None`` when undefined)."""
    x = np.asarray(values, dtype=float)
    if x.size == 0:
        return {"count": 0, "mean": None, "median": None, "std": None}
    return {
        "count": int(x.size),
        "mean": float(x.mean()),
        "median": float(np.median(x)),
        "std": float(x.std(ddof=1)) if x.size > 1 else 0.0,
    }
