"""Slow reference computations for cross-checking the density engine.

These walk every index with the scalar membership test and sum term by
term.  No truncation shortcuts, no vectorisation, nothing shared with
``abelstat.density``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from abelstat.index_sets import IndexSet


@dataclass(frozen=True)
class OracleResult:
    value: float
    method: str  # exhaustive_count | direct_sum | closed_form
    parameters: dict = field(default_factory=dict)


def brute_natural(index_set: IndexSet, n: int) -> OracleResult:
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    count = 0
    for k in range(n):
        if index_set.contains(k):
            count += 1
    return OracleResult(count / n, "exhaustive_count", {"n": n, "count": count})


def brute_abel(index_set: IndexSet, x: float, K: int) -> OracleResult:
    """``(1-x) * sum_{k <= K, k in set} x**k`` in index order."""
    if not 0.0 < x < 1.0:
        raise ValueError(f"x must lie in (0, 1), got {x}")
    total = 0.0
    power = 1.0
    for k in range(K + 1):
        if index_set.contains(k):
            total += power
        power *= x
    return OracleResult((1.0 - x) * total, "direct_sum", {"x": x, "K": K})


def closed_form_ap(a: int, d: int, x: float) -> OracleResult:
    """Abel partial of ``{a, a+d, ...}`` summed to infinity: ``(1-x) x**a / (1 - x**d)``."""
    if not 0.0 < x < 1.0:
        raise ValueError(f"x must lie in (0, 1), got {x}")
    if d < 1 or a < 0:
        raise ValueError(f"need a >= 0 and d >= 1, got a={a}, d={d}")
    log_x = math.log1p(x - 1.0)
    value = (1.0 - x) * math.exp(a * log_x) / -math.expm1(d * log_x)
    return OracleResult(value, "closed_form", {"a": a, "d": d, "x": x})
