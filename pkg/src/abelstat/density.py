"""Natural, lacunary and Abel densities of index sets.

Abel partial sums are truncated at the index K where the geometric tail
``(1-x) * sum_{k>K} x**k = x**(K+1)`` drops below ``tail_tol``, so each
sample carries a certified bound on what truncation could have missed.
Limits are then judged by a stabilisation window over a grid of parameters.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np

from abelstat.index_sets import IndexSet

CHUNK = 1 << 20
WINDOW = 4
DEFAULT_GRID = (4, 20)
DEFAULT_TAIL_TOL = 1e-9
ABEL_STAB_TOL = 1e-3
NATURAL_STAB_TOL = 1e-2
LACUNARY_STAB_TOL = 1e-2

MaskFn = Callable[[int, int], np.ndarray]


@dataclass(frozen=True)
class DensitySample:
    parameter: float
    value: float
    truncation_bound: float
    terms_used: int


@dataclass(frozen=True)
class DensityEstimate:
    method: str
    samples: tuple[DensitySample, ...]
    value: float
    uncertainty: float
    verdict: str
    stab_tol: float = 0.0
    window: int = WINDOW

    @property
    def converged(self) -> bool:
        return self.verdict == "converged"

    @property
    def trace(self) -> list[float]:
        return [s.value for s in self.samples]

    def tail(self) -> list[float]:
        return self.trace[-self.window:]

    def to_dict(self) -> dict:
        d = asdict(self)
        d["samples"] = [asdict(s) for s in self.samples]
        return d


@dataclass(frozen=True)
class LacunaryScheme:
    """Block boundaries ``0 = k_0 < k_1 < ...``; block r is ``(k_{r-1}, k_r]``."""

    k: tuple[int, ...]
    delta: float = 0.5

    def __post_init__(self):
        object.__setattr__(self, "k", tuple(int(v) for v in self.k))
        violations = _lacunary_violations(self.k, self.delta)
        if violations:
            raise LacunaryError(violations)

    @property
    def r_max(self) -> int:
        return len(self.k) - 1

    def h(self, r: int) -> int:
        return self.k[r] - self.k[r - 1]

    def interval(self, r: int) -> tuple[int, int]:
        """Inclusive index range of block r."""
        return self.k[r - 1] + 1, self.k[r]


class LacunaryError(ValueError):
    def __init__(self, violations: list[str]):
        self.violations = violations
        super().__init__("invalid lacunary sequence: " + "; ".join(violations))


def _lacunary_violations(k: tuple[int, ...], delta: float) -> list[str]:
    if not delta > 0:
        return [f"delta must be positive, got {delta}"]
    violations = []
    if len(k) < 3:
        violations.append(f"need at least 3 entries, got {len(k)}")
    if k and k[0] != 0:
        violations.append(f"k_0 must be 0, got {k[0]}")
    for r in range(1, len(k)):
        if k[r] <= k[r - 1]:
            violations.append(f"r={r}: not strictly increasing ({k[r - 1]} -> {k[r]})")
        elif r >= 2 and k[r] < (1 + delta) * k[r - 1]:
            violations.append(
                f"r={r}: ratio {k[r]}/{k[r - 1]} = {k[r] / k[r - 1]:.6g} < {1 + delta:g}"
            )
    # finite stand-in for h_r -> infinity: the last gap must exceed the first
    if len(k) >= 4 and all(b > a for a, b in zip(k, k[1:])) and k[-1] - k[-2] <= k[1] - k[0]:
        violations.append(f"gaps do not grow: h_{len(k) - 1} = {k[-1] - k[-2]} <= h_1 = {k[1] - k[0]}")
    return violations


def validate_lacunary(k: Sequence[int], delta: float) -> LacunaryScheme:
    """Build a scheme, raising ``LacunaryError`` listing every violated condition."""
    return LacunaryScheme(tuple(k), float(delta))


def dyadic_scheme(r_max: int = 20) -> LacunaryScheme:
    """``k_r = 2**r`` (with ``k_0 = 0``)."""
    return validate_lacunary([0] + [2**r for r in range(1, r_max + 1)], 0.5)


def truncation_index(x: float, tail_tol: float) -> int:
    return max(0, math.ceil(math.log(tail_tol) / math.log(x)))


def abel_grid(grid: tuple[int, int]) -> list[float]:
    j_min, j_max = grid
    if not j_min < j_max:
        raise ValueError(f"grid needs j_min < j_max, got {grid}")
    return [1.0 - 2.0**-j for j in range(j_min, j_max + 1)]


@lru_cache(maxsize=64)
def _powers(x: float, n: int) -> np.ndarray:
    out = np.exp(np.arange(n, dtype=float) * math.log1p(-(1.0 - x)))
    out.setflags(write=False)
    return out


def _check_x(x: float, tail_tol: float) -> None:
    if not 0.0 < x < 1.0:
        raise ValueError(f"x must lie in (0, 1), got {x}")
    if not tail_tol > 0:
        raise ValueError(f"tail_tol must be positive, got {tail_tol}")


def abel_samples(mask_fn: MaskFn, xs: Sequence[float], tail_tol: float) -> list[list[DensitySample]]:
    """Abel partials of several sets at once.

    ``mask_fn(start, stop)`` returns a ``(m, stop-start)`` boolean array, one
    row per set.  Returns ``samples[row][grid position]``.
    """
    for x in xs:
        _check_x(x, tail_tol)
    ks = [truncation_index(x, tail_tol) for x in xs]
    k_top = max(ks)
    sums = None
    start = 0
    while start <= k_top:
        stop = min(start + CHUNK, k_top + 1)
        rows = np.atleast_2d(mask_fn(start, stop)).astype(float)
        if sums is None:
            sums = np.zeros((rows.shape[0], len(xs)))
        for i, (x, K) in enumerate(zip(xs, ks)):
            if K < start:
                continue
            n = min(stop, K + 1) - start
            scale = math.exp(start * math.log1p(-(1.0 - x)))
            sums[:, i] += scale * (rows[:, :n] @ _powers(x, min(CHUNK, K + 1))[:n])
        start = stop
    out = []
    for row in sums:
        out.append([
            DensitySample(x, (1.0 - x) * s, x ** (K + 1), K + 1)
            for x, K, s in zip(xs, ks, row)
        ])
    return out


def prefix_counts(mask_fn: MaskFn, cutoffs: Sequence[int]) -> np.ndarray:
    """``counts[row, i]`` = members k < cutoffs[i]; cutoffs ascending."""
    top = max(cutoffs)
    counts = None
    running = None
    start = 0
    order = list(cutoffs)
    while start < top:
        stop = min(start + CHUNK, top)
        rows = np.atleast_2d(mask_fn(start, stop))
        if counts is None:
            counts = np.zeros((rows.shape[0], len(order)), dtype=np.int64)
            running = np.zeros(rows.shape[0], dtype=np.int64)
        csum = np.cumsum(rows, axis=1, dtype=np.int64)
        for i, c in enumerate(order):
            if start < c <= stop:
                counts[:, i] = running + csum[:, c - start - 1]
        running = running + csum[:, -1]
        start = stop
    if counts is None:
        counts = np.zeros((1, len(order)), dtype=np.int64)
    return counts


def _estimate(method, samples, stab_tol, window, extra_uncertainty, richardson=False):
    values = [s.value for s in samples]
    tail = values[-window:]
    spread = max(tail) - min(tail)
    converged = len(values) >= window and spread <= stab_tol
    value = values[-1]
    if richardson and len(values) >= 2:
        # error assumed to halve per grid step
        value = min(1.0, max(0.0, 2.0 * values[-1] - values[-2]))
    if converged:
        value = min(1.0, max(0.0, value))
    return DensityEstimate(
        method=method,
        samples=tuple(samples),
        value=value,
        uncertainty=spread + extra_uncertainty,
        verdict="converged" if converged else "inconclusive",
        stab_tol=stab_tol,
        window=window,
    )


def estimate_from_samples(method: str, samples, stab_tol: float, window: int = WINDOW,
                          tail_tol: float = 0.0, richardson: bool = False) -> DensityEstimate:
    return _estimate(method, samples, stab_tol, window, tail_tol, richardson)


def abel_partial(index_set: IndexSet, x: float, tail_tol: float = DEFAULT_TAIL_TOL) -> DensitySample:
    return abel_samples(index_set.mask, [x], tail_tol)[0][0]


def abel_density(index_set: IndexSet, grid: tuple[int, int] = DEFAULT_GRID,
                 tail_tol: float = DEFAULT_TAIL_TOL, stab_tol: float = ABEL_STAB_TOL,
                 window: int = WINDOW, richardson: bool = False) -> DensityEstimate:
    if not stab_tol > 0:
        raise ValueError(f"stab_tol must be positive, got {stab_tol}")
    samples = abel_samples(index_set.mask, abel_grid(grid), tail_tol)[0]
    return _estimate("abel", samples, stab_tol, window, tail_tol, richardson)


def natural_density_partial(index_set: IndexSet, n: int) -> DensitySample:
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    count = int(prefix_counts(index_set.mask, [n])[0, 0])
    return DensitySample(float(n), count / n, 0.0, n)


def natural_samples(mask_fn: MaskFn, grid: tuple[int, int]) -> list[list[DensitySample]]:
    j_min, j_max = grid
    if not j_min < j_max:
        raise ValueError(f"grid needs j_min < j_max, got {grid}")
    ns = [2**j for j in range(j_min, j_max + 1)]
    counts = prefix_counts(mask_fn, ns)
    return [[DensitySample(float(n), int(c) / n, 0.0, n) for n, c in zip(ns, row)] for row in counts]


def natural_density(index_set: IndexSet, grid: tuple[int, int] = DEFAULT_GRID,
                    stab_tol: float = NATURAL_STAB_TOL, window: int = WINDOW) -> DensityEstimate:
    samples = natural_samples(index_set.mask, grid)[0]
    return _estimate("natural", samples, stab_tol, window, 0.0)


def lacunary_samples(mask_fn: MaskFn, theta: LacunaryScheme, r_max: int) -> list[list[DensitySample]]:
    if r_max < 2:
        raise ValueError(f"r_max must be >= 2, got {r_max}")
    if r_max > theta.r_max:
        raise ValueError(f"scheme has only {theta.r_max} blocks, asked for {r_max}")
    cutoffs = [theta.k[r] + 1 for r in range(r_max + 1)]
    counts = prefix_counts(mask_fn, cutoffs)
    out = []
    for row in counts:
        out.append([
            DensitySample(float(r), int(row[r] - row[r - 1]) / theta.h(r), 0.0, theta.h(r))
            for r in range(1, r_max + 1)
        ])
    return out


def lacunary_density(index_set: IndexSet, theta: LacunaryScheme | None = None, r_max: int = 20,
                     stab_tol: float = LACUNARY_STAB_TOL, window: int = WINDOW) -> DensityEstimate:
    theta = theta or dyadic_scheme(r_max)
    samples = lacunary_samples(index_set.mask, theta, r_max)[0]
    return _estimate("lacunary", samples, stab_tol, window, 0.0)
