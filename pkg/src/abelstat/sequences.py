"""Declarative real sequences ``(p_k)``, evaluable at any index.

Sequences are infinite and evaluated lazily.  A term whose magnitude leaves
the double range (or is otherwise non-finite) is reported as ``math.inf``,
the overflow marker; classifiers count such indices as exceedance members
for every tolerance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import TYPE_CHECKING

import numpy as np

from abelstat.index_sets import (
    ArithmeticProgression,
    Empty,
    ExponentialGaps,
    Finite,
    Full,
    IndexSet,
)

if TYPE_CHECKING:
    from abelstat.functions import FunctionSpec

OVERFLOW = math.inf
SCAN_BOUND = 1 << 24
_CHUNK = 1 << 20


class SelectorExhausted(ValueError):
    """The selector set ran out of members below the scan bound."""


def is_overflow(value: float) -> bool:
    return not math.isfinite(value)


def _own(raw, shape) -> np.ndarray:
    out = np.asarray(raw, dtype=float)
    if out.shape != shape:
        return np.broadcast_to(out, shape).copy()
    return out


def _odd(ks: np.ndarray):
    """Index (slice when ks is a contiguous run) selecting the odd entries."""
    if ks.ndim == 1 and ks.size > 1 and ks[-1] - ks[0] == ks.size - 1:
        return slice(int(ks[0] & 1) ^ 1, None, 2)
    return (ks & 1).astype(bool)


class SequenceSpec:
    def _raw(self, ks: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def values(self, ks) -> np.ndarray:
        """Terms at the index array ``ks``; non-finite terms become ``inf``."""
        ks = np.asarray(ks, dtype=np.int64)
        with np.errstate(all="ignore"):
            out = _own(self._raw(ks), ks.shape)
        bad = ~np.isfinite(out)
        if bad.any():
            out[bad] = OVERFLOW
        return out

    def window(self, start: int, stop: int) -> np.ndarray:
        return self.values(np.arange(start, stop, dtype=np.int64))

    def evaluate(self, k: int) -> float:
        return float(self.values(np.array([k], dtype=np.int64))[0])

    def __add__(self, other: SequenceSpec) -> SequenceSpec:
        return Sum(self, other)

    def __rmul__(self, c: float) -> SequenceSpec:
        return Scaled(float(c), self)


@dataclass(frozen=True)
class Constant(SequenceSpec):
    c: float

    def _raw(self, ks):
        return np.full(ks.shape, self.c, dtype=float)


@dataclass(frozen=True)
class Harmonic(SequenceSpec):
    """``L + 1/(k+1)``."""

    L: float

    def _raw(self, ks):
        return self.L + 1.0 / (ks + 1.0)


@dataclass(frozen=True)
class Alternating(SequenceSpec):
    """``L + amp * (-1)**k``."""

    L: float
    amp: float

    def _raw(self, ks):
        out = np.full(ks.shape, self.L + self.amp)
        out[_odd(ks)] = self.L - self.amp
        return out


@dataclass(frozen=True)
class AlternatingDecay(SequenceSpec):
    """``L + (-1)**k / (k+1)``."""

    L: float

    def _raw(self, ks):
        r = 1.0 / (ks + 1.0)
        odd = _odd(ks)
        r[odd] = -r[odd]
        if self.L:
            r += self.L
        return r


@dataclass(frozen=True)
class Linear(SequenceSpec):
    """``a + b*k``; the escape-to-infinity witness for unbounded sets."""

    a: float
    b: float

    def _raw(self, ks):
        return self.a + self.b * ks.astype(float)


def _mask_at(index_set: IndexSet, ks: np.ndarray) -> np.ndarray:
    if ks.size == 0:
        return np.zeros(0, dtype=bool)
    lo, hi = int(ks.min()), int(ks.max()) + 1
    if hi - lo <= 8 * ks.size + 64:
        return index_set.mask(lo, hi)[ks - lo]
    return np.fromiter((index_set.contains(int(k)) for k in ks), bool, ks.size)


@dataclass(frozen=True)
class Spiked(SequenceSpec):
    """``spike_k`` on ``support``, ``base_k`` elsewhere."""

    base: SequenceSpec
    support: IndexSet
    spike: SequenceSpec

    def _raw(self, ks):
        on = _mask_at(self.support, ks)
        out = _own(self.base._raw(ks), ks.shape)
        if on.any():
            out = out.copy() if not out.flags.writeable else out
            out[on] = self.spike._raw(ks[on])
        return out


@dataclass(frozen=True)
class Sum(SequenceSpec):
    a: SequenceSpec
    b: SequenceSpec

    def _raw(self, ks):
        return self.a._raw(ks) + self.b._raw(ks)


@dataclass(frozen=True)
class Scaled(SequenceSpec):
    c: float
    inner: SequenceSpec

    def _raw(self, ks):
        v = np.asarray(self.inner._raw(ks), dtype=float)
        out = self.c * v
        if self.c == 0:
            # 0 * overflow stays overflow: the term itself is unknown
            out[~np.isfinite(v)] = OVERFLOW
        return out


@dataclass(frozen=True)
class Mapped(SequenceSpec):
    """``f(p_k)``; an overflowed input term stays overflowed."""

    f: FunctionSpec
    inner: SequenceSpec

    def _raw(self, ks):
        v = _own(self.inner._raw(ks), ks.shape)
        bad = ~np.isfinite(v)
        if not bad.any():
            return self.f(v)
        out = _own(self.f(np.where(bad, 0.0, v)), ks.shape).copy()
        out[bad] = OVERFLOW
        return out


@dataclass(frozen=True)
class Subsequence(SequenceSpec):
    """``p_{n_k}`` where ``n_0 < n_1 < ...`` enumerate ``selector``."""

    inner: SequenceSpec
    selector: IndexSet

    def _raw(self, ks):
        return self.inner._raw(select(self.selector, ks))


def evaluate(seq: SequenceSpec, k: int) -> float:
    return seq.evaluate(k)


def make_perturbed(base: SequenceSpec, support: IndexSet, spike: SequenceSpec) -> Spiked:
    return Spiked(base, support, spike)


@lru_cache(maxsize=64)
def _scan_members(support: IndexSet, count: int, bound: int) -> np.ndarray:
    found = []
    have = 0
    start = 0
    while have < count and start < bound:
        stop = min(start + _CHUNK, bound)
        idx = np.flatnonzero(support.mask(start, stop)) + start
        found.append(idx)
        have += idx.size
        start = stop
    members = np.concatenate(found) if found else np.zeros(0, dtype=np.int64)
    if members.size < count:
        raise SelectorExhausted(
            f"only {members.size} members below scan bound {bound}, need {count}"
        )
    return members[:count]


def enumerate_selector(support: IndexSet, count: int, bound: int = SCAN_BOUND) -> list[int]:
    """First ``count`` members of ``support`` in increasing order."""
    if count < 1:
        raise ValueError("count must be >= 1")
    return [int(k) for k in select(support, np.arange(count), bound)]


def select(support: IndexSet, positions, bound: int = SCAN_BOUND) -> np.ndarray:
    """Members of ``support`` at the given 0-based ranks."""
    positions = np.asarray(positions, dtype=np.int64)
    if positions.size == 0:
        return positions
    need = int(positions.max()) + 1
    if isinstance(support, Full):
        return positions
    if isinstance(support, ArithmeticProgression):
        return support.a + support.d * positions
    if isinstance(support, Empty):
        raise SelectorExhausted("empty selector")
    if isinstance(support, Finite):
        if need > len(support.elements):
            raise SelectorExhausted(
                f"finite selector has {len(support.elements)} members, need {need}"
            )
        return np.asarray(support.elements, dtype=np.int64)[positions]
    if isinstance(support, ExponentialGaps):
        terms = support.terms(min(bound, 2**62))
        if need > len(terms):
            raise SelectorExhausted(
                f"only {len(terms)} members below scan bound {bound}, need {need}"
            )
        return np.asarray(terms, dtype=np.int64)[positions]
    # round the request up so windows of one evaluation share a scan
    count = 1 << max(need - 1, 1).bit_length()
    try:
        members = _scan_members(support, count, bound)
    except SelectorExhausted:
        members = _scan_members(support, need, bound)
    return members[positions]


def _catalog() -> dict[str, tuple[SequenceSpec, float | None]]:
    gaps = ExponentialGaps(1, 2)
    entries = {
        # ordinarily convergent
        "constant_0": (Constant(0.0), 0.0),
        "constant_2.5": (Constant(2.5), 2.5),
        "harmonic_0": (Harmonic(0.0), 0.0),
        "harmonic_5": (Harmonic(5.0), 5.0),
        "harmonic_-1": (Harmonic(-1.0), -1.0),
        "alternating_decay_0": (AlternatingDecay(0.0), 0.0),
        "alternating_decay_1": (AlternatingDecay(1.0), 1.0),
        "neg_harmonic_3": (Sum(Constant(3.0), Scaled(-2.0, Harmonic(0.0))), 3.0),
        "harmonic_sum": (Sum(Harmonic(1.0), AlternatingDecay(-0.5)), 0.5),
        "harmonic_sub_even": (Subsequence(Harmonic(2.0), ArithmeticProgression(0, 2)), 2.0),
        "decay_sub_1mod3": (Subsequence(AlternatingDecay(-2.0), ArithmeticProgression(1, 3)), -2.0),
        # Abel statistically convergent only
        "spiked_0": (Spiked(Constant(0.0), gaps, Constant(1.0)), 0.0),
        "spiked_2": (Spiked(Constant(2.0), gaps, Constant(100.0)), 2.0),
        # no limit
        "alternating": (Alternating(0.0, 1.0), None),
        "linear": (Linear(0.0, 1.0), None),
    }
    return entries


CATALOG: dict[str, SequenceSpec] = {name: seq for name, (seq, _) in _catalog().items()}
CATALOG_LIMITS: dict[str, float | None] = {name: lim for name, (_, lim) in _catalog().items()}
