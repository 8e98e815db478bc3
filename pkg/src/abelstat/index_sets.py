"""Symbolic subsets of the non-negative integers.

Every set answers membership queries one index at a time (``contains``) or
over a half-open index window as a boolean array (``mask``).  Windows are
what the density engine consumes, so they are vectorised.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import TYPE_CHECKING

import numpy as np

if TYPE_CHECKING:
    from abelstat.sequences import SequenceSpec


class IndexSet:
    """Base class for set expressions over ``{0, 1, 2, ...}``."""

    def mask(self, start: int, stop: int) -> np.ndarray:
        """Boolean membership of every k in ``range(start, stop)``."""
        raise NotImplementedError

    def contains(self, k: int) -> bool:
        return bool(self.mask(k, k + 1)[0])

    def __contains__(self, k: int) -> bool:
        return self.contains(k)

    def __or__(self, other: IndexSet) -> IndexSet:
        return Union(self, other)

    def __and__(self, other: IndexSet) -> IndexSet:
        return Intersection(self, other)

    def __invert__(self) -> IndexSet:
        return Complement(self)


@dataclass(frozen=True)
class Empty(IndexSet):
    def mask(self, start, stop):
        return np.zeros(stop - start, dtype=bool)

    def contains(self, k):
        return False


@dataclass(frozen=True)
class Full(IndexSet):
    def mask(self, start, stop):
        return np.ones(stop - start, dtype=bool)

    def contains(self, k):
        return k >= 0


@dataclass(frozen=True)
class Finite(IndexSet):
    elements: tuple[int, ...]

    def __post_init__(self):
        elems = tuple(sorted({int(e) for e in self.elements}))
        if elems and elems[0] < 0:
            raise ValueError("Finite elements must be non-negative")
        object.__setattr__(self, "elements", elems)

    def mask(self, start, stop):
        out = np.zeros(stop - start, dtype=bool)
        lo = bisect.bisect_left(self.elements, start)
        hi = bisect.bisect_left(self.elements, stop)
        if hi > lo:
            out[np.asarray(self.elements[lo:hi], dtype=np.int64) - start] = True
        return out

    def contains(self, k):
        i = bisect.bisect_left(self.elements, k)
        return i < len(self.elements) and self.elements[i] == k


@dataclass(frozen=True)
class ArithmeticProgression(IndexSet):
    """``{a, a+d, a+2d, ...}``."""

    a: int
    d: int

    def __post_init__(self):
        if self.a < 0:
            raise ValueError(f"offset a must be >= 0, got {self.a}")
        if self.d < 1:
            raise ValueError(f"step d must be >= 1, got {self.d}")

    def mask(self, start, stop):
        ks = np.arange(start, stop, dtype=np.int64)
        return (ks >= self.a) & ((ks - self.a) % self.d == 0)

    def contains(self, k):
        return k >= self.a and (k - self.a) % self.d == 0


@lru_cache(maxsize=256)
def _gap_terms(c: float, r: float, limit: int) -> tuple[int, ...]:
    # all distinct floor(c * r**j) <= limit, ascending
    exact = float(c).is_integer() and float(r).is_integer()
    terms: list[int] = []
    j = 0
    while True:
        if exact:
            t = int(c) * int(r) ** j
        else:
            t = math.floor(c * r**j)
        if t > limit:
            break
        if not terms or t != terms[-1]:
            terms.append(t)
        j += 1
    return tuple(terms)


def _round_limit(n: int) -> int:
    # bucket the generation limit so the term cache is reused across windows
    return 1 << max(int(n).bit_length(), 10)


@dataclass(frozen=True)
class ExponentialGaps(IndexSet):
    """``{floor(c * r**j) : j >= 0}`` with collisions removed."""

    c: float
    r: float

    def __post_init__(self):
        if not self.c >= 1:
            raise ValueError(f"c must be >= 1, got {self.c}")
        if not self.r > 1:
            raise ValueError(f"r must be > 1, got {self.r}")

    def terms(self, limit: int) -> tuple[int, ...]:
        """Members not exceeding ``limit``."""
        full = _gap_terms(float(self.c), float(self.r), _round_limit(limit))
        return full[: bisect.bisect_right(full, limit)]

    def mask(self, start, stop):
        out = np.zeros(stop - start, dtype=bool)
        terms = self.terms(stop - 1)
        lo = bisect.bisect_left(terms, start)
        if lo < len(terms):
            out[np.asarray(terms[lo:], dtype=np.int64) - start] = True
        return out

    def contains(self, k):
        terms = self.terms(k)
        i = bisect.bisect_left(terms, k)
        return i < len(terms) and terms[i] == k


@dataclass(frozen=True)
class Union(IndexSet):
    left: IndexSet
    right: IndexSet

    def mask(self, start, stop):
        return self.left.mask(start, stop) | self.right.mask(start, stop)

    def contains(self, k):
        return self.left.contains(k) or self.right.contains(k)


@dataclass(frozen=True)
class Intersection(IndexSet):
    left: IndexSet
    right: IndexSet

    def mask(self, start, stop):
        return self.left.mask(start, stop) & self.right.mask(start, stop)

    def contains(self, k):
        return self.left.contains(k) and self.right.contains(k)


@dataclass(frozen=True)
class Complement(IndexSet):
    inner: IndexSet

    def mask(self, start, stop):
        return ~self.inner.mask(start, stop)

    def contains(self, k):
        return not self.inner.contains(k)


@dataclass(frozen=True)
class Exceedance(IndexSet):
    """``{k : |p_k - L| >= eps}``; overflowed terms are always members."""

    seq: SequenceSpec
    L: float
    eps: float

    def __post_init__(self):
        if not self.eps > 0:
            raise ValueError(f"eps must be positive, got {self.eps}")

    def mask(self, start, stop):
        values = self.seq.values(np.arange(start, stop, dtype=np.int64))
        with np.errstate(invalid="ignore"):
            return ~(np.abs(values - self.L) < self.eps)

    def contains(self, k):
        v = self.seq.evaluate(k)
        return not abs(v - self.L) < self.eps


def contains(index_set: IndexSet, k: int) -> bool:
    return index_set.contains(k)


def exceedance_set(seq: SequenceSpec, L: float, eps: float) -> Exceedance:
    return Exceedance(seq, float(L), float(eps))


def _ap_intersection(p: ArithmeticProgression, q: ArithmeticProgression) -> IndexSet:
    g = math.gcd(p.d, q.d)
    if (q.a - p.a) % g:
        return Empty()
    lcm = p.d // g * q.d
    # smallest k >= max(a) with k = p.a mod p.d and k = q.a mod q.d
    k = max(p.a, q.a)
    step_inv = pow(p.d // g, -1, q.d // g) if q.d // g > 1 else 0
    t = ((q.a - p.a) // g * step_inv) % (q.d // g)
    base = p.a + p.d * t
    if base < k:
        base += -(-(k - base) // lcm) * lcm
    return ArithmeticProgression(base, lcm)


def _intersection_density(a: IndexSet, b: IndexSet) -> Fraction | None:
    if isinstance(a, ArithmeticProgression) and isinstance(b, ArithmeticProgression):
        return exact_density(_ap_intersection(a, b))
    da, db = exact_density(a), exact_density(b)
    if da == 0 or db == 0:
        return Fraction(0)
    if da == 1:
        return db
    if db == 1:
        return da
    # A \ B and B \ A are handled by the complement rule
    if isinstance(b, Complement) and da is not None:
        inner = _intersection_density(a, b.inner)
        return None if inner is None else da - inner
    if isinstance(a, Complement) and db is not None:
        inner = _intersection_density(a.inner, b)
        return None if inner is None else db - inner
    return None


def exact_density(index_set: IndexSet) -> Fraction | None:
    """Closed-form natural density, or ``None`` when no closed form is known.

    Where a value is returned it is also the Abel density, since the Abel
    method is regular.
    """
    s = index_set
    if isinstance(s, Empty):
        return Fraction(0)
    if isinstance(s, Full):
        return Fraction(1)
    if isinstance(s, (Finite, ExponentialGaps)):
        return Fraction(0)
    if isinstance(s, ArithmeticProgression):
        return Fraction(1, s.d)
    if isinstance(s, Complement):
        inner = exact_density(s.inner)
        return None if inner is None else 1 - inner
    if isinstance(s, Intersection):
        return _intersection_density(s.left, s.right)
    if isinstance(s, Union):
        dl, dr = exact_density(s.left), exact_density(s.right)
        if dl == 1 or dr == 1:
            return Fraction(1)
        if dl is None or dr is None:
            return None
        both = _intersection_density(s.left, s.right)
        return None if both is None else dl + dr - both
    return None
