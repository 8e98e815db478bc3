"""Real functions used by the continuity probes.

All functions are total on the reals and vectorised over numpy arrays.
Catalog entries with a singular point define their value there explicitly
and declare it through ``discontinuities()``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class FunctionSpec:
    def __call__(self, t):
        raise NotImplementedError

    def at(self, t: float) -> float:
        with np.errstate(all="ignore"):
            return float(np.asarray(self(np.array([t], dtype=float)))[0])

    def discontinuities(self) -> tuple[float, ...]:
        """Points where the function is known to jump or oscillate."""
        return ()


@dataclass(frozen=True)
class Identity(FunctionSpec):
    def __call__(self, t):
        return np.asarray(t, dtype=float)


@dataclass(frozen=True)
class Polynomial(FunctionSpec):
    """Coefficients in ascending order of degree."""

    coeffs: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(float(c) for c in self.coeffs))
        if not self.coeffs:
            raise ValueError("polynomial needs at least one coefficient")

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        out = np.full(t.shape, self.coeffs[-1])
        with np.errstate(all="ignore"):
            for c in reversed(self.coeffs[:-1]):
                out *= t
                out += c
        return out


@dataclass(frozen=True)
class Step(FunctionSpec):
    """``lo`` for ``t < threshold``, ``hi`` otherwise."""

    threshold: float
    lo: float
    hi: float

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        return np.where(t < self.threshold, self.lo, self.hi)

    def discontinuities(self):
        return (self.threshold,) if self.lo != self.hi else ()


@dataclass(frozen=True)
class Abs(FunctionSpec):
    def __call__(self, t):
        return np.abs(np.asarray(t, dtype=float))


@dataclass(frozen=True)
class BoundedOscillation(FunctionSpec):
    """``sin(1/t)`` with the value at 0 fixed to ``at_zero``."""

    at_zero: float = 0.0

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        safe = np.where(t == 0, 1.0, t)
        return np.where(t == 0, self.at_zero, np.sin(1.0 / safe))

    def discontinuities(self):
        return (0.0,)


@dataclass(frozen=True)
class Scale(FunctionSpec):
    c: float
    inner: FunctionSpec

    def __call__(self, t):
        return self.c * self.inner(t)

    def discontinuities(self):
        return self.inner.discontinuities() if self.c != 0 else ()


@dataclass(frozen=True)
class Add(FunctionSpec):
    f: FunctionSpec
    g: FunctionSpec

    def __call__(self, t):
        return self.f(t) + self.g(t)

    def discontinuities(self):
        return tuple(sorted(set(self.f.discontinuities()) | set(self.g.discontinuities())))


@dataclass(frozen=True)
class Product(FunctionSpec):
    f: FunctionSpec
    g: FunctionSpec

    def __call__(self, t):
        return self.f(t) * self.g(t)

    def discontinuities(self):
        return tuple(sorted(set(self.f.discontinuities()) | set(self.g.discontinuities())))


@dataclass(frozen=True)
class Compose(FunctionSpec):
    """``f(g(t))``."""

    f: FunctionSpec
    g: FunctionSpec

    def __call__(self, t):
        return self.f(self.g(t))

    def discontinuities(self):
        # preimages of f's jumps under g are not tracked
        return self.g.discontinuities()


CATALOG: dict[str, FunctionSpec] = {
    "identity": Identity(),
    "square": Polynomial((0.0, 0.0, 1.0)),
    "shifted_square": Polynomial((0.0, 1.0, 1.0)),
    "affine": Polynomial((1.0, 2.0)),
    "cubic": Polynomial((0.0, -1.0, 0.0, 1.0)),
    "abs": Abs(),
    "step": Step(0.0, 0.0, 1.0),
    "sin_inverse": BoundedOscillation(0.0),
}
