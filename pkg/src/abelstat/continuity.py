"""Experimental classification of functions into the four continuity classes.

A function is pushed through every member of a finite sequence family and
the image sequences are classified.  The four flags are

``A_st``    Abel statistically convergent input -> image Abel statistically convergent
``c``       convergent input -> convergent image
``cA_st``   convergent input -> image Abel statistically convergent
``A_st_c``  Abel statistically convergent input -> convergent image

always with expected image limit ``f(L)``, evaluated directly.  A pass over a
finite family is evidence, never proof; reports carry that in ``basis``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np

from abelstat.convergence import (
    DEFAULT_OPTIONS,
    ConvergenceOptions,
    IntervalSpec,
    closure_witness_check,
    compactness_verdict,
    verify_limit,
)
from abelstat.density import CHUNK
from abelstat.functions import Add, FunctionSpec, Polynomial
from abelstat.index_sets import ArithmeticProgression, ExponentialGaps
from abelstat.sequences import (
    Alternating,
    AlternatingDecay,
    Constant,
    Harmonic,
    Mapped,
    Scaled,
    SequenceSpec,
    Spiked,
    Subsequence,
    Sum,
)

FLAGS = ("A_st", "c", "cA_st", "A_st_c")
IMPLICATIONS = (("c", "cA_st"), ("A_st", "cA_st"), ("A_st_c", "A_st"), ("A_st", "c"))
EVIDENCE_BASIS = "finite-family evidence, not a proof"


class PreconditionError(ValueError):
    """A check was called on inputs that do not meet its stated premise."""


class FamilyValidationError(ValueError):
    pass


class UniformityViolation(ValueError):
    def __init__(self, n: int, t: float, gap: float, bound: float):
        self.n, self.t, self.gap, self.bound = n, t, gap, bound
        super().__init__(f"|f_{n}(t) - f(t)| = {gap:.3g} > bound {bound:.3g} at t = {t!r}")


@dataclass(frozen=True)
class FamilyMember:
    name: str
    seq: SequenceSpec
    limit: float | None  # None marks a divergent control


@dataclass(frozen=True)
class SequenceFamily:
    name: str
    members: tuple[FamilyMember, ...]
    provenance: str
    opts: ConvergenceOptions = DEFAULT_OPTIONS
    value_range: tuple[float, float] = (-math.inf, math.inf)

    @property
    def convergent_members(self) -> list[FamilyMember]:
        return [m for m in self.members if m.limit is not None]

    def restricted_to(self, E: IntervalSpec, name: str | None = None) -> SequenceFamily:
        """Members whose limit and every evaluated term lie in E."""
        keep = []
        for m in self.members:
            if m.limit is not None and not bool(E.contains(m.limit)):
                continue
            if all(np.all(E.contains(v)) for v in _horizon_chunks(m.seq, self.opts.horizon)):
                keep.append(m)
        lo, hi = _value_range(keep, self.opts.horizon)
        return SequenceFamily(name or f"{self.name}|{E}", tuple(keep), self.provenance, self.opts, (lo, hi))


def _horizon_chunks(seq, horizon):
    for start in range(0, horizon, CHUNK):
        yield seq.window(start, min(start + CHUNK, horizon))


def _value_range(members, horizon) -> tuple[float, float]:
    lo, hi = math.inf, -math.inf
    for m in members:
        for v in _horizon_chunks(m.seq, horizon):
            v = v[np.isfinite(v)]
            if v.size:
                lo, hi = min(lo, float(v.min())), max(hi, float(v.max()))
    return lo, hi


def build_family(name: str, members: Sequence[FamilyMember], opts: ConvergenceOptions = DEFAULT_OPTIONS,
                 provenance: str = "user") -> SequenceFamily:
    """Validate every member against its declared limit and freeze the family."""
    bad = []
    for m in members:
        if m.limit is not None:
            v = verify_limit(m.seq, m.limit, "abel_statistical", opts)
            if not v.convergent:
                bad.append(f"{m.name}: declared limit {m.limit} but verdict {v.classification}")
    if bad:
        raise FamilyValidationError("; ".join(bad))
    lo, hi = _value_range(members, opts.horizon)
    return SequenceFamily(name, tuple(members), provenance, opts, (lo, hi))


def standard_members() -> list[FamilyMember]:
    gaps2, gaps3 = ExponentialGaps(1, 2), ExponentialGaps(1, 3)
    spiked0 = Spiked(Constant(0.0), gaps2, Constant(1.0))
    return [
        FamilyMember("constant_0", Constant(0.0), 0.0),
        FamilyMember("constant_0.5", Constant(0.5), 0.5),
        FamilyMember("constant_-0.75", Constant(-0.75), -0.75),
        FamilyMember("harmonic_0", Harmonic(0.0), 0.0),
        FamilyMember("neg_harmonic_0", Scaled(-1.0, Harmonic(0.0)), 0.0),
        FamilyMember("alternating_decay_0", AlternatingDecay(0.0), 0.0),
        FamilyMember("below_0.5", Sum(Constant(0.5), Scaled(-0.5, Harmonic(0.0))), 0.5),
        FamilyMember("above_0.5", Sum(Constant(0.5), Scaled(0.5, Harmonic(0.0))), 0.5),
        FamilyMember("spiked_0", spiked0, 0.0),
        FamilyMember("spiked_0.5", Spiked(Constant(0.5), gaps2, Constant(-1.0)), 0.5),
        FamilyMember("spiked_decay_0", Spiked(Scaled(0.5, AlternatingDecay(0.0)), gaps3, Constant(-1.0)), 0.0),
        FamilyMember("harmonic_sub_1mod3", Subsequence(Harmonic(0.0), ArithmeticProgression(1, 3)), 0.0),
        FamilyMember("spiked_sub_even", Subsequence(spiked0, ArithmeticProgression(0, 2)), 0.0),
        FamilyMember("alternating_control", Alternating(0.0, 1.0), None),
        FamilyMember("alternating_shifted_control", Alternating(0.25, 0.5), None),
    ]


@lru_cache(maxsize=8)
def standard_family(opts: ConvergenceOptions = DEFAULT_OPTIONS) -> SequenceFamily:
    """The catalog family: constants, harmonic and alternating-decay members,
    density-zero spiked members, subsequences, and two divergent controls.
    All terms lie in [-1, 1]."""
    return build_family("standard", standard_members(), opts, provenance="catalog:standard (deterministic, no seed)")


@dataclass(frozen=True)
class MemberResult:
    member: str
    limit: float
    expected: float
    input_ordinary: str
    image_abel: str
    image_ordinary: str


@dataclass(frozen=True)
class ProbeFailure:
    member: str
    flag: str
    image_verdict: str
    expected: float


@dataclass(frozen=True)
class ProbeReport:
    function: FunctionSpec
    family: str
    flags: dict
    failures: tuple[ProbeFailure, ...]
    members: tuple[MemberResult, ...]
    basis: str = EVIDENCE_BASIS

    def to_dict(self) -> dict:
        from abelstat.codec import encode_function

        return {
            "function": encode_function(self.function),
            "family": self.family,
            "flags": dict(self.flags),
            "basis": self.basis,
            "failures": [vars(f) for f in self.failures],
            "members": [vars(m) for m in self.members],
        }


def _flag(outcomes: list[str]) -> str:
    if "divergent" in outcomes:
        return "fail"
    if "inconclusive" in outcomes:
        return "inconclusive"
    return "pass"


def probe(f: FunctionSpec, family: SequenceFamily, opts: ConvergenceOptions | None = None) -> ProbeReport:
    opts = opts or family.opts
    outcomes = {flag: [] for flag in FLAGS}
    failures = []
    results = []
    for m in family.convergent_members:
        expected = f.at(m.limit)
        image = Mapped(f, m.seq)
        in_ord = verify_limit(m.seq, m.limit, "ordinary", opts).classification
        out_abel = verify_limit(image, expected, "abel_statistical", opts).classification
        out_ord = verify_limit(image, expected, "ordinary", opts).classification
        results.append(MemberResult(m.name, m.limit, expected, in_ord, out_abel, out_ord))
        checks = [("A_st", out_abel), ("A_st_c", out_ord)]
        if in_ord == "convergent":
            checks += [("c", out_ord), ("cA_st", out_abel)]
        elif in_ord == "inconclusive":
            # membership of the premise class is itself undecided
            checks += [("c", "inconclusive"), ("cA_st", "inconclusive")]
        for flag, verdict in checks:
            outcomes[flag].append(verdict)
            if verdict == "divergent":
                failures.append(ProbeFailure(m.name, flag, verdict, expected))
    flags = {flag: _flag(outcomes[flag]) for flag in FLAGS}
    return ProbeReport(f, family.name, flags, tuple(failures), tuple(results))


def check_sum_closure(f: FunctionSpec, g: FunctionSpec, family: SequenceFamily,
                      opts: ConvergenceOptions | None = None) -> bool:
    for name, h in (("f", f), ("g", g)):
        flag = probe(h, family, opts).flags["A_st"]
        if flag != "pass":
            raise PreconditionError(f"{name} does not pass A_st on {family.name} (flag {flag})")
    return probe(Add(f, g), family, opts).flags["A_st"] == "pass"


@dataclass(frozen=True)
class ImplicationCheck:
    premise: str
    conclusion: str
    respected: bool
    note: str = ""


def check_implication_lattice(f: FunctionSpec, family: SequenceFamily,
                              opts: ConvergenceOptions | None = None,
                              report: ProbeReport | None = None) -> list[ImplicationCheck]:
    """A premise flag that passes must not meet a conclusion flag that fails."""
    flags = (report or probe(f, family, opts)).flags
    out = []
    for premise, conclusion in IMPLICATIONS:
        p, c = flags[premise], flags[conclusion]
        if p == "pass" and c == "fail":
            out.append(ImplicationCheck(premise, conclusion, False, "premise passes, conclusion fails"))
        elif p != "pass":
            out.append(ImplicationCheck(premise, conclusion, True, f"vacuous: premise {p}"))
        elif c == "inconclusive":
            out.append(ImplicationCheck(premise, conclusion, True, "vacuous: conclusion inconclusive"))
        else:
            out.append(ImplicationCheck(premise, conclusion, True))
    return out


@dataclass(frozen=True)
class UniformLimitReport:
    sup_gaps: tuple[float, ...]
    bounds: tuple[float, ...]
    member_flags: tuple[str, ...]
    limit_flag: str
    notes: tuple[str, ...] = field(default=())

    @property
    def limit_passes(self) -> bool:
        return self.limit_flag == "pass"


def uniform_limit_harness(f_n: Sequence[FunctionSpec], f: FunctionSpec,
                          bound: Callable[[int], float] | Sequence[float],
                          family: SequenceFamily, opts: ConvergenceOptions | None = None,
                          n_samples: int = 20001, probe_members: bool = True) -> UniformLimitReport:
    """Check ``sup |f_n - f| <= bound(n)`` on the family's value range by dense
    sampling, then probe the limit ``f`` (and, unless ``probe_members`` is
    off, every ``f_n``) for A_st."""
    bounds = [float(bound(n)) if callable(bound) else float(bound[n]) for n in range(len(f_n))]
    if any(b2 > b1 for b1, b2 in zip(bounds, bounds[1:])):
        raise ValueError(f"bound must be non-increasing, got {bounds}")
    lo, hi = family.value_range
    ts = np.union1d(np.linspace(lo, hi, n_samples), [0.0] if lo <= 0 <= hi else [])
    target = f(ts)
    gaps = []
    for n, (fn, b) in enumerate(zip(f_n, bounds)):
        diff = np.abs(fn(ts) - target)
        worst = int(np.argmax(diff))
        if diff[worst] > b + 1e-12:
            raise UniformityViolation(n, float(ts[worst]), float(diff[worst]), b)
        gaps.append(float(diff[worst]))
    member_flags = tuple(probe(fn, family, opts).flags["A_st"] for fn in f_n) if probe_members else ()
    limit_flag = probe(f, family, opts).flags["A_st"]
    notes = []
    if limit_flag == "pass" and any(flag == "fail" for flag in member_flags):
        notes.append("limit passes although some f_n fail; only the forward direction is claimed")
    return UniformLimitReport(tuple(gaps), tuple(bounds), member_flags, limit_flag, tuple(notes))


def abs_chebyshev_approximants(degrees: Sequence[int] = (1, 2, 4, 8)) -> tuple[list[Polynomial], list[float]]:
    """Chebyshev truncations of |t| on [-1, 1] with certified sup-error bounds.

    ``|t| = 2/pi - (4/pi) sum_{m>=1} (-1)**m T_{2m}(t) / (4m^2 - 1)``; keeping
    m <= M leaves a tail bounded by ``2 / (pi (2M + 1))``, attained at t = 0;
    a small allowance covers rounding in the monomial form.
    """
    polys, bounds = [], []
    for M in degrees:
        cheb = np.zeros(2 * M + 1)
        cheb[0] = 2 / math.pi
        for m in range(1, M + 1):
            cheb[2 * m] = -(4 / math.pi) * (-1) ** m / (4 * m * m - 1)
        polys.append(Polynomial(tuple(np.polynomial.chebyshev.cheb2poly(cheb))))
        bounds.append(2 / (math.pi * (2 * M + 1)) + 1e-10)
    return polys, bounds


def _grid_range(f: FunctionSpec, lo: float, hi: float, n: int = 20001) -> tuple[float, float]:
    values = f(np.linspace(lo, hi, n))
    return float(np.min(values)), float(np.max(values))


def image_compactness_check(f: FunctionSpec, E: IntervalSpec, family: SequenceFamily,
                            opts: ConvergenceOptions | None = None) -> bool:
    """Every member's image converges to ``f(L)`` and ``f(L)`` lies in the
    sampled image of E."""
    if not compactness_verdict(E):
        raise PreconditionError(f"{E} is not compact")
    if E.is_empty():
        return True
    inside = family.restricted_to(E)
    report = probe(f, inside, opts)
    if report.flags["A_st"] != "pass":
        raise PreconditionError(f"f does not pass A_st on {inside.name} (flag {report.flags['A_st']})")
    img_lo, img_hi = _grid_range(f, E.lower, E.upper)
    slack = 1e-12 * max(1.0, abs(img_lo), abs(img_hi))
    for r in report.members:
        if r.image_abel != "convergent":
            return False
        if not img_lo - slack <= r.expected <= img_hi + slack:
            return False
    return True


def closure_mapping_check(f: FunctionSpec, B: IntervalSpec, witness: SequenceSpec, L: float,
                          opts: ConvergenceOptions = DEFAULT_OPTIONS) -> bool:
    """Push a closure witness for ``L`` in B through f and certify ``f(L)``
    in the closure of ``f(B)``."""
    if not closure_witness_check(B, witness, L, opts):
        raise PreconditionError(f"witness does not certify {L} in the closure of {B}")
    w_lo, w_hi = _value_range([FamilyMember("w", witness, L)], opts.horizon)
    lo = max(B.lower, w_lo) if math.isfinite(B.lower) else w_lo
    hi = min(B.upper, w_hi) if math.isfinite(B.upper) else w_hi
    img_lo, img_hi = _grid_range(f, lo, hi)
    image = Mapped(f, witness)
    slack = 1e-12 * max(1.0, abs(img_lo), abs(img_hi))
    for v in _horizon_chunks(image, opts.horizon):
        if np.any(v < img_lo - slack) or np.any(v > img_hi + slack):
            return False
    return verify_limit(image, f.at(L), "abel_statistical", opts).convergent


def discontinuous_at(f: FunctionSpec, t: float, eps_min: float, scales: Sequence[int] = (4, 6, 8, 10)) -> bool:
    """Two-sided jump test: at every scale h = 10**-s some nearby value of f
    differs from ``f(t)`` by more than ``10 * eps_min``."""
    ft = f.at(t)
    gap = 10 * eps_min
    for s in scales:
        h = 10.0 ** -s * np.linspace(1.0, 2.0, 11)
        near = np.concatenate([f(t + h), f(t - h)])
        if not np.max(np.abs(near - ft)) > gap:
            return False
    return True


def modulus_certificate_holds(f: FunctionSpec, seq: SequenceSpec, L: float, eps: float, delta: float,
                              horizon: int) -> bool:
    """Image exceedance at eps sits inside the input exceedance at delta, pointwise."""
    fL = f.at(L)
    for v in _horizon_chunks(seq, horizon):
        img = np.abs(f(np.where(np.isfinite(v), v, 0.0)) - fL) >= eps
        pre = ~(np.abs(v - L) < delta)
        if np.any(img & ~pre):
            return False
    return True
