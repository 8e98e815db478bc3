"""Classification of real sequences under four convergence modes.

A sequence is tested against a candidate limit L by building the exceedance
set ``{k : |p_k - L| >= eps}`` for every eps in a finite grid and estimating
its density with the matching engine (natural, lacunary or Abel).  The
ordinary mode looks at the sup of ``|p_k - L|`` over the second half of the
horizon instead.

Finite data cannot decide a limit, so every verdict is three-valued:
``convergent`` needs zero-density evidence at every eps, ``divergent`` needs
a positive-density witness against every candidate tried, anything else is
``inconclusive``.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field, replace
from functools import lru_cache

import numpy as np

from abelstat.density import (
    ABEL_STAB_TOL,
    CHUNK,
    LACUNARY_STAB_TOL,
    NATURAL_STAB_TOL,
    DensityEstimate,
    LacunaryScheme,
    _powers,
    abel_grid,
    abel_samples,
    dyadic_scheme,
    estimate_from_samples,
    lacunary_samples,
    natural_samples,
    truncation_index,
    validate_lacunary,
)
from abelstat.sequences import Constant, Harmonic, Linear, Scaled, SequenceSpec, Sum

METHODS = ("ordinary", "statistical", "lacunary_statistical", "abel_statistical")
ALIASES = {
    "ordinary": "ordinary",
    "c": "ordinary",
    "statistical": "statistical",
    "stat": "statistical",
    "st": "statistical",
    "lacunary": "lacunary_statistical",
    "lacunary_statistical": "lacunary_statistical",
    "lacunary-stat": "lacunary_statistical",
    "abel": "abel_statistical",
    "abel_statistical": "abel_statistical",
    "abel-stat": "abel_statistical",
}


def normalize_method(method: str) -> str:
    try:
        return ALIASES[method.lower().replace(" ", "_")]
    except KeyError:
        raise ValueError(f"unknown method {method!r}; choose from {', '.join(METHODS)}") from None


@dataclass(frozen=True)
class ConvergenceOptions:
    eps_grid: tuple[float, ...] = (1e-1, 1e-2, 1e-3)
    horizon: int = 2**20
    x_grid: tuple[int, int] = (4, 20)
    tail_tol: float = 1e-9
    stab_tol: float | None = None
    window: int = 4
    density_zero_tol: float = 1e-2
    divergence_floor: float = 1e-1
    trim_fraction: float = 0.1
    cross_check_tol: float = 1e-2
    limit_tol: float = 1e-3
    theta: tuple[int, ...] | None = None
    delta: float = 0.5
    richardson: bool = False

    def __post_init__(self):
        object.__setattr__(self, "eps_grid", tuple(sorted((float(e) for e in self.eps_grid), reverse=True)))
        object.__setattr__(self, "x_grid", tuple(int(j) for j in self.x_grid))
        if self.theta is not None:
            object.__setattr__(self, "theta", tuple(int(k) for k in self.theta))
        if not self.eps_grid or min(self.eps_grid) <= 0:
            raise ValueError(f"eps grid must be non-empty and positive, got {self.eps_grid}")
        if self.horizon < 64 or self.horizon & (self.horizon - 1):
            raise ValueError(f"horizon must be a power of two >= 64, got {self.horizon}")
        if not 0 <= self.trim_fraction < 0.5:
            raise ValueError(f"trim_fraction must lie in [0, 0.5), got {self.trim_fraction}")
        for name in ("tail_tol", "density_zero_tol", "divergence_floor", "limit_tol", "cross_check_tol"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)}")

    @property
    def eps_min(self) -> float:
        return min(self.eps_grid)

    @property
    def log_horizon(self) -> int:
        return self.horizon.bit_length() - 1

    def stab_tol_for(self, method: str) -> float:
        if self.stab_tol is not None:
            return self.stab_tol
        return ABEL_STAB_TOL if method == "abel_statistical" else (
            LACUNARY_STAB_TOL if method == "lacunary_statistical" else NATURAL_STAB_TOL
        )

    def scheme(self) -> LacunaryScheme:
        if self.theta is None:
            return dyadic_scheme(self.log_horizon)
        return validate_lacunary(self.theta, self.delta)

    def to_dict(self) -> dict:
        return asdict(self)


DEFAULT_OPTIONS = ConvergenceOptions()


@dataclass(frozen=True)
class EpsEvidence:
    eps: float
    status: str  # "zero" | "positive" | "undecided"
    estimate: DensityEstimate | None = None
    tail_sup: float | None = None

    def to_dict(self) -> dict:
        d = {"eps": self.eps, "status": self.status}
        if self.estimate is not None:
            d["estimate"] = self.estimate.to_dict()
        if self.tail_sup is not None:
            d["tail_sup"] = self.tail_sup
        return d


@dataclass(frozen=True)
class CandidateTrial:
    limit: float
    status: str  # "accepted" | "refuted" | "undecided"
    witness_eps: float | None = None


@dataclass(frozen=True)
class ConvergenceVerdict:
    method: str
    candidate_limit: float | None
    classification: str
    evidence: tuple[EpsEvidence, ...]
    horizon: int
    trials: tuple[CandidateTrial, ...] = field(default=())

    @property
    def convergent(self) -> bool:
        return self.classification == "convergent"

    @property
    def divergent(self) -> bool:
        return self.classification == "divergent"

    def to_dict(self) -> dict:
        return {
            "method": self.method,
            "candidate_limit": self.candidate_limit,
            "classification": self.classification,
            "horizon": self.horizon,
            "evidence": [e.to_dict() for e in self.evidence],
            "trials": [asdict(t) for t in self.trials],
        }


def _nonincreasing(values, slack: float) -> bool:
    return all(b <= a + slack for a, b in zip(values, values[1:]))


def _density_status(est: DensityEstimate, opts: ConvergenceOptions) -> str:
    tail = est.tail()
    if est.converged and est.value <= opts.density_zero_tol:
        return "zero"
    # a non-increasing tail already at or below the tolerance brackets the limit
    if len(tail) == est.window and tail[-1] <= opts.density_zero_tol and _nonincreasing(tail, 2 * opts.tail_tol):
        return "zero"
    if (est.converged and est.value >= opts.divergence_floor) or min(tail) >= opts.divergence_floor:
        return "positive"
    return "undecided"


def _exceedance_masks(seq: SequenceSpec, L: float, eps: np.ndarray):
    def mask_fn(start, stop):
        dev = np.abs(seq.window(start, stop) - L)
        return dev[None, :] >= eps[:, None]

    return mask_fn


def _density_evidence(seq, L, method, opts) -> tuple[EpsEvidence, ...]:
    eps = np.asarray(opts.eps_grid)
    mask_fn = _exceedance_masks(seq, L, eps)
    stab = opts.stab_tol_for(method)
    if method == "abel_statistical":
        rows = abel_samples(mask_fn, abel_grid(opts.x_grid), opts.tail_tol)
        tail_tol = opts.tail_tol
        name = "abel"
    elif method == "statistical":
        rows = natural_samples(mask_fn, (opts.x_grid[0], opts.log_horizon))
        tail_tol = 0.0
        name = "natural"
    else:
        theta = opts.scheme()
        rows = lacunary_samples(mask_fn, theta, theta.r_max)
        tail_tol = 0.0
        name = "lacunary"
    out = []
    for e, samples in zip(opts.eps_grid, rows):
        est = estimate_from_samples(name, samples, stab, opts.window, tail_tol, opts.richardson)
        out.append(EpsEvidence(e, _density_status(est, opts), estimate=est))
    return tuple(out)


def _ordinary_evidence(seq, L, opts) -> tuple[EpsEvidence, ...]:
    tail = seq.window(opts.horizon // 2, opts.horizon)
    sup = float(np.max(np.abs(tail - L)))
    out = []
    for e in opts.eps_grid:
        if sup < e:
            status = "zero"
        elif sup >= opts.divergence_floor:
            status = "positive"
        else:
            status = "undecided"
        out.append(EpsEvidence(e, status, tail_sup=sup))
    return tuple(out)


@lru_cache(maxsize=4096)
def _evidence(seq: SequenceSpec, L: float, method: str, opts: ConvergenceOptions) -> tuple[EpsEvidence, ...]:
    if method == "ordinary":
        return _ordinary_evidence(seq, L, opts)
    return _density_evidence(seq, L, method, opts)


def _trial(L: float, evidence) -> CandidateTrial:
    if all(e.status == "zero" for e in evidence):
        return CandidateTrial(L, "accepted")
    for e in evidence:
        if e.status == "positive":
            return CandidateTrial(L, "refuted", e.eps)
    return CandidateTrial(L, "undecided")


def _tail_window(seq, opts):
    return seq.window(opts.horizon // 2, opts.horizon)


def _trimmed(values: np.ndarray, trim: float) -> np.ndarray:
    v = np.sort(values)
    cut = int(math.floor(trim * v.size))
    return v[cut: v.size - cut] if v.size - 2 * cut > 0 else v


def abel_mean(seq: SequenceSpec, x: float, tail_tol: float = 1e-9) -> float | None:
    """``(1-x) * sum p_k x**k`` truncated at the certified index; None if unbounded."""
    K = truncation_index(x, tail_tol)
    total = 0.0
    start = 0
    while start <= K:
        stop = min(start + CHUNK, K + 1)
        v = seq.window(start, stop)
        if not np.all(np.isfinite(v)):
            return None
        scale = math.exp(start * math.log1p(-(1.0 - x)))
        total += scale * float(v @ _powers(x, min(CHUNK, K + 1))[: stop - start])
        start = stop
    return (1.0 - x) * total


def estimate_limit(seq: SequenceSpec, method: str = "abel_statistical",
                   opts: ConvergenceOptions = DEFAULT_OPTIONS) -> float | None:
    """Trimmed median of the tail half-window, cross-checked by the Abel mean.

    The Abel mean is only consulted when the trimmed window is spread out;
    returns None when the two then disagree, or when overflow fills the tail.
    """
    tail = _tail_window(seq, opts)
    finite = tail[np.isfinite(tail)]
    if finite.size * 2 <= tail.size:
        return None
    kept = _trimmed(finite, opts.trim_fraction)
    median = float(np.median(kept))
    spread = float(kept[-1] - kept[0])
    if spread <= opts.cross_check_tol:
        return median
    mean = abel_mean(seq, 1.0 - 2.0 ** -opts.x_grid[1], opts.tail_tol)
    if mean is not None and abs(mean - median) > opts.cross_check_tol:
        return None
    return median


def classify(seq: SequenceSpec, method: str = "abel_statistical", candidate: float | None = None,
             opts: ConvergenceOptions = DEFAULT_OPTIONS) -> ConvergenceVerdict:
    method = normalize_method(method)
    if method == "lacunary_statistical":
        opts.scheme()
    if candidate is not None:
        pending = iter([float(candidate)])
    else:
        pending = _candidate_stream(seq, opts)
    trials = []
    first_evidence = None
    first_undecided = None
    for L in pending:
        evidence = _evidence(seq, L, method, opts)
        trial = _trial(L, evidence)
        trials.append(trial)
        if trial.status == "accepted":
            return ConvergenceVerdict(method, L, "convergent", evidence, opts.horizon, tuple(trials))
        if first_evidence is None:
            first_evidence = evidence
        if trial.status == "undecided" and first_undecided is None:
            first_undecided = (L, evidence)
    if first_undecided is not None:
        L, evidence = first_undecided
        return ConvergenceVerdict(method, L, "inconclusive", evidence, opts.horizon, tuple(trials))
    return ConvergenceVerdict(method, None, "divergent", first_evidence or (), opts.horizon, tuple(trials))


def _candidate_stream(seq, opts):
    """Candidates in order of preference, generated lazily (the Abel mean is costly)."""
    seen: list[float] = []

    def fresh(value):
        if value is None or not math.isfinite(value):
            return False
        if any(abs(value - c) <= opts.limit_tol / 10 for c in seen):
            return False
        seen.append(float(value))
        return True

    tail = _tail_window(seq, opts)
    finite = tail[np.isfinite(tail)]
    est = estimate_limit(seq, "abel_statistical", opts)
    if fresh(est):
        yield est
    if finite.size == 0:
        if fresh(0.0):
            yield 0.0
        return
    kept = _trimmed(finite, opts.trim_fraction)
    median = float(np.median(kept))
    if fresh(median):
        yield median
    mean = abel_mean(seq, 1.0 - 2.0 ** -opts.x_grid[1], opts.tail_tol) if finite.size == tail.size else None
    if fresh(mean):
        yield mean
    for q in (float(kept[0]), float(kept[-1])):
        if fresh(q):
            yield q


def verify_limit(seq: SequenceSpec, L: float, method: str = "abel_statistical",
                 opts: ConvergenceOptions = DEFAULT_OPTIONS) -> ConvergenceVerdict:
    return classify(seq, method, candidate=float(L), opts=opts)


@dataclass(frozen=True)
class IntervalSpec:
    lower: float = -math.inf
    upper: float = math.inf
    lower_closed: bool = False
    upper_closed: bool = False

    def __post_init__(self):
        lo, hi = float(self.lower), float(self.upper)
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)
        if math.isnan(lo) or math.isnan(hi):
            raise ValueError("interval endpoints must not be NaN")
        if math.isfinite(lo) and math.isfinite(hi) and lo > hi:
            raise ValueError(f"lower {lo} exceeds upper {hi}")
        # infinite endpoints are never attained
        if not math.isfinite(lo):
            object.__setattr__(self, "lower_closed", False)
        if not math.isfinite(hi):
            object.__setattr__(self, "upper_closed", False)

    @classmethod
    def parse(cls, text: str) -> IntervalSpec:
        """Read ``"[a, b)"``-style notation; ``inf``/``-inf`` allowed; ``]a, b]`` accepted."""
        s = text.strip()
        left, right = s[0], s[-1]
        lo, hi = (part.strip() for part in s[1:-1].split(","))
        lower_closed = left == "["
        upper_closed = right == "]"
        if left not in "[(]" or right not in "])[":
            raise ValueError(f"cannot parse interval {text!r}")
        return cls(float(lo), float(hi), lower_closed, upper_closed)

    def is_empty(self) -> bool:
        if self.lower < self.upper:
            return False
        return not (self.lower == self.upper and self.lower_closed and self.upper_closed)

    def contains(self, t):
        t = np.asarray(t, dtype=float)
        above = t >= self.lower if self.lower_closed else t > self.lower
        below = t <= self.upper if self.upper_closed else t < self.upper
        return above & below

    def __str__(self):
        return f"{'[' if self.lower_closed else '('}{self.lower:g}, {self.upper:g}{']' if self.upper_closed else ')'}"

    def to_dict(self) -> dict:
        return asdict(self)


def compactness_verdict(E: IntervalSpec) -> bool:
    """Closed and bounded (or empty): the only sets where every sequence has a
    subsequence with an Abel statistical limit inside the set."""
    if E.is_empty():
        return True
    return math.isfinite(E.lower) and math.isfinite(E.upper) and E.lower_closed and E.upper_closed


@dataclass(frozen=True)
class NoncompactnessWitness:
    sequence: SequenceSpec
    limit: float | None
    escapes_to_infinity: bool


def _approach(point: float, step: float) -> SequenceSpec:
    if step == 1.0:
        return Harmonic(point)
    return Sum(Constant(point), Scaled(step, Harmonic(0.0)))


def noncompactness_witness(E: IntervalSpec) -> NoncompactnessWitness | None:
    """A sequence in E whose Abel statistical limit escapes E, or runs off to infinity."""
    if E.is_empty() or compactness_verdict(E):
        return None
    width = E.upper - E.lower
    step = min(1.0, width / 2)
    if math.isfinite(E.lower) and not E.lower_closed:
        return NoncompactnessWitness(_approach(E.lower, step), E.lower, False)
    if math.isfinite(E.upper) and not E.upper_closed:
        return NoncompactnessWitness(_approach(E.upper, -step), E.upper, False)
    if not math.isfinite(E.upper):
        start = E.lower if math.isfinite(E.lower) else 0.0
        return NoncompactnessWitness(Linear(start, 1.0), None, True)
    return NoncompactnessWitness(Linear(E.upper, -1.0), None, True)


def closure_witness_check(E: IntervalSpec, witness: SequenceSpec, L: float,
                          opts: ConvergenceOptions = DEFAULT_OPTIONS) -> bool:
    """Certify ``L`` is an Abel statistical sequential limit of points of E.

    Every evaluated term must lie in E; no exceptional indices are allowed.
    False means only that this witness does not certify L.
    """
    for start in range(0, opts.horizon, CHUNK):
        if not np.all(E.contains(witness.window(start, min(start + CHUNK, opts.horizon)))):
            return False
    return verify_limit(witness, L, "abel_statistical", opts).convergent


def with_options(opts: ConvergenceOptions, **changes) -> ConvergenceOptions:
    return replace(opts, **changes)
