import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from abelstat.convergence import (
    ConvergenceOptions,
    IntervalSpec,
    _evidence,
    classify,
    closure_witness_check,
    compactness_verdict,
    estimate_limit,
    noncompactness_witness,
    normalize_method,
    verify_limit,
    with_options,
)
from abelstat.functions import Polynomial
from abelstat.index_sets import ArithmeticProgression, ExponentialGaps, Finite, Full
from abelstat.reporting import verdict_rows
from abelstat.sequences import (
    CATALOG,
    CATALOG_LIMITS,
    Alternating,
    AlternatingDecay,
    Constant,
    Harmonic,
    Linear,
    Mapped,
    Scaled,
    Spiked,
    Subsequence,
    Sum,
)

SPIKED = Spiked(Constant(0.0), ExponentialGaps(1, 2), Constant(1.0))
CONVERGENT = [n for n, lim in CATALOG_LIMITS.items() if lim is not None and n.split("_")[0] != "spiked"]


def test_classify_examples():
    v = classify(Harmonic(0.0), "abel_statistical")
    assert v.convergent and abs(v.candidate_limit) <= 1e-3
    v = classify(SPIKED, "abel_statistical")
    assert v.convergent and abs(v.candidate_limit) <= 1e-3
    assert classify(SPIKED, "ordinary").divergent
    v = classify(Alternating(0.0, 1.0), "abel_statistical")
    assert v.divergent and v.candidate_limit is None
    assert all(t.status == "refuted" for t in v.trials)


def test_estimate_limit_examples():
    assert abs(estimate_limit(Harmonic(5.0)) - 5.0) <= 1e-3
    spiky = Spiked(Constant(2.0), ExponentialGaps(1, 2), Constant(100.0))
    # trimmed median over the tail half-window, computed directly
    tail = np.sort(spiky.window(2**19, 2**20))
    cut = len(tail) // 10
    assert np.median(tail[cut:len(tail) - cut]) == 2.0
    assert estimate_limit(spiky) == pytest.approx(2.0, abs=1e-3)
    est = estimate_limit(Alternating(0.0, 1.0))
    if est is not None:
        assert not verify_limit(Alternating(0.0, 1.0), est).convergent


def test_verify_limit_examples():
    assert verify_limit(Harmonic(0.0), 0.0).convergent
    v = verify_limit(Harmonic(0.0), 1.0)
    assert v.divergent
    assert all(e.status == "positive" for e in v.evidence if e.eps <= 0.5)
    for method in ("ordinary", "statistical", "lacunary_statistical", "abel_statistical"):
        assert verify_limit(Constant(-4.25), -4.25, method).convergent


def test_other_density_modes(fast):
    for method in ("statistical", "lacunary_statistical"):
        assert classify(SPIKED, method, opts=fast).convergent
        assert classify(Alternating(0.0, 1.0), method, opts=fast).divergent


def test_overflow_counts_as_exceedance(fast):
    blowup = Mapped(Polynomial((0.0,) * 400 + (1.0,)), Linear(0.0, 1.0))
    v = classify(blowup, "abel_statistical", opts=fast)
    assert v.divergent
    sparse_blowup = Spiked(Constant(1.0), ExponentialGaps(1, 2), blowup)
    assert classify(sparse_blowup, "abel_statistical", opts=fast).convergent
    assert classify(sparse_blowup, "ordinary", opts=fast).divergent


def test_inconclusive_reports_trace():
    # exceedance set {k < 800}: its Abel partials are still falling through
    # (0.01, 0.1) at the end of a short grid, so neither zero nor positive
    slow = Sum(Constant(1.0), Scaled(80.0, Harmonic(0.0)))
    opts = ConvergenceOptions(eps_grid=(0.1,), horizon=2**14, x_grid=(4, 14))
    v = verify_limit(slow, 1.0, opts=opts)
    assert v.classification == "inconclusive"
    failing = [e for e in v.evidence if e.status != "zero"]
    assert failing and failing[0].estimate is not None and len(failing[0].estimate.trace) == 11


def test_aliases_and_errors():
    assert normalize_method("abel-stat") == "abel_statistical"
    assert normalize_method("c") == "ordinary"
    with pytest.raises(ValueError):
        normalize_method("borel")
    with pytest.raises(ValueError):
        ConvergenceOptions(horizon=1000)
    with pytest.raises(ValueError):
        ConvergenceOptions(eps_grid=())
    with pytest.raises(ValueError):
        classify(Constant(0.0), "lacunary", opts=ConvergenceOptions(theta=(0, 1, 2, 3, 4)))


def test_verdict_serialisation(fast):
    v = classify(SPIKED, "abel_statistical", opts=fast)
    d = v.to_dict()
    assert json.loads(json.dumps(d)) == d
    assert d["horizon"] == fast.horizon
    assert len(verdict_rows(v)) == len(fast.eps_grid) * 11
    o = classify(SPIKED, "ordinary", opts=fast).to_dict()
    assert o["evidence"][0]["tail_sup"] == 1.0


# compactness and closure --------------------------------------------------

INTERVALS = [
    ("[-1, 1]", True), ("(-1, 1]", False), ("[-1, 1)", False), ("(-1, 1)", False),
    ("[0, 0]", True), ("[2, 7.5]", True), ("(-inf, 0]", False), ("[0, inf)", False),
    ("(-inf, inf)", False), ("(0, 0)", True), ("[3, 3)", True), ("[-10, 1e6]", True),
]


@pytest.mark.parametrize("text,expected", INTERVALS)
def test_compactness_table(text, expected):
    E = IntervalSpec.parse(text)
    closed_bounded = E.is_empty() or (
        math.isfinite(E.lower) and math.isfinite(E.upper) and E.lower_closed and E.upper_closed
    )
    assert compactness_verdict(E) == expected == closed_bounded


def test_noncompactness_witness_half_open():
    w = noncompactness_witness(IntervalSpec.parse("(-1, 1]"))
    assert w.limit == -1 and not w.escapes_to_infinity
    assert w.sequence.window(0, 3).tolist() == pytest.approx([0.0, -0.5, -2 / 3])
    assert verify_limit(w.sequence, -1.0).convergent


def test_noncompactness_witness_unbounded(fast):
    w = noncompactness_witness(IntervalSpec.parse("[0, inf)"))
    assert w.escapes_to_infinity and w.limit is None
    assert w.sequence.window(0, 4).tolist() == [0, 1, 2, 3]
    assert noncompactness_witness(IntervalSpec.parse("[0, 1]")) is None


@pytest.mark.parametrize("text", ["(0, 1)", "[0, 1)", "(-5, 2]", "(-inf, 3)", "(-inf, -1]", "(2, 2.001]"])
def test_noncompactness_witnesses_stay_inside(text, fast):
    E = IntervalSpec.parse(text)
    w = noncompactness_witness(E)
    assert np.all(E.contains(w.sequence.window(0, fast.horizon)))
    if w.limit is not None:
        assert not E.contains(w.limit)
        assert verify_limit(w.sequence, w.limit, opts=fast).convergent


def test_closure_witness_examples():
    assert closure_witness_check(IntervalSpec.parse("(0, 1]"), Harmonic(0.0), 0.0)
    assert closure_witness_check(IntervalSpec.parse("[0, 1]"), Constant(0.5), 0.5)
    assert not closure_witness_check(IntervalSpec.parse("[0, 1]"), Constant(2.0), 2.0)


def test_interval_parsing():
    E = IntervalSpec.parse("]0, 1]")
    assert not E.lower_closed and E.upper_closed
    assert IntervalSpec.parse("[-inf, 0]").lower_closed is False
    with pytest.raises(ValueError):
        IntervalSpec(2, 1)
    with pytest.raises(ValueError):
        IntervalSpec.parse("{0, 1}")


# method properties --------------------------------------------------------

@pytest.mark.parametrize("name", CONVERGENT)
def test_regularity(name, fast):
    seq = CATALOG[name]
    o = classify(seq, "ordinary", opts=fast)
    assert o.convergent
    a = classify(seq, "abel_statistical", opts=fast)
    assert a.convergent and abs(a.candidate_limit - o.candidate_limit) <= 1e-3


@settings(max_examples=25, deadline=None)
@given(st.sampled_from(sorted(CATALOG)), st.floats(-3, 3), st.floats(0.04, 3))
def test_uniqueness(name, L1, gap):
    fast = ConvergenceOptions(eps_grid=(0.1, 0.02), horizon=2**14, x_grid=(4, 14))
    seq = CATALOG[name]
    both = verify_limit(seq, L1, opts=fast).convergent and verify_limit(seq, L1 + gap, opts=fast).convergent
    assert not both


limited = [n for n, lim in CATALOG_LIMITS.items() if lim is not None]
# scaled deviations such as 6/(k+1) need a longer horizon to resolve eps = 0.02
MID = ConvergenceOptions(eps_grid=(0.1, 0.02), horizon=2**16, x_grid=(4, 16))


@settings(max_examples=15, deadline=None)
@given(st.sampled_from(limited), st.sampled_from(limited))
def test_linearity(a, b):
    fast = MID
    L1, L2 = CATALOG_LIMITS[a], CATALOG_LIMITS[b]
    v = classify(Sum(CATALOG[a], CATALOG[b]), opts=fast)
    assert v.convergent and abs(v.candidate_limit - (L1 + L2)) <= 1e-3


@settings(max_examples=15, deadline=None)
@given(st.sampled_from(limited), st.sampled_from([0.0, -1.0, 0.5, 3.0]))
def test_scalar_closure(a, c):
    fast = MID
    v = classify(Scaled(c, CATALOG[a]), opts=fast)
    assert v.convergent and abs(v.candidate_limit - c * CATALOG_LIMITS[a]) <= 1e-3


@pytest.mark.parametrize("selector", [Full(), ArithmeticProgression(3, 7), ArithmeticProgression(0, 2) & ~Finite((0, 2))])
@pytest.mark.parametrize("name", ["harmonic_5", "alternating_decay_1", "neg_harmonic_3"])
def test_subsequence_regularity(name, selector, fast):
    v = classify(Subsequence(CATALOG[name], selector), opts=fast)
    assert v.convergent and abs(v.candidate_limit - CATALOG_LIMITS[name]) <= 1e-3


@pytest.mark.parametrize("method", ["abel_statistical", "statistical", "lacunary_statistical"])
@pytest.mark.parametrize("seq", [Harmonic(0.0), SPIKED, Alternating(0.1, 0.3), AlternatingDecay(0.0)])
def test_exceedance_monotone_in_eps(seq, method):
    opts = ConvergenceOptions(eps_grid=(0.5, 0.2, 0.1, 0.05, 0.01), horizon=2**14, x_grid=(4, 14))
    ev = _evidence(seq, 0.0, method, opts)
    assert [e.eps for e in ev] == sorted(opts.eps_grid, reverse=True)
    for big, small in zip(ev, ev[1:]):
        for a, b in zip(big.estimate.samples, small.estimate.samples):
            assert a.value <= b.value + 2 * opts.tail_tol


def test_with_options():
    opts = with_options(ConvergenceOptions(), horizon=2**12)
    assert opts.horizon == 2**12 and opts.log_horizon == 12
    assert opts.scheme().k[-1] == 2**12
