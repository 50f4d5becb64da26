from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from oracles import alpha_domination_violations, brute_convolve

from tricontract.errors import UnsupportedRegime
from tricontract.interval import Interval
from tricontract.seqspace import (
    SeqVector,
    alpha_bound,
    alpha_float,
    convolve,
    norm_s,
    weight,
    weight_iv,
)


def test_weights():
    assert weight(0, 2) == 1.0
    assert weight(1, 2) == 1.0
    assert weight(3, 2) == 9.0
    assert weight_iv(3, 2.0).contains(9.0)
    assert weight_iv(5, 2.5).contains(5**2.5)
    with pytest.raises(ValueError):
        weight(-1, 2)


def test_norm_examples():
    assert norm_s([], 2) == 0.0
    assert norm_s([0.0, 0.0], 2) == 0.0
    assert norm_s([0.0, 0.5], 2) == 0.5
    assert norm_s([1.0, 1.0], 2) == 1.0
    assert norm_s([0.0, 0.0, 0.25], 2) == 1.0
    iv = norm_s([Interval(0.0), Interval(0.5)], 2)
    assert iv.contains(0.5)
    assert SeqVector((0.0, 0.5)).norm() == 0.5


def test_convolution_examples():
    assert convolve([0.0, 0.0], [1.0, 2.0]) == [0.0, 0.0, 0.0]
    c = convolve([0.0, 0.5], [0.0, 0.5])
    assert c[0] == 0.5
    assert c[1] == 0.0
    assert c[2] == 0.25


floats = st.floats(-10, 10, allow_nan=False)


@settings(max_examples=200, deadline=None)
@given(st.lists(floats, min_size=1, max_size=10), st.lists(floats, min_size=1, max_size=10))
def test_convolution_matches_brute_force(x, y):
    got = convolve(x, y)
    ref = brute_convolve([Fraction(v) for v in x], [Fraction(v) for v in y], exact=True)
    assert len(got) == len(ref)
    scale = sum(abs(Fraction(a)) for a in x) * sum(abs(Fraction(b)) for b in y)
    for g, r in zip(got, ref):
        # 4 ulps relative to the magnitude of the summed terms
        assert abs(Fraction(g) - r) <= 4 * Fraction(2.0**-52) * (scale + 1e-300)


@settings(max_examples=100, deadline=None)
@given(st.lists(floats, min_size=1, max_size=8), st.lists(floats, min_size=1, max_size=8), floats)
def test_convolution_commutative_bilinear(x, y, c):
    assert convolve(x, y) == pytest.approx(convolve(y, x), rel=1e-14, abs=1e-12)
    xs = [Fraction(c) * Fraction(v) for v in x]
    lhs = brute_convolve(xs, [Fraction(v) for v in y], exact=True)
    rhs = brute_convolve([Fraction(v) for v in x], [Fraction(v) for v in y], exact=True)
    assert lhs == [Fraction(c) * v for v in rhs]


def test_convolution_over_intervals_contains_float():
    x = [0.1, 0.2, -0.3]
    y = [1.0, -0.5]
    iv = convolve([Interval(v) for v in x], [Interval(v) for v in y])
    fl = convolve(x, y)
    assert all(i.contains(f) for i, f in zip(iv, fl))


def test_alpha_examples():
    assert alpha_bound(0, 2.0, 6, 1).contains(5.0)
    # empty middle sum at k = 1
    for L in (1, 10, 100):
        base = 2 + 2 * sum(Fraction(1, l * l) for l in range(1, L + 1)) + Fraction(2, L)
        assert alpha_bound(1, 2.0, 6, L).contains(base)
    # k = 2 adds the single term w_2 / (w_1 w_1) = 4
    base = 2 + 2 * 1 + 2 + 4
    assert alpha_bound(2, 2.0, 6, 1).contains(base)


def test_alpha_regime():
    with pytest.raises(UnsupportedRegime):
        alpha_bound(0, 1.5, 6, 10)
    with pytest.raises(UnsupportedRegime):
        alpha_bound(0, 2.0, 5, 10)


def test_alpha_constant_beyond_n():
    assert alpha_bound(6, 2.0, 6, 10) == alpha_bound(13, 2.0, 6, 10)
    assert alpha_float(7, 2.0, 6, 100) == alpha_float(6, 2.0, 6, 100)


def test_alpha_non_increasing_in_L():
    for k in (0, 1, 3, 5, 6, 20):
        vals = [alpha_bound(k, 2.0, 6, L).hi for L in (1, 2, 5, 10, 50, 100, 200)]
        assert all(a >= b for a, b in zip(vals, vals[1:]))


def test_alpha_dominates_exact_convolutions():
    assert alpha_domination_violations(200, seed=11) == 0
