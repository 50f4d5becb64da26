from __future__ import annotations

import math
from dataclasses import replace
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from oracles import TailSolver, lu_defect, tail_oracle

from tricontract.errors import AssumptionError, DomainError, ParameterError
from tricontract.interval import Interval
from tricontract.problem import example4
from tricontract.tridiag import (
    bound_uniform,
    bound_w,
    bound_x_from_y,
    check_M,
    chi,
    decay_constants,
    phi_monotone,
    pivot_ratios,
    tail_factors,
    verify_assumptions,
    w_tilde_error,
)

M_, S, S_L = 20, 2.0, 2.0


@pytest.fixture(scope="module")
def coeffs():
    return example4().coeffs(20)


@pytest.fixture(scope="module")
def factors(coeffs):
    return tail_factors(coeffs, 20, 100)


def test_assumptions_pass_at_m20(coeffs):
    rep = verify_assumptions(coeffs, 20, 2 * (20 + 20) + 100)
    assert rep.passed
    assert coeffs.delta == Fraction(441, 1602)


def test_assumption_C1_too_large_fails_at_m(coeffs):
    with pytest.raises(AssumptionError) as ei:
        verify_assumptions(replace(coeffs, C1=Fraction(10)), 20, 100)
    assert ei.value.k == 20
    assert "C1" in ei.value.inequality


def test_assumption_delta_out_of_range(coeffs):
    with pytest.raises(AssumptionError):
        verify_assumptions(replace(coeffs, delta=Fraction(3, 5)), 20, 100)
    with pytest.raises(DomainError):
        decay_constants(0.5)


def test_assumption_ratio_violation_reports_index(coeffs):
    # a delta just below beta_m/mu_m must fail at k = m exactly
    with pytest.raises(AssumptionError) as ei:
        verify_assumptions(replace(coeffs, delta=Fraction(441, 1602) - Fraction(1, 10**9)), 20, 100)
    assert ei.value.k == 20


def test_m_below_k0(coeffs):
    with pytest.raises(ParameterError):
        verify_assumptions(coeffs, 19, 100)


def test_decay_constants_quarter():
    g, t, e = decay_constants(Fraction(1, 4))
    with mpmath.workdps(40):
        gm = mpmath.mpf(1) / 2 + mpmath.sqrt(3) / 4
        tm = 2 - mpmath.sqrt(3)
        em = 2 / mpmath.sqrt(3)
        for iv, ref in ((g, gm), (t, tm), (e, em)):
            assert mpmath.mpf(iv.lo) <= ref <= mpmath.mpf(iv.hi)
    assert abs(g.mid() - 0.9330127) < 1e-7
    assert abs(t.mid() - 0.2679492) < 1e-7
    assert abs(e.mid() - 1.1547005) < 1e-7


def test_decay_constants_small_delta():
    g, t, e = decay_constants(1e-8)
    assert abs(g.mid() - 1) < 1e-6 and abs(t.mid()) < 1e-6 and abs(e.mid() - 1) < 1e-6


def test_example_constants(factors):
    assert abs(factors.theta.mid() - 0.30007) < 1e-5
    assert factors.rho[0].contains(801.0)
    rho2 = Fraction(883) - Fraction(200) * Fraction(441, 2) / 801
    assert factors.rho[1].contains(rho2)
    assert abs(float(rho2) - 827.94) < 0.01


def test_pivot_ratios_u_bracket(coeffs, factors):
    rho = pivot_ratios(coeffs, 20, 100)
    for n, r in enumerate(rho, start=1):
        u = r / coeffs.mu(20 + n - 1)
        assert u.lo >= factors.gamma.hi and u.hi <= 1.0 + 1e-15


def test_lu_identity(coeffs):
    assert lu_defect(coeffs) <= 1e-9


def test_w_tilde_matches_truncated_solve(coeffs, factors):
    with mpmath.workdps(40):
        w0 = TailSolver(20, 400).solve([1])[0]
        lo, hi = factors.w_tilde - factors.w_tilde_err, factors.w_tilde + factors.w_tilde_err
        assert mpmath.mpf(lo.lo) - 1e-30 <= w0 <= mpmath.mpf(hi.hi) + 1e-30
    assert abs(factors.w_tilde.mid() - 0.00133783) < 1e-8


def test_w_tilde_cauchy(coeffs):
    prev = tail_factors(coeffs, 20, 20)
    for L in range(21, 40):
        cur = tail_factors(coeffs, 20, L)
        diff = abs(cur.w_tilde - prev.w_tilde)
        assert diff.lo <= prev.w_tilde_err.hi
        prev = cur


def test_w_tilde_error_example(factors):
    f = replace(factors, theta=Interval(0.3), L=100)
    err = w_tilde_error(f, Interval(801.0))
    ref = 0.3**200 / (801 * 0.91)
    assert err.contains(ref) or abs(err.mid() / ref - 1) < 1e-12
    assert 3.5e-108 < err.hi < 3.7e-108
    err2 = w_tilde_error(replace(f, L=200), Interval(801.0))
    assert abs(err2.mid() / (err.mid() * 0.3**200) - 1) < 1e-12
    tiny = w_tilde_error(replace(f, theta=Interval(1e-10)), Interval(801.0))
    assert tiny.hi < 1e-300
    with pytest.raises(ParameterError):
        w_tilde_error(replace(f, L=5), Interval(801.0))


def test_check_M_example(factors):
    chk = check_M(factors, 20, 20, S, S_L)
    assert chk.ok_A and chk.ok_Y
    assert chk.required_Y == 18.0
    assert not check_M(factors, 20, 1, S, S_L).ok_Y
    assert not check_M(factors, 20, 19, S, S_L).ok_A
    with pytest.raises(ParameterError):
        check_M(factors, 20, 0, S, S_L)


def _chi_mp(theta, m, M, p):
    with mpmath.workdps(40):
        th = mpmath.mpf(theta)
        t1 = th ** (mpmath.mpf(M) / 2) * (mpmath.mpf(M) / 2) * ((mpmath.mpf(m + M)) / m) ** p
        t2 = th ** mpmath.sqrt(M) * (mpmath.mpf(M) / 2) * mpmath.mpf(2) ** p
        t3 = (mpmath.mpf(m + M) / (m + M - mpmath.sqrt(M) - 1)) ** p / (1 - th)
        return t1, t2, t3


def test_chi_terms(factors):
    f = replace(factors, theta=Interval(0.3))
    t1, t2, t3 = _chi_mp(0.3, 20, 20, 4)
    assert abs(float(t1) - 0.3**10 * 10 * 16) < 1e-18
    assert abs(float(t1) - 9.4e-4) < 1e-5
    c = chi(f, 20, 20, S, S_L)
    assert mpmath.mpf(c.lo) <= t1 + t2 + t3 <= mpmath.mpf(c.hi)


def test_chi_decreasing_in_M(factors):
    for M in (20, 30, 50):
        assert chi(factors, 20, M + 10, S, S_L).hi < chi(factors, 20, M, S, S_L).lo


def test_chi_small_theta(factors):
    f = replace(factors, theta=Interval(1e-12))
    lim = (40 / (40 - math.sqrt(20) - 1)) ** 4
    assert abs(chi(f, 20, 20, S, S_L).mid() / lim - 1) < 1e-9


def test_chi_precondition(factors):
    with pytest.raises(ParameterError):
        chi(factors, 20, 5, S, S_L)


def test_phi_monotone(factors):
    th = factors.theta.mid()
    ks = np.linspace(20, 200, 400)
    vals = np.array([phi_monotone(th, 20, S, S_L, k) for k in ks])
    assert np.all(np.diff(vals, axis=0) <= 0)


def test_bound_w_is_e1_case(factors):
    for k in (0, 1, 5, 30):
        a = bound_x_from_y(factors, [1.0], k)
        b = bound_w(factors, k)
        assert abs(a.mid() / b.mid() - 1) < 1e-13


def test_bound_linear_scaling(factors):
    y = [0.3, 0.0, -1.7, 2.5]
    for k in (0, 2, 10):
        b1 = bound_x_from_y(factors, [abs(v) for v in y], k)
        b4 = bound_x_from_y(factors, [4 * abs(v) for v in y], k)
        assert (b4.lo, b4.hi) == (4 * b1.lo, 4 * b1.hi)
        b3 = bound_x_from_y(factors, [3 * abs(v) for v in y], k)
        assert b3.hi == pytest.approx(3 * b1.hi, rel=1e-13)
        u1 = bound_uniform(factors, 20, M_, S, S_L, 1.0, k)
        u4 = bound_uniform(factors, 20, M_, S, S_L, 4.0, k)
        assert (u4.lo, u4.hi) == (4 * u1.lo, 4 * u1.hi)


def test_bound_uniform_k0(factors):
    th, eta = factors.theta.mid(), factors.eta.mid()
    ref = eta / 2 * (1 + th / (1 - th)) / 20**4
    assert bound_uniform(factors, 20, M_, S, S_L, 1.0, 0).mid() == pytest.approx(ref, rel=1e-12)


def test_bound_uniform_branch_boundary(factors):
    th = factors.theta.mid()
    p = 4

    def S_(k):
        return sum(th ** (k - l) * ((20 + k) / (20 + l)) ** p for l in range(k + 1))

    c = chi(factors, 20, M_, S, S_L)
    assert c.lo >= S_(M_) and c.lo >= S_(M_ - 1)
    # the explicit branch continues smoothly into the chi branch
    below = bound_uniform(factors, 20, M_, S, S_L, 1.0, M_ - 1).hi * (20 + M_ - 1) ** p
    at = bound_uniform(factors, 20, M_, S, S_L, 1.0, M_).hi * (20 + M_) ** p
    assert at >= below


def test_bound_uniform_needs_MA(factors):
    with pytest.raises(ParameterError):
        bound_uniform(factors, 20, 5, S, S_L, 1.0, 0)


def test_tail_bounds_dominate_truncated_solves(factors):
    stats = tail_oracle(factors, M_, S, n_rhs=16, seed=5, K=120)
    for name, (bad, ratio) in stats.items():
        assert bad == 0, name
        assert 0.0 < ratio <= 1.0
