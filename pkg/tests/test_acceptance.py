"""Acceptance suite: one PASS/FAIL line per criterion, printed even under capture."""

from __future__ import annotations

import time

import pytest
from oracles import (
    alpha_domination_violations,
    fixed_point_checks,
    fuzz_interval_ops,
    jacobian_fd_worst,
    lu_defect,
    tail_oracle,
)

from tricontract.continuation import trace_both
from tricontract.problem import EXAMPLE4_G, example4
from tricontract.prover import prove, verify

R = 1e-10
LO, HI = 4e-11, 1e-4


@pytest.fixture
def report(capsys):
    def emit(n: int, ok: bool, detail: str):
        with capsys.disabled():
            print(f"\n{'PASS' if ok else 'FAIL'} criterion {n}: {detail}")
        assert ok, detail

    return emit


def test_criterion_1_reproduction(report, params, start0, branch21):
    t0 = time.perf_counter()
    pts = [start0] + list(branch21)
    certs = [prove(list(p.x), example4(p.sigma), params, r=R, timestamp=False) for p in pts]
    dt = time.perf_counter() - t0
    sig = [p.sigma for p in branch21]
    ok = (
        len(branch21) == 21
        and min(sig) < 0 < max(sig)
        and all(c.proved and c.r == R for c in certs)
        and dt <= 30.0
    )
    failed = sum(not c.proved for c in certs)
    report(1, ok, f"{len(certs)} points proved at r=1e-10 ({failed} failed), sigma in [{min(sig):.4f}, {max(sig):.4f}], {dt:.1f} s")


def test_criterion_2_feasibility_interval(report, branch_runs):
    contained = [run.I.contains(LO, HI) for run in branch_runs]
    ends = [verify(run.polys, LO).proved and verify(run.polys, HI).proved for run in branch_runs]
    lo = max(run.I.lo for run in branch_runs)
    hi = min(run.I.hi for run in branch_runs)
    report(2, all(contained) and all(ends), f"I over 21 points spans at least [{lo:.3g}, {hi:.3g}], endpoints verified on {sum(ends)}/21")


@pytest.mark.slow
def test_criterion_3_full_branch(report, params, start0):
    t0 = time.perf_counter()
    pts = trace_both(example4(0.0), start0, 675, 1e-3)
    proved = sum(prove(list(p.x), example4(p.sigma), params, timestamp=False).proved for p in pts)
    dt = time.perf_counter() - t0
    ok = len(pts) == 1351 and proved == len(pts) and dt <= 1800.0
    report(3, ok, f"{proved}/{len(pts)} branch points proved in {dt:.0f} s")


def test_criterion_4_tail_oracle(report, run0):
    t0 = time.perf_counter()
    stats = tail_oracle(run0.factors, run0.params.M, run0.params.s, n_rhs=100, seed=0)
    dt = time.perf_counter() - t0
    bad = sum(v for v, _ in stats.values())
    worst = max(r for _, r in stats.values())
    report(4, bad == 0 and dt <= 60.0, f"{bad} violations over {len(stats)} bounds x 100 rhs, max ratio {worst:.3f}, {dt:.1f} s")


def test_criterion_5_lu_identity(report, run0):
    d = lu_defect(run0.factors.coeffs, m=20, N=300)
    report(5, d <= 1e-9, f"relative LU defect {d:.2e} at N=300")


def test_criterion_6_alpha(report):
    bad = alpha_domination_violations(200, seed=3)
    report(6, bad == 0, f"{bad} exact domination violations over 200 pairs")


def test_criterion_7_jacobian(report):
    worst = jacobian_fd_worst(50, seed=0)
    report(7, worst <= 1e-6, f"worst relative gap {worst:.2e} over 50 instances")


def test_criterion_8_fuzz(report):
    bad, counts = fuzz_interval_ops(100_000, seed=0)
    report(8, bad == 0, f"{bad} violations over {sum(counts.values())} operations")


def test_criterion_9_fixed_point(report, branch21, branch_runs):
    y_bad = z_bad = 0
    y_ratio = z_ratio = 0.0
    for p, run in zip(branch21, branch_runs):
        out = fixed_point_checks(run, list(p.x), p.sigma, EXAMPLE4_G, radii=(1e-6, 1e-10), trials=2, seed=9)
        y_bad += out["y_bad"]
        z_bad += out["z_bad"]
        y_ratio = max(y_ratio, out["y_ratio"])
        z_ratio = max(z_ratio, out["z_ratio"])
    ok = y_bad == 0 and z_bad == 0
    report(9, ok, f"Y violations {y_bad}, Z violations {z_bad} over 21 points (max ratios {y_ratio:.2f}, {z_ratio:.2f})")
