from __future__ import annotations

import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from tricontract.bounds import ProofParams  # noqa: E402
from tricontract.continuation import BranchPoint, trace_both  # noqa: E402
from tricontract.problem import example4, f_proj, newton_solve  # noqa: E402
from tricontract.prover import build_run  # noqa: E402

PARAMS = ProofParams()


def _start(sigma: float = 0.0, m: int = 20) -> BranchPoint:
    p = example4(sigma)
    x = newton_solve(p, p.initial_guess(m), m)
    return BranchPoint(sigma, tuple(float(v) for v in x), None, float(np.max(np.abs(f_proj(p, x, m)))))


@pytest.fixture(scope="session")
def params():
    return PARAMS


@pytest.fixture(scope="session")
def start0():
    return _start(0.0)


@pytest.fixture(scope="session")
def branch21(start0):
    """Ten continuation steps each way from sigma = 0 (21 points)."""
    return trace_both(example4(0.0), start0, 10, 1e-3)


@pytest.fixture(scope="session")
def run0(start0):
    return build_run(list(start0.x), example4(0.0), PARAMS)


@pytest.fixture(scope="session")
def branch_runs(branch21):
    return [build_run(list(p.x), example4(p.sigma), PARAMS) for p in branch21]


@pytest.fixture(scope="session")
def run_far():
    """A point with sizeable nonlinearity so the quadratic bounds matter."""
    pt = _start(-0.5)
    return pt, build_run(list(pt.x), example4(-0.5), PARAMS)
