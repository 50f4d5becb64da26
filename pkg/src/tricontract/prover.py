"""Radii polynomials, the feasible radius set and proof certificates.

``P_k(r) = Y_k + Z_k(r) - r / w_k^s``.  If some ``r > 0`` makes every
``P_k(r)`` negative then ``T(x) = x - A f(x)`` is a contraction on the ball of
radius ``r`` about ``xbar`` and ``f`` has exactly one zero there.

Only indices ``0..m+M`` are checked.  Beyond ``m+M`` each of Y, Z1, D1, D2 is
the index-``(m+M)`` value times ``w_{m+M}^s / w_{m+k}^s``, and so is
``r / w_{m+k}^s``; hence ``P_{m+k}(r) = P_{m+M}(r) w_{m+M}^s / w_{m+k}^s`` and
the sign at ``m+M`` settles the whole tail.
"""

from __future__ import annotations

import datetime as _dt
import math
import platform
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import __version__
from .bounds import BoundSet, ProofParams, compute_bounds
from .errors import EmptyFeasibleSet, ParameterError
from .interval import Interval, as_interval
from .problem import QuadraticProblem, jacobian
from .pseudoinv import FiniteBlock
from .seqspace import norm_s, weight_iv
from .tridiag import check_M, tail_factors, verify_assumptions

SCHEMA = "tricontract.certificate/1"
DEFAULT_RADIUS = 1e-10
DEFAULT_R_MAX = 1.0


@dataclass(frozen=True)
class RadiiPolynomial:
    k: int
    c0: Interval
    c1: Interval
    c2: Interval

    def __call__(self, r) -> Interval:
        r = as_interval(r)
        return self.c0 + (self.c1 + self.c2 * r) * r

    def mid_coeffs(self) -> tuple[float, float, float]:
        return self.c0.mid(), self.c1.mid(), self.c2.mid()


def build_polynomials(bounds: BoundSet) -> list[RadiiPolynomial]:
    n = bounds.m + bounds.M + 1
    polys = []
    for k in range(n):
        c1 = bounds.z1_coef[k] + bounds.d1[k] - 1.0 / weight_iv(k, bounds.s)
        polys.append(RadiiPolynomial(k, bounds.Y[k], c1, bounds.d2[k]))
    return polys


def negativity_set(c0: float, c1: float, c2: float) -> tuple[float, float] | None:
    """Open interval of ``r > 0`` with ``c0 + c1 r + c2 r^2 < 0`` (c0, c2 >= 0)."""
    if c2 == 0.0:
        if c1 >= 0.0:
            return None
        return (max(0.0, c0 / -c1), math.inf)
    disc = c1 * c1 - 4.0 * c2 * c0
    if disc <= 0.0:
        return None
    sq = math.sqrt(disc)
    q = -0.5 * (c1 - sq) if c1 < 0 else -0.5 * (c1 + sq)
    roots = sorted((q / c2, c0 / q if q != 0.0 else 0.0))
    lo, hi = max(0.0, roots[0]), roots[1]
    if hi <= lo:
        return None
    return (lo, hi)


@dataclass(frozen=True)
class FeasibleSet:
    lo: float
    hi: float
    blocking_index: int | None = None

    @property
    def empty(self) -> bool:
        return not (self.lo < self.hi)

    def contains(self, a: float, b: float | None = None) -> bool:
        b = a if b is None else b
        return not self.empty and self.lo <= a and b <= self.hi


def find_I(polys: Sequence[RadiiPolynomial], r_max: float = DEFAULT_R_MAX) -> FeasibleSet:
    """Intersection of the float negativity sets, clipped to ``(0, r_max]``."""
    lo, hi = 0.0, r_max
    for p in polys:
        ik = negativity_set(*p.mid_coeffs())
        if ik is None:
            return FeasibleSet(math.nan, math.nan, p.k)
        lo, hi = max(lo, ik[0]), min(hi, ik[1])
        if lo >= hi:
            return FeasibleSet(math.nan, math.nan, p.k)
    return FeasibleSet(lo, hi)


@dataclass(frozen=True)
class Verification:
    r: float
    verdicts: tuple
    values: tuple

    @property
    def proved(self) -> bool:
        return all(self.verdicts)

    @property
    def worst_index(self) -> int:
        return int(np.argmax([v.hi for v in self.values]))


def verify(polys: Sequence[RadiiPolynomial], r: float) -> Verification:
    """Rigorous evaluation of every ``P_k(r)``; a verdict holds iff the enclosure is below 0."""
    r = float(r)
    if not r >= 0.0:
        raise ValueError("r must be non-negative")
    vals = tuple(p(r) for p in polys)
    return Verification(r=r, verdicts=tuple(v.hi < 0.0 for v in vals), values=vals)


def choose_radius(I: FeasibleSet) -> float:
    """Prefer the customary ``1e-10``; otherwise a power of ten near the geometric middle of I."""
    if I.empty:
        raise ValueError("empty feasible set")
    if I.lo < DEFAULT_RADIUS < I.hi:
        return DEFAULT_RADIUS
    lo = max(I.lo, np.nextafter(0.0, 1.0))
    hi = I.hi if math.isfinite(I.hi) else DEFAULT_R_MAX
    gm = math.sqrt(lo) * math.sqrt(hi)
    r = 10.0 ** math.floor(math.log10(gm))
    if not (I.lo < r < I.hi):
        r = gm
    return r


def rank_indices(polys: Sequence[RadiiPolynomial], r: float, s: float, top: int = 5) -> list[dict]:
    """Indices ordered by weighted float value ``P_k(r) w_k^s``, worst first."""
    rows = []
    for p in polys:
        c0, c1, c2 = p.mid_coeffs()
        w = float(weight_iv(p.k, s).mid())
        rows.append(
            {
                "k": p.k,
                "weighted_value": (c0 + c1 * r + c2 * r * r) * w,
                "Y_weighted": c0 * w,
                "quadratic_weighted": c2 * r * r * w,
            }
        )
    rows.sort(key=lambda d: d["weighted_value"], reverse=True)
    return rows[:top]


@dataclass
class ProofCertificate:
    params: dict
    sigma: float
    xbar: list
    I: tuple | None
    r: float | None
    verdicts: list
    proved: bool
    margins: list = field(default_factory=list)
    worst_index: int | None = None
    norm_s: float | None = None
    problem: dict | None = None
    timestamp: str | None = None
    toolchain: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "schema": SCHEMA,
            "params": self.params,
            "sigma": self.sigma,
            "xbar": list(self.xbar),
            "I": None if self.I is None else [self.I[0], self.I[1]],
            "r": self.r,
            "verdicts": list(self.verdicts),
            "proved": self.proved,
            "margins": list(self.margins),
            "worst_index": self.worst_index,
            "norm_s": self.norm_s,
            "problem": self.problem,
            "timestamp": self.timestamp,
            "toolchain": self.toolchain,
        }

    @classmethod
    def from_json(cls, d: dict) -> ProofCertificate:
        if d.get("schema") != SCHEMA:
            raise ValueError(f"unsupported certificate schema {d.get('schema')!r}")
        I = d.get("I")
        return cls(
            params=d["params"],
            sigma=d["sigma"],
            xbar=list(d["xbar"]),
            I=None if I is None else (I[0], I[1]),
            r=d["r"],
            verdicts=list(d["verdicts"]),
            proved=bool(d["proved"]),
            margins=list(d.get("margins", [])),
            worst_index=d.get("worst_index"),
            norm_s=d.get("norm_s"),
            problem=d.get("problem"),
            timestamp=d.get("timestamp"),
            toolchain=d.get("toolchain", {}),
        )


def toolchain() -> dict:
    return {
        "tricontract": __version__,
        "python": platform.python_version(),
        "numpy": np.__version__,
    }


@dataclass
class ProofRun:
    """Everything computed while proving one point (kept for diagnostics and tests)."""

    params: ProofParams
    factors: object
    block: FiniteBlock
    bounds: BoundSet
    polys: list
    I: FeasibleSet


def build_run(xbar, problem: QuadraticProblem, params: ProofParams, r_max: float = DEFAULT_R_MAX, K_check: int | None = None) -> ProofRun:
    m = params.m
    coeffs = problem.coeffs(m)
    if K_check is None:
        K_check = 2 * (m + params.M) + params.L
    verify_assumptions(coeffs, m, K_check)
    factors = tail_factors(coeffs, m, params.L)
    chk = check_M(factors, m, params.M, params.s, coeffs.s_L)
    if not (chk.ok_A and chk.ok_Y):
        raise ParameterError(
            f"M = {params.M} too small: need M >= {max(chk.required_A, chk.required_Y):.6g}"
        )
    x = [float(v) for v in xbar]
    if len(x) != m:
        raise ValueError(f"xbar must have exactly m = {m} coefficients")
    D = jacobian(problem, x, m, interval=True)
    block = FiniteBlock.build(D, coeffs.beta(m - 1), coeffs.lam(m), factors.w_tilde)
    bounds = compute_bounds(x, problem, block.A_m, block.residual, factors, params)
    polys = build_polynomials(bounds)
    return ProofRun(params, factors, block, bounds, polys, find_I(polys, r_max))


def prove(
    xbar,
    problem: QuadraticProblem,
    params: ProofParams | None = None,
    r: float | None = None,
    r_max: float = DEFAULT_R_MAX,
    timestamp: bool = True,
) -> ProofCertificate:
    """Attempt to prove existence of a zero of ``f`` near ``xbar``.

    Raises :class:`EmptyFeasibleSet` when no radius is feasible and none was
    requested.  With an explicit ``r`` the certificate records the verdicts
    even if they fail.
    """
    params = params or ProofParams()
    run = build_run(xbar, problem, params, r_max)
    I = run.I
    s = params.s
    if r is None:
        if I.empty:
            probe = DEFAULT_RADIUS
            diag = {
                "blocking_index": I.blocking_index,
                "ranking_at_1e-10": rank_indices(run.polys, probe, s),
                "suggestion": "improve xbar or increase m and M",
            }
            raise EmptyFeasibleSet(
                f"no radius makes every radii polynomial negative (index {I.blocking_index} blocks)",
                worst_index=I.blocking_index,
                diagnostics=diag,
            )
        r = choose_radius(I)
    ver = verify(run.polys, r)
    x = [float(v) for v in xbar]
    return ProofCertificate(
        params={"m": params.m, "M": params.M, "L": params.L, "s": params.s, "s_L": run.factors.coeffs.s_L, "sigma": problem.sigma},
        sigma=problem.sigma,
        xbar=x,
        I=None if I.empty else (I.lo, I.hi),
        r=float(r),
        verdicts=list(ver.verdicts),
        proved=ver.proved,
        margins=[v.hi for v in ver.values],
        worst_index=ver.worst_index,
        norm_s=float(norm_s(x, s)),
        problem=problem.to_json(),
        timestamp=_dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds") if timestamp else None,
        toolchain=toolchain(),
    )
