"""Rigorous Y and Z bounds for the Newton-like operator ``T(x) = x - A f(x)``.

Every bound is a vector over indices ``0..m+M``; entries beyond ``m+M`` follow
``v_{m+k} = v_{m+M} w_{m+M}^s / w_{m+k}^s``.  Finite indices are ``0..m-1``;
tail offset ``k`` refers to absolute index ``m+k`` (see :class:`IndexMap`).
Z is stored as coefficients of ``r`` and ``r^2``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ParameterError
from .interval import Interval, as_interval
from .problem import QuadraticProblem, f_full
from .seqspace import alpha_bound, norm_s, weight_iv
from .tridiag import TailFactors, bound_uniform, check_M, chi

ZERO = Interval(0.0)


@dataclass(frozen=True)
class ProofParams:
    m: int = 20
    M: int = 20
    L: int = 100
    s: float = 2.0

    def __post_init__(self):
        if self.m < 6:
            raise ParameterError(f"m = {self.m} must be >= 6")
        if self.M < 1 or self.L < 1:
            raise ParameterError("M and L must be >= 1")
        if self.s < 2:
            raise ParameterError(f"s = {self.s} must be >= 2")


@dataclass(frozen=True)
class IndexMap:
    """Translate between absolute indices and the finite/tail split."""

    m: int
    M: int

    @property
    def size(self) -> int:
        return self.m + self.M + 1

    def absolute(self, tail_k: int) -> int:
        return self.m + tail_k

    def tail_offset(self, i: int) -> int:
        return i - self.m

    def is_finite(self, i: int) -> bool:
        return 0 <= i < self.m


@dataclass(frozen=True)
class BoundSet:
    m: int
    M: int
    s: float
    s_L: float
    Y: tuple
    z1_coef: tuple
    d1: tuple
    d2: tuple

    def tail(self, vec: Sequence, i: int) -> Interval:
        """Entry ``i`` of a stored bound vector, applying the decay rule past ``m+M``."""
        last = self.m + self.M
        if i <= last:
            return vec[i]
        return vec[last] * weight_iv(last, self.s) / weight_iv(i, self.s)


def _abs_dot(row: Sequence, vec: Sequence) -> Interval:
    acc = ZERO
    for a, v in zip(row, vec):
        if a != 0.0:
            acc = acc + abs(a) * v
    return acc


def _dot(row: Sequence, vec: Sequence) -> Interval:
    acc = ZERO
    for a, v in zip(row, vec):
        if a != 0.0:
            acc = acc + float(a) * v
    return acc


def f_residual(xbar: Sequence, problem: QuadraticProblem, m: int) -> list[Interval]:
    """Interval enclosures of ``f_k(xbar)`` (signed) for ``0 <= k <= 2m-2``.

    Components past ``2m-2`` vanish because ``xbar`` lives on ``0..m-1``;
    forcing data reaching further is rejected.
    """
    if len(xbar) > m:
        raise ValueError("xbar must be supported on 0..m-1")
    x = list(xbar) + [0.0] * (m - len(xbar))
    full = f_full(problem, x, interval=True)
    for k in range(2 * m - 1, len(full)):
        if not (full[k].lo == 0.0 and full[k].hi == 0.0):
            raise ParameterError("forcing data extends beyond index 2m-2; increase m")
    out = full[: 2 * m - 1]
    out += [ZERO] * (2 * m - 1 - len(out))
    return out


def _require_MY(factors: TailFactors, params: ProofParams) -> None:
    chk = check_M(factors, params.m, params.M, params.s, factors.coeffs.s_L)
    if not chk.ok_Y:
        raise ParameterError(f"M = {params.M} below the Y-tail threshold {chk.required_Y:.6g}")


def _require_MA(factors: TailFactors, params: ProofParams) -> None:
    chk = check_M(factors, params.m, params.M, params.s, factors.coeffs.s_L)
    if not chk.ok_A:
        raise ParameterError(f"M = {params.M} below the uniform-tail threshold {chk.required_A:.6g}")


def compute_Y(fres: Sequence, A_m: np.ndarray, factors: TailFactors, params: ProofParams) -> list[Interval]:
    """Bound on ``|T(xbar) - xbar|_k = |(A f(xbar))_k|`` for ``k <= m+M``."""
    _require_MY(factors, params)
    m, M = params.m, params.M
    co = factors.coeffs
    eta = factors.eta
    fF = [as_interval(v) for v in fres[:m]]
    q = [abs(as_interval(fres[m + l])) / abs(co.mu(m + l)) for l in range(m - 1)]

    S = ZERO
    for l in range(m - 1):
        S = S + factors.theta_pow(l) * q[l]
    S = eta * S
    beta_abs = abs(co.beta(m - 1))

    Af = [_dot(A_m[i], fF) for i in range(m)]
    Y = [abs(Af[i]) + beta_abs * S * abs(float(A_m[i, m - 1])) for i in range(m)]

    head = abs(Af[m - 1]) + beta_abs * abs(float(A_m[m - 1, m - 1])) * S
    lam_ratio = abs(co.lam(m)) / abs(co.mu(m))
    # sum_{l} q_l / theta^l for the far-tail branch
    far = ZERO
    for l in range(m - 1):
        far = far + q[l] / factors.theta_pow(l)
    for k in range(M + 1):
        first = head * eta * factors.theta_pow(k) * lam_ratio
        if k <= m - 3:
            acc = ZERO
            for l in range(k + 1):
                acc = acc + factors.theta_pow(k - l) * q[l]
            for l in range(k + 1, m - 1):
                acc = acc + factors.theta_pow(l - k) * q[l]
            second = eta * acc
        else:
            second = eta * factors.theta_pow(k) * far
        Y.append(first + second)
    return Y


def weights_F(m: int, s: float) -> list[Interval]:
    """``W_F^s = (1/w_j^s)_{j<m}``."""
    return [1.0 / weight_iv(j, s) for j in range(m)]


def compute_Z1(resid: np.ndarray, A_m: np.ndarray, factors: TailFactors, params: ProofParams) -> list[Interval]:
    """Coefficient of ``r`` in the bound on ``|(I - A A^dagger) z|`` over ``||z||_s <= r``."""
    _require_MY(factors, params)
    m, M, s = params.m, params.M, params.s
    co = factors.coeffs
    W = weights_F(m, s)
    E = (
        abs(co.beta(m - 1))
        * abs(co.lam(m))
        * factors.w_tilde_err
        / weight_iv(m - 1, s)
    )
    out = []
    for i in range(m):
        acc = ZERO
        for j in range(m):
            acc = acc + resid[i, j] * W[j]
        out.append(acc + E * abs(float(A_m[i, m - 1])))
    # row m-1 of the finite part is exactly the tail prefactor
    head = out[m - 1]
    lam_ratio = abs(co.lam(m)) / abs(co.mu(m))
    for k in range(M + 1):
        out.append(head * factors.eta * factors.theta_pow(k) * lam_ratio)
    return out


@dataclass(frozen=True)
class CBounds:
    """Bounds on the quadratic term's action: ``C1`` (carries ``xbar``) and ``C2``.

    Finite parts are stored per index; tail parts as the weighted norm
    ``nu`` with entry ``nu / w_{m+k}^s``.
    """

    c1_F: tuple
    c1_tail: Interval
    c2_F: tuple
    c2_tail: Interval


def compute_C(xbar: Sequence, sigma: float, params: ProofParams) -> CBounds:
    m, s, L = params.m, params.s, params.L
    sig = abs(as_interval(sigma))
    two_sig = 2.0 * sig
    x = [abs(as_interval(v)) for v in xbar] + [ZERO] * (m - len(xbar))
    xnorm = norm_s(x, s)
    c1 = [ZERO]
    for k in range(1, m):
        acc = ZERO
        for l in range(m - k, m):
            acc = acc + x[l] / weight_iv(k + l, s)
        c1.append(two_sig * acc)
    c2 = [two_sig * alpha_bound(k, s, m, L) / weight_iv(k, s) for k in range(m)]
    a_m = alpha_bound(m, s, m, L)
    return CBounds(
        c1_F=tuple(c1),
        c1_tail=two_sig * a_m * xnorm,
        c2_F=tuple(c2),
        c2_tail=two_sig * a_m,
    )


def _d_vector(cF: Sequence, nu: Interval, A_m: np.ndarray, factors: TailFactors, params: ProofParams, chi_value) -> list[Interval]:
    m, M, s = params.m, params.M, params.s
    co = factors.coeffs
    eta = factors.eta
    s_L = co.s_L
    # |(U^-1 L^-1 c_I)_0| via the uniform bound at k = 0
    G = bound_uniform(factors, m, M, s, s_L, nu, 0)
    beta_abs = abs(co.beta(m - 1))
    out = []
    for i in range(m):
        out.append(_abs_dot(A_m[i], cF) + beta_abs * G * abs(float(A_m[i, m - 1])))
    head = _abs_dot(A_m[m - 1], cF) + beta_abs * abs(float(A_m[m - 1, m - 1])) * G
    lam_ratio = abs(co.lam(m)) / abs(co.mu(m))
    for k in range(M + 1):
        first = head * eta * lam_ratio * factors.theta_pow(k)
        unif = bound_uniform(factors, m, M, s, s_L, nu, k, chi_value=chi_value)
        out.append(first + unif)
    return out


def compute_D(C: CBounds, A_m: np.ndarray, factors: TailFactors, params: ProofParams) -> tuple[list[Interval], list[Interval]]:
    """``(d1, d2)``: coefficients of ``r`` and ``r^2`` bounding the quadratic part."""
    _require_MA(factors, params)
    _require_MY(factors, params)
    c = chi(factors, params.m, params.M, params.s, factors.coeffs.s_L)
    d1 = _d_vector(C.c1_F, C.c1_tail, A_m, factors, params, c)
    d2 = _d_vector(C.c2_F, C.c2_tail, A_m, factors, params, c)
    return d1, d2


def assemble_Z(z1_coef: Sequence, d1: Sequence, d2: Sequence) -> dict[str, list[Interval]]:
    if not (len(z1_coef) == len(d1) == len(d2)):
        raise ValueError("bound vectors must have equal length")
    return {"linear": [a + b for a, b in zip(z1_coef, d1)], "quadratic": list(d2)}


def compute_bounds(xbar, problem: QuadraticProblem, A_m: np.ndarray, resid: np.ndarray, factors: TailFactors, params: ProofParams) -> BoundSet:
    fres = f_residual(xbar, problem, params.m)
    Y = compute_Y(fres, A_m, factors, params)
    z1 = compute_Z1(resid, A_m, factors, params)
    C = compute_C(xbar, problem.sigma, params)
    d1, d2 = compute_D(C, A_m, factors, params)
    return BoundSet(
        m=params.m,
        M=params.M,
        s=params.s,
        s_L=factors.coeffs.s_L,
        Y=tuple(Y),
        z1_coef=tuple(z1),
        d1=tuple(d1),
        d2=tuple(d2),
    )
