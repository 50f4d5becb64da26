"""Tail machinery for the infinite tridiagonal block.

The tail block starting at index ``m`` has diagonals ``a_n = lambda_{m+n-1}``,
``b_n = mu_{m+n-1}``, ``c_n = beta_{m+n-1}`` (n >= 1).  Its LU factorisation is
driven by the determinant recurrence ``d_n = b_n d_{n-1} - a_n c_{n-1} d_{n-2}``.
Raw determinants overflow quickly, so everything here works with the pivot
ratios ``rho_n = d_n / d_{n-1}``::

    rho_1 = b_1,    rho_n = b_n - a_n c_{n-1} / rho_{n-1}

The remaining functions are rigorous (interval) bounds on the action of the
inverse tail operator, parametrised by the decay constants ``theta``, ``gamma``
and ``eta`` derived from the ratio bound ``delta``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Callable, Sequence

from .errors import AssumptionError, DegenerateLU, DomainError, ParameterError
from .interval import Interval, as_interval, log, pow_int, pow_real, sqrt
from .seqspace import weight_iv

Triple = tuple  # (lambda_k, mu_k, beta_k)


@dataclass(frozen=True)
class TridiagCoeffs:
    """Coefficient generator plus the growth/ratio constants it satisfies.

    ``generator(k)`` returns exact ``(lambda_k, mu_k, beta_k)`` as Fractions;
    ``lambda_0`` is ignored.  ``tail_certified`` records that an analytic
    argument covers every index beyond the finite range checked numerically.
    """

    generator: Callable[[int], Triple]
    s_L: float
    C1: Fraction
    C2: Fraction
    delta: Fraction
    k0: int
    tail_certified: bool = False
    _cache: dict = field(default_factory=dict, compare=False, repr=False)

    def exact(self, k: int) -> Triple:
        return self.generator(k)

    def triple(self, k: int) -> tuple[Interval, Interval, Interval]:
        hit = self._cache.get(k)
        if hit is None:
            hit = tuple(as_interval(Fraction(v)) for v in self.generator(k))
            self._cache[k] = hit
        return hit

    def triple_float(self, k: int) -> tuple[float, float, float]:
        return tuple(float(v) for v in self.generator(k))

    def lam(self, k: int) -> Interval:
        return self.triple(k)[0]

    def mu(self, k: int) -> Interval:
        return self.triple(k)[1]

    def beta(self, k: int) -> Interval:
        return self.triple(k)[2]

    @property
    def delta_iv(self) -> Interval:
        return as_interval(Fraction(self.delta))

    @property
    def C1_iv(self) -> Interval:
        return as_interval(Fraction(self.C1))


@dataclass
class AssumptionReport:
    m: int
    K_check: int
    checks: list = field(default_factory=list)  # (name, k_lo, k_hi, passed)
    tail_certified: bool = False

    @property
    def passed(self) -> bool:
        return all(c[3] for c in self.checks)


def _weighted_leq(value: Fraction, k: int, s_L: float, bound: Fraction) -> bool:
    """Rigorously decide ``|value| / w_k^{s_L} <= bound``."""
    if float(s_L).is_integer():
        w = 1 if k == 0 else k ** int(s_L)
        return abs(value) <= bound * w
    q = abs(as_interval(value)) / weight_iv(k, s_L)
    return q.hi <= float(bound) and as_interval(bound).lo >= q.hi


def _weighted_geq(value: Fraction, k: int, s_L: float, bound: Fraction) -> bool:
    if float(s_L).is_integer():
        w = 1 if k == 0 else k ** int(s_L)
        return abs(value) >= bound * w
    q = abs(as_interval(value)) / weight_iv(k, s_L)
    return q.lo >= as_interval(bound).hi


def verify_assumptions(coeffs: TridiagCoeffs, m: int, K_check: int) -> AssumptionReport:
    """Check the growth and ratio assumptions on ``[0, K_check]`` exactly.

    Weighted bounds with an integer ``s_L`` and all ratio bounds are decided
    in exact rational arithmetic (the ratio bound is attained with equality at
    ``k = m`` for the built-in example, which no floating enclosure can
    certify).  Non-integer ``s_L`` falls back to interval arithmetic.
    """
    delta = Fraction(coeffs.delta)
    if not (0 < delta < Fraction(1, 2)):
        raise AssumptionError(f"delta = {float(delta)} not in (0, 1/2)", inequality="0 < delta < 1/2")
    if not Fraction(coeffs.C1) > 0:
        raise AssumptionError("need C1 > 0", inequality="C1 > 0")
    if m < coeffs.k0:
        raise ParameterError(f"m = {m} must be >= k0 = {coeffs.k0}")
    if m < 6:
        raise ParameterError(f"m = {m} must be >= 6")
    report = AssumptionReport(m=m, K_check=K_check, tail_certified=coeffs.tail_certified)
    C1, C2 = Fraction(coeffs.C1), Fraction(coeffs.C2)
    for k in range(0, K_check + 1):
        lam, mu, beta = (Fraction(v) for v in coeffs.exact(k))
        if k == 0:
            lam = Fraction(0)
        for name, v in (("lambda", lam), ("mu", mu), ("beta", beta)):
            if not _weighted_leq(v, k, coeffs.s_L, C2):
                raise AssumptionError(
                    f"|{name}_{k}| / w_{k}^s_L exceeds C2 = {C2}", k=k, inequality=f"|{name}_k|/w_k <= C2"
                )
        if k >= coeffs.k0:
            if not _weighted_geq(mu, k, coeffs.s_L, C1):
                raise AssumptionError(
                    f"|mu_{k}| / w_{k}^s_L below C1 = {C1}", k=k, inequality="C1 <= |mu_k|/w_k"
                )
            if mu == 0 or abs(lam) > delta * abs(mu) or abs(beta) > delta * abs(mu):
                raise AssumptionError(
                    f"ratio bound |lambda_k/mu_k|, |beta_k/mu_k| <= delta fails at k = {k}",
                    k=k,
                    inequality="|lambda_k/mu_k|, |beta_k/mu_k| <= delta",
                )
    report.checks.append(("|lambda,mu,beta|/w^s_L <= C2", 0, K_check, True))
    report.checks.append(("C1 <= |mu|/w^s_L", coeffs.k0, K_check, True))
    report.checks.append(("ratios <= delta", coeffs.k0, K_check, True))
    report.checks.append(("analytic certificate for k > K_check", K_check + 1, None, coeffs.tail_certified))
    return report


@dataclass(frozen=True)
class TailFactors:
    """Rigorous tail constants and the truncated LU data for one truncation index."""

    coeffs: TridiagCoeffs
    m: int
    L: int
    delta: Interval
    gamma: Interval
    theta: Interval
    eta: Interval
    rho: tuple  # rho[n-1] = rho_n, n = 1..L
    w_tilde: Interval
    w_tilde_err: Interval
    _theta_pows: list = field(default_factory=list, compare=False, repr=False)

    def theta_pow(self, p: int) -> Interval:
        pows = self._theta_pows
        if not pows:
            pows.append(Interval(1.0))
        while len(pows) <= p:
            pows.append(pows[-1] * self.theta)
        return pows[p]

    def mu(self, j: int) -> Interval:
        """``mu_{m+j}`` (tail-relative index)."""
        return self.coeffs.mu(self.m + j)


def decay_constants(delta) -> tuple[Interval, Interval, Interval]:
    """``(gamma, theta, eta)`` for a ratio bound ``delta`` in (0, 1/2)."""
    d = as_interval(delta)
    if not (d.lo > 0.0 and d.hi < 0.5):
        raise DomainError(f"delta must lie in (0, 1/2), got {d}")
    gamma = 0.5 + sqrt(0.25 - d * d)
    theta = d / gamma
    eta = 1.0 / (gamma * (1.0 - theta * theta))
    return gamma, theta, eta


def pivot_ratios(coeffs: TridiagCoeffs, m: int, n: int) -> list[Interval]:
    """Interval pivots ``rho_1..rho_n`` of the tail block starting at ``m``."""
    rho: list[Interval] = []
    for j in range(1, n + 1):
        b = coeffs.mu(m + j - 1)
        if j == 1:
            r = b
        else:
            a = coeffs.lam(m + j - 1)
            c_prev = coeffs.beta(m + j - 2)
            r = b - a * c_prev / rho[-1]
        if r.lo <= 0.0 <= r.hi:
            raise DegenerateLU(f"pivot rho_{j} of the tail block encloses zero: {r}")
        rho.append(r)
    return rho


def pivot_ratios_float(coeffs: TridiagCoeffs, m: int, n: int) -> list[float]:
    rho: list[float] = []
    for j in range(1, n + 1):
        b = coeffs.triple_float(m + j - 1)[1]
        if j == 1:
            rho.append(b)
        else:
            a = coeffs.triple_float(m + j - 1)[0]
            c_prev = coeffs.triple_float(m + j - 2)[2]
            rho.append(b - a * c_prev / rho[-1])
    return rho


def tail_factors(coeffs: TridiagCoeffs, m: int, L: int) -> TailFactors:
    """Decay constants, pivots and the truncated corner value ``w~`` with its error."""
    if L < 1:
        raise ParameterError("L must be >= 1")
    if m < max(coeffs.k0, 6):
        raise ParameterError(f"m = {m} must be >= max(k0, 6) = {max(coeffs.k0, 6)}")
    delta = coeffs.delta_iv
    gamma, theta, eta = decay_constants(delta)
    rho = pivot_ratios(coeffs, m, L)
    # w~ = 1/rho_1 + sum_{l=1}^{L-1} prod_{j<=l}(c_j a_{j+1} / rho_j^2) / rho_{l+1}
    w = 1.0 / rho[0]
    prod = Interval(1.0)
    for l in range(1, L):
        c_l = coeffs.beta(m + l - 1)
        a_next = coeffs.lam(m + l)
        prod = prod * (c_l * a_next) / (rho[l - 1] * rho[l - 1])
        w = w + prod / rho[l]
    factors = TailFactors(
        coeffs=coeffs,
        m=m,
        L=L,
        delta=delta,
        gamma=gamma,
        theta=theta,
        eta=eta,
        rho=tuple(rho),
        w_tilde=w,
        w_tilde_err=Interval(0.0),
    )
    err = w_tilde_error(factors, coeffs.mu(m))
    return replace(factors, w_tilde_err=err, _theta_pows=[])


def w_tilde_error(factors: TailFactors, mu_m) -> Interval:
    """Bound ``theta^(2L) / (|mu_m| (1 - theta^2))`` on the truncation error of ``w~``."""
    if factors.L < factors.coeffs.k0:
        raise ParameterError(f"L = {factors.L} must be >= k0 = {factors.coeffs.k0}")
    th = factors.theta
    return pow_int(th, 2 * factors.L) / (abs(as_interval(mu_m)) * (1.0 - th * th))


def m_thresholds(theta: Interval, m: int, s: float, s_L: float) -> dict[str, Interval | float]:
    """Lower bounds on M from the uniform-tail and Y-tail conditions."""
    ln_t = log(theta)
    ln_sqrt = 0.5 * ln_t
    S = s + s_L + 1.0
    mls = m * ln_sqrt
    disc = (mls + S) * (mls + S) - 4.0 * mls
    root = (-mls - S - sqrt(disc)) / (2.0 * ln_sqrt)
    return {
        "quad_root": root,
        "phi2": 4.0 / (ln_t * ln_t),
        "m": float(m),
        "y_decay": -s / ln_t - m,
        "m_minus_2": float(m - 2),
    }


@dataclass(frozen=True)
class MCheck:
    ok_A: bool
    ok_Y: bool
    required_A: float
    required_Y: float


def check_M(factors: TailFactors, m: int, M: int, s: float, s_L: float) -> MCheck:
    """Decide both lower-bound conditions on ``M`` from upper enclosures."""
    if M < 1:
        raise ParameterError("M must be >= 1")
    t = m_thresholds(factors.theta, m, s, s_L)
    req_A = max(t["quad_root"].hi, t["phi2"].hi, t["m"])
    req_Y = max(t["y_decay"].hi, t["m_minus_2"])
    return MCheck(ok_A=M >= req_A, ok_Y=M >= req_Y, required_A=req_A, required_Y=req_Y)


def _ipow(x: Interval, p: float) -> Interval:
    return pow_real(x, p)


def chi(factors: TailFactors, m: int, M: int, s: float, s_L: float) -> Interval:
    """Uniform constant bounding weighted tail entries of the inverse beyond ``M``."""
    if m < 2:
        raise ParameterError("chi needs m >= 2")
    if not check_M(factors, m, M, s, s_L).ok_A:
        raise ParameterError(f"M = {M} fails the uniform-tail condition")
    th = factors.theta
    p = s + s_L
    mI, MI = Interval(float(m)), Interval(float(M))
    half_M = MI / 2.0
    th_half = pow_int(th, M // 2) if M % 2 == 0 else pow_real(th, half_M)
    t1 = th_half * half_M * _ipow((mI + MI) / mI, p)
    sq = sqrt(MI)
    t2 = pow_real(th, sq) * half_M * _ipow(Interval(2.0), p)
    t3 = _ipow((mI + MI) / (mI + MI - sq - 1.0), p) / (1.0 - th)
    return t1 + t2 + t3


def bound_x_from_y(
    factors: TailFactors,
    yI_abs: Sequence,
    k: int,
    tail_norm=None,
    s: float | None = None,
) -> Interval:
    """Bound ``|x_{m+k}|`` where ``x_I`` solves the tail system with right side ``y_I``.

    ``yI_abs[j]`` bounds ``|y_{m+j}|``.  Entries past the sequence are zero
    unless ``tail_norm`` is given, in which case ``|y_{m+j}| <= tail_norm /
    w_{m+j}^s`` there and the remaining geometric series is summed in closed form.
    """
    n = len(yI_abs)
    th, eta = factors.theta, factors.eta
    acc = Interval(0.0)
    for j in range(n):
        y = yI_abs[j]
        if isinstance(y, float) and y == 0.0:
            continue
        q = abs(as_interval(y)) / abs(factors.mu(j))
        acc = acc + factors.theta_pow(abs(k - j)) * q
    if tail_norm is not None:
        if s is None:
            raise ValueError("tail_norm needs the decay rate s")
        coeffs = factors.coeffs
        # |y_{m+j}|/|mu_{m+j}| <= tail_norm / (C1 w_{m+n}^{s+s_L}) for all j >= n
        tau = as_interval(tail_norm) / (coeffs.C1_iv * weight_iv(factors.m + n, s) * weight_iv(factors.m + n, coeffs.s_L))
        if k >= n:
            acc = acc + tau * (1.0 + th) / (1.0 - th)
        else:
            acc = acc + tau * factors.theta_pow(n - k) / (1.0 - th)
    return eta * acc


def bound_w(factors: TailFactors, k: int) -> Interval:
    """``|w_{m+k}| <= eta theta^k / |mu_m|`` for the corner column of the inverse."""
    return factors.eta * factors.theta_pow(k) / abs(factors.mu(0))


def bound_uniform(factors: TailFactors, m: int, M: int, s: float, s_L: float, norm_yI, k: int, chi_value=None) -> Interval:
    """Bound ``|x_{m+k}|`` from ``||y_I||_s`` alone (explicit for k < M, via chi beyond)."""
    if k < 0:
        raise ValueError("k must be non-negative")
    if not check_M(factors, m, M, s, s_L).ok_A:
        raise ParameterError(f"M = {M} fails the uniform-tail condition")
    th = factors.theta
    p = s + s_L
    pref = factors.eta * as_interval(norm_yI) / factors.coeffs.C1_iv
    geo = th / (1.0 - th)
    mk = Interval(float(m + k))
    if k < M:
        acc = Interval(0.0)
        for l in range(k + 1):
            acc = acc + factors.theta_pow(k - l) * _ipow(mk / float(m + l), p)
        inner = acc + geo
    else:
        c = chi(factors, m, M, s, s_L) if chi_value is None else chi_value
        inner = c + geo
    return pref * inner / _ipow(mk, p)


def phi_monotone(theta: float, m: int, s: float, s_L: float, k: float) -> tuple[float, float, float]:
    """Float values of the three auxiliary functions whose decrease justifies ``chi``."""
    p = s + s_L
    phi1 = theta ** (k / 2.0) * k * (m + k) ** p
    phi2 = theta ** math.sqrt(k) * k
    phi3 = (m + k) / (m + k - math.sqrt(k) - 1.0)
    return phi1, phi2, phi3
