"""Weighted sup-norm sequence space with algebraic weights.

A sequence ``x = (x_0, x_1, ...)`` has norm ``sup_k |x_k| w_k`` where
``w_0 = 1`` and ``w_k = k**s``.  Sequences are finitely supported and may hold
floats or :class:`~tricontract.interval.Interval` entries; the same code serves
both (float for searching, Interval for verification).

Convolutions use the even extension ``x_{-k} = x_k``, which is what the cosine
series ``u = sum_{k in Z} x_k cos(k xi)`` produces under multiplication.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

from .errors import UnsupportedRegime
from .interval import PI_SQUARED, Interval, as_interval, log, pow_real


def weight(k: int, s: float) -> float:
    """Float weight ``w_k^s`` (1 at k = 0)."""
    if k < 0:
        raise ValueError("weight index must be non-negative")
    if k == 0:
        return 1.0
    return float(k) ** s


@lru_cache(maxsize=None)
def weight_iv(k: int, s: float) -> Interval:
    """Rigorous enclosure of ``w_k^s``."""
    if k < 0:
        raise ValueError("weight index must be non-negative")
    if k == 0:
        return Interval(1.0)
    return pow_real(Interval(float(k)), s)


@dataclass(frozen=True)
class SeqVector:
    """Finitely supported element of the weighted space; entries past ``coeffs`` are 0."""

    coeffs: tuple
    s: float = 2.0

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(self.coeffs))
        if not self.s > 1.0:
            raise ValueError("decay rate s must exceed 1")

    def __len__(self) -> int:
        return len(self.coeffs)

    def __getitem__(self, k: int):
        if k < 0:
            k = -k
        if k < len(self.coeffs):
            return self.coeffs[k]
        return 0.0

    def norm(self):
        return norm_s(self.coeffs, self.s)

    def to_intervals(self) -> SeqVector:
        return SeqVector(tuple(as_interval(c) for c in self.coeffs), self.s)


def norm_s(x: Sequence, s: float):
    """``sup_k |x_k| w_k^s``; an Interval enclosure if any entry is an Interval."""
    if isinstance(x, SeqVector):
        x = x.coeffs
    if any(isinstance(v, Interval) for v in x):
        best = Interval(0.0)
        for k, v in enumerate(x):
            term = abs(as_interval(v)) * weight_iv(k, s)
            best = Interval._raw(max(best.lo, term.lo), max(best.hi, term.hi))
        return best
    return max((abs(v) * weight(k, s) for k, v in enumerate(x)), default=0.0)


def convolve(x: Sequence, y: Sequence) -> list:
    """``(x*y)_k`` for ``0 <= k <= len(x)+len(y)-2`` under the even extension.

    ``(x*y)_k = sum_{k1+k2=k} x_|k1| y_|k2|`` with both indices ranging over Z.
    """
    if isinstance(x, SeqVector):
        x = x.coeffs
    if isinstance(y, SeqVector):
        y = y.coeffs
    nx, ny = len(x), len(y)
    if nx == 0 or ny == 0:
        return []
    out_len = nx + ny - 1
    zero = 0.0
    out = []
    for k in range(out_len):
        acc = zero
        # k1 in [k-(ny-1), nx-1] and |k1| < nx, |k-k1| < ny
        for k1 in range(max(-(nx - 1), k - (ny - 1)), min(nx - 1, k + ny - 1) + 1):
            acc = acc + x[abs(k1)] * y[abs(k - k1)]
        out.append(acc)
    return out


@lru_cache(maxsize=None)
def _alpha_base(s: float, L: int) -> Interval:
    # 2 * sum_{l=1}^{L} l^-s + 2 / ((s-1) L^(s-1))
    acc = Interval(0.0)
    for l in range(1, L + 1):
        acc = acc + 1.0 / weight_iv(l, s)
    tail = 2.0 / ((Interval(s) - 1.0) * pow_real(Interval(float(L)), Interval(s) - 1.0))
    return 2.0 * acc + tail


@lru_cache(maxsize=None)
def _alpha_tail(s: float, n: int) -> Interval:
    nn = Interval(float(n))
    two_ratio = 2.0 * pow_real(nn / (nn - 1.0), s)
    log_term = 4.0 * log(nn - 2.0) / nn + (PI_SQUARED - 6.0) / 3.0
    return two_ratio + log_term * pow_real(2.0 / nn + 0.5, s)


@lru_cache(maxsize=None)
def alpha_bound(k: int, s: float, n: int, L: int) -> Interval:
    """Upper enclosure of the convolution constant ``alpha_k^s(n)``.

    For all x, y: ``|(x*y)_k| <= alpha_k ||x||_s ||y||_s / w_k^s``.  Valid for
    ``s >= 2`` and ``n >= 6``; indices ``k >= n`` share the value at ``k = n``.
    """
    if s < 2:
        raise UnsupportedRegime(f"convolution estimate needs s >= 2, got {s}")
    if n < 6:
        raise UnsupportedRegime(f"convolution estimate needs n >= 6, got {n}")
    if L < 1 or k < 0:
        raise ValueError("need L >= 1 and k >= 0")
    base = _alpha_base(float(s), L)
    if k == 0:
        return 1.0 + base
    if k < n:
        kw = weight_iv(k, s)
        acc = Interval(0.0)
        for l in range(1, k):
            acc = acc + kw / (weight_iv(l, s) * weight_iv(k - l, s))
        return 2.0 + base + acc
    return 2.0 + base + _alpha_tail(float(s), n)


def alpha_float(k: int, s: float, n: int, L: int) -> float:
    """Float version of :func:`alpha_bound` (upper endpoint)."""
    return alpha_bound(k, s, n, L).hi
