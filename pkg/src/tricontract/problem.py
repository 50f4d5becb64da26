"""Problem definitions: tridiagonal-plus-quadratic zero finding problems.

``f_k(x) = lambda_k x_{k-1} + mu_k x_k + beta_k x_{k+1} + sigma (x*x)_k - g_k``
with the ``lambda`` term absent in row 0.  The built-in example uses
``lambda_k = (k-1)^2/2``, ``mu_k = 1 + 2k^2``, ``beta_k = (k+1)^2/2`` for k >= 1,
``mu_0 = beta_0 = 1`` and forcing ``g = (1/2, 3/2, 1/4)``, which is the cosine
series of ``1/2 + 3 cos(xi) + 1/2 cos(2 xi)`` under ``u = sum_{k in Z} x_k cos(k xi)``.
"""

from __future__ import annotations

import ast
import json
import operator
import warnings
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Sequence

import numpy as np
import scipy.linalg

from .errors import ConvergenceError, ParameterError, SingularError
from .interval import Interval, as_interval
from .seqspace import convolve
from .tridiag import TridiagCoeffs


def example4_triple(k: int) -> tuple[Fraction, Fraction, Fraction]:
    if k == 0:
        return Fraction(0), Fraction(1), Fraction(1)
    return Fraction((k - 1) ** 2, 2), Fraction(1 + 2 * k * k), Fraction((k + 1) ** 2, 2)


EXAMPLE4_G = (0.5, 1.5, 0.25)


# -- safe rational expressions in k ------------------------------------------

_BINOPS = {
    ast.Add: operator.add,
    ast.Sub: operator.sub,
    ast.Mult: operator.mul,
    ast.Div: operator.truediv,
}


def _eval_node(node, k: int) -> Fraction:
    if isinstance(node, ast.Expression):
        return _eval_node(node.body, k)
    if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)) and not isinstance(node.value, bool):
        return Fraction(node.value)
    if isinstance(node, ast.Name) and node.id == "k":
        return Fraction(k)
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
        v = _eval_node(node.operand, k)
        return -v if isinstance(node.op, ast.USub) else v
    if isinstance(node, ast.BinOp):
        if isinstance(node.op, ast.Pow):
            base = _eval_node(node.left, k)
            exp = _eval_node(node.right, k)
            if exp.denominator != 1 or exp < 0 or exp > 64:
                raise ValueError("only small non-negative integer powers are allowed")
            return base ** int(exp)
        fn = _BINOPS.get(type(node.op))
        if fn is not None:
            return fn(_eval_node(node.left, k), _eval_node(node.right, k))
    raise ValueError(f"unsupported expression element: {ast.dump(node)}")


@dataclass(frozen=True)
class RationalGenerator:
    """Coefficients given as rational expressions in ``k`` (valid for k >= 1)."""

    lam: str
    mu: str
    beta: str
    mu0: str = "1"
    beta0: str = "1"
    _trees: tuple = field(default=(), compare=False, repr=False)

    def __post_init__(self):
        trees = tuple(ast.parse(str(e), mode="eval") for e in (self.lam, self.mu, self.beta, self.mu0, self.beta0))
        object.__setattr__(self, "_trees", trees)
        self(1)

    def __call__(self, k: int) -> tuple[Fraction, Fraction, Fraction]:
        t = self._trees
        if k == 0:
            return Fraction(0), _eval_node(t[3], 0), _eval_node(t[4], 0)
        return _eval_node(t[0], k), _eval_node(t[1], k), _eval_node(t[2], k)


# -- analytic certificate for the built-in example ---------------------------


@dataclass(frozen=True)
class Example4Certificate:
    m: int
    C1: Fraction
    C2: Fraction
    delta: Fraction
    k0: int
    checks: tuple  # (statement, passed)

    @property
    def passed(self) -> bool:
        return all(ok for _, ok in self.checks)


def example4_delta(m: int) -> Fraction:
    return Fraction((m + 1) ** 2, 4 * m * m + 2)


def assumption_certificate_example4(m: int) -> Example4Certificate:
    """Check the closed-form bounds behind the built-in example's constants.

    Each statement reduces to a polynomial sign condition that is checked here
    in exact arithmetic:

    * ``mu_k/k^2 = 2 + 1/k^2``, decreasing to 2 and equal to 3 at k = 1,
      so ``C1 = 2 < mu_k/k^2 <= 3 = C2`` for k >= 1;
    * ``lambda_k/k^2 = (1-1/k)^2/2 <= 1/2`` and ``beta_k/k^2 = (1+1/k)^2/2 <= 2``;
    * ``h(k) = (k+1)^2 / (2(1+2k^2))`` has ``h'(k)`` proportional to
      ``(k+1)(1-2k)``, negative for k >= 1, so ``h(k) <= h(m) = delta`` on k >= m;
    * ``lambda_k/mu_k < 1/4 < delta`` since ``2(k-1)^2 < 1 + 2k^2`` iff ``k > 1/4``;
    * ``delta < 1/2`` iff ``m^2 - 2m > 0``, i.e. ``m > 2``.
    """
    if m < 2:
        raise ParameterError("the example certificate needs m >= 2")
    delta = example4_delta(m)
    _, mu_m, beta_m = example4_triple(m)
    C1, C2 = Fraction(2), Fraction(3)
    row0 = example4_triple(0)
    checks = (
        # inf over k >= 1 of mu_k/k^2 is the limit 2, sup is the value 3 at k = 1
        ("C1 <= mu_k/k^2 <= C2 for k >= 1", C1 <= 2 and example4_triple(1)[1] <= C2),
        # sup lambda_k/k^2 is the limit 1/2, sup beta_k/k^2 is the value 2 at k = 1
        ("lambda_k/k^2, beta_k/k^2 <= C2 for k >= 1", Fraction(1, 2) <= C2 and example4_triple(1)[2] <= C2),
        ("row 0 entries <= C2", row0[1] <= C2 and row0[2] <= C2),
        ("beta_m/mu_m = delta and beta_k/mu_k decreasing for k >= 1", beta_m / mu_m == delta and (1 - 2 * 1) < 0),
        ("lambda_k/mu_k < 1/4 < delta", Fraction(1, 4) < delta),
        ("delta < 1/2", delta < Fraction(1, 2)),
    )
    return Example4Certificate(m=m, C1=C1, C2=C2, delta=delta, k0=m, checks=checks)


# -- the problem type --------------------------------------------------------


@dataclass(frozen=True)
class QuadraticProblem:
    """A zero-finding problem with tridiagonal linear part and quadratic term."""

    generator: object
    sigma: float
    g: tuple
    s_L: float = 2.0
    kind: str = "custom"
    C1: Fraction | None = None
    C2: Fraction | None = None
    delta: Fraction | None = None
    k0: int | None = None
    tail_certified: bool = False
    definition: dict | None = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "g", tuple(float(v) for v in self.g))
        object.__setattr__(self, "sigma", float(self.sigma))

    def with_sigma(self, sigma: float) -> QuadraticProblem:
        definition = dict(self.definition) if self.definition else None
        if definition is not None:
            definition["sigma"] = float(sigma)
        return replace(self, sigma=float(sigma), definition=definition)

    def coeffs(self, m: int) -> TridiagCoeffs:
        if self.kind == "example4":
            cert = assumption_certificate_example4(m)
            return TridiagCoeffs(self.generator, self.s_L, cert.C1, cert.C2, cert.delta, cert.k0, cert.passed)
        if None in (self.C1, self.C2, self.delta, self.k0):
            raise ParameterError("custom problems must supply C1, C2, delta and k0")
        return TridiagCoeffs(self.generator, self.s_L, self.C1, self.C2, self.delta, self.k0, self.tail_certified)

    def initial_guess(self, m: int) -> np.ndarray:
        x = np.zeros(m)
        if self.kind == "example4" and m > 1:
            x[1] = 0.5
        return x

    def to_json(self) -> dict:
        if self.definition is not None:
            return dict(self.definition)
        return {"type": self.kind, "sigma": self.sigma}


def example4(sigma: float = 0.0) -> QuadraticProblem:
    return QuadraticProblem(
        generator=example4_triple,
        sigma=sigma,
        g=EXAMPLE4_G,
        s_L=2.0,
        kind="example4",
        definition={"type": "example4", "sigma": float(sigma)},
    )


def _frac(v) -> Fraction:
    if isinstance(v, str):
        return _eval_node(ast.parse(v, mode="eval"), 0)
    return Fraction(v)


def problem_from_json(data: dict) -> QuadraticProblem:
    kind = data.get("type")
    if kind == "example4":
        return example4(float(data.get("sigma", 0.0)))
    if kind != "custom":
        raise ValueError(f"unknown problem type {kind!r}")
    try:
        co = data["coefficients"]
        gen = RationalGenerator(
            lam=co["lambda"], mu=co["mu"], beta=co["beta"], mu0=co.get("mu0", "1"), beta0=co.get("beta0", "1")
        )
        const = data["constants"]
        return QuadraticProblem(
            generator=gen,
            sigma=float(data.get("sigma", 0.0)),
            g=tuple(float(v) for v in data["g"]),
            s_L=float(const["s_L"]),
            kind="custom",
            C1=_frac(const["C1"]),
            C2=_frac(const["C2"]),
            delta=_frac(const["delta"]),
            k0=int(const["k0"]),
            tail_certified=bool(data.get("tail_certified", False)),
            definition=json.loads(json.dumps(data)),
        )
    except KeyError as exc:
        raise ValueError(f"problem file missing field {exc}") from None


# -- evaluation ---------------------------------------------------------------


def _linear_part(problem: QuadraticProblem, x: Sequence, K: int, interval: bool) -> list:
    n = len(x)
    out = []
    for k in range(K + 1):
        if interval:
            lam, mu, beta = (as_interval(Fraction(v)) for v in problem.generator(k))
        else:
            lam, mu, beta = (float(v) for v in problem.generator(k))
        acc = 0.0
        if 1 <= k <= n:
            acc = acc + lam * x[k - 1]
        if k < n:
            acc = acc + mu * x[k]
        if k + 1 < n:
            acc = acc + beta * x[k + 1]
        out.append(acc)
    return out


def f_full(problem: QuadraticProblem, x: Sequence, interval: bool = False) -> list:
    """Every possibly nonzero component of ``f(x)`` for ``x`` supported on ``0..n-1``."""
    x = list(x)
    n = len(x)
    if interval:
        x = [as_interval(v) for v in x]
    else:
        x = [float(v) for v in x]
    K = max(2 * n - 2, n, len(problem.g) - 1)
    lin = _linear_part(problem, x, K, interval)
    sig = as_interval(problem.sigma) if interval else problem.sigma
    conv = convolve(x, x) if problem.sigma != 0.0 else []
    out = []
    for k in range(K + 1):
        v = lin[k]
        if k < len(conv):
            v = v + sig * conv[k]
        if k < len(problem.g):
            v = v - problem.g[k]
        out.append(as_interval(v) if interval else float(v))
    return out


def f_proj(problem: QuadraticProblem, x: Sequence, m: int, interval: bool = False):
    """``(f_k(x))_{k<m}``; x must be supported on ``0..m-1``."""
    if len(x) > m:
        raise ValueError("x must be supported on 0..m-1")
    x = list(x) + [0.0] * (m - len(x))
    full = f_full(problem, x, interval)[:m]
    return full if interval else np.array(full)


def sigma_derivative(x: Sequence, m: int) -> np.ndarray:
    """``d f / d sigma = (x*x)_k`` for k < m."""
    conv = convolve([float(v) for v in x], [float(v) for v in x])
    out = np.zeros(m)
    out[: min(m, len(conv))] = conv[:m]
    return out


def jacobian(problem: QuadraticProblem, x: Sequence, m: int, interval: bool = False):
    """``D f^{(m)}(x)``: float ndarray, or a nested list of Intervals."""
    if len(x) > m:
        raise ValueError("x must be supported on 0..m-1")
    x = [float(v) for v in x] + [0.0] * (m - len(x))

    def xt(i):
        i = abs(i)
        return x[i] if i < m else 0.0

    rows = []
    for k in range(m):
        exact = problem.generator(k)
        if interval:
            lam, mu, beta = (as_interval(Fraction(v)) for v in exact)
            sig = as_interval(problem.sigma)
        else:
            lam, mu, beta = (float(v) for v in exact)
            sig = problem.sigma
        row = []
        for j in range(m):
            v = 0.0
            if j == k - 1 and k >= 1:
                v = v + lam
            if j == k:
                v = v + mu
            if j == k + 1:
                v = v + beta
            if problem.sigma != 0.0:
                if j == 0:
                    q = 2.0 * (as_interval(xt(k)) if interval else xt(k))
                else:
                    q = 2.0 * ((as_interval(xt(k - j)) + xt(k + j)) if interval else (xt(k - j) + xt(k + j)))
                v = v + sig * q
            row.append(as_interval(v) if interval else v)
        rows.append(row)
    return rows if interval else np.array(rows, dtype=float)


def newton_solve(problem: QuadraticProblem, x0: Sequence, m: int, tol: float = 1e-14, max_iter: int = 50) -> np.ndarray:
    """Newton iteration on ``f^{(m)}`` until ``||f^{(m)}(x)||_inf <= tol``."""
    if not tol > 0.0:
        raise ConvergenceError("tolerance must be positive")
    x = np.zeros(m)
    x0 = np.asarray(x0, dtype=float)
    x[: min(m, len(x0))] = x0[:m]
    for _ in range(max_iter + 1):
        F = f_proj(problem, x, m)
        if np.max(np.abs(F)) <= tol:
            return x
        J = jacobian(problem, x, m)
        try:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
                lu = scipy.linalg.lu_factor(J, check_finite=True)
        except (ValueError, np.linalg.LinAlgError) as exc:
            raise SingularError(str(exc)) from None
        if np.any(np.diag(lu[0]) == 0.0):
            raise SingularError("Jacobian is singular")
        x = x - scipy.linalg.lu_solve(lu, F)
        if not np.all(np.isfinite(x)):
            raise ConvergenceError("Newton iterates diverged")
    raise ConvergenceError(f"no convergence to {tol} within {max_iter} iterations")


@dataclass(frozen=True)
class Example4Config:
    sigma: float = 0.0
    m: int = 20
    g: tuple = EXAMPLE4_G

    @property
    def delta(self) -> Fraction:
        return example4_delta(self.m)

    C1 = Fraction(2)
    C2 = Fraction(3)

    @property
    def k0(self) -> int:
        return self.m

    def problem(self) -> QuadraticProblem:
        return example4(self.sigma)


def interval_residual_norm(problem: QuadraticProblem, x: Sequence, m: int) -> Interval:
    vals = f_proj(problem, x, m, interval=True)
    out = Interval(0.0)
    for v in vals:
        a = abs(v)
        out = Interval._raw(max(out.lo, a.lo), max(out.hi, a.hi))
    return out
