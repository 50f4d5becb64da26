"""Finite block of the approximate inverse.

``K~`` is the Jacobian block ``D`` with its south-east entry shifted by
``-beta_{m-1} lambda_m w~``, which folds the coupling to the tail into the
finite system.  ``A_m`` is a plain floating-point inverse of ``mid(K~)``; the
rigour lives entirely in the interval residual ``|I - A_m K~|``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import SingularError
from .interval import Interval, as_interval


def as_interval_matrix(D) -> np.ndarray:
    D = np.asarray(D, dtype=object)
    out = np.empty(D.shape, dtype=object)
    for idx, v in np.ndenumerate(D):
        out[idx] = as_interval(v)
    return out


def mid_matrix(K: np.ndarray) -> np.ndarray:
    return np.array([[v.mid() for v in row] for row in K], dtype=float)


def abs_matrix(K: np.ndarray) -> np.ndarray:
    out = np.empty(K.shape, dtype=object)
    for idx, v in np.ndenumerate(K):
        out[idx] = abs(v)
    return out


def build_K_tilde(D, beta_m1, lam_m, w_tilde) -> np.ndarray:
    """Interval copy of ``D`` with ``K[m-1, m-1] -= beta_{m-1} lambda_m w~``."""
    K = as_interval_matrix(D)
    if K.ndim != 2 or K.shape[0] != K.shape[1]:
        raise ValueError("D must be square")
    c = as_interval(beta_m1) * as_interval(lam_m) * as_interval(w_tilde)
    K[-1, -1] = K[-1, -1] - c
    return K


def invert_numeric(K: np.ndarray) -> np.ndarray:
    """Approximate inverse of ``mid(K)`` via LU with partial pivoting."""
    Km = mid_matrix(K) if K.dtype == object else np.asarray(K, dtype=float)
    n = Km.shape[0]
    try:
        with warnings.catch_warnings():
            # singularity is reported through SingularError below
            warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
            lu, piv = scipy.linalg.lu_factor(Km, check_finite=True)
    except (ValueError, np.linalg.LinAlgError) as exc:
        raise SingularError(str(exc)) from None
    diag = np.abs(np.diag(lu))
    scale = np.max(np.abs(Km)) if n else 0.0
    if n and (diag.min() == 0.0 or diag.min() <= n * np.finfo(float).eps * scale):
        raise SingularError("matrix is singular to working precision")
    return scipy.linalg.lu_solve((lu, piv), np.eye(n))


def interval_matmul(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Rigorous product of a float (or interval) matrix with an interval matrix."""
    A = np.asarray(A, dtype=object)
    n, p = A.shape
    p2, q = B.shape
    if p != p2:
        raise ValueError("shape mismatch")
    out = np.empty((n, q), dtype=object)
    for i in range(n):
        for j in range(q):
            acc = Interval(0.0)
            for l in range(p):
                a = A[i, l]
                if a == 0.0:
                    continue
                acc = acc + a * B[l, j]
            out[i, j] = acc
    return out


def residual(A_m: np.ndarray, K: np.ndarray) -> np.ndarray:
    """Entrywise enclosure of ``|I - A_m K~|`` (all entries non-negative)."""
    n = K.shape[0]
    if A_m.shape != K.shape:
        raise ValueError("shape mismatch")
    AK = interval_matmul(np.asarray(A_m, dtype=float).astype(object), K)
    out = np.empty((n, n), dtype=object)
    for i in range(n):
        for j in range(n):
            v = (1.0 if i == j else 0.0) - AK[i, j]
            out[i, j] = abs(v)
    return out


@dataclass(frozen=True)
class FiniteBlock:
    m: int
    D: object
    K_tilde: np.ndarray
    A_m: np.ndarray
    residual: np.ndarray

    @classmethod
    def build(cls, D, beta_m1, lam_m, w_tilde) -> FiniteBlock:
        K = build_K_tilde(D, beta_m1, lam_m, w_tilde)
        A = invert_numeric(K)
        return cls(m=K.shape[0], D=D, K_tilde=K, A_m=A, residual=residual(A, K))
