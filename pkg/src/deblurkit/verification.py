"""Independent oracles used to cross-check the fast paths.

Everything here recomputes a quantity the production code obtains another
way: coefficient tables that must reproduce the gamma schedule, a closed-form
reconstruction of the fixed-budget solver's iterates from its stored
gradient/subgradient terms, dense matrix materializations of the matrix-free
operators, and a brute-force prox.  None of it shares code with the paths it
checks, which is the whole point; the dense helpers refuse to run above a
small dimension so they cannot sneak into production use.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import lsq_linear

from .operators import BlurOperator, WeightingSpec
from .prox import Regularizer
from .schedules import Schedule

__all__ = [
    "CoefficientTable",
    "build_coefficients",
    "closed_form_s",
    "telescoped_t",
    "check_gamma_equals_tK",
    "reconstruct_iterates",
    "dense_materialize",
    "dense_weighting",
    "brute_force_prox",
    "tv_subgradient_violation",
    "DENSE_DIM_LIMIT",
]

DENSE_DIM_LIMIT = 256
_TV_DUAL_LIMIT = 64


@dataclass(frozen=True)
class CoefficientTable:
    """Lower-triangular tables t and s tied to a K-step schedule.

    Row i of t (1 <= i <= K) holds t[i, j] for j < i; entries with j >= i
    are zero padding.  t accumulates the running sums

        t[i+1, j] = t[i, j] + (2*alpha_j - t[i, j]) / alpha_{i+1}   (j < i)
        t[i+1, i] = 1 + (2*alpha_i - 1) / alpha_{i+1}

    and s holds the first differences down each column.  The terminal row
    t[K, :] must reproduce the gamma schedule; ``check_gamma_equals_tK``
    measures exactly that.
    """

    K: int
    t: np.ndarray  # (K+1, K)
    s: np.ndarray  # (K+1, K)


def build_coefficients(schedule: Schedule) -> CoefficientTable:
    K = schedule.K
    a = schedule.alpha
    t = np.zeros((K + 1, K))
    for i in range(K):
        if i >= 1:
            t[i + 1, :i] = t[i, :i] + (2.0 * a[:i] - t[i, :i]) / a[i + 1]
        t[i + 1, i] = 1.0 + (2.0 * a[i] - 1.0) / a[i + 1]
    s = np.zeros_like(t)
    s[1:] = t[1:] - t[:-1]  # diagonal entries survive since t[i, i] is padding zero
    return CoefficientTable(K=K, t=t, s=s)


def closed_form_s(schedule: Schedule) -> np.ndarray:
    """The equivalent direct recursion for s, built without any t table:

        s[i+1, j]   = ((alpha_i - 1)/alpha_{i+1}) * s[i, j]          j <= i-2
        s[i+1, i-1] = ((alpha_i - 1)/alpha_{i+1}) * (s[i, i-1] - 1)
        s[i+1, i]   = 1 + (2*alpha_i - 1)/alpha_{i+1}
    """
    K = schedule.K
    a = schedule.alpha
    s = np.zeros((K + 1, K))
    s[1, 0] = 1.0 + (2.0 * a[0] - 1.0) / a[1]
    for i in range(1, K):
        ratio = (a[i] - 1.0) / a[i + 1]
        if i >= 2:
            s[i + 1, : i - 1] = ratio * s[i, : i - 1]
        s[i + 1, i - 1] = ratio * (s[i, i - 1] - 1.0)
        s[i + 1, i] = 1.0 + (2.0 * a[i] - 1.0) / a[i + 1]
    return s


def telescoped_t(s: np.ndarray) -> np.ndarray:
    """Rebuild t from s by summing columns: t[i, j] = sum_{k<=i} s[k, j]."""
    return np.cumsum(s, axis=0)


def check_gamma_equals_tK(schedule: Schedule, table: CoefficientTable | None = None) -> float:
    """Max |gamma_j - t[K, j]|; zero in exact arithmetic for every K."""
    if table is None:
        table = build_coefficients(schedule)
    return float(np.max(np.abs(schedule.gamma - table.t[schedule.K, :])))


def reconstruct_iterates(
    x0: np.ndarray,
    grad_terms: list[np.ndarray],
    sub_terms: list[np.ndarray],
    schedule: Schedule,
    table: CoefficientTable,
    eta: float,
    i: int,
):
    """Closed-form (x_i, y_i) of the fixed-budget weighted solver from its
    stored per-iteration terms.

    grad_terms[j] is the (weighted) gradient used at step j and sub_terms[j]
    the subgradient residual certified by the prox that produced y_{j+1}:

        y_i = x0 - sum_{j<i} gamma_j * eta * (grad_terms[j] + sub_terms[j])
        x_i = x0 - sum_{j<i} t[i, j] * eta * (grad_terms[j] + sub_terms[j])
    """
    if not (1 <= i <= schedule.K):
        raise ValueError(f"i must be in [1, {schedule.K}], got {i}")
    if len(grad_terms) < i or len(sub_terms) < i:
        raise ValueError(f"need at least {i} stored terms, got {len(grad_terms)}/{len(sub_terms)}")
    y = np.array(x0, dtype=np.float64, copy=True)
    x = np.array(x0, dtype=np.float64, copy=True)
    for j in range(i):
        term = eta * (grad_terms[j] + sub_terms[j])
        y -= schedule.gamma[j] * term
        x -= table.t[i, j] * term
    return x, y


def dense_materialize(op: BlurOperator) -> np.ndarray:
    """Materialize the blur operator as an N x N matrix by probing with basis
    vectors.  Guarded to tiny grids; oracle use only."""
    h, w = op.shape
    n = h * w
    if n > DENSE_DIM_LIMIT:
        raise ValueError(f"dense materialization capped at {DENSE_DIM_LIMIT} pixels, got {n}")
    A = np.empty((n, n))
    e = np.zeros((h, w))
    for i in range(n):
        e.flat[i] = 1.0
        A[:, i] = op.forward(e).ravel()
        e.flat[i] = 0.0
    return A


def dense_weighting(op: BlurOperator, spec: WeightingSpec) -> np.ndarray:
    """The weighting operator as an explicit matrix: the literal alternating
    binomial sum over dense powers of M = eta * A^T A."""
    A = dense_materialize(op)
    eta = spec.resolve_eta(op)
    M = eta * (A.T @ A)
    W = np.zeros_like(M)
    P = np.eye(M.shape[0])  # M^(i-1)
    for i in range(1, spec.n + 1):
        W += math.comb(spec.n, i) * (-1.0) ** (i - 1) * P
        P = P @ M
    return W


def _tv_prox_dual_1d(v: np.ndarray, tau: float) -> np.ndarray:
    """Exact 1-D TV prox through its dual: a box-constrained least-squares
    problem in the difference variables, solved by an active-set method."""
    n = v.shape[0]
    if n == 1 or tau == 0.0:
        return v.copy()
    if n > _TV_DUAL_LIMIT:
        raise ValueError(f"TV dual oracle capped at signals of length {_TV_DUAL_LIMIT}, got {n}")
    D = np.zeros((n - 1, n))
    idx = np.arange(n - 1)
    D[idx, idx] = -1.0
    D[idx, idx + 1] = 1.0
    res = lsq_linear(D.T, v, bounds=(-tau, tau), method="bvls", tol=1e-14)
    return v - D.T @ res.x


def brute_force_prox(reg: Regularizer, step: float, v: np.ndarray) -> np.ndarray:
    """Reference prox, sharing no code with the production dispatcher."""
    if not (step > 0) or not math.isfinite(step):
        raise ValueError(f"step must be positive and finite, got {step!r}")
    v = np.asarray(v, dtype=np.float64)
    if reg.kind == "none" or reg.lam == 0.0:
        return v.copy()
    tau = step * reg.lam
    if reg.kind == "l1":
        return np.where(v > tau, v - tau, np.where(v < -tau, v + tau, 0.0))
    rows = np.atleast_2d(v)
    out = np.stack([_tv_prox_dual_1d(row, tau) for row in rows])
    return out.reshape(v.shape)


def tv_subgradient_violation(
    v: np.ndarray, y: np.ndarray, step: float, lam: float, jump_tol: float = 1e-9
) -> float:
    """How badly (v - y)/step fails to be a subgradient of lam*TV at y.

    For a 1-D signal the residual must be a backward difference of running
    sums bounded by lam, with the running sum pinned to -lam*sign(jump) at
    every jump of y and returning to zero at the end.  Returns the largest
    violation across those conditions (0 = certified optimal).
    """
    v = np.asarray(v, dtype=np.float64).ravel()
    y = np.asarray(y, dtype=np.float64).ravel()
    r = (v - y) / step
    if lam == 0.0:
        return float(np.max(np.abs(r))) if r.size else 0.0
    c = np.cumsum(r)  # c_j = -lam * w_j with |w| <= 1
    w = -c / lam
    worst = max(0.0, float(np.max(np.abs(w))) - 1.0)
    worst = max(worst, float(abs(w[-1])))  # residual must sum to zero
    jumps = np.diff(y)
    for j, d in enumerate(jumps):
        if abs(d) > jump_tol:
            worst = max(worst, float(abs(w[j] - np.sign(d))))
    return worst
