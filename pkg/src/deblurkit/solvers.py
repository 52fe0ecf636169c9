"""The proximal-gradient solver family.

Four base methods (ista, fista, pogm, optista) and their gradient-weighted
counterparts (iista, ifista, ioptista, moptista) that replace grad f with
W_n grad f inside the update.  All solvers start from x_0 = 0, use the
constant step 1/L, and share the same stopping logic:

* Tol = 0.5*||Ax - b||^2 is checked against the threshold after every
  x-update (including the initial iterate),
* the wall-clock budget is checked once per iteration (coarse),
* a run is flagged diverged and stopped as soon as Tol goes non-finite or
  exceeds 1e6 times its initial value.

Solvers never clamp iterates to the displayable range.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from .operators import BlurOperator, WeightingSpec, grad_f, weighting_transfer
from .prox import Regularizer, prox, subgradient_residual
from .schedules import build_schedule, fista_alpha_next

__all__ = [
    "Problem",
    "SolverConfig",
    "RunTrace",
    "METHODS",
    "WEIGHTED_METHODS",
    "evaluate_tol",
    "evaluate_objective",
    "run",
    "run_ista",
    "run_iista",
    "run_fista",
    "run_ifista",
    "run_pogm",
    "run_optista",
    "run_ioptista",
    "run_moptista",
]

DIVERGENCE_FACTOR = 1e6

WEIGHTED_METHODS = ("iista", "ifista", "ioptista", "moptista")
UNWEIGHTED_METHODS = ("ista", "fista", "pogm", "optista")


@dataclass(frozen=True)
class Problem:
    """A deblurring instance: operator plus observed (blurred, noisy) image."""

    op: BlurOperator
    b: np.ndarray

    def __post_init__(self):
        b = np.asarray(self.b, dtype=np.float64)
        if b.shape != self.op.shape:
            raise ValueError(f"observation shape {b.shape} != operator shape {self.op.shape}")
        if not np.all(np.isfinite(b)):
            raise ValueError("observation contains non-finite entries")
        object.__setattr__(self, "b", b)


@dataclass(frozen=True)
class SolverConfig:
    method: str
    reg: Regularizer = Regularizer()
    weighting_n: int = 1
    max_iters: int = 300
    max_seconds: float = 20.0
    tol_threshold: float = 1e-4

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}, expected one of {sorted(METHODS)}")
        n = self.weighting_n
        if int(n) != n or n < 1:
            raise ValueError(f"weighting_n must be an integer >= 1, got {n!r}")
        # The weighting order is meaningless for the base methods.
        object.__setattr__(self, "weighting_n", 1 if self.method in UNWEIGHTED_METHODS else int(n))
        if int(self.max_iters) != self.max_iters or self.max_iters < 1:
            raise ValueError(f"max_iters must be an integer >= 1, got {self.max_iters!r}")
        object.__setattr__(self, "max_iters", int(self.max_iters))
        if not (self.max_seconds > 0):
            raise ValueError(f"max_seconds must be > 0, got {self.max_seconds!r}")
        t = float(self.tol_threshold)
        if not math.isfinite(t) or t <= 0:
            raise ValueError(f"tol_threshold must be positive and finite, got {self.tol_threshold!r}")
        object.__setattr__(self, "tol_threshold", t)


@dataclass
class RunTrace:
    """Per-iteration record of one solver run.

    ``iterations[i]`` indexes the iterate whose Tol/objective/elapsed sit at
    position i; entry 0 is the all-zero initial iterate.  The optional
    history fields are only populated when the runner was asked to keep them.
    """

    method: str
    weighting_n: int
    iterations: list[int] = field(default_factory=list)
    tol: list[float] = field(default_factory=list)
    objective: list[float] = field(default_factory=list)
    elapsed: list[float] = field(default_factory=list)
    final_x: np.ndarray | None = None
    termination: str = "max_iters"
    diverged: bool = False
    final_y: np.ndarray | None = None
    xs: list[np.ndarray] | None = None
    ys: list[np.ndarray] | None = None
    grad_terms: list[np.ndarray] | None = None
    sub_terms: list[np.ndarray] | None = None


def evaluate_tol(problem: Problem, x: np.ndarray) -> float:
    """Tol(x) = 0.5 * ||Ax - b||^2."""
    r = problem.op.forward(x) - problem.b
    return 0.5 * float(np.vdot(r, r).real)


def evaluate_objective(problem: Problem, reg: Regularizer, x: np.ndarray) -> float:
    """phi(x) = 0.5*||Ax - b||^2 + h(x)."""
    return evaluate_tol(problem, x) + reg.value(x)


class _Recorder:
    """Accumulates the per-iteration trace and decides when to stop."""

    def __init__(self, problem, config, on_iterate):
        self.problem = problem
        self.config = config
        self.on_iterate = on_iterate
        self.iterations: list[int] = []
        self.tol: list[float] = []
        self.objective: list[float] = []
        self.elapsed: list[float] = []
        self.tol0: float | None = None
        self.t0 = time.perf_counter()

    def evaluate(self, x):
        r = self.problem.op.forward(x) - self.problem.b
        t = 0.5 * float(np.vdot(r, r).real)
        return t, t + self.config.reg.value(x)

    def record(self, k, x, tol=None, obj=None):
        """Append one row; returns a termination reason or None to continue."""
        if tol is None:
            tol, obj = self.evaluate(x)
        self.iterations.append(k)
        self.tol.append(tol)
        self.objective.append(obj)
        self.elapsed.append(time.perf_counter() - self.t0)
        if self.on_iterate is not None:
            self.on_iterate(k, x)
        if self.tol0 is None:
            self.tol0 = tol
        if not math.isfinite(tol) or tol > DIVERGENCE_FACTOR * self.tol0:
            return "diverged"
        if tol <= self.config.tol_threshold:
            return "tolerance"
        return None

    def out_of_time(self):
        return time.perf_counter() - self.t0 > self.config.max_seconds

    def build(self, config, x, stop, **extras):
        termination = stop if stop is not None else "max_iters"
        return RunTrace(
            method=config.method,
            weighting_n=config.weighting_n,
            iterations=self.iterations,
            tol=self.tol,
            objective=self.objective,
            elapsed=self.elapsed,
            final_x=x,
            termination=termination,
            diverged=termination == "diverged",
            **extras,
        )


def _weighted_grad_fn(op: BlurOperator, n: int):
    """Returns g -> W_n g (spectral application); identity passthrough at n=1."""
    if n == 1:
        return lambda g: g
    w = weighting_transfer(op, WeightingSpec(n=n))
    return lambda g: np.fft.ifft2(np.fft.fft2(g) * w).real


def run_ista(problem, config, on_iterate=None, keep_iterates=False):
    return _run_ista_like(problem, config, weight_n=1, on_iterate=on_iterate, keep_iterates=keep_iterates)


def run_iista(problem, config, on_iterate=None, keep_iterates=False):
    return _run_ista_like(
        problem, config, weight_n=config.weighting_n, on_iterate=on_iterate, keep_iterates=keep_iterates
    )


def _run_ista_like(problem, config, weight_n, on_iterate, keep_iterates):
    op, b, reg = problem.op, problem.b, config.reg
    eta = 1.0 / op.lipschitz()
    weight = _weighted_grad_fn(op, weight_n)
    x = np.zeros(op.shape)
    xs = [x.copy()] if keep_iterates else None
    rec = _Recorder(problem, config, on_iterate)
    stop = rec.record(0, x)
    k = 0
    while stop is None and k < config.max_iters:
        if rec.out_of_time():
            stop = "max_time"
            break
        g = weight(grad_f(op, b, x))
        x = prox(reg, eta, x - eta * g)
        if keep_iterates:
            xs.append(x.copy())
        k += 1
        stop = rec.record(k, x)
    return rec.build(config, x, stop, xs=xs)


def run_fista(problem, config, on_iterate=None, keep_iterates=False):
    return _run_fista_like(problem, config, weight_n=1, on_iterate=on_iterate, keep_iterates=keep_iterates)


def run_ifista(problem, config, on_iterate=None, keep_iterates=False):
    return _run_fista_like(
        problem, config, weight_n=config.weighting_n, on_iterate=on_iterate, keep_iterates=keep_iterates
    )


def _run_fista_like(problem, config, weight_n, on_iterate, keep_iterates):
    op, b, reg = problem.op, problem.b, config.reg
    eta = 1.0 / op.lipschitz()
    weight = _weighted_grad_fn(op, weight_n)
    x = np.zeros(op.shape)
    x_prev = x
    y = x
    alpha = 1.0
    xs = [x.copy()] if keep_iterates else None
    rec = _Recorder(problem, config, on_iterate)
    stop = rec.record(0, x)
    k = 0
    while stop is None and k < config.max_iters:
        if rec.out_of_time():
            stop = "max_time"
            break
        g = weight(grad_f(op, b, y))
        x = prox(reg, eta, y - eta * g)
        alpha_next = fista_alpha_next(alpha)
        # alpha_1 = 1 makes the first momentum term vanish (x_{-1} = x_0).
        y = x + ((alpha - 1.0) / alpha_next) * (x - x_prev)
        x_prev = x
        alpha = alpha_next
        if keep_iterates:
            xs.append(x.copy())
        k += 1
        stop = rec.record(k, x)
    return rec.build(config, x, stop, xs=xs)


def run_pogm(problem, config, on_iterate=None, keep_iterates=False):
    """Proximal optimized gradient method: prox at x_k, then a momentum plus
    an extra correction term (alpha_k/alpha_{k+1})(y_{k+1} - x_k)."""
    op, b, reg = problem.op, problem.b, config.reg
    eta = 1.0 / op.lipschitz()
    x = np.zeros(op.shape)
    y = x
    alpha = 1.0
    xs = [x.copy()] if keep_iterates else None
    rec = _Recorder(problem, config, on_iterate)
    stop = rec.record(0, x)
    k = 0
    while stop is None and k < config.max_iters:
        if rec.out_of_time():
            stop = "max_time"
            break
        g = grad_f(op, b, x)
        y_new = prox(reg, eta, x - eta * g)
        alpha_next = fista_alpha_next(alpha)
        x = (
            y_new
            + ((alpha - 1.0) / alpha_next) * (y_new - y)
            + (alpha / alpha_next) * (y_new - x)
        )
        y = y_new
        alpha = alpha_next
        if keep_iterates:
            xs.append(x.copy())
        k += 1
        stop = rec.record(k, x)
    return rec.build(config, x, stop, xs=xs)


def run_optista(problem, config, on_iterate=None, keep_iterates=False):
    return _run_optista_like(
        problem, config, weight_n=1, monotone=False, on_iterate=on_iterate,
        keep_iterates=keep_iterates, keep_terms=False,
    )


def run_ioptista(problem, config, on_iterate=None, keep_iterates=False, keep_terms=False):
    return _run_optista_like(
        problem, config, weight_n=config.weighting_n, monotone=False, on_iterate=on_iterate,
        keep_iterates=keep_iterates, keep_terms=keep_terms,
    )


def run_moptista(problem, config, on_iterate=None, keep_iterates=False):
    return _run_optista_like(
        problem, config, weight_n=config.weighting_n, monotone=True, on_iterate=on_iterate,
        keep_iterates=keep_iterates, keep_terms=False,
    )


def _run_optista_like(problem, config, weight_n, monotone, on_iterate, keep_iterates, keep_terms):
    """Fixed-budget three-sequence loop.

    The schedule is built for the full budget K; the y-step prox uses the
    scaled step gamma_k * eta.  With monotone=True the x-update is gated by
    a strict objective-decrease test (y and z always advance), which trades
    the x_K = y_K identity for guaranteed monotonicity.
    """
    op, b, reg = problem.op, problem.b, config.reg
    eta = 1.0 / op.lipschitz()
    weight = _weighted_grad_fn(op, weight_n)
    sched = build_schedule(config.max_iters)
    x = np.zeros(op.shape)
    y = x
    z = x
    xs = [x.copy()] if keep_iterates else None
    ys = [y.copy()] if keep_iterates else None
    grad_terms = [] if keep_terms else None
    sub_terms = [] if keep_terms else None
    rec = _Recorder(problem, config, on_iterate)
    stop = rec.record(0, x)
    obj_prev = rec.objective[-1]
    k = 0
    while stop is None and k < config.max_iters:
        if rec.out_of_time():
            stop = "max_time"
            break
        g = weight(grad_f(op, b, x))
        gamma = sched.gamma[k]
        step = gamma * eta
        v = y - step * g
        y_new = prox(reg, step, v)
        z_new = x + (y_new - y) / gamma
        a, a_next = sched.alpha[k], sched.alpha[k + 1]
        x_hat = (
            z_new
            + ((a - 1.0) / a_next) * (z_new - z)
            + (a / a_next) * (z_new - x)
        )
        if keep_terms:
            grad_terms.append(g.copy())
            sub_terms.append(subgradient_residual(reg, step, v, y_new))
        tol_new = obj_new = None
        if monotone:
            tol_hat, obj_hat = rec.evaluate(x_hat)
            if obj_hat < obj_prev:
                x = x_hat
                tol_new, obj_new = tol_hat, obj_hat
            else:
                tol_new, obj_new = rec.tol[-1], obj_prev
        else:
            x = x_hat
        y, z = y_new, z_new
        if keep_iterates:
            xs.append(x.copy())
            ys.append(y.copy())
        k += 1
        stop = rec.record(k, x, tol=tol_new, obj=obj_new)
        obj_prev = rec.objective[-1]
    return rec.build(
        config, x, stop, final_y=y, xs=xs, ys=ys, grad_terms=grad_terms, sub_terms=sub_terms
    )


METHODS = {
    "ista": run_ista,
    "iista": run_iista,
    "fista": run_fista,
    "ifista": run_ifista,
    "pogm": run_pogm,
    "optista": run_optista,
    "ioptista": run_ioptista,
    "moptista": run_moptista,
}


def run(problem: Problem, config: SolverConfig, **kwargs) -> RunTrace:
    """Dispatch to the configured method's runner."""
    return METHODS[config.method](problem, config, **kwargs)
