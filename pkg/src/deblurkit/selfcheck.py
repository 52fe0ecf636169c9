"""The `verify` subcommand's oracle suite.

Each check compares a fast path against an independent recomputation and
reports its worst deviation next to the tolerance it must stay under.  The
corrupted-schedule control deliberately breaks one input to prove the suite
can actually fail.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .kernels import Kernel
from .operators import WeightingSpec, apply_weighting, build_operator
from .prox import Regularizer, prox, soft_threshold, tv1d_prox
from .schedules import Schedule, build_schedule
from .solvers import Problem, SolverConfig, run_ioptista
from .verification import (
    build_coefficients,
    brute_force_prox,
    check_gamma_equals_tK,
    closed_form_s,
    dense_weighting,
    reconstruct_iterates,
    telescoped_t,
)

__all__ = ["CheckResult", "run_selfcheck"]


@dataclass(frozen=True)
class CheckResult:
    name: str
    worst: float
    tolerance: float
    passed: bool


def _result(name, worst, tolerance):
    worst = float(worst)
    return CheckResult(name, worst, tolerance, bool(worst <= tolerance))


def _random_kernel(rng, shape=(3, 3)):
    w = rng.uniform(0.05, 1.0, size=shape)
    return Kernel(w / w.sum())


def _random_problem(rng, shape=(8, 8), kshape=(3, 3)):
    op = build_operator(_random_kernel(rng, kshape), shape)
    return Problem(op, rng.uniform(0.0, 1.0, size=shape))


def _check_schedule_terminal_row(corrupt=False):
    worst = 0.0
    for K in range(1, 301):
        sched = build_schedule(K)
        if corrupt and K == 40:
            gamma = sched.gamma.copy()
            gamma[0] += 1e-3
            sched = Schedule(K=K, alpha=sched.alpha, gamma=gamma)
        worst = max(worst, check_gamma_equals_tK(sched))
    name = "schedule-terminal-row" + (" (corrupted control)" if corrupt else "")
    return _result(name, worst, 1e-8)


def _check_coefficient_recurrences():
    sched = build_schedule(100)
    table = build_coefficients(sched)
    s2 = closed_form_s(sched)
    worst = np.max(np.abs(table.s - s2))
    worst = max(worst, np.max(np.abs(telescoped_t(table.s) - table.t)))
    return _result("coefficient-recurrences", worst, 1e-12)


def _check_weighting_equivalence(rng):
    op = build_operator(_random_kernel(rng), (12, 12))
    g = rng.normal(0.0, 1.0, size=(12, 12))
    scale = np.max(np.abs(g))
    worst = 0.0
    for n in (1, 2, 4, 8, 14):
        spec = WeightingSpec(n=n)
        horner = apply_weighting(op, spec, g, method="horner")
        spectral = apply_weighting(op, spec, g, method="spectral")
        dense = (dense_weighting(op, spec) @ g.ravel()).reshape(op.shape)
        ref = max(scale, float(np.max(np.abs(horner))))
        worst = max(
            worst,
            float(np.max(np.abs(horner - spectral))) / ref,
            float(np.max(np.abs(horner - dense))) / ref,
        )
    return _result("weighting-equivalence", worst, 1e-10)


def _check_operator_adjoint(rng, trials):
    worst = 0.0
    for kshape in ((3, 3), (5, 4)):
        op = build_operator(_random_kernel(rng, kshape), (11, 13))
        for _ in range(trials):
            u = rng.normal(size=op.shape)
            v = rng.normal(size=op.shape)
            lhs = float(np.vdot(op.forward(u), v).real)
            rhs = float(np.vdot(u, op.adjoint(v)).real)
            worst = max(worst, abs(lhs - rhs) / (1.0 + abs(lhs)))
    return _result("operator-adjoint", worst, 1e-9)


def _direct_circular_conv(x, kernel):
    h, w = x.shape
    kh, kw = kernel.shape
    ay, ax = kernel.anchor
    out = np.zeros_like(x)
    for i in range(h):
        for j in range(w):
            acc = 0.0
            for p in range(kh):
                for q in range(kw):
                    acc += kernel.weights[p, q] * x[(i - (p - ay)) % h, (j - (q - ax)) % w]
            out[i, j] = acc
    return out


def _check_forward_vs_direct(rng):
    worst = 0.0
    for shape, kshape in (((8, 8), (3, 3)), ((12, 7), (5, 4)), ((9, 9), (1, 1))):
        kernel = Kernel(rng.normal(size=kshape))
        op = build_operator(kernel, shape)
        x = rng.normal(size=shape)
        worst = max(worst, float(np.max(np.abs(op.forward(x) - _direct_circular_conv(x, kernel)))))
    return _result("forward-vs-direct-sum", worst, 1e-10)


def _check_tv_prox_vs_dual(rng, trials):
    worst = 0.0
    for _ in range(trials * 10):
        n = int(rng.integers(2, 7))
        v = rng.normal(0.0, 2.0, size=n)
        lam = float(rng.choice([1e-3, 0.1, 1.0, 10.0]))
        got = prox(Regularizer("tv1d", lam), 1.0, v)
        want = brute_force_prox(Regularizer("tv1d", lam), 1.0, v)
        worst = max(worst, float(np.max(np.abs(got - want))))
    return _result("tv-prox-vs-dual", worst, 1e-6)


def _check_tv_prox_mean_shift(rng, trials):
    worst = 0.0
    for _ in range(trials):
        v = rng.normal(0.0, 1.0, size=(4, 257))
        out = tv1d_prox(v, 0.3)
        worst = max(worst, float(np.max(np.abs(out.mean(axis=1) - v.mean(axis=1)))))
    return _result("tv-prox-mean-shift", worst, 1e-12)


def _check_soft_threshold_formula(rng, trials):
    worst = 0.0
    for _ in range(trials):
        v = rng.normal(0.0, 3.0, size=64)
        tau = float(rng.uniform(0.0, 2.0))
        got = soft_threshold(v, tau)
        want = brute_force_prox(Regularizer("l1", tau), 1.0, v)
        worst = max(worst, float(np.max(np.abs(got - want))))
    return _result("soft-threshold-formula", worst, 1e-15)


def _check_budget_iterate_identity(rng):
    worst = 0.0
    for reg in (Regularizer("l1", 1e-3), Regularizer("tv1d", 1e-3)):
        for K in (1, 5, 20):
            problem = _random_problem(rng)
            config = SolverConfig(
                method="ioptista", reg=reg, weighting_n=4,
                max_iters=K, max_seconds=1e9, tol_threshold=1e-300,
            )
            trace = run_ioptista(problem, config)
            dev = np.max(np.abs(trace.final_x - trace.final_y))
            worst = max(worst, float(dev / (1.0 + np.max(np.abs(trace.final_x)))))
    return _result("budget-iterate-identity", worst, 1e-9)


def _check_iterate_reconstruction(rng):
    worst = 0.0
    K = 10
    sched = build_schedule(K)
    table = build_coefficients(sched)
    for reg in (Regularizer("l1", 1e-3), Regularizer("tv1d", 1e-3)):
        problem = _random_problem(rng)
        eta = 1.0 / problem.op.lipschitz()
        config = SolverConfig(
            method="ioptista", reg=reg, weighting_n=2,
            max_iters=K, max_seconds=1e9, tol_threshold=1e-300,
        )
        trace = run_ioptista(problem, config, keep_iterates=True, keep_terms=True)
        x0 = np.zeros(problem.op.shape)
        for i in range(1, K + 1):
            xi, yi = reconstruct_iterates(
                x0, trace.grad_terms, trace.sub_terms, sched, table, eta, i
            )
            worst = max(worst, float(np.max(np.abs(xi - trace.xs[i]))))
            worst = max(worst, float(np.max(np.abs(yi - trace.ys[i]))))
    return _result("iterate-reconstruction", worst, 1e-8)


def run_selfcheck(seed: int = 0, trials: int = 20, inject_corruption: bool = False):
    """Run every check; returns the list of CheckResults (all must pass)."""
    rng = np.random.default_rng(seed)
    trials = max(1, int(trials))
    return [
        _check_schedule_terminal_row(corrupt=inject_corruption),
        _check_coefficient_recurrences(),
        _check_weighting_equivalence(rng),
        _check_operator_adjoint(rng, trials),
        _check_forward_vs_direct(rng),
        _check_tv_prox_vs_dual(rng, trials),
        _check_tv_prox_mean_shift(rng, trials),
        _check_soft_threshold_formula(rng, trials),
        _check_budget_iterate_identity(rng),
        _check_iterate_reconstruction(rng),
    ]
