"""Tests of the oracle module itself: the checks must be able to fail."""

import numpy as np
import pytest

from deblurkit.kernels import Kernel, make_disk_kernel
from deblurkit.operators import WeightingSpec, apply_weighting, build_operator
from deblurkit.prox import Regularizer, prox, soft_threshold
from deblurkit.schedules import Schedule, build_schedule
from deblurkit.selfcheck import run_selfcheck
from deblurkit.verification import (
    DENSE_DIM_LIMIT,
    brute_force_prox,
    build_coefficients,
    check_gamma_equals_tK,
    closed_form_s,
    dense_materialize,
    dense_weighting,
    reconstruct_iterates,
    telescoped_t,
    tv_subgradient_violation,
)


def test_coefficient_table_internal_consistency():
    for K in (1, 2, 13, 30):
        sched = build_schedule(K)
        table = build_coefficients(sched)
        assert table.t.shape == (K + 1, K)
        assert np.max(np.abs(table.s - closed_form_s(sched))) < 1e-12
        assert np.max(np.abs(telescoped_t(table.s) - table.t)) < 1e-13


def test_terminal_row_reproduces_gamma():
    for K in (1, 5, 50, 120):
        assert check_gamma_equals_tK(build_schedule(K)) < 1e-10


def test_terminal_row_check_catches_corruption():
    sched = build_schedule(20)
    gamma = sched.gamma.copy()
    gamma[3] += 1e-4
    broken = Schedule(K=20, alpha=sched.alpha, gamma=gamma)
    assert check_gamma_equals_tK(broken) > 5e-5


def test_dense_materialize_matches_operator():
    rng = np.random.default_rng(0)
    op = build_operator(make_disk_kernel(1.0), (9, 7))
    A = dense_materialize(op)
    for _ in range(5):
        x = rng.normal(size=(9, 7))
        assert np.max(np.abs((A @ x.ravel()).reshape(9, 7) - op.forward(x))) < 1e-12
    # adjoint comes along for free
    y = rng.normal(size=(9, 7))
    assert np.max(np.abs((A.T @ y.ravel()).reshape(9, 7) - op.adjoint(y))) < 1e-12


def test_dense_materialize_refuses_large_grids():
    op = build_operator(make_disk_kernel(1.0), (17, 17))  # 289 > cap
    assert 17 * 17 > DENSE_DIM_LIMIT
    with pytest.raises(ValueError):
        dense_materialize(op)


def test_dense_weighting_order_one_is_identity():
    op = build_operator(make_disk_kernel(1.0), (6, 6))
    W = dense_weighting(op, WeightingSpec(n=1))
    assert np.max(np.abs(W - np.eye(36))) < 1e-12


def test_dense_weighting_matches_matrix_free():
    rng = np.random.default_rng(1)
    w = rng.uniform(0.05, 1.0, size=(3, 3))
    op = build_operator(Kernel(w / w.sum()), (6, 6))
    g = rng.normal(size=(6, 6))
    for n in (2, 5):
        spec = WeightingSpec(n=n)
        dense = (dense_weighting(op, spec) @ g.ravel()).reshape(6, 6)
        fast = apply_weighting(op, spec, g)
        assert np.max(np.abs(dense - fast)) < 1e-10


def test_brute_force_prox_l1_and_none():
    rng = np.random.default_rng(2)
    v = rng.normal(size=40)
    got = brute_force_prox(Regularizer("l1", 0.8), 0.5, v)
    assert np.array_equal(got, soft_threshold(v, 0.4))
    out = brute_force_prox(Regularizer(), 1.0, v)
    assert out is not v
    assert np.array_equal(out, v)
    with pytest.raises(ValueError):
        brute_force_prox(Regularizer("l1", 1.0), 0.0, v)


def test_brute_force_prox_tv_respects_length_cap():
    v = np.zeros(65)
    with pytest.raises(ValueError):
        brute_force_prox(Regularizer("tv1d", 0.1), 1.0, v)


def test_brute_force_prox_tv_on_matrix_rows():
    rng = np.random.default_rng(3)
    v = rng.normal(size=(3, 12))
    got = brute_force_prox(Regularizer("tv1d", 0.3), 1.0, v)
    want = prox(Regularizer("tv1d", 0.3), 1.0, v)
    assert got.shape == v.shape
    assert np.max(np.abs(got - want)) < 1e-6


def test_reconstruction_validates_arguments():
    sched = build_schedule(5)
    table = build_coefficients(sched)
    x0 = np.zeros((4, 4))
    terms = [np.zeros((4, 4))] * 5
    with pytest.raises(ValueError):
        reconstruct_iterates(x0, terms, terms, sched, table, 1.0, 0)
    with pytest.raises(ValueError):
        reconstruct_iterates(x0, terms, terms, sched, table, 1.0, 6)
    with pytest.raises(ValueError):
        reconstruct_iterates(x0, terms[:2], terms, sched, table, 1.0, 4)


def test_tv_subgradient_violation_flags_corruption():
    rng = np.random.default_rng(4)
    v = rng.normal(size=20)
    y = prox(Regularizer("tv1d", 0.5), 1.0, v)
    clean = tv_subgradient_violation(v, y, 1.0, 0.5)
    assert clean < 1e-9
    y_bad = y.copy()
    y_bad[7] += 0.05
    assert tv_subgradient_violation(v, y_bad, 1.0, 0.5) > 1e-3


def test_selfcheck_all_green():
    results = run_selfcheck(seed=0, trials=5)
    assert len(results) == 10
    for r in results:
        assert r.passed, f"{r.name}: worst={r.worst} tol={r.tolerance}"


def test_selfcheck_corruption_control_fails():
    results = run_selfcheck(seed=0, trials=2, inject_corruption=True)
    control = [r for r in results if "corrupted control" in r.name]
    assert len(control) == 1
    assert not control[0].passed
    others = [r for r in results if "corrupted control" not in r.name]
    assert all(r.passed for r in others)
