"""Blur operator and binomial weighting tests against independent oracles."""

import numpy as np
import pytest

from deblurkit.kernels import Kernel, make_disk_kernel, make_gaussian_kernel
from deblurkit.operators import (
    BlurOperator,
    WeightingSpec,
    add_gaussian_noise,
    apply_weighting,
    build_operator,
    grad_f,
    weighting_transfer,
)
from deblurkit.verification import dense_materialize, dense_weighting


def _direct_circular_conv(x, kernel):
    # quadruple loop reference, anchored exactly like the operator embedding
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


def test_forward_matches_direct_sum():
    rng = np.random.default_rng(5)
    cases = [((8, 8), (3, 3)), ((12, 7), (5, 4)), ((9, 9), (1, 1)), ((6, 10), (2, 3))]
    for shape, kshape in cases:
        kernel = Kernel(rng.normal(size=kshape))  # signed taps on purpose
        op = build_operator(kernel, shape)
        x = rng.normal(size=shape)
        got = op.forward(x)
        want = _direct_circular_conv(x, kernel)
        assert np.max(np.abs(got - want)) < 1e-10


def test_adjoint_inner_product_identity():
    rng = np.random.default_rng(6)
    worst = 0.0
    for kshape in ((3, 3), (5, 4), (1, 1)):
        w = rng.uniform(0.05, 1.0, size=kshape)
        op = build_operator(Kernel(w / w.sum()), (11, 13))
        for _ in range(100):
            u = rng.normal(size=op.shape)
            v = rng.normal(size=op.shape)
            lhs = float(np.vdot(op.forward(u), v).real)
            rhs = float(np.vdot(u, op.adjoint(v)).real)
            worst = max(worst, abs(lhs - rhs) / (1.0 + abs(lhs)))
    assert worst < 1e-9


def test_gram_is_adjoint_after_forward():
    rng = np.random.default_rng(7)
    op = build_operator(make_disk_kernel(2.0), (16, 16))
    x = rng.normal(size=(16, 16))
    assert np.array_equal(op.gram(x), op.adjoint(op.forward(x)))


def test_lipschitz_is_one_for_normalized_kernels():
    for kernel in (make_disk_kernel(7.0), make_gaussian_kernel(5, 1.5), make_disk_kernel(0.4)):
        op = build_operator(kernel, (32, 32))
        assert abs(op.lipschitz() - 1.0) < 1e-12


def test_lipschitz_matches_dense_spectral_norm():
    rng = np.random.default_rng(8)
    kernel = Kernel(rng.normal(size=(3, 3)))
    op = build_operator(kernel, (8, 8))
    A = dense_materialize(op)
    lam_max = np.linalg.eigvalsh(A.T @ A).max()
    assert abs(op.lipschitz() - lam_max) < 1e-10 * (1.0 + lam_max)


def test_grad_f_matches_definition():
    rng = np.random.default_rng(9)
    op = build_operator(make_disk_kernel(1.0), (10, 10))
    x = rng.normal(size=(10, 10))
    b = rng.normal(size=(10, 10))
    want = op.adjoint(op.forward(x) - b)
    assert np.array_equal(grad_f(op, b, x), want)


def test_operator_shape_validation():
    with pytest.raises(ValueError):
        build_operator(make_disk_kernel(7.0), (8, 8))  # 15x15 kernel does not fit
    with pytest.raises(ValueError):
        build_operator(make_disk_kernel(1.0), (0, 4))
    op = build_operator(make_disk_kernel(1.0), (8, 8))
    with pytest.raises(ValueError):
        op.forward(np.zeros((4, 4)))
    with pytest.raises(ValueError):
        apply_weighting(op, WeightingSpec(n=2), np.zeros((4, 4)))


def test_weighting_spec_validation():
    with pytest.raises(ValueError):
        WeightingSpec(n=0)
    with pytest.raises(ValueError):
        WeightingSpec(n=2.5)
    with pytest.raises(ValueError):
        WeightingSpec(n=2, eta=-1.0)
    with pytest.raises(ValueError):
        WeightingSpec(n=2, eta=float("nan"))
    spec = WeightingSpec(n=3)
    op = build_operator(make_disk_kernel(1.0), (8, 8))
    assert spec.resolve_eta(op) == 1.0 / op.lipschitz()
    assert WeightingSpec(n=3, eta=0.25).resolve_eta(op) == 0.25


def test_weighting_half_step_closed_form():
    # With M = 0.5 I (identity kernel scaled into eta) the order-2 operator is
    # W_2 = 2I - M = 1.5 I exactly.
    op = build_operator(Kernel(np.ones((1, 1))), (6, 6))
    spec = WeightingSpec(n=2, eta=0.5)  # M = 0.5 * A^T A = 0.5 I
    g = np.random.default_rng(10).normal(size=(6, 6))
    for method in ("horner", "spectral"):
        got = apply_weighting(op, spec, g, method=method)
        assert np.max(np.abs(got - 1.5 * g)) < 1e-12


def test_weighting_three_routes_agree():
    rng = np.random.default_rng(11)
    w = rng.uniform(0.05, 1.0, size=(3, 3))
    op = build_operator(Kernel(w / w.sum()), (12, 12))
    g = rng.normal(size=(12, 12))
    for n in (1, 2, 4, 8, 14):
        spec = WeightingSpec(n=n)
        horner = apply_weighting(op, spec, g, method="horner")
        spectral = apply_weighting(op, spec, g, method="spectral")
        dense = (dense_weighting(op, spec) @ g.ravel()).reshape(op.shape)
        ref = max(np.max(np.abs(g)), np.max(np.abs(horner)))
        assert np.max(np.abs(horner - spectral)) / ref < 1e-10
        assert np.max(np.abs(horner - dense)) / ref < 1e-10


def test_weighting_transfer_closed_form():
    # the geometric sum must equal (1 - (1-m)^n) / m away from m = 0
    op = build_operator(make_disk_kernel(2.0), (16, 16))
    eta = 1.0 / op.lipschitz()
    m = eta * np.abs(op.transfer) ** 2
    for n in (1, 3, 8):
        w = weighting_transfer(op, WeightingSpec(n=n))
        safe = m > 1e-8
        direct = (1.0 - (1.0 - m[safe]) ** n) / m[safe]
        assert np.max(np.abs(w[safe] - direct)) < 1e-8

    # two-tap average has an exact spectral zero at Nyquist; the geometric
    # sum must hit the continuity limit w(0) = n there, not blow up
    avg = build_operator(Kernel(np.array([[0.5, 0.5]])), (16, 16))
    m0 = np.abs(avg.transfer) ** 2 / avg.lipschitz()
    at_zero = np.isclose(m0, 0.0, atol=1e-15)
    assert at_zero.any()
    for n in (2, 7):
        w = weighting_transfer(avg, WeightingSpec(n=n))
        assert np.max(np.abs(w[at_zero] - n)) < 1e-12


def test_weighting_order_one_returns_untouched_copy():
    op = build_operator(make_disk_kernel(1.0), (8, 8))
    g = np.random.default_rng(12).normal(size=(8, 8))
    out = apply_weighting(op, WeightingSpec(n=1), g)
    assert out is not g
    assert np.array_equal(out, g)


def test_weighting_unknown_method_rejected():
    op = build_operator(make_disk_kernel(1.0), (8, 8))
    with pytest.raises(ValueError):
        apply_weighting(op, WeightingSpec(n=2), np.zeros((8, 8)), method="nope")


def test_noise_determinism_and_moments():
    rng_free = np.random.default_rng(13)
    x = rng_free.uniform(size=(64, 64))
    a = add_gaussian_noise(x, 1e-2, seed=42)
    b = add_gaussian_noise(x, 1e-2, seed=42)
    c = add_gaussian_noise(x, 1e-2, seed=43)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)
    noise = add_gaussian_noise(np.zeros((512, 512)), 1e-2, seed=1)
    assert abs(noise.mean()) < 1e-3
    assert abs(noise.var() / 1e-2 - 1.0) < 0.05


def test_noise_zero_variance_copies():
    x = np.ones((4, 4))
    out = add_gaussian_noise(x, 0.0, seed=0)
    assert out is not x
    assert np.array_equal(out, x)


def test_noise_rejects_bad_variance():
    for bad in (-1e-9, float("inf"), float("nan")):
        with pytest.raises(ValueError):
            add_gaussian_noise(np.zeros((2, 2)), bad, seed=0)
