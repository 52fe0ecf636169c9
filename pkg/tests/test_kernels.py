"""Kernel generator tests: sizing rules, analytic tap values, normalization."""

import math

import numpy as np
import pytest

from deblurkit.kernels import Kernel, kernel_to_text, make_disk_kernel, make_gaussian_kernel


def _circle_antideriv(x):
    # integral of sqrt(1 - t^2) from 0 to x
    return (x * math.sqrt(1.0 - x * x) + math.asin(x)) / 2.0


def test_disk_sizing_rule():
    assert make_disk_kernel(0.4).shape == (1, 1)
    assert make_disk_kernel(0.5).shape == (1, 1)
    assert make_disk_kernel(0.6).shape == (3, 3)
    assert make_disk_kernel(1.0).shape == (3, 3)
    assert make_disk_kernel(7.0).shape == (15, 15)
    assert make_disk_kernel(12.0).shape == (25, 25)
    assert make_disk_kernel(14.5).shape == (29, 29)


def test_disk_radius_one_taps_match_analytic_areas():
    # For radius 1 the 3x3 coverage areas have closed forms: the center pixel
    # is fully covered, the edge and corner areas come from integrating the
    # circle over the pixel squares.  Total coverage is exactly pi.
    s3 = math.sqrt(3.0) / 2.0
    edge = (s3 - 0.5) + 2.0 * (_circle_antideriv(1.0) - _circle_antideriv(s3))
    corner = (_circle_antideriv(s3) - 0.5 * s3) - (_circle_antideriv(0.5) - 0.25)
    total = 1.0 + 4.0 * edge + 4.0 * corner
    assert abs(total - math.pi) < 1e-12

    k = make_disk_kernel(1.0).weights
    want = np.array(
        [
            [corner, edge, corner],
            [edge, 1.0, edge],
            [corner, edge, corner],
        ]
    ) / total
    assert np.max(np.abs(k - want)) < 2e-3


def test_disk_kernel_invariants():
    for radius in (0.4, 1.0, 2.0, 7.0, 12.5):
        k = make_disk_kernel(radius)
        w = k.weights
        assert abs(w.sum() - 1.0) < 1e-12
        assert (w >= 0).all()
        # 4-fold symmetry and centered anchor
        assert np.array_equal(w, w[::-1, :])
        assert np.array_equal(w, w[:, ::-1])
        assert np.array_equal(w, w.T)
        assert k.anchor == (w.shape[0] // 2, w.shape[1] // 2)
        assert w[k.anchor] == w.max()


def test_disk_kernel_rejects_bad_radius():
    for bad in (0.0, -1.0, math.inf, math.nan):
        with pytest.raises(ValueError):
            make_disk_kernel(bad)


def test_gaussian_taps_match_sampled_formula():
    size, sigma = 5, 1.5
    k = make_gaussian_kernel(size, sigma)
    w = k.weights
    assert abs(w.sum() - 1.0) < 1e-12
    c = size // 2
    # neighboring tap ratio is exp(-1/(2 sigma^2)) for a sampled gaussian
    assert abs(w[c, c + 1] / w[c, c] - math.exp(-1.0 / (2.0 * sigma**2))) < 1e-12
    assert abs(w[c + 1, c + 1] / w[c, c] - math.exp(-2.0 / (2.0 * sigma**2))) < 1e-12
    assert np.array_equal(w, w.T)


def test_gaussian_even_size_half_integer_offsets():
    k = make_gaussian_kernel(4, 1.0)
    w = k.weights
    # center falls between pixels: the four middle taps tie for the max
    assert w[1, 1] == w[1, 2] == w[2, 1] == w[2, 2] == w.max()
    assert k.anchor == (2, 2)


def test_gaussian_size_one_is_identity():
    k = make_gaussian_kernel(1, 2.0)
    assert np.array_equal(k.weights, np.ones((1, 1)))


def test_gaussian_rejects_bad_params():
    with pytest.raises(ValueError):
        make_gaussian_kernel(0, 1.0)
    for bad in (0.0, -2.0, math.inf, math.nan):
        with pytest.raises(ValueError):
            make_gaussian_kernel(5, bad)


def test_kernel_container_validation():
    with pytest.raises(ValueError):
        Kernel(np.ones(3))  # 1-D
    with pytest.raises(ValueError):
        Kernel(np.zeros((0, 2)))
    with pytest.raises(ValueError):
        Kernel(np.array([[1.0, math.nan]]))
    k = Kernel(np.ones((2, 5)) / 10.0)
    assert k.anchor == (1, 2)


def test_kernel_to_text_round_trips():
    k = make_disk_kernel(1.0)
    text = kernel_to_text(k)
    rows = [[float(tok) for tok in line.split()] for line in text.strip().splitlines()]
    assert np.array_equal(np.array(rows), k.weights)
    assert text.endswith("\n")
