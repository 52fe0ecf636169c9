"""Metric tests: PSNR/SSIM conventions against independent formulas."""

import math

import numpy as np
import pytest

from deblurkit.metrics import MetricsConfig, psnr, ssim


def _pairs(seed=0, shape=(24, 24), count=4):
    rng = np.random.default_rng(seed)
    return [(rng.uniform(size=shape), rng.uniform(size=shape)) for _ in range(count)]


def test_psnr_identical_images_is_inf():
    x = np.random.default_rng(1).uniform(size=(8, 8))
    assert psnr(x, x) == math.inf
    assert psnr(x, x, MetricsConfig(psnr_mode="paper_footnote")) == math.inf


def test_psnr_standard_formula():
    for a, b in _pairs(2):
        mse = np.mean((a - b) ** 2)
        want = 10.0 * math.log10(1.0 / mse)
        assert abs(psnr(a, b) - want) < 1e-10


def test_psnr_log_sum_convention():
    # the alternate mode is 20*log10(255^2 / sum of squared differences)
    for a, b in _pairs(3):
        ss = np.sum((a - b) ** 2)
        want = 20.0 * math.log10(255.0**2 / ss)
        got = psnr(a, b, MetricsConfig(psnr_mode="paper_footnote"))
        assert abs(got - want) < 1e-10


def test_psnr_dynamic_range_shift():
    a, b = _pairs(4)[0]
    lo = psnr(a, b, MetricsConfig(dynamic_range=1.0))
    hi = psnr(a, b, MetricsConfig(dynamic_range=255.0))
    assert abs(hi - lo - 20.0 * math.log10(255.0)) < 1e-10


def test_ssim_identical_images_is_exactly_one():
    x = np.random.default_rng(5).uniform(size=(16, 16))
    assert ssim(x, x) == 1.0
    assert ssim(x, x, MetricsConfig(ssim_mode="windowed")) == 1.0


def test_ssim_global_formula():
    c1, c2 = 0.01**2, 0.03**2
    for a, b in _pairs(6):
        ua, ub = a.mean(), b.mean()
        va, vb = a.var(ddof=1), b.var(ddof=1)
        cab = np.sum((a - ua) * (b - ub)) / (a.size - 1)
        want = ((2 * ua * ub + c1) * (2 * cab + c2)) / ((ua**2 + ub**2 + c1) * (va + vb + c2))
        assert abs(ssim(a, b) - want) < 1e-10


def test_ssim_windowed_matches_direct_window_loop():
    rng = np.random.default_rng(7)
    a = rng.uniform(size=(16, 16))
    b = np.clip(a + rng.normal(0.0, 0.1, size=(16, 16)), 0.0, 1.0)
    cfg = MetricsConfig(ssim_mode="windowed", ssim_window=11, ssim_sigma=1.5)

    d = np.arange(11.0) - 5.0
    w = np.exp(-(d[:, None] ** 2 + d[None, :] ** 2) / (2.0 * 1.5**2))
    w /= w.sum()
    c1, c2 = 0.01**2, 0.03**2
    vals = []
    for i in range(16 - 10):
        for j in range(16 - 10):
            pa = a[i : i + 11, j : j + 11]
            pb = b[i : i + 11, j : j + 11]
            ma, mb = (w * pa).sum(), (w * pb).sum()
            saa = (w * pa * pa).sum() - ma * ma
            sbb = (w * pb * pb).sum() - mb * mb
            sab = (w * pa * pb).sum() - ma * mb
            vals.append(
                ((2 * ma * mb + c1) * (2 * sab + c2))
                / ((ma**2 + mb**2 + c1) * (saa + sbb + c2))
            )
    assert abs(ssim(a, b, cfg) - np.mean(vals)) < 1e-10


def test_ssim_symmetry_and_range():
    for a, b in _pairs(8):
        assert abs(ssim(a, b) - ssim(b, a)) < 1e-14
        assert -1.0 <= ssim(a, b) <= 1.0


def test_metrics_validate_shapes():
    a = np.zeros((4, 4))
    with pytest.raises(ValueError):
        psnr(a, np.zeros((4, 5)))
    with pytest.raises(ValueError):
        ssim(a, np.zeros((5, 4)))
    with pytest.raises(ValueError):
        psnr(np.zeros((0, 4)), np.zeros((0, 4)))


def test_windowed_ssim_needs_coverage():
    a = np.zeros((8, 8))
    with pytest.raises(ValueError):
        ssim(a, a, MetricsConfig(ssim_mode="windowed", ssim_window=11))


def test_config_validation():
    with pytest.raises(ValueError):
        MetricsConfig(psnr_mode="rmse")
    with pytest.raises(ValueError):
        MetricsConfig(ssim_mode="local")
    with pytest.raises(ValueError):
        MetricsConfig(dynamic_range=0.0)
    with pytest.raises(ValueError):
        MetricsConfig(ssim_window=1)
    with pytest.raises(ValueError):
        MetricsConfig(ssim_sigma=0.0)
