"""Image quality metrics: PSNR and SSIM.

Two PSNR conventions are supported.  "standard" is the usual
10*log10(range^2 / mean squared error).  "paper_footnote" is the literal
20*log10(255^2 / E) with E the *sum* of squared differences and 255 as the
range constant regardless of the data's actual dynamic range; it is kept as
its own mode so published tables computed that way can be reproduced.
Identical images yield +inf in both modes.

SSIM defaults to the single-window (global statistics) form with unbiased
(N-1) moments; a conventional 11x11 Gaussian-window variant is available as
ssim_mode="windowed".
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.signal import convolve2d

__all__ = ["MetricsConfig", "psnr", "ssim"]

_PSNR_MODES = ("standard", "paper_footnote")
_SSIM_MODES = ("global", "windowed")


@dataclass(frozen=True)
class MetricsConfig:
    psnr_mode: str = "standard"
    dynamic_range: float = 1.0
    ssim_mode: str = "global"
    ssim_window: int = 11
    ssim_sigma: float = 1.5

    def __post_init__(self):
        if self.psnr_mode not in _PSNR_MODES:
            raise ValueError(f"psnr_mode must be one of {_PSNR_MODES}, got {self.psnr_mode!r}")
        if self.ssim_mode not in _SSIM_MODES:
            raise ValueError(f"ssim_mode must be one of {_SSIM_MODES}, got {self.ssim_mode!r}")
        if not (self.dynamic_range > 0) or not math.isfinite(self.dynamic_range):
            raise ValueError(f"dynamic_range must be positive and finite, got {self.dynamic_range!r}")
        if self.ssim_window < 2 or int(self.ssim_window) != self.ssim_window:
            raise ValueError(f"ssim_window must be an integer >= 2, got {self.ssim_window!r}")
        if not (self.ssim_sigma > 0):
            raise ValueError(f"ssim_sigma must be > 0, got {self.ssim_sigma!r}")


_DEFAULT = MetricsConfig()


def _pair(x_hat, x):
    a = np.asarray(x_hat, dtype=np.float64)
    b = np.asarray(x, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError(f"image shapes differ: {a.shape} vs {b.shape}")
    if a.size == 0:
        raise ValueError("empty images")
    return a, b


def psnr(x_hat: np.ndarray, x: np.ndarray, config: MetricsConfig = _DEFAULT) -> float:
    """Peak signal-to-noise ratio of x_hat against the reference x, in dB."""
    a, b = _pair(x_hat, x)
    d = a - b
    sq = float(np.vdot(d, d).real)
    if sq == 0.0:
        return math.inf
    if config.psnr_mode == "paper_footnote":
        return 20.0 * math.log10(255.0**2 / sq)
    return 10.0 * math.log10(config.dynamic_range**2 / (sq / a.size))


def _ssim_constants(config):
    c1 = (0.01 * config.dynamic_range) ** 2
    c2 = (0.03 * config.dynamic_range) ** 2
    return c1, c2


def ssim(x_hat: np.ndarray, x: np.ndarray, config: MetricsConfig = _DEFAULT) -> float:
    """Structural similarity index of x_hat against the reference x."""
    a, b = _pair(x_hat, x)
    if config.ssim_mode == "windowed":
        return _ssim_windowed(a, b, config)
    return _ssim_global(a, b, config)


def _ssim_global(a, b, config):
    c1, c2 = _ssim_constants(config)
    n = a.size
    if n < 2:
        raise ValueError("global SSIM needs at least 2 pixels")
    ua = float(a.mean())
    ub = float(b.mean())
    da = a - ua
    db = b - ub
    va = float(np.vdot(da, da).real) / (n - 1)
    vb = float(np.vdot(db, db).real) / (n - 1)
    cab = float(np.vdot(da, db).real) / (n - 1)
    return ((2 * ua * ub + c1) * (2 * cab + c2)) / ((ua**2 + ub**2 + c1) * (va + vb + c2))


def _gaussian_window(size, sigma):
    d = np.arange(size, dtype=np.float64) - (size - 1) / 2.0
    g = np.exp(-(d[:, None] ** 2 + d[None, :] ** 2) / (2.0 * sigma**2))
    return g / g.sum()


def _ssim_windowed(a, b, config):
    size = config.ssim_window
    if a.ndim != 2 or min(a.shape) < size:
        raise ValueError(f"windowed SSIM needs a 2-D image at least {size}x{size}")
    c1, c2 = _ssim_constants(config)
    w = _gaussian_window(size, config.ssim_sigma)
    # Weighted local moments over fully-covered windows only.
    mu_a = convolve2d(a, w, mode="valid")
    mu_b = convolve2d(b, w, mode="valid")
    s_aa = convolve2d(a * a, w, mode="valid") - mu_a**2
    s_bb = convolve2d(b * b, w, mode="valid") - mu_b**2
    s_ab = convolve2d(a * b, w, mode="valid") - mu_a * mu_b
    num = (2 * mu_a * mu_b + c1) * (2 * s_ab + c2)
    den = (mu_a**2 + mu_b**2 + c1) * (s_aa + s_bb + c2)
    return float(np.mean(num / den))
