"""Deterministic synthetic test images (the experiment corpus referenced by
published tables is not redistributable, so benchmarks run on these)."""

from __future__ import annotations

import numpy as np

from .kernels import make_disk_kernel
from .operators import BlurOperator

__all__ = ["GENERATOR_NAMES", "make_image"]

_CHECKER_PERIOD = 8


def _gradient(size, rng):
    col = np.linspace(0.0, 1.0, size)
    return np.tile(col, (size, 1))


def _checkerboard(size, rng):
    i, j = np.indices((size, size))
    return (((i // _CHECKER_PERIOD) + (j // _CHECKER_PERIOD)) % 2).astype(np.float64)


def _blobs(size, rng):
    # A handful of smooth Gaussian bumps plus one flat disk so the image has
    # genuine edges; everything is drawn from the seeded generator.
    i, j = np.indices((size, size), dtype=np.float64)
    img = np.zeros((size, size))
    for _ in range(6):
        cy, cx = rng.uniform(0.15 * size, 0.85 * size, size=2)
        sig = rng.uniform(size / 16.0, size / 6.0)
        amp = rng.uniform(0.4, 1.0)
        img += amp * np.exp(-((i - cy) ** 2 + (j - cx) ** 2) / (2.0 * sig**2))
    span = img.max() - img.min()
    img = (img - img.min()) / (span if span > 0 else 1.0)
    cy, cx = rng.uniform(0.25 * size, 0.75 * size, size=2)
    disk = (i - cy) ** 2 + (j - cx) ** 2 <= (size / 6.0) ** 2
    img[disk] = 0.9
    return img


def _starfield(size, rng):
    """Dark sky with speckle texture plus a few saturated disks.

    The speckle is synthesized directly in the frequency domain, confined to
    the slowest-recovering band of a radius-7 disk transfer (normalized power
    in (3e-5, 1e-4)).  Restoring that band is where the solver families
    separate most sharply, so the benchmark tables run on this image.  The
    texture is half-wave rectified rather than abs()-folded: folding would
    double every frequency and push the content out of the band.
    """
    if size < 15:
        raise ValueError(f"starfield needs size >= 15 so the disk fits, got {size}")
    op = BlurOperator(make_disk_kernel(7.0), (size, size))
    m = np.abs(op.transfer) ** 2 / op.lipschitz()
    phase = rng.uniform(0.0, 2.0 * np.pi, (size, size))
    spec = ((m > 3e-5) & (m < 1e-4)) * np.exp(1j * phase)
    tex = np.fft.ifft2(spec).real
    tex /= max(np.abs(tex).max(), np.finfo(np.float64).tiny)
    img = 0.01 + 0.8 * np.maximum(tex, 0.0)
    margin = min(30, size // 4)
    yy, xx = np.mgrid[0:size, 0:size]
    for _ in range(8):
        cy, cx = rng.integers(margin, size - margin, 2)
        r = rng.integers(3, 9)
        img[(yy - cy) ** 2 + (xx - cx) ** 2 <= r * r] += 0.2
    return np.clip(img, 0.0, 1.0)


_GENERATORS = {
    "gradient": _gradient,
    "checkerboard": _checkerboard,
    "blobs": _blobs,
    "starfield": _starfield,
}

GENERATOR_NAMES = tuple(sorted(_GENERATORS))


def make_image(name: str, size: int, seed: int = 0) -> np.ndarray:
    """Generate a size x size image in [0, 1]; deterministic in (name, size, seed)."""
    if name not in _GENERATORS:
        raise ValueError(f"unknown synthetic image {name!r}, expected one of {GENERATOR_NAMES}")
    size = int(size)
    if size < 1:
        raise ValueError(f"image size must be >= 1, got {size}")
    return _GENERATORS[name](size, np.random.default_rng(seed))
