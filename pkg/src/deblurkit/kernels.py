"""Blur kernel generators (pillbox disk and Gaussian) and the Kernel container."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = ["Kernel", "make_disk_kernel", "make_gaussian_kernel", "kernel_to_text"]

# Subsamples per pixel side used for the disk area integration.
_DISK_SUPERSAMPLE = 64


@dataclass(frozen=True)
class Kernel:
    """A 2-D convolution kernel plus the anchor pixel used when the kernel is
    embedded at the origin of the image grid.

    Attributes
    ----------
    weights : np.ndarray
        (size_y, size_x) float64 tap matrix.
    anchor : tuple[int, int]
        (row, col) of the kernel center; floor(size/2) on each axis.
    """

    weights: np.ndarray
    anchor: tuple[int, int] = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=np.float64)
        if w.ndim != 2 or w.size == 0:
            raise ValueError("kernel weights must be a non-empty 2-D array")
        if not np.all(np.isfinite(w)):
            raise ValueError("kernel weights must be finite")
        object.__setattr__(self, "weights", w)
        if self.anchor is None:
            object.__setattr__(self, "anchor", (w.shape[0] // 2, w.shape[1] // 2))

    @property
    def shape(self) -> tuple[int, int]:
        return self.weights.shape


def make_disk_kernel(radius: float) -> Kernel:
    """Pillbox kernel: tap = fraction of the pixel square covered by the disk.

    The side follows the usual 2*ceil(radius - 0.5) + 1 sizing (so radius 0.4
    degenerates to the 1x1 identity, radius 7 gives 15x15).  Coverage is
    integrated by 64x64 midpoint supersampling per pixel and the taps are
    normalized to sum to 1.

    Parameters
    ----------
    radius : float
        Disk radius in pixels, > 0.

    Returns
    -------
    Kernel
    """
    radius = float(radius)
    if not math.isfinite(radius) or radius <= 0:
        raise ValueError(f"disk radius must be a positive finite number, got {radius!r}")
    half = math.ceil(radius - 0.5)
    size = 2 * half + 1
    if size == 1:
        return Kernel(np.ones((1, 1)))
    s = _DISK_SUPERSAMPLE
    # Midpoint offsets of every subsample along one axis, relative to the
    # kernel center (which sits on the middle pixel of an odd-sized grid).
    off = (np.arange(size * s) + 0.5) / s - 0.5 - half
    inside = (off[:, None] ** 2 + off[None, :] ** 2) <= radius**2
    taps = inside.reshape(size, s, size, s).sum(axis=(1, 3)).astype(np.float64)
    return Kernel(taps / taps.sum())


def make_gaussian_kernel(size: int, sigma: float) -> Kernel:
    """Sampled isotropic Gaussian on a size x size grid, normalized to sum 1.

    Offsets are taken from the grid center, so an even size puts the center
    between pixels (half-integer offsets).  The anchor used for embedding is
    floor(size/2) on each axis.
    """
    size = int(size)
    sigma = float(sigma)
    if size < 1:
        raise ValueError(f"gaussian kernel size must be >= 1, got {size}")
    if not math.isfinite(sigma) or sigma <= 0:
        raise ValueError(f"gaussian sigma must be a positive finite number, got {sigma!r}")
    if size == 1:
        return Kernel(np.ones((1, 1)))
    d = np.arange(size, dtype=np.float64) - (size - 1) / 2.0
    g = np.exp(-(d[:, None] ** 2 + d[None, :] ** 2) / (2.0 * sigma**2))
    return Kernel(g / g.sum())


def kernel_to_text(kernel: Kernel) -> str:
    """Plain-text matrix dump (one row per line, full double precision)."""
    lines = [" ".join(repr(float(v)) for v in row) for row in kernel.weights]
    return "\n".join(lines) + "\n"
