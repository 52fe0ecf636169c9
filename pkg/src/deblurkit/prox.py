"""Proximal maps and values of the supported regularizers.

Supported kinds: "none", "l1" (soft thresholding) and "tv1d" (anisotropic
1-D total variation applied independently to each image row).  The TV prox
is Condat's direct non-iterative algorithm: a single forward scan that
maintains a running lower/upper affine minorant/majorant of the taut string
and fuses samples into constant segments, emitting each segment as soon as a
jump is certified.  It is exact (up to roundoff) in at worst O(N^2), in
practice ~O(N).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "Regularizer",
    "prox",
    "l1_value",
    "tv_value",
    "soft_threshold",
    "tv1d_prox",
    "subgradient_residual",
]

_KINDS = ("none", "l1", "tv1d")


@dataclass(frozen=True)
class Regularizer:
    """Regularizer h(x) = lam * penalty(x); kind "none" ignores lam."""

    kind: str = "none"
    lam: float = 0.0

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown regularizer kind {self.kind!r}, expected one of {_KINDS}")
        lam = float(self.lam)
        if not math.isfinite(lam) or lam < 0:
            raise ValueError(f"lam must be finite and >= 0, got {self.lam!r}")
        object.__setattr__(self, "lam", lam)

    def value(self, x: np.ndarray) -> float:
        """h(x)."""
        if self.kind == "none" or self.lam == 0.0:
            return 0.0
        if self.kind == "l1":
            return self.lam * l1_value(x)
        return self.lam * tv_value(x)


def soft_threshold(v: np.ndarray, tau: float) -> np.ndarray:
    """Elementwise sign(v) * max(|v| - tau, 0)."""
    return np.sign(v) * np.maximum(np.abs(v) - tau, 0.0)


def l1_value(x: np.ndarray) -> float:
    return float(np.abs(x).sum())


def tv_value(x: np.ndarray) -> float:
    """Sum over rows of the 1-D total variation sum_i |x[i+1] - x[i]|."""
    x = np.atleast_2d(np.asarray(x, dtype=np.float64))
    if x.shape[1] < 2:
        return 0.0
    return float(np.abs(np.diff(x, axis=1)).sum())


def _tv1d_scan(y, lam, x):
    """Condat's direct 1-D TV denoising scan; writes the result into x."""
    n = y.shape[0]
    if n == 1 or lam == 0.0:
        x[:] = y
        return
    k = 0      # current sample
    k0 = 0     # first sample of the segment under construction
    km = 0     # last position where the lower bound was clipped
    kp = 0     # last position where the upper bound was clipped
    vmin = y[0] - lam
    vmax = y[0] + lam
    umin = lam
    umax = -lam
    last = n - 1
    while True:
        while k == last:
            if umin < 0.0:
                # Certified negative jump right after km: emit the segment
                # at the lower value and restart past it.  The upper-bound
                # state (vmax, kp) deliberately carries over.
                hi = km if km >= k0 else k0
                x[k0 : hi + 1] = vmin
                k0 = hi + 1
                km = k = k0
                vmin = y[k]
                umin = lam
                umax = y[k] + lam - vmax
            elif umax > 0.0:
                hi = kp if kp >= k0 else k0
                x[k0 : hi + 1] = vmax
                k0 = hi + 1
                kp = k = k0
                vmax = y[k]
                umax = -lam
                umin = y[k] - lam - vmin
            else:
                # Tail is flat: spread the residual slack over the segment.
                vmin += umin / (k - k0 + 1)
                x[k0 : last + 1] = vmin
                return
        umin += y[k + 1] - vmin
        umax += y[k + 1] - vmax
        if umin < -lam:
            # Lower string breaks: the segment [k0, km] is final at vmin.
            hi = km if km >= k0 else k0
            x[k0 : hi + 1] = vmin
            k0 = hi + 1
            km = kp = k = k0
            vmin = y[k]
            vmax = y[k] + 2.0 * lam
            umin = lam
            umax = -lam
        elif umax > lam:
            hi = kp if kp >= k0 else k0
            x[k0 : hi + 1] = vmax
            k0 = hi + 1
            km = kp = k = k0
            vmin = y[k] - 2.0 * lam
            vmax = y[k]
            umin = lam
            umax = -lam
        else:
            # No jump certified yet: fuse the sample into the segment and
            # re-center the bounds when their slack saturates.
            k += 1
            if umin >= lam:
                vmin += (umin - lam) / (k - k0 + 1)
                umin = lam
                km = k
            if umax <= -lam:
                vmax += (umax + lam) / (k - k0 + 1)
                umax = -lam
                kp = k


try:  # pragma: no cover - exercised implicitly when numba is installed
    from numba import njit

    _tv1d_scan = njit("void(float64[::1], float64, float64[::1])", cache=True)(_tv1d_scan)
except ImportError:  # pragma: no cover
    pass


def tv1d_prox(v: np.ndarray, tau: float) -> np.ndarray:
    """Exact prox of tau * TV acting on the last axis (rows) of v."""
    v = np.ascontiguousarray(np.atleast_2d(np.asarray(v, dtype=np.float64)))
    out = np.empty_like(v)
    for i in range(v.shape[0]):
        _tv1d_scan(v[i], float(tau), out[i])
    return out


def prox(reg: Regularizer, step: float, v: np.ndarray) -> np.ndarray:
    """argmin_y h(y) + ||y - v||^2 / (2*step) for h = reg, step > 0."""
    step = float(step)
    if not math.isfinite(step) or step <= 0:
        raise ValueError(f"prox step must be positive and finite, got {step!r}")
    v = np.asarray(v, dtype=np.float64)
    if not np.all(np.isfinite(v)):
        raise ValueError("prox input contains non-finite entries")
    if reg.kind == "none" or reg.lam == 0.0:
        return v.copy()
    tau = step * reg.lam
    if reg.kind == "l1":
        return soft_threshold(v, tau)
    out = tv1d_prox(v, tau)
    return out.reshape(v.shape)


def subgradient_residual(reg: Regularizer, step: float, v: np.ndarray, y: np.ndarray) -> np.ndarray:
    """(v - y)/step, the subgradient of h certified at y = prox(reg, step, v).

    Only meaningful when y actually came out of the matching prox call; this
    is the quantity the closed-form iterate reconstruction consumes.
    """
    step = float(step)
    if not math.isfinite(step) or step <= 0:
        raise ValueError(f"step must be positive and finite, got {step!r}")
    return (np.asarray(v, dtype=np.float64) - np.asarray(y, dtype=np.float64)) / step
