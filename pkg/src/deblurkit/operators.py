"""Circular-convolution blur operator, diagonalized by the 2-D DFT, and the
binomial weighting operator W_n = sum_{i=1..n} C(n,i) (-1)^(i-1) M^(i-1) with
M = eta * A^T A.

The operator never materializes a matrix: forward/adjoint are two FFTs each,
and W_n is applied either by a Horner recursion over n-1 applications of M or
through its per-frequency transfer (both paths agree to roundoff; tests pin
them against an explicit dense construction as well).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .kernels import Kernel

__all__ = [
    "BlurOperator",
    "WeightingSpec",
    "build_operator",
    "grad_f",
    "apply_weighting",
    "weighting_transfer",
    "add_gaussian_noise",
]


class BlurOperator:
    """Circular (periodic boundary) convolution with a fixed kernel.

    Parameters
    ----------
    kernel : Kernel
        Tap matrix plus anchor; must fit inside ``shape``.
    shape : tuple[int, int]
        (height, width) of the image grid the operator acts on.
    """

    def __init__(self, kernel: Kernel, shape: tuple[int, int]):
        h, w = int(shape[0]), int(shape[1])
        kh, kw = kernel.shape
        if h < 1 or w < 1:
            raise ValueError(f"image shape must be positive, got {(h, w)}")
        if kh > h or kw > w:
            raise ValueError(
                f"kernel {kh}x{kw} does not fit inside a {h}x{w} image"
            )
        self.kernel = kernel
        self.shape = (h, w)
        embedded = np.zeros((h, w))
        embedded[:kh, :kw] = kernel.weights
        # Shift the anchor tap to the origin so index arithmetic is pure
        # circular convolution.
        embedded = np.roll(embedded, (-kernel.anchor[0], -kernel.anchor[1]), axis=(0, 1))
        self.transfer = np.fft.fft2(embedded)
        self._power = np.abs(self.transfer) ** 2

    def _check(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        if x.shape != self.shape:
            raise ValueError(f"expected array of shape {self.shape}, got {x.shape}")
        return x

    def forward(self, x: np.ndarray) -> np.ndarray:
        """A x: blur the image."""
        x = self._check(x)
        return np.fft.ifft2(np.fft.fft2(x) * self.transfer).real

    def adjoint(self, y: np.ndarray) -> np.ndarray:
        """A^T y: correlate with the kernel (conjugate transfer)."""
        y = self._check(y)
        return np.fft.ifft2(np.fft.fft2(y) * np.conj(self.transfer)).real

    def gram(self, x: np.ndarray) -> np.ndarray:
        """A^T A x, evaluated as two matrix-free operator calls."""
        return self.adjoint(self.forward(x))

    def lipschitz(self) -> float:
        """Largest eigenvalue of A^T A (max squared transfer modulus)."""
        return float(self._power.max())


def build_operator(kernel: Kernel, shape: tuple[int, int]) -> BlurOperator:
    """Construct the circular blur operator for ``kernel`` on ``shape``."""
    return BlurOperator(kernel, shape)


def grad_f(op: BlurOperator, b: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Gradient of the data term f(x) = 0.5 ||Ax - b||^2, i.e. A^T(Ax - b)."""
    return op.adjoint(op.forward(x) - np.asarray(b, dtype=np.float64))


@dataclass(frozen=True)
class WeightingSpec:
    """Order n and step eta of the binomial weighting W_n built from
    M = eta * A^T A.  ``eta=None`` resolves to 1/L of the operator in use."""

    n: int = 1
    eta: float | None = None

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise ValueError(f"weighting order n must be an integer >= 1, got {self.n!r}")
        object.__setattr__(self, "n", int(self.n))
        if self.eta is not None:
            eta = float(self.eta)
            if not math.isfinite(eta) or eta <= 0:
                raise ValueError(f"weighting eta must be positive and finite, got {self.eta!r}")
            object.__setattr__(self, "eta", eta)

    def resolve_eta(self, op: BlurOperator) -> float:
        return 1.0 / op.lipschitz() if self.eta is None else self.eta


def weighting_transfer(op: BlurOperator, spec: WeightingSpec) -> np.ndarray:
    """Per-frequency multiplier of W_n.

    With m = eta*|t|^2 the transfer is (1 - (1-m)^n)/m, extended by
    continuity to n at m = 0.  It is evaluated as the geometric sum
    sum_{i=0}^{n-1} (1-m)^i, which is the same polynomial without the
    0/0 branch point.
    """
    m = spec.resolve_eta(op) * op._power
    u = 1.0 - m
    w = np.ones_like(m)
    term = np.ones_like(m)
    for _ in range(spec.n - 1):
        term = term * u
        w = w + term
    return w


def apply_weighting(
    op: BlurOperator,
    spec: WeightingSpec,
    g: np.ndarray,
    method: str = "horner",
) -> np.ndarray:
    """Apply W_n to ``g``.

    method="horner" runs the binomial polynomial in M by Horner's rule with
    exactly n-1 matrix-free applications of M; method="spectral" multiplies
    by the per-frequency transfer (one FFT round trip).  n = 1 returns a copy
    of ``g`` untouched on both paths.
    """
    g = np.asarray(g, dtype=np.float64)
    if g.shape != op.shape:
        raise ValueError(f"expected array of shape {op.shape}, got {g.shape}")
    if spec.n == 1:
        return g.copy()
    if method == "spectral":
        w = weighting_transfer(op, spec)
        return np.fft.ifft2(np.fft.fft2(g) * w).real
    if method != "horner":
        raise ValueError(f"unknown weighting method {method!r}")
    eta = spec.resolve_eta(op)
    n = spec.n
    # W_n = sum_{i=0}^{n-1} c_i M^i with c_i = (-1)^i C(n, i+1).
    coeffs = [(-1.0) ** i * math.comb(n, i + 1) for i in range(n)]
    r = coeffs[n - 1] * g
    for i in range(n - 2, -1, -1):
        r = eta * op.gram(r) + coeffs[i] * g
    return r


def add_gaussian_noise(x: np.ndarray, variance: float, seed: int) -> np.ndarray:
    """Add i.i.d. zero-mean Gaussian noise of the given variance.

    Deterministic for a fixed seed; variance 0 returns the input unchanged.
    """
    x = np.asarray(x, dtype=np.float64)
    variance = float(variance)
    if not math.isfinite(variance) or variance < 0:
        raise ValueError(f"noise variance must be finite and >= 0, got {variance!r}")
    if variance == 0.0:
        return x.copy()
    rng = np.random.default_rng(seed)
    return x + rng.normal(0.0, math.sqrt(variance), size=x.shape)
