"""Momentum/step schedules for the fixed-budget accelerated solvers.

For a budget of K iterations:

    alpha_0 = 1
    alpha_k = (1 + sqrt(1 + 4*alpha_{k-1}^2)) / 2     for 1 <= k <= K-1
    alpha_K = (1 + sqrt(1 + 8*alpha_{K-1}^2)) / 2     (modified final step)
    gamma_k = (2*alpha_k / alpha_K^2) * (alpha_K^2 - 2*alpha_k^2 + alpha_k)

so alpha has K+1 entries and gamma has K.  The whole schedule depends on K
through the final alpha, which is why it is materialized up front rather
than generated on the fly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = ["Schedule", "build_schedule", "fista_alpha_next"]


def fista_alpha_next(alpha: float) -> float:
    """The open-ended momentum recurrence used by FISTA and POGM."""
    return (1.0 + math.sqrt(1.0 + 4.0 * alpha * alpha)) / 2.0


@dataclass(frozen=True)
class Schedule:
    K: int
    alpha: np.ndarray  # length K+1
    gamma: np.ndarray  # length K


def build_schedule(K: int) -> Schedule:
    """Materialize the K-step schedule (see module docstring)."""
    if int(K) != K or K < 1:
        raise ValueError(f"iteration budget K must be an integer >= 1, got {K!r}")
    K = int(K)
    alpha = np.empty(K + 1)
    alpha[0] = 1.0
    for k in range(1, K):
        alpha[k] = fista_alpha_next(alpha[k - 1])
    alpha[K] = (1.0 + math.sqrt(1.0 + 8.0 * alpha[K - 1] ** 2)) / 2.0
    aK2 = alpha[K] ** 2
    a = alpha[:K]
    gamma = (2.0 * a / aK2) * (aK2 - 2.0 * a**2 + a)
    return Schedule(K=K, alpha=alpha, gamma=gamma)
