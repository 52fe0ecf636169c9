"""Matrix-free proximal-gradient toolkit for non-blind image deblurring."""

from .kernels import Kernel, make_disk_kernel, make_gaussian_kernel
from .metrics import MetricsConfig, psnr, ssim
from .operators import (
    BlurOperator,
    WeightingSpec,
    add_gaussian_noise,
    apply_weighting,
    build_operator,
    grad_f,
)
from .prox import Regularizer, prox, soft_threshold, tv1d_prox
from .schedules import Schedule, build_schedule, fista_alpha_next
from .solvers import METHODS, Problem, RunTrace, SolverConfig, run

__version__ = "0.1.0"

__all__ = [
    "BlurOperator",
    "Kernel",
    "METHODS",
    "MetricsConfig",
    "Problem",
    "Regularizer",
    "RunTrace",
    "Schedule",
    "SolverConfig",
    "WeightingSpec",
    "__version__",
    "add_gaussian_noise",
    "apply_weighting",
    "build_operator",
    "build_schedule",
    "fista_alpha_next",
    "grad_f",
    "make_disk_kernel",
    "make_gaussian_kernel",
    "prox",
    "psnr",
    "run",
    "soft_threshold",
    "ssim",
    "tv1d_prox",
]
