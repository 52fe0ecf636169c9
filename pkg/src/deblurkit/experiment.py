"""Benchmark experiment assembly: spec parsing and the run loop.

A spec is a flat key = value text file; each "[solver]" section line starts
one solver entry whose keys (method, n) follow it.  Every solver in the
experiment sees the same problem instance: the observation is blurred and
noised once, before any solver runs.

Example::

    # blur/noise model
    image = synth:blobs:256:0
    kernel = disk:7
    noise_var = 1e-4
    noise_seed = 0
    reg = l1
    lambda = 1e-4
    iters = 300
    time_limit = 20
    tol = 1e-4

    [solver]
    method = fista

    [solver]
    method = ioptista
    n = 12
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .imgio import load_image
from .kernels import Kernel, make_disk_kernel, make_gaussian_kernel
from .metrics import MetricsConfig, psnr as psnr_of, ssim as ssim_of
from .operators import add_gaussian_noise, build_operator
from .prox import Regularizer
from .reporting import ResultRow, write_results_csv, write_trace_csv
from .solvers import METHODS, Problem, SolverConfig, WEIGHTED_METHODS, run
from .synthetic import GENERATOR_NAMES, make_image

__all__ = [
    "SolverEntry",
    "ExperimentSpec",
    "parse_spec_file",
    "parse_spec_text",
    "parse_kernel_spec",
    "resolve_image",
    "make_regularizer",
    "run_experiment",
]

log = logging.getLogger("deblurkit")

_REG_ALIASES = {"l1": "l1", "tv": "tv1d", "tv1d": "tv1d", "none": "none"}


@dataclass(frozen=True)
class SolverEntry:
    method: str
    n: int = 1

    @property
    def label(self) -> str:
        return f"{self.method}_n{self.n}" if self.method in WEIGHTED_METHODS else self.method


@dataclass
class ExperimentSpec:
    image: str
    kernel: str
    noise_var: float = 1e-4
    noise_seed: int = 0
    reg: str = "l1"
    lam: float = 1e-4
    iters: int = 300
    time_limit: float = 20.0
    tol: float = 1e-4
    psnr_mode: str = "standard"
    ssim_mode: str = "global"
    dynamic_range: float = 1.0
    out_dir: str | None = None
    solvers: list[SolverEntry] = field(default_factory=list)


_GLOBAL_KEYS = {
    "image": str,
    "kernel": str,
    "noise_var": float,
    "noise_seed": int,
    "reg": str,
    "lambda": float,
    "iters": int,
    "time_limit": float,
    "tol": float,
    "psnr_mode": str,
    "ssim_mode": str,
    "dynamic_range": float,
    "out_dir": str,
}
_SOLVER_KEYS = {"method": str, "n": int}
_KEY_TO_ATTR = {"lambda": "lam"}


def parse_kernel_spec(spec: str) -> Kernel:
    """disk:<radius> or gaussian:<size>,<sigma>."""
    kind, sep, rest = spec.partition(":")
    if not sep:
        raise ValueError(f"malformed kernel spec {spec!r}, expected kind:params")
    try:
        if kind == "disk":
            return make_disk_kernel(float(rest))
        if kind == "gaussian":
            size_s, sep2, sigma_s = rest.partition(",")
            if not sep2:
                raise ValueError("gaussian kernel needs size,sigma")
            return make_gaussian_kernel(int(size_s), float(sigma_s))
    except ValueError as e:
        raise ValueError(f"malformed kernel spec {spec!r}: {e}") from None
    raise ValueError(f"unknown kernel kind {kind!r} in {spec!r}, expected disk or gaussian")


def resolve_image(spec: str) -> tuple[str, np.ndarray]:
    """Load a file path, or generate synth:<name>:<size>[:<seed>].

    Returns (short identifier for reports, image array).
    """
    if spec.startswith("synth:"):
        parts = spec.split(":")
        if len(parts) not in (3, 4):
            raise ValueError(f"malformed synthetic image spec {spec!r}, expected synth:name:size[:seed]")
        name, size_s = parts[1], parts[2]
        seed = int(parts[3]) if len(parts) == 4 else 0
        return spec, make_image(name, int(size_s), seed)
    path = Path(spec)
    return path.name, load_image(path)


def make_regularizer(reg: str, lam: float) -> Regularizer:
    if reg not in _REG_ALIASES:
        raise ValueError(f"unknown regularizer {reg!r}, expected one of {sorted(_REG_ALIASES)}")
    return Regularizer(kind=_REG_ALIASES[reg], lam=lam)


def parse_spec_text(text: str, origin: str = "<spec>") -> ExperimentSpec:
    """Parse and validate; all problems are collected and reported at once."""
    errors: list[str] = []
    globals_: dict[str, object] = {}
    solvers: list[dict[str, object]] = []
    current: dict[str, object] | None = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line == "[solver]":
            current = {}
            solvers.append(current)
            continue
        if line.startswith("["):
            errors.append(f"{origin}:{lineno}: unknown section {line!r}")
            continue
        key, sep, value = (part.strip() for part in line.partition("="))
        if not sep or not key:
            errors.append(f"{origin}:{lineno}: expected key = value, got {raw.strip()!r}")
            continue
        table = _SOLVER_KEYS if current is not None else _GLOBAL_KEYS
        if key not in table:
            errors.append(f"{origin}:{lineno}: unknown key {key!r}")
            continue
        try:
            parsed = table[key](value)
        except ValueError:
            errors.append(f"{origin}:{lineno}: bad value for {key}: {value!r}")
            continue
        (current if current is not None else globals_)[key] = parsed

    if "image" not in globals_:
        errors.append(f"{origin}: missing required key 'image'")
    if "kernel" not in globals_:
        errors.append(f"{origin}: missing required key 'kernel'")
    if not solvers:
        errors.append(f"{origin}: no [solver] sections")

    entries: list[SolverEntry] = []
    for idx, sdict in enumerate(solvers, start=1):
        method = sdict.get("method")
        if method is None:
            errors.append(f"{origin}: [solver] #{idx} is missing 'method'")
            continue
        if method not in METHODS:
            errors.append(f"{origin}: [solver] #{idx}: unknown method {method!r}")
            continue
        entries.append(SolverEntry(method=str(method), n=int(sdict.get("n", 1))))

    # semantic checks still run when sections are broken, so one failed parse
    # reports every fixable problem at once
    spec = None
    if "image" in globals_ and "kernel" in globals_:
        kwargs = {_KEY_TO_ATTR.get(k, k): v for k, v in globals_.items()}
        spec = ExperimentSpec(solvers=entries, **kwargs)
        errors.extend(validate_spec(spec))
    if errors:
        raise ValueError("invalid experiment spec:\n  " + "\n  ".join(errors))
    return spec


def parse_spec_file(path) -> ExperimentSpec:
    path = Path(path)
    return parse_spec_text(path.read_text(), origin=str(path))


def validate_spec(spec: ExperimentSpec) -> list[str]:
    """Semantic checks beyond syntax; returns a list of problems (empty = ok)."""
    errors = []
    try:
        parse_kernel_spec(spec.kernel)
    except ValueError as e:
        errors.append(str(e))
    if spec.image.startswith("synth:"):
        parts = spec.image.split(":")
        if len(parts) not in (3, 4) or parts[1] not in GENERATOR_NAMES:
            errors.append(f"bad synthetic image spec {spec.image!r} (names: {GENERATOR_NAMES})")
        else:
            try:
                int(parts[2])
                if len(parts) == 4:
                    int(parts[3])
            except ValueError:
                errors.append(f"bad synthetic image spec {spec.image!r}")
    elif not Path(spec.image).is_file():
        errors.append(f"image file not found: {spec.image}")
    if spec.reg not in _REG_ALIASES:
        errors.append(f"unknown regularizer {spec.reg!r}")
    if not (spec.noise_var >= 0):
        errors.append(f"noise_var must be >= 0, got {spec.noise_var}")
    if not (spec.lam >= 0):
        errors.append(f"lambda must be >= 0, got {spec.lam}")
    if spec.iters < 1:
        errors.append(f"iters must be >= 1, got {spec.iters}")
    if not (spec.time_limit > 0):
        errors.append(f"time_limit must be > 0, got {spec.time_limit}")
    if not (spec.tol > 0):
        errors.append(f"tol must be > 0, got {spec.tol}")
    try:
        MetricsConfig(psnr_mode=spec.psnr_mode, ssim_mode=spec.ssim_mode, dynamic_range=spec.dynamic_range)
    except ValueError as e:
        errors.append(str(e))
    for entry in spec.solvers:
        if entry.n < 1:
            errors.append(f"solver {entry.method}: n must be >= 1, got {entry.n}")
    return errors


def _unique_labels(entries: list[SolverEntry]) -> list[str]:
    labels = []
    seen: dict[str, int] = {}
    for entry in entries:
        label = entry.label
        count = seen.get(label, 0)
        seen[label] = count + 1
        labels.append(label if count == 0 else f"{label}_{count + 1}")
    return labels


def run_experiment(spec: ExperimentSpec, out_dir, render_plots: bool = True):
    """Run every solver cell on the shared problem instance.

    Writes results.csv plus one trace CSV per cell into ``out_dir`` (and the
    convergence figures unless render_plots is False).  Returns
    (rows, trace_paths, figure_paths).
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    image_id, x_true = resolve_image(spec.image)
    kernel = parse_kernel_spec(spec.kernel)
    op = build_operator(kernel, x_true.shape)
    blurred = op.forward(x_true)
    b = add_gaussian_noise(blurred, spec.noise_var, spec.noise_seed)
    problem = Problem(op, b)
    reg = make_regularizer(spec.reg, spec.lam)
    mcfg = MetricsConfig(
        psnr_mode=spec.psnr_mode, ssim_mode=spec.ssim_mode, dynamic_range=spec.dynamic_range
    )

    rows: list[ResultRow] = []
    trace_paths: list[Path] = []
    parsed_traces: dict[str, dict[str, list[float]]] = {}
    labels = _unique_labels(spec.solvers)
    for entry, label in zip(spec.solvers, labels):
        config = SolverConfig(
            method=entry.method,
            reg=reg,
            weighting_n=entry.n,
            max_iters=spec.iters,
            max_seconds=spec.time_limit,
            tol_threshold=spec.tol,
        )
        psnr_list: list[float] = []
        ssim_list: list[float] = []

        def track(k, x):
            psnr_list.append(psnr_of(x, x_true, mcfg))
            ssim_list.append(ssim_of(x, x_true, mcfg))

        log.info("running %s (n=%d) on %s / %s", entry.method, config.weighting_n, image_id, spec.kernel)
        trace = run(problem, config, on_iterate=track)
        path = write_trace_csv(out_dir / f"trace_{label}.csv", trace, psnr_list, ssim_list)
        trace_paths.append(path)
        parsed_traces[label] = {
            "iter": list(trace.iterations),
            "tol": list(trace.tol),
            "objective": list(trace.objective),
            "psnr": psnr_list,
            "ssim": ssim_list,
        }
        rows.append(
            ResultRow(
                image=image_id,
                kernel=spec.kernel,
                noise_var=spec.noise_var,
                method=entry.method,
                n=config.weighting_n,
                final_tol=trace.tol[-1],
                final_psnr=psnr_list[-1],
                final_ssim=ssim_list[-1],
                iterations=trace.iterations[-1],
                wall_seconds=trace.elapsed[-1],
                termination=trace.termination,
            )
        )
        log.info("  -> %s after %d iterations, tol %.3e", trace.termination, trace.iterations[-1], trace.tol[-1])

    write_results_csv(out_dir / "results.csv", rows)
    figure_paths: list[Path] = []
    if render_plots:
        from .plotting import render_trace_figures

        figure_paths = render_trace_figures(parsed_traces, out_dir)
    return rows, trace_paths, figure_paths
