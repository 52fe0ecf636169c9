"""Command line entry points.

Subcommands:
  deblur   restore a single image with one solver, write PNGs + a trace CSV
  bench    run a spec file over a solver grid, write CSVs and figures
  verify   run the internal oracle suite, exit nonzero on any failure
  kernels  print a kernel's weights as text
  metrics  report PSNR/SSIM between two images

LOG_LEVEL in the environment controls logging verbosity (DEBUG, INFO, ...).
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path

from . import __version__
from .experiment import (
    ExperimentSpec,
    SolverEntry,
    make_regularizer,
    parse_kernel_spec,
    parse_spec_file,
    resolve_image,
    run_experiment,
)
from .imgio import load_image, save_png
from .kernels import kernel_to_text
from .metrics import MetricsConfig, psnr, ssim

log = logging.getLogger("deblurkit")


def _configure_logging():
    level_name = os.environ.get("LOG_LEVEL", "WARNING").upper()
    level = getattr(logging, level_name, None)
    if not isinstance(level, int):
        level = logging.WARNING
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")


def _add_metric_flags(p):
    p.add_argument("--psnr-mode", choices=("standard", "paper_footnote"),
                   default="standard", help="PSNR convention (default: standard)")
    p.add_argument("--ssim-mode", choices=("global", "windowed"),
                   default="global", help="SSIM convention (default: global)")
    p.add_argument("--dynamic-range", type=float, default=1.0,
                   help="dynamic range of the image data (default: 1.0)")


def _cmd_deblur(args) -> int:
    from .operators import add_gaussian_noise, build_operator
    from .reporting import write_trace_csv
    from .solvers import Problem, SolverConfig, run

    image_id, x_true = resolve_image(args.image)
    kernel = parse_kernel_spec(args.kernel)
    op = build_operator(kernel, x_true.shape)
    b = add_gaussian_noise(op.forward(x_true), args.noise_var, args.seed)

    reg = make_regularizer(args.reg, args.lam)
    config = SolverConfig(
        method=args.method,
        reg=reg,
        weighting_n=args.n if args.method in ("iista", "ifista", "ioptista", "moptista") else 1,
        max_iters=args.iters,
        max_seconds=args.time_limit,
        tol_threshold=args.tol,
    )
    mcfg = MetricsConfig(psnr_mode=args.psnr_mode, ssim_mode=args.ssim_mode,
                         dynamic_range=args.dynamic_range)

    psnrs: list[float] = []
    ssims: list[float] = []

    def track(k, x):
        psnrs.append(psnr(x, x_true, mcfg))
        ssims.append(ssim(x, x_true, mcfg))

    trace = run(Problem(op, b), config, on_iterate=track)

    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    label = config.method if config.weighting_n == 1 else f"{config.method}_n{config.weighting_n}"
    blurred_path = out_dir / "blurred.png"
    restored_path = out_dir / "restored.png"
    trace_path = out_dir / f"trace_{label}.csv"
    save_png(blurred_path, b)
    save_png(restored_path, trace.final_x)
    write_trace_csv(trace_path, trace, psnrs, ssims)

    print(f"image={image_id} kernel={args.kernel} method={label}")
    print(f"termination={trace.termination} iterations={trace.iterations[-1]}"
          f" diverged={trace.diverged}")
    print(f"final tol={trace.tol[-1]:.6e} psnr={psnrs[-1]:.4f} ssim={ssims[-1]:.6f}")
    for path in (blurred_path, restored_path, trace_path):
        print(f"wrote {path}")
    return 0


def _cmd_bench(args) -> int:
    spec = parse_spec_file(args.spec)
    out_dir = args.out_dir or spec.out_dir or "bench_out"
    rows, trace_paths, figure_paths = run_experiment(
        spec, out_dir, render_plots=not args.no_plots
    )
    width = max(len(r.method if r.n == 1 else f"{r.method}_n{r.n}") for r in rows)
    for r in rows:
        label = r.method if r.n == 1 else f"{r.method}_n{r.n}"
        print(f"{label:<{width}}  tol={r.final_tol:.6e}  psnr={r.final_psnr:.4f}"
              f"  ssim={r.final_ssim:.6f}  iters={r.iterations}  {r.termination}")
    print(f"wrote {Path(out_dir) / 'results.csv'}")
    for path in trace_paths + figure_paths:
        print(f"wrote {path}")
    return 0


def _cmd_verify(args) -> int:
    from .selfcheck import run_selfcheck

    results = run_selfcheck(seed=args.seed, trials=args.trials,
                            inject_corruption=args.inject_corruption)
    name_width = max(len(r.name) for r in results)
    ok = True
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        ok = ok and r.passed
        print(f"{r.name:<{name_width}}  worst={r.worst:.3e}  tol={r.tolerance:.1e}  {status}")
    print("all checks passed" if ok else "some checks FAILED")
    return 0 if ok else 1


def _cmd_kernels(args) -> int:
    kernel = parse_kernel_spec(args.kernel)
    text = kernel_to_text(kernel)
    if args.out:
        Path(args.out).write_text(text)
        print(f"wrote {args.out}")
    else:
        print(text, end="")
    return 0


def _cmd_metrics(args) -> int:
    candidate = load_image(args.candidate)
    reference = load_image(args.reference)
    if candidate.shape != reference.shape:
        raise ValueError(
            f"shape mismatch: {candidate.shape} vs {reference.shape}"
        )
    mcfg = MetricsConfig(psnr_mode=args.psnr_mode, ssim_mode=args.ssim_mode,
                         dynamic_range=args.dynamic_range)
    print(f"psnr={psnr(candidate, reference, mcfg)!r}")
    print(f"ssim={ssim(candidate, reference, mcfg)!r}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="deblurkit",
        description="matrix-free proximal-gradient image deblurring toolkit",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("deblur", help="restore one image with one solver")
    p.add_argument("--image", required=True,
                   help="input image path (.png/.pgm) or synth:<name>:<size>[:<seed>]")
    p.add_argument("--kernel", required=True,
                   help="disk:<radius> or gaussian:<size>,<sigma>")
    p.add_argument("--method", default="ioptista",
                   choices=("ista", "iista", "fista", "ifista", "pogm",
                            "optista", "ioptista", "moptista"))
    p.add_argument("--n", type=int, default=12, help="weighting order (default: 12)")
    p.add_argument("--reg", default="l1", choices=("none", "l1", "tv", "tv1d"))
    p.add_argument("--lambda", dest="lam", type=float, default=1e-4,
                   help="regularization weight (default: 1e-4)")
    p.add_argument("--iters", type=int, default=300, help="iteration budget (default: 300)")
    p.add_argument("--time-limit", type=float, default=20.0,
                   help="wall clock budget in seconds (default: 20)")
    p.add_argument("--tol", type=float, default=1e-4,
                   help="stop once 0.5*||Ax-b||^2 falls below this (default: 1e-4)")
    p.add_argument("--noise-var", type=float, default=1e-4,
                   help="additive gaussian noise variance (default: 1e-4)")
    p.add_argument("--seed", type=int, default=0, help="noise seed (default: 0)")
    p.add_argument("--out-dir", default="deblur_out", help="output directory")
    _add_metric_flags(p)
    p.set_defaults(func=_cmd_deblur)

    p = sub.add_parser("bench", help="run a benchmark spec over a solver grid")
    p.add_argument("--spec", required=True, help="path to a key=value spec file")
    p.add_argument("--out-dir", default=None,
                   help="output directory (overrides out_dir in the spec)")
    p.add_argument("--no-plots", action="store_true", help="skip figure rendering")
    p.set_defaults(func=_cmd_bench)

    p = sub.add_parser("verify", help="run the internal oracle suite")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=20,
                   help="trial count for randomized checks (default: 20)")
    p.add_argument("--inject-corruption", action="store_true",
                   help="corrupt a schedule on purpose; the suite must then fail")
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("kernels", help="print a kernel's weights")
    p.add_argument("--kernel", required=True,
                   help="disk:<radius> or gaussian:<size>,<sigma>")
    p.add_argument("--out", default=None, help="write to this file instead of stdout")
    p.set_defaults(func=_cmd_kernels)

    p = sub.add_parser("metrics", help="PSNR/SSIM between two images")
    p.add_argument("candidate", help="image under test (.png/.pgm)")
    p.add_argument("reference", help="ground-truth image (.png/.pgm)")
    _add_metric_flags(p)
    p.set_defaults(func=_cmd_metrics)

    return parser


def main(argv=None) -> int:
    _configure_logging()
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
