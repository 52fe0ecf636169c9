"""Delimited output: per-iteration trace CSVs and per-run result rows.

All floats are serialized with repr (shortest round-tripping decimal), so
parse(serialize(row)) == row holds exactly; non-finite values appear as the
explicit markers "inf"/"-inf"/"nan".
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

from .solvers import RunTrace

__all__ = [
    "TRACE_COLUMNS",
    "RESULT_COLUMNS",
    "ResultRow",
    "write_trace_csv",
    "read_trace_csv",
    "write_results_csv",
    "read_results_csv",
]

TRACE_COLUMNS = ("iter", "tol", "objective", "psnr", "ssim", "elapsed_s")
RESULT_COLUMNS = (
    "image",
    "kernel",
    "noise_var",
    "method",
    "n",
    "final_tol",
    "final_psnr",
    "final_ssim",
    "iterations",
    "wall_seconds",
    "termination",
)


def _fmt(v: float) -> str:
    return repr(float(v))


@dataclass(frozen=True)
class ResultRow:
    image: str
    kernel: str
    noise_var: float
    method: str
    n: int
    final_tol: float
    final_psnr: float
    final_ssim: float
    iterations: int
    wall_seconds: float
    termination: str

    def to_csv_fields(self) -> list[str]:
        return [
            self.image,
            self.kernel,
            _fmt(self.noise_var),
            self.method,
            str(self.n),
            _fmt(self.final_tol),
            _fmt(self.final_psnr),
            _fmt(self.final_ssim),
            str(self.iterations),
            _fmt(self.wall_seconds),
            self.termination,
        ]

    @classmethod
    def from_csv_fields(cls, fields: list[str]) -> "ResultRow":
        if len(fields) != len(RESULT_COLUMNS):
            raise ValueError(f"expected {len(RESULT_COLUMNS)} fields, got {len(fields)}")
        return cls(
            image=fields[0],
            kernel=fields[1],
            noise_var=float(fields[2]),
            method=fields[3],
            n=int(fields[4]),
            final_tol=float(fields[5]),
            final_psnr=float(fields[6]),
            final_ssim=float(fields[7]),
            iterations=int(fields[8]),
            wall_seconds=float(fields[9]),
            termination=fields[10],
        )


def write_trace_csv(path, trace: RunTrace, psnr: list[float], ssim: list[float]) -> Path:
    """One row per recorded iterate; psnr/ssim are the harness-computed
    per-iterate metric lists (same length as the trace)."""
    n = len(trace.iterations)
    if len(psnr) != n or len(ssim) != n:
        raise ValueError("psnr/ssim lists must match the trace length")
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(TRACE_COLUMNS)
        for i in range(n):
            w.writerow(
                [
                    str(trace.iterations[i]),
                    _fmt(trace.tol[i]),
                    _fmt(trace.objective[i]),
                    _fmt(psnr[i]),
                    _fmt(ssim[i]),
                    _fmt(trace.elapsed[i]),
                ]
            )
    return path


def read_trace_csv(path) -> dict[str, list[float]]:
    with Path(path).open(newline="") as fh:
        r = csv.reader(fh)
        header = next(r)
        if tuple(header) != TRACE_COLUMNS:
            raise ValueError(f"unexpected trace header {header}")
        out: dict[str, list[float]] = {c: [] for c in TRACE_COLUMNS}
        for row in r:
            out["iter"].append(int(row[0]))
            for c, val in zip(TRACE_COLUMNS[1:], row[1:]):
                out[c].append(float(val))
    return out


def write_results_csv(path, rows: list[ResultRow]) -> Path:
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(RESULT_COLUMNS)
        for row in rows:
            w.writerow(row.to_csv_fields())
    return path


def read_results_csv(path) -> list[ResultRow]:
    with Path(path).open(newline="") as fh:
        r = csv.reader(fh)
        header = next(r)
        if tuple(header) != RESULT_COLUMNS:
            raise ValueError(f"unexpected results header {header}")
        return [ResultRow.from_csv_fields(row) for row in r]
