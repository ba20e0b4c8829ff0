"""CSV ingestion with pre-smoothing and lagging, plus report emission.

Input layout: a header row with time columns named t0..tq and a response
column named y; missing cells are empty.  Each retained row is linearly
interpolated onto the analysis grid (the minimal pre-smoothing choice), the
abscissa is rescaled to [0, 1], and rows with more than 20% missing cells are
dropped and logged.
"""

from __future__ import annotations

import csv
import io as _io
import logging
import re
from dataclasses import dataclass, field

import numpy as np

from .design import FunctionalSample
from .errors import DataError, InvalidInputError
from .glrt import TestResult
from .grid import Grid, make_grid
from .lambda_select import LambdaSelection
from .simlab import SizePowerRow

__all__ = [
    "IngestInfo",
    "AnalysisReport",
    "load_curves",
    "ingest_curves",
    "emit_report",
    "parse_report",
    "rows_to_csv",
    "power_rows_to_svg",
]

log = logging.getLogger(__name__)

MISSING_LIMIT = 0.20

ROW_COLUMNS = ["setup", "nu", "n", "B", "reps", "reject_rate", "stderr",
               "mean_lambda"]


@dataclass(frozen=True)
class IngestInfo:
    """Provenance of one ingested dataset."""

    path: str
    rows_total: int
    rows_dropped: int
    scale: float
    lag: int


@dataclass(frozen=True)
class AnalysisReport:
    """Full record of one test run on a dataset."""

    result: TestResult
    beta: np.ndarray  # fitted slope sampled on the grid
    selection: LambdaSelection | None
    info: IngestInfo

    def __eq__(self, other):
        if not isinstance(other, AnalysisReport):
            return NotImplemented
        return (self.result == other.result
                and np.array_equal(self.beta, other.beta)
                and self.selection == other.selection
                and self.info == other.info)


def _read_table(path: str):
    try:
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            rows = list(reader)
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    if not rows:
        raise DataError(f"{path}: empty file")
    header = [c.strip() for c in rows[0]]
    time_cols = []
    for idx, name in enumerate(header):
        match = re.fullmatch(r"t(\d+)", name)
        if match:
            time_cols.append((int(match.group(1)), idx))
    time_cols.sort()
    if len(time_cols) < 2:
        raise DataError(f"{path}: need at least two time columns t0..tq")
    if "y" not in header:
        raise DataError(f"{path}: missing response column 'y'")
    y_idx = header.index("y")
    return rows[1:], [idx for _, idx in time_cols], y_idx


def ingest_curves(path: str, grid: Grid | None = None, scale: float = 1.0,
                  lag_d: int = 0) -> tuple[FunctionalSample, IngestInfo]:
    """Load, pre-smooth, lag, rescale, and center a raw curve table."""
    if lag_d < 0:
        raise DataError("lag must be >= 0")
    grid = grid or make_grid()
    body, time_idx, y_idx = _read_table(path)
    q = len(time_idx) - 1
    abscissa = np.arange(q + 1) / q  # rescaled to [0, 1]

    curves, responses, dropped = [], [], 0
    for row_num, row in enumerate(body, start=2):
        if not row or all(not c.strip() for c in row):
            continue
        try:
            raw = [float(row[i]) if row[i].strip() else np.nan for i in time_idx]
            y_cell = row[y_idx].strip()
            y_val = float(y_cell) if y_cell else np.nan
        except (ValueError, IndexError) as exc:
            raise DataError(f"{path}: line {row_num}: {exc}") from exc
        raw = np.array(raw)
        present = np.isfinite(raw)
        missing_frac = 1.0 - present.mean()
        if missing_frac > MISSING_LIMIT or present.sum() < 2 or not np.isfinite(y_val):
            dropped += 1
            log.info("%s: dropping line %d (%.0f%% missing)",
                     path, row_num, 100 * missing_frac)
            continue
        smoothed = np.interp(grid.points, abscissa[present], raw[present])
        curves.append(smoothed * scale)
        responses.append(y_val * scale)

    n_raw = len(curves)
    if n_raw == 0:
        raise DataError(f"{path}: no usable rows after filtering")
    if lag_d >= n_raw:
        raise DataError(f"{path}: lag {lag_d} >= usable rows {n_raw}")

    x = np.array(curves)
    y = np.array(responses)
    if lag_d > 0:
        x = x[:-lag_d]
        y = y[lag_d:]
    x = x - x.mean(axis=0)
    y = y - y.mean()
    sample = FunctionalSample(grid=grid, curves=x, responses=y, centered=True)
    info = IngestInfo(path=path, rows_total=len(body), rows_dropped=dropped,
                      scale=scale, lag=lag_d)
    return sample, info


def load_curves(path: str, grid: Grid | None = None, scale: float = 1.0,
                lag_d: int = 0) -> FunctionalSample:
    """Convenience wrapper returning only the sample."""
    return ingest_curves(path, grid, scale, lag_d)[0]


# ---------------------------------------------------------------------------
# report serialization: key = value lines, floats at 17 significant digits

def _fmt(x) -> str:
    if isinstance(x, float):
        return f"{x:.17g}"
    return str(x)


def emit_report(report: AnalysisReport, fmt: str = "structured-text") -> bytes:
    """Serialize a report deterministically."""
    if fmt == "structured-text":
        return _report_text(report).encode()
    if fmt == "csv":
        return _report_csv(report).encode()
    raise InvalidInputError(f"unsupported report format {fmt!r}")


def _report_text(report: AnalysisReport) -> str:
    r = report.result
    lines = [
        "format = flrtest-report-v1",
        f"file = {report.info.path}",
        f"rows_total = {report.info.rows_total}",
        f"rows_dropped = {report.info.rows_dropped}",
        f"scale = {_fmt(report.info.scale)}",
        f"lag = {report.info.lag}",
        f"tau = {_fmt(r.tau)}",
        f"mu_n = {_fmt(r.mu_n)}",
        f"sigma_n = {_fmt(r.sigma_n)}",
        f"z = {_fmt(r.z)}",
        f"p_value = {_fmt(r.p_value)}",
        f"alpha = {_fmt(r.alpha)}",
        f"sided = {r.sided}",
        f"reject = {r.reject}",
        f"lambda = {_fmt(r.lam)}",
        f"trace_path = {r.trace_path}",
        f"perfect_fit = {r.perfect_fit}",
    ]
    sel = report.selection
    if sel is not None:
        lines += [
            f"lambda_tilde = {_fmt(sel.lambda_tilde)}",
            f"selection_objective = {_fmt(sel.objective_value)}",
            f"stationarity_residual = {_fmt(sel.stationarity_residual)}",
            f"selection_grid_lo = {_fmt(sel.grid_lo)}",
            f"selection_grid_hi = {_fmt(sel.grid_hi)}",
            f"at_boundary = {sel.at_boundary}",
        ]
    lines.append("beta = " + ",".join(_fmt(float(v)) for v in report.beta))
    return "\n".join(lines) + "\n"


def parse_report(data: bytes) -> AnalysisReport:
    """Invert emit_report for the structured-text format."""
    fields: dict[str, str] = {}
    for line in data.decode().splitlines():
        if not line.strip():
            continue
        key, _, value = line.partition(" = ")
        fields[key] = value
    if fields.get("format") != "flrtest-report-v1":
        raise DataError("not a recognized report")
    result = TestResult(
        tau=float(fields["tau"]), mu_n=float(fields["mu_n"]),
        sigma_n=float(fields["sigma_n"]), z=float(fields["z"]),
        p_value=float(fields["p_value"]), alpha=float(fields["alpha"]),
        sided=fields["sided"], reject=fields["reject"] == "True",
        lam=float(fields["lambda"]), trace_path=fields["trace_path"],
        perfect_fit=fields["perfect_fit"] == "True",
    )
    selection = None
    if "lambda_tilde" in fields:
        selection = LambdaSelection(
            lambda_tilde=float(fields["lambda_tilde"]),
            objective_value=float(fields["selection_objective"]),
            stationarity_residual=float(fields["stationarity_residual"]),
            grid_lo=float(fields["selection_grid_lo"]),
            grid_hi=float(fields["selection_grid_hi"]),
            at_boundary=fields["at_boundary"] == "True",
        )
    info = IngestInfo(path=fields["file"], rows_total=int(fields["rows_total"]),
                      rows_dropped=int(fields["rows_dropped"]),
                      scale=float(fields["scale"]), lag=int(fields["lag"]))
    beta = np.array([float(v) for v in fields["beta"].split(",")])
    return AnalysisReport(result=result, beta=beta, selection=selection,
                         info=info)


def _report_csv(report: AnalysisReport) -> str:
    r = report.result
    buf = _io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["tau", "mu_n", "sigma_n", "z", "p_value", "alpha",
                     "sided", "reject", "lambda"])
    writer.writerow([_fmt(r.tau), _fmt(r.mu_n), _fmt(r.sigma_n), _fmt(r.z),
                     _fmt(r.p_value), _fmt(r.alpha), r.sided, r.reject,
                     _fmt(r.lam)])
    return buf.getvalue()


def rows_to_csv(rows: list[SizePowerRow]) -> str:
    """Size/power rows as a flat CSV table."""
    buf = _io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(ROW_COLUMNS)
    for row in rows:
        c = row.config
        writer.writerow([c.setup, _fmt(float(c.nu)), c.n, _fmt(float(c.B)),
                         c.reps, _fmt(row.reject_rate), _fmt(row.mc_stderr),
                         _fmt(row.mean_lambda)])
    return buf.getvalue()


def power_rows_to_svg(series: dict[str, list[SizePowerRow]],
                      width: int = 640, height: int = 420) -> str:
    """Static SVG power plot: one polyline per labelled series."""
    pad = 50
    all_b = [float(r.config.B) for rows in series.values() for r in rows]
    b_lo, b_hi = min(all_b), max(all_b)
    span = (b_hi - b_lo) or 1.0

    def sx(b):
        return pad + (b - b_lo) / span * (width - 2 * pad)

    def sy(p):
        return height - pad - p * (height - 2 * pad)

    palette = ["#1b6ca8", "#c0392b", "#27ae60", "#8e44ad", "#d35400"]
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" '
        f'height="{height}" viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<line x1="{pad}" y1="{height - pad}" x2="{width - pad}" '
        f'y2="{height - pad}" stroke="black"/>',
        f'<line x1="{pad}" y1="{pad}" x2="{pad}" y2="{height - pad}" '
        f'stroke="black"/>',
    ]
    for i, (label, rows) in enumerate(series.items()):
        color = palette[i % len(palette)]
        points = " ".join(
            f"{sx(float(r.config.B)):.2f},{sy(r.reject_rate):.2f}" for r in rows
        )
        parts.append(f'<polyline points="{points}" fill="none" '
                     f'stroke="{color}" stroke-width="2"/>')
        parts.append(f'<text x="{width - pad + 4}" '
                     f'y="{sy(rows[-1].reject_rate):.2f}" font-size="12" '
                     f'fill="{color}">{label}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
