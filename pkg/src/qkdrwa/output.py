"""CSV result files.

``aggregate.csv`` holds one row per (algorithm, power control, request count,
classical load) point, ``raw.csv`` one row per replication. Floats are
written with six significant digits and missing QSNR values as empty
fields, so a fixed config always yields byte-identical files.
"""

from __future__ import annotations

import csv
from pathlib import Path

from .simulation import RawRecord, SweepResult

AGGREGATE_HEADER = (
    "algorithm", "power_control", "length_metric", "request_count", "classical_load",
    "blocking_ratio", "blocking_ci95", "qsnr_db_mean", "qsnr_ci95", "n_samples",
)
RAW_HEADER = (
    "algorithm", "power_control", "length_metric", "request_count", "classical_load",
    "topology", "replication", "blocked", "total", "blocking_ratio",
    "n_quantum", "qsnr_db_mean", "qsnr_db_min",
)


def fmt(x: float | None) -> str:
    return "" if x is None else f"{x:.6g}"


def _flag(b: bool) -> str:
    return "true" if b else "false"


def aggregate_rows(result: SweepResult) -> list[list[str]]:
    items = sorted(
        result.table.items(),
        key=lambda kv: (kv[0][0].heuristic.value, kv[0][0].power_control, kv[0][1], kv[0][2], kv[0][0].ksp_k),
    )
    metric = result.length_metric.value
    rows = []
    for (spec, count, load), m in items:
        rows.append([
            spec.heuristic.value, _flag(spec.power_control), metric, str(count), fmt(load),
            fmt(m.blocking_ratio_mean), fmt(m.blocking_ratio_ci95),
            fmt(m.qsnr_db_mean), fmt(m.qsnr_db_ci95), str(m.n_samples),
        ])
    return rows


def _raw_row(metric: str, r: RawRecord) -> list[str]:
    return [
        r.spec.heuristic.value, _flag(r.spec.power_control), metric, str(r.request_count), fmt(r.classical_load),
        str(r.topology), str(r.replication), str(r.blocked), str(r.total), fmt(r.blocked / r.total),
        str(r.n_quantum), fmt(r.qsnr_db_mean), fmt(r.qsnr_db_min),
    ]


def raw_rows(result: SweepResult) -> list[list[str]]:
    records = sorted(
        result.raw,
        key=lambda r: (
            r.spec.heuristic.value, r.spec.power_control, r.request_count, r.classical_load,
            r.spec.ksp_k, r.topology, r.replication,
        ),
    )
    metric = result.length_metric.value
    return [_raw_row(metric, r) for r in records]


def _write(path: Path, header: tuple[str, ...], rows: list[list[str]]) -> None:
    try:
        with path.open("w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(header)
            writer.writerows(rows)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror or exc}") from exc


def emit_results(result: SweepResult, output_dir: str | Path) -> tuple[Path, Path]:
    """Write ``aggregate.csv`` and ``raw.csv`` into ``output_dir`` (created if needed)."""
    if not result.table:
        raise ValueError("nothing to write: the result table is empty")
    out = Path(output_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create output directory {out}: {exc.strerror or exc}") from exc
    agg, raw = out / "aggregate.csv", out / "raw.csv"
    _write(agg, AGGREGATE_HEADER, aggregate_rows(result))
    _write(raw, RAW_HEADER, raw_rows(result))
    return agg, raw
