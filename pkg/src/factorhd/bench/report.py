"""CSV (aggregate rows) and JSON-lines (per-trial records) writers.

Both formats open with a config-echo line so a file can be replayed.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import asdict

from .experiment import PUBLISHED_REFERENCE, ResultTable, ScalingResult, SweepResult

CONFIG_COLUMNS = [
    "model",
    "dim",
    "effective_dim",
    "num_classes",
    "branching",
    "num_objects",
    "trials",
    "batch_size",
    "threshold",
    "seed",
    "dimension_halving",
    "acceptance",
    "codebook_scope",
]
METRIC_COLUMNS = [
    "accuracy",
    "ci95",
    "mean_sim_measurements",
    "mean_combinations",
    "mean_iterations",
    "mean_wall_time_s",
    "median_wall_time_s",
]
WALL_TIME_COLUMNS = {"mean_wall_time_s", "median_wall_time_s", "wall_time"}


def _row(table: ResultTable, extra: dict | None = None) -> dict:
    echo = table.config.echo()
    row = {k: echo[k] for k in CONFIG_COLUMNS}
    row["branching"] = "x".join(str(m) for m in table.config.branching)
    row.update(extra or {})
    for k, v in table.summary().items():
        row[k] = "" if v is None else repr(float(v))
    return row


def _csv(rows: list[dict], header_echo: dict, footer: dict | None = None) -> str:
    buf = io.StringIO()
    buf.write("# config: " + json.dumps(header_echo, sort_keys=True) + "\n")
    writer = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    if footer:
        buf.write("# summary: " + json.dumps(footer, sort_keys=True) + "\n")
    return buf.getvalue()


def _jsonl(header_echo: dict, tables: list[tuple[dict, ResultTable]]) -> str:
    lines = [json.dumps({"config": header_echo}, sort_keys=True)]
    for extra, table in tables:
        for rec in table.records:
            lines.append(json.dumps({**extra, **asdict(rec)}, sort_keys=True))
    return "\n".join(lines) + "\n"


def format_result(table: ResultTable, fmt: str) -> str:
    if fmt == "csv":
        extra = {"th_used": "" if table.threshold_used is None else repr(table.threshold_used)}
        return _csv([_row(table, extra)], table.config.echo())
    return _jsonl(table.config.echo(), [({}, table)])


def format_sweep(sweep: SweepResult, fmt: str) -> str:
    if fmt == "csv":
        rows = [_row(t, {"th": repr(th)}) for th, t in sweep.rows]
        footer = {"empirical_th_star": sweep.best_th, "predicted_th_star": sweep.predicted_th}
        return _csv(rows, sweep.config.echo(), footer)
    return _jsonl(sweep.config.echo(), [({"th": th}, t) for th, t in sweep.rows])


def format_scaling(scaling: ScalingResult, fmt: str) -> str:
    if fmt == "csv":
        rows = [_row(t, {"m": m, "problem_size": m ** t.config.num_classes}) for m, t in scaling.rows]
        footer = {"loglog_slope": scaling.slope, "published_reference": PUBLISHED_REFERENCE}
        return _csv(rows, scaling.config.echo(), footer)
    return _jsonl(scaling.config.echo(), [({"m": m}, t) for m, t in scaling.rows])
