"""Report records, aggregates, emission, and parsing.

A run produces two files: ``tasks.jsonl`` (one JSON record per class-pair
task, in task order) and ``summary.txt`` (flat ``key = <json>`` lines with the
aggregates and the full config echo). Both are deterministic byte-for-byte
given the same config and seed; no timestamps are written.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .search import PairResult, PipelineResult

FORMAT_VERSION = 1
TASKS_FILE = "tasks.jsonl"
SUMMARY_FILE = "summary.txt"


def _jsonable(value):
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.floating,)):
        return float(value)
    if isinstance(value, (tuple, list)):
        return [_jsonable(v) for v in value]
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    return value


@dataclass
class RunReport:
    version: int
    strategy: str
    config: dict
    records: list
    aggregates: dict


def pair_record(result: PairResult, class_names) -> dict:
    """JSON-ready record for one class-pair task."""
    record = {
        "task_index": result.task_index,
        "class_a": result.class_a,
        "class_b": result.class_b,
        "label_a": class_names[result.class_a - 1],
        "label_b": class_names[result.class_b - 1],
        "sequence": list(result.sequence),
        "prefix": list(result.prefix),
        "suffix": list(result.suffix),
        "is_hard": result.is_hard,
        "evaluations_used": result.evaluations_used,
        "error": result.error,
        "readout": None,
        "readout_scores": None,
        "ideal_acc": None,
        "fisher": None,
        "cosine": None,
        "groups": None,
        "shots_per_group": None,
        "noisy_acc": None,
        "var_penalty": None,
        "budget_score": None,
        "detail": _jsonable(result.detail) if result.detail else None,
    }
    s = result.summary
    if s is not None:
        record.update(
            readout=list(s.readout_paulis),
            readout_scores=[float(v) for v in s.readout_scores],
            ideal_acc=float(s.ideal_acc),
            fisher=float(s.fisher),
            cosine=float(s.cosine),
            groups=int(s.groups),
        )
        if s.budget is not None:
            record.update(
                shots_per_group=int(s.budget.shots_per_group),
                noisy_acc=float(s.budget.noisy_acc),
                var_penalty=float(s.budget.var_penalty),
                budget_score=float(s.budget.budget_score),
            )
    return record


def aggregate(records: list, pipeline: PipelineResult) -> dict:
    """Dataset-level means plus counters; the 95% rate uses the regime metric."""
    cfg = pipeline.config
    ok = [r for r in records if r["error"] is None]
    budget_regime = cfg.regime == "budget"
    ranking_metric = "noisy_acc" if budget_regime else "ideal_acc"

    def mean(key):
        return float(np.mean([r[key] for r in ok])) if ok else None

    def rate(key):
        if not ok:
            return None
        return float(np.mean([1.0 if r[key] >= cfg.tau_acc else 0.0 for r in ok]))

    out = {
        "n_tasks": len(records),
        "n_failed": len(records) - len(ok),
        "mean_ideal_acc": mean("ideal_acc"),
        "mean_noisy_acc": mean("noisy_acc") if budget_regime else None,
        "rate95_ideal": rate("ideal_acc"),
        "rate95_noisy": rate("noisy_acc") if budget_regime else None,
        "ranking_metric": ranking_metric,
        "rate95_ranking": rate(ranking_metric),
        "mean_length": float(np.mean([len(r["sequence"]) for r in ok])) if ok else None,
        "mean_paulis": float(np.mean([len(r["readout"]) for r in ok])) if ok else None,
        "mean_groups": mean("groups"),
        "mean_shots_per_group": mean("shots_per_group") if budget_regime else None,
        "hard_pairs": sum(1 for r in ok if r["is_hard"]) if ok else 0,
        "global_sequences_evaluated": pipeline.global_sequences_evaluated,
        "max_continuation_evaluations": max((r["evaluations_used"] for r in records), default=0),
        "family_size": pipeline.family_size,
        "retained_dimension": pipeline.retained_dimension,
        "train_size": int(len(pipeline.train_rows)),
        "test_size": int(len(pipeline.test_rows)),
    }
    return out


def build_report(pipeline: PipelineResult, strategy: str, config_echo: dict) -> RunReport:
    records = [pair_record(r, pipeline.class_names) for r in pipeline.pair_results]
    return RunReport(
        version=FORMAT_VERSION,
        strategy=strategy,
        config=_jsonable(dict(config_echo)),
        records=records,
        aggregates=aggregate(records, pipeline),
    )


def record_line(record: dict) -> str:
    return json.dumps(record, sort_keys=True)


def summary_lines(report: RunReport) -> list[str]:
    lines = [f"format_version = {json.dumps(report.version)}",
             f"strategy = {json.dumps(report.strategy)}"]
    for key in sorted(report.aggregates):
        lines.append(f"aggregate.{key} = {json.dumps(report.aggregates[key])}")
    for key in sorted(report.config):
        lines.append(f"config.{key} = {json.dumps(report.config[key])}")
    return lines


def emit(report: RunReport, out_dir) -> tuple[Path, Path]:
    """Write tasks.jsonl and summary.txt under out_dir; returns both paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    tasks_path = out / TASKS_FILE
    with open(tasks_path, "w", encoding="utf-8") as fh:
        for record in report.records:
            fh.write(record_line(record) + "\n")
    summary_path = out / SUMMARY_FILE
    with open(summary_path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(summary_lines(report)) + "\n")
    return tasks_path, summary_path


def load(out_dir) -> RunReport:
    """Parse a report directory back into a RunReport (exact round trip)."""
    out = Path(out_dir)
    records = []
    with open(out / TASKS_FILE, "r", encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                records.append(json.loads(line))
    version, strategy = None, None
    config, aggregates = {}, {}
    with open(out / SUMMARY_FILE, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            key, raw = line.split(" = ", 1)
            value = json.loads(raw)
            if key == "format_version":
                version = value
            elif key == "strategy":
                strategy = value
            elif key.startswith("aggregate."):
                aggregates[key[len("aggregate."):]] = value
            elif key.startswith("config."):
                config[key[len("config."):]] = value
    return RunReport(version=version, strategy=strategy, config=config,
                     records=records, aggregates=aggregates)


_TABLE_COLUMNS = (
    ("Ideal acc.", "mean_ideal_acc", "{:.4f}"),
    ("Noisy acc.", "mean_noisy_acc", "{:.4f}"),
    ("95% rate", "rate95_ranking", "{:.4f}"),
    ("Len", "mean_length", "{:.2f}"),
    ("Paulis", "mean_paulis", "{:.2f}"),
    ("Groups", "mean_groups", "{:.2f}"),
)


def format_aggregate_table(rows: list[tuple[str, dict]]) -> str:
    """Side-by-side aggregates, one strategy per row."""
    header = ["Method"] + [name for name, _, _ in _TABLE_COLUMNS]
    body = []
    for name, agg in rows:
        cells = [name]
        for _, key, fmt in _TABLE_COLUMNS:
            value = agg.get(key)
            cells.append("-" if value is None else fmt.format(value))
        body.append(cells)
    widths = [max(len(row[i]) for row in [header] + body) for i in range(len(header))]
    def fmt_row(cells):
        return "  ".join(c.ljust(w) for c, w in zip(cells, widths)).rstrip()
    lines = [fmt_row(header), fmt_row(["-" * w for w in widths])]
    lines.extend(fmt_row(row) for row in body)
    lines.append("95% rate uses each strategy's ranking accuracy "
                 "(noisy for budget-aware strategies, ideal otherwise).")
    return "\n".join(lines)
