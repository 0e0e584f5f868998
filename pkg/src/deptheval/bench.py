"""Benchmark result tables: improvement ratios, per-task ranks, rank averaging.

A ``ResultTable`` holds one task's method-by-metric matrix with an explicit
optimization direction per column and a designated baseline row.  The
improvement ratio of a method is the unweighted mean over columns of the
signed per-cell relative improvement versus the baseline, in percent.
Methods are ranked per task by that ratio (competition ranking: ties share
the smaller rank and the next rank is skipped), and cross-task standing is
the mean of a method's ranks over the tasks where it participates.  Rows
can be marked ``excluded``: their improvement is still reported but they
never receive a rank and never dilute another method's average.
"""

from __future__ import annotations

import csv
import enum
import json
import math
import os
from dataclasses import dataclass, field

from .errors import DegenerateDataError, TableParseError


class Direction(str, enum.Enum):
    LOWER_BETTER = "lower_better"
    HIGHER_BETTER = "higher_better"


@dataclass(frozen=True)
class MetricColumn:
    name: str
    direction: Direction

    def __post_init__(self):
        object.__setattr__(self, "direction", Direction(self.direction))


@dataclass(frozen=True)
class ResultTable:
    """One proxy task's method-by-metric matrix."""

    task: str
    columns: tuple[MetricColumn, ...]
    rows: dict[str, tuple[float, ...]]
    baseline: str
    excluded: frozenset[str] = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "columns", tuple(self.columns))
        object.__setattr__(
            self, "rows", {m: tuple(float(v) for v in vals) for m, vals in self.rows.items()}
        )
        object.__setattr__(self, "excluded", frozenset(self.excluded))
        if not self.columns:
            raise ValueError(f"table {self.task!r} has no columns")
        for m, vals in self.rows.items():
            if len(vals) != len(self.columns):
                raise ValueError(
                    f"table {self.task!r}: row {m!r} has {len(vals)} cells, "
                    f"expected {len(self.columns)}"
                )
            if not all(math.isfinite(v) for v in vals):
                raise ValueError(f"table {self.task!r}: row {m!r} has non-finite cells")
        if self.baseline not in self.rows:
            raise ValueError(f"table {self.task!r}: baseline {self.baseline!r} not in rows")
        if self.baseline in self.excluded:
            raise ValueError(f"table {self.task!r}: baseline cannot be excluded")
        stray = self.excluded - self.rows.keys()
        if stray:
            raise ValueError(f"table {self.task!r}: excluded methods not in rows: {sorted(stray)}")

    def methods(self) -> list[str]:
        """Non-baseline rows in table order."""
        return [m for m in self.rows if m != self.baseline]

    def candidates(self) -> list[str]:
        """Rows eligible for ranking: everything but the baseline and exclusions."""
        return [m for m in self.rows if m != self.baseline and m not in self.excluded]


_CSV_DIRECTIONS = {"up": Direction.HIGHER_BETTER, "down": Direction.LOWER_BETTER}


def _load_csv(path: str | os.PathLike, task: str) -> tuple[tuple[MetricColumn, ...], dict]:
    with open(path, "r", encoding="utf-8", newline="") as f:
        reader = csv.reader(f)
        rows = [row for row in reader if row and any(cell.strip() for cell in row)]
    if not rows:
        raise TableParseError(f"{path}: empty table")
    header = rows[0]
    if header[0].strip() != "method":
        raise TableParseError(f"{path}: header must start with 'method', got {header[0]!r}")
    columns = []
    for cell in header[1:]:
        name, sep, suffix = cell.strip().rpartition(":")
        if not sep or suffix not in _CSV_DIRECTIONS:
            raise TableParseError(
                f"{path}: column {cell!r} needs an ':up' or ':down' direction suffix"
            )
        columns.append(MetricColumn(name, _CSV_DIRECTIONS[suffix]))
    if not columns:
        raise TableParseError(f"{path}: no metric columns")
    table_rows: dict[str, tuple[float, ...]] = {}
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != len(columns) + 1:
            raise TableParseError(
                f"{path}: line {lineno} has {len(row)} cells, expected {len(columns) + 1}"
            )
        method = row[0].strip()
        if method in table_rows:
            raise TableParseError(f"{path}: duplicate method {method!r}")
        try:
            table_rows[method] = tuple(float(v) for v in row[1:])
        except ValueError:
            raise TableParseError(f"{path}: line {lineno} has a non-numeric cell") from None
    return tuple(columns), table_rows


def _load_json(path: str | os.PathLike) -> dict:
    with open(path, "r", encoding="utf-8") as f:
        try:
            doc = json.load(f)
        except json.JSONDecodeError as exc:
            raise TableParseError(f"{path}: invalid JSON: {exc}") from None
    for key in ("task", "columns", "rows"):
        if key not in doc:
            raise TableParseError(f"{path}: missing {key!r} field")
    try:
        doc["columns"] = tuple(
            MetricColumn(c["name"], Direction(c["direction"])) for c in doc["columns"]
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise TableParseError(f"{path}: bad column spec: {exc}") from None
    return doc


def load_table(
    path: str | os.PathLike, fmt: str | None = None, baseline: str | None = None
) -> ResultTable:
    """Load a result table from CSV or JSON.

    CSV schema: header ``method,<name>:<up|down>,...``, one row per method;
    the baseline must be passed in since CSV carries no metadata.  JSON
    mirrors the ResultTable fields (an explicit ``baseline`` argument
    overrides the stored one).
    """
    if fmt is None:
        ext = os.path.splitext(os.fspath(path))[1].lower()
        fmt = "json" if ext == ".json" else "csv"
    if fmt == "csv":
        task = os.path.splitext(os.path.basename(os.fspath(path)))[0]
        columns, rows = _load_csv(path, task)
        excluded: frozenset[str] = frozenset()
    elif fmt == "json":
        doc = _load_json(path)
        task = doc["task"]
        columns = doc["columns"]
        rows = doc["rows"]
        excluded = frozenset(doc.get("excluded", ()))
        if baseline is None:
            baseline = doc.get("baseline")
    else:
        raise ValueError(f"unknown table format {fmt!r}; use 'csv' or 'json'")
    if baseline is None:
        raise ValueError(f"{path}: no baseline given and none stored in the file")
    return ResultTable(task=task, columns=columns, rows=rows, baseline=baseline, excluded=excluded)


def improvement_ratio(table: ResultTable, method: str) -> float:
    """Mean signed relative improvement versus the baseline, in percent."""
    if method not in table.rows:
        raise ValueError(f"table {table.task!r}: unknown method {method!r}")
    base = table.rows[table.baseline]
    vals = table.rows[method]
    cells = []
    for col, b, v in zip(table.columns, base, vals):
        if b == 0:
            raise DegenerateDataError(
                f"table {table.task!r}: baseline cell for {col.name!r} is zero"
            )
        if col.direction == Direction.LOWER_BETTER:
            cells.append(100.0 * (b - v) / b)
        else:
            cells.append(100.0 * (v - b) / b)
    return math.fsum(cells) / len(cells)


def task_rank(table: ResultTable) -> dict[str, int]:
    """Competition ranks by improvement ratio, excluded rows exempt."""
    candidates = table.candidates()
    if not candidates:
        raise ValueError(f"table {table.task!r}: no rankable methods besides the baseline")
    imps = {m: improvement_ratio(table, m) for m in candidates}
    ordered = sorted(candidates, key=lambda m: -imps[m])
    ranks: dict[str, int] = {}
    for pos, m in enumerate(ordered):
        if pos > 0 and imps[m] == imps[ordered[pos - 1]]:
            ranks[m] = ranks[ordered[pos - 1]]
        else:
            ranks[m] = pos + 1
    return {m: ranks[m] for m in candidates}


@dataclass(frozen=True)
class MethodScore:
    """Per-task standing of one method; excluded rows carry no rank."""

    imp_percent: float
    rank: int | None


@dataclass(frozen=True)
class RankReport:
    """Per-task scores plus cross-task average ranks."""

    per_task: dict[str, dict[str, MethodScore]]
    average_rank: dict[str, float]
    tasks_counted: dict[str, int] = field(default_factory=dict)


def average_rank(tables) -> RankReport:
    """Aggregate several tasks: per-task imp/rank and mean rank per method.

    A method's average runs over the tasks where it is present and not
    excluded; methods ranked nowhere are omitted from the averages.
    """
    tables = list(tables)
    if not tables:
        raise ValueError("need at least one table")
    names = [t.task for t in tables]
    if len(set(names)) != len(names):
        raise ValueError(f"duplicate task names: {names}")
    per_task: dict[str, dict[str, MethodScore]] = {}
    collected: dict[str, list[int]] = {}
    for t in tables:
        ranks = task_rank(t)
        scores: dict[str, MethodScore] = {}
        for m in t.methods():
            scores[m] = MethodScore(improvement_ratio(t, m), ranks.get(m))
            if m in ranks:
                collected.setdefault(m, []).append(ranks[m])
        per_task[t.task] = scores
    avg = {m: sum(r) / len(r) for m, r in collected.items()}
    ordered = sorted(avg, key=lambda m: (avg[m], m))
    return RankReport(
        per_task=per_task,
        average_rank={m: avg[m] for m in ordered},
        tasks_counted={m: len(collected[m]) for m in ordered},
    )


def emit_report(report: RankReport, fmt: str = "markdown") -> str:
    """Render a RankReport as a markdown table or JSON (reals at 2 decimals)."""
    if not report.per_task:
        raise ValueError("empty report")
    if fmt == "json":
        doc = {
            "per_task": {
                task: {
                    m: {"imp_percent": round(s.imp_percent, 2), "rank": s.rank}
                    for m, s in scores.items()
                }
                for task, scores in report.per_task.items()
            },
            "average_rank": {m: round(v, 2) for m, v in report.average_rank.items()},
            "tasks_counted": dict(report.tasks_counted),
        }
        return json.dumps(doc, indent=2) + "\n"
    if fmt != "markdown":
        raise ValueError(f"unknown report format {fmt!r}; use 'markdown' or 'json'")

    tasks = list(report.per_task)
    ranked = list(report.average_rank)
    extras = sorted(
        {m for scores in report.per_task.values() for m in scores} - set(ranked)
    )
    lines = [
        "| method | avg rank | " + " | ".join(f"{t} (imp / rank)" for t in tasks) + " |",
        "|---" * (2 + len(tasks)) + "|",
    ]
    for m in ranked + extras:
        avg = f"{report.average_rank[m]:.2f}" if m in report.average_rank else "-"
        cells = []
        for t in tasks:
            s = report.per_task[t].get(m)
            if s is None:
                cells.append("-")
            else:
                cells.append(f"{s.imp_percent:+.2f} / {s.rank if s.rank is not None else '-'}")
        lines.append(f"| {m} | {avg} | " + " | ".join(cells) + " |")
    return "\n".join(lines) + "\n"
