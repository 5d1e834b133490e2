"""Measurement ingestion: run records, aggregation, and pairwise bandwidth maps.

Two file schemas are accepted, each as CSV (UTF-8, header mandatory) or as a
JSON array of objects with the same field names:

* runs:      ``platform,app,compiler,nodes,ranks_per_node,time_s,energy_j,app_metric,timestamp``
* pairwise:  ``node_a,node_b,msg_bytes,bandwidth_gbs`` (optional ``unit`` column,
  ``MB/s`` values are converted to GB/s on import)

Energy is stored in joules; presentation layers convert to kJ. The app metric
is a free ``value unit`` pair such as ``266.7 MLUP/s``.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from datetime import datetime
from pathlib import Path
from typing import Callable, Iterable, Sequence

import numpy as np

from .exceptions import (
    IncompleteMatrixError,
    ParameterError,
    RowError,
    SchemaError,
)

RUNS_COLUMNS = (
    "platform",
    "app",
    "compiler",
    "nodes",
    "ranks_per_node",
    "time_s",
    "energy_j",
    "app_metric",
    "timestamp",
)

PAIRWISE_COLUMNS = ("node_a", "node_b", "msg_bytes", "bandwidth_gbs")

#: Bidirectional measurements of one pair may disagree by up to this fraction
#: before the pair is reported in the asymmetry warning list.
SYMMETRY_TOLERANCE = 0.10

#: Robust sigma estimate: 1.4826 * median absolute deviation (normal-consistent).
MAD_SIGMA_FACTOR = 1.4826


@dataclass(frozen=True)
class AppMetric:
    """An application-reported metric with its unit, e.g. 266.7 MLUP/s."""

    value: float
    unit: str

    @classmethod
    def from_text(cls, text: str) -> "AppMetric":
        parts = text.strip().split(None, 1)
        value = float(parts[0])
        unit = parts[1].strip() if len(parts) > 1 else ""
        return cls(value, unit)

    def is_rate(self) -> bool:
        return self.unit.endswith("/s")

    def __str__(self) -> str:
        return f"{self.value!r} {self.unit}".strip()


@dataclass(frozen=True)
class RunRecord:
    """One measured execution of an application on a platform."""

    platform: str
    app: str
    compiler: str
    nodes: int
    ranks_per_node: int
    time: float  # seconds
    energy: float | None = None  # joules
    app_metric: AppMetric | None = None
    timestamp: str = ""

    def __post_init__(self):
        if self.nodes < 1:
            raise ParameterError("nodes must be >= 1")
        if self.ranks_per_node < 1:
            raise ParameterError("ranks_per_node must be >= 1")
        if not self.time > 0:
            raise ParameterError("time must be > 0")
        if self.energy is not None and not self.energy > 0:
            raise ParameterError("energy must be > 0 when present")
        if self.timestamp:
            _validate_iso8601(self.timestamp)


@dataclass(frozen=True)
class AggregateStats:
    """Per-group sample statistics; stddev is the (n-1) sample deviation."""

    mean: float
    stddev: float
    n: int
    flagged_outliers: int = 0

    def __post_init__(self):
        if self.n < 1:
            raise ParameterError("a group must contain at least one record")
        if self.stddev < 0:
            raise ParameterError("stddev must be >= 0")
        if self.n == 1 and self.stddev != 0.0:
            raise ParameterError("a single-record group has zero stddev")


def _validate_iso8601(text: str) -> None:
    try:
        datetime.fromisoformat(text.replace("Z", "+00:00"))
    except ValueError as exc:
        raise ParameterError(f"timestamp {text!r} is not ISO-8601") from exc


def _read_rows(source: str | Path, columns: tuple[str, ...], optional: tuple[str, ...] = ()):
    """Yield (line_number, row_dict) from a CSV or JSON file, validating the header."""
    path = Path(source)
    text = path.read_text(encoding="utf-8")
    stripped = text.lstrip()
    if path.suffix.lower() == ".json" or stripped.startswith("["):
        try:
            entries = json.loads(text)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"{path}: not valid JSON: {exc}") from exc
        if not isinstance(entries, list):
            raise SchemaError(f"{path}: JSON input must be an array of objects")
        for i, entry in enumerate(entries, start=1):
            if not isinstance(entry, dict):
                raise SchemaError(f"{path}: entry {i} is not an object")
            missing = [c for c in columns if c not in entry]
            if missing:
                raise SchemaError(f"{path}: entry {i} lacks mandatory fields {missing}")
            yield i, {k: ("" if entry.get(k) is None else str(entry[k])) for k in (*columns, *optional) if k in entry}
        return

    # Comment lines (leading '#') are tolerated so fixtures can carry notes;
    # reported line numbers always refer to the original file.
    kept = [
        (number, line)
        for number, line in enumerate(text.splitlines(), start=1)
        if not line.lstrip().startswith("#")
    ]
    reader = csv.DictReader(line for _, line in kept)
    if reader.fieldnames is None:
        raise SchemaError(f"{path}: empty file, header row is mandatory")
    missing = [c for c in columns if c not in reader.fieldnames]
    if missing:
        raise SchemaError(f"{path}: missing mandatory column(s) {missing}")
    for row in reader:
        original_line = kept[min(reader.line_num, len(kept)) - 1][0]
        yield original_line, {k: (v or "").strip() for k, v in row.items() if k is not None}


def parse_runs(source: str | Path) -> list[RunRecord]:
    """Load and validate run records; raises RowError listing every bad line."""
    records: list[RunRecord] = []
    failures: list[tuple[int, str]] = []
    for line, row in _read_rows(source, RUNS_COLUMNS):
        try:
            energy = float(row["energy_j"]) if row.get("energy_j") else None
            metric = AppMetric.from_text(row["app_metric"]) if row.get("app_metric") else None
            records.append(
                RunRecord(
                    platform=row["platform"],
                    app=row["app"],
                    compiler=row["compiler"],
                    nodes=int(row["nodes"]),
                    ranks_per_node=int(row["ranks_per_node"]),
                    time=float(row["time_s"]),
                    energy=energy,
                    app_metric=metric,
                    timestamp=row.get("timestamp", ""),
                )
            )
        except (ParameterError, ValueError) as exc:
            failures.append((line, str(exc)))
    if failures:
        raise RowError(failures)
    return records


def serialize_runs(records: Iterable[RunRecord]) -> str:
    """Canonical CSV form of a record set; parse(serialize(x)) == x."""
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(RUNS_COLUMNS)
    for r in records:
        writer.writerow(
            [
                r.platform,
                r.app,
                r.compiler,
                r.nodes,
                r.ranks_per_node,
                repr(r.time),
                "" if r.energy is None else repr(r.energy),
                "" if r.app_metric is None else str(r.app_metric),
                r.timestamp,
            ]
        )
    return out.getvalue()


def _group_key_func(group_key) -> Callable[[RunRecord], tuple]:
    if callable(group_key):
        return group_key
    fields = (group_key,) if isinstance(group_key, str) else tuple(group_key)
    return lambda r: tuple(getattr(r, f) for f in fields)


def aggregate(
    records: Sequence[RunRecord],
    group_key=("app", "platform", "compiler"),
    value: Callable[[RunRecord], float] = lambda r: r.time,
) -> dict[tuple, AggregateStats]:
    """Group records and compute mean / sample stddev / outlier count per group."""
    keyfn = _group_key_func(group_key)
    groups: dict[tuple, list[RunRecord]] = {}
    for r in records:
        groups.setdefault(keyfn(r), []).append(r)
    stats = {}
    for key, members in groups.items():
        values = [value(r) for r in members]
        n = len(values)
        mean = sum(values) / n
        if n > 1:
            stddev = math.sqrt(sum((v - mean) ** 2 for v in values) / (n - 1))
        else:
            stddev = 0.0
        flagged = flag_outliers(members, value=value)
        stats[key] = AggregateStats(mean, stddev, n, len(flagged or ()))
    return stats


def flag_outliers(
    records: Sequence[RunRecord],
    k: float = 3.0,
    value: Callable[[RunRecord], float] = lambda r: r.time,
) -> list[RunRecord] | None:
    """Flag records farther than k robust sigmas from the group median.

    Sigma is the MAD-based robust estimate, so a run of identical values plus
    one stray flags exactly the stray. Returns None (not applicable) for
    groups smaller than three; flagged records are never removed from the set.
    """
    if k <= 0:
        raise ParameterError("k must be > 0")
    if len(records) < 3:
        return None
    values = np.array([value(r) for r in records], dtype=float)
    median = float(np.median(values))
    sigma = MAD_SIGMA_FACTOR * float(np.median(np.abs(values - median)))
    return [r for r, v in zip(records, values) if abs(v - median) > k * sigma]


@dataclass(frozen=True)
class WeakLink:
    """A node pair whose bandwidth falls below its rows' typical value."""

    node_a: str
    node_b: str
    bandwidth: float  # GB/s
    reference: float  # row median used as the baseline, GB/s
    deficit: float  # 1 - bandwidth / reference


@dataclass(frozen=True)
class PairwiseBandwidthMatrix:
    """Dense node-pair bandwidth map (GB/s) at one message size.

    The matrix is symmetric by construction: a pair measured in both
    directions stores the average, and directions disagreeing by more than
    ``SYMMETRY_TOLERANCE`` are listed in ``asymmetry_warnings``.
    """

    node_ids: tuple[str, ...]
    bandwidth: np.ndarray  # square, NaN diagonal
    message_size: int  # bytes
    asymmetry_warnings: tuple[tuple[str, str, float], ...] = ()

    def __post_init__(self):
        n = len(self.node_ids)
        if self.bandwidth.shape != (n, n):
            raise ParameterError("bandwidth matrix must be square over node_ids")

    def row_median(self, index: int) -> float:
        return float(np.nanmedian(self.bandwidth[index]))

    def pair_value(self, a: str, b: str) -> float:
        return float(self.bandwidth[self.node_ids.index(a), self.node_ids.index(b)])


def build_pairwise_matrix(
    entries: Iterable[tuple[str, str, float]], message_size: int
) -> PairwiseBandwidthMatrix:
    """Assemble a symmetric matrix from directed (node_a, node_b, GB/s) entries."""
    directed: dict[tuple[str, str], float] = {}
    nodes: set[str] = set()
    for a, b, bw in entries:
        if a == b:
            raise ParameterError(f"self-pair {a!r} is not a network measurement")
        if not bw > 0:
            raise ParameterError(f"bandwidth for pair ({a}, {b}) must be > 0")
        directed[(a, b)] = bw
        nodes.update((a, b))
    node_ids = tuple(sorted(nodes))
    n = len(node_ids)
    matrix = np.full((n, n), np.nan)
    warnings_list: list[tuple[str, str, float]] = []
    missing: list[tuple[str, str]] = []
    for i in range(n):
        for j in range(i + 1, n):
            a, b = node_ids[i], node_ids[j]
            forward = directed.get((a, b))
            backward = directed.get((b, a))
            if forward is None and backward is None:
                missing.append((a, b))
                continue
            if forward is not None and backward is not None:
                value = (forward + backward) / 2.0
                rel = abs(forward - backward) / value
                if rel > SYMMETRY_TOLERANCE:
                    warnings_list.append((a, b, rel))
            else:
                value = forward if forward is not None else backward
            matrix[i, j] = matrix[j, i] = value
    if missing:
        pairs = ", ".join(f"({a}, {b})" for a, b in missing)
        raise IncompleteMatrixError(f"missing bandwidth for pair(s): {pairs}", missing)
    return PairwiseBandwidthMatrix(node_ids, matrix, message_size, tuple(warnings_list))


def parse_pairwise_sweep(source: str | Path) -> dict[int, PairwiseBandwidthMatrix]:
    """Parse a pairwise bandwidth file into one matrix per message size."""
    by_size: dict[int, list[tuple[str, str, float]]] = {}
    failures: list[tuple[int, str]] = []
    for line, row in _read_rows(source, PAIRWISE_COLUMNS, optional=("unit",)):
        try:
            size = int(row["msg_bytes"])
            bw = float(row["bandwidth_gbs"])
            unit = row.get("unit", "").strip() or "GB/s"
            if unit.lower() in ("mb/s", "mbs"):
                bw /= 1000.0
            elif unit.lower() not in ("gb/s", "gbs"):
                raise ValueError(f"unknown bandwidth unit {unit!r}")
            by_size.setdefault(size, []).append((row["node_a"], row["node_b"], bw))
        except ValueError as exc:
            failures.append((line, str(exc)))
    if failures:
        raise RowError(failures)
    return {size: build_pairwise_matrix(entries, size) for size, entries in sorted(by_size.items())}


def parse_pairwise_bandwidth(
    source: str | Path, message_size: int | None = None
) -> PairwiseBandwidthMatrix:
    """Parse one matrix; a multi-size file needs an explicit message_size."""
    sweep = parse_pairwise_sweep(source)
    if not sweep:
        raise SchemaError(f"{source}: no pairwise bandwidth rows")
    if message_size is None:
        if len(sweep) > 1:
            raise SchemaError(
                f"{source}: contains {len(sweep)} message sizes {sorted(sweep)}; pick one"
            )
        return next(iter(sweep.values()))
    if message_size not in sweep:
        raise SchemaError(f"{source}: no rows for message size {message_size}")
    return sweep[message_size]


def detect_weak_links(
    matrix: PairwiseBandwidthMatrix, threshold: float = 0.10
) -> list[WeakLink]:
    """Pairs whose bandwidth is below (1 - threshold) times their row median.

    The row median is the baseline (robust against the high diagonal-neighbor
    pairs a tree topology produces); a pair is checked against both of its
    rows and reported once with the larger deficit.
    """
    if threshold < 0:
        raise ParameterError("threshold must be >= 0")
    n = len(matrix.node_ids)
    medians = [matrix.row_median(i) for i in range(n)]
    links = []
    for i in range(n):
        for j in range(i + 1, n):
            bw = float(matrix.bandwidth[i, j])
            if math.isnan(bw):
                continue
            reference = max(medians[i], medians[j])
            if bw < (1.0 - threshold) * medians[i] or bw < (1.0 - threshold) * medians[j]:
                links.append(
                    WeakLink(
                        matrix.node_ids[i],
                        matrix.node_ids[j],
                        bw,
                        reference,
                        1.0 - bw / reference,
                    )
                )
    links.sort(key=lambda w: (-w.deficit, w.node_a, w.node_b))
    return links
