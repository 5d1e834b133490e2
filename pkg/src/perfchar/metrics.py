"""Derived performance and energy metrics: speedup, efficiency, E2S, EDP.

Efficiency baselines depend on granularity (cores within one node, whole
nodes at scale), so every efficiency value carries a mandatory unit label.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .exceptions import EmptyComparisonError, ParameterError
from .ingest import AppMetric, RunRecord, aggregate


@dataclass(frozen=True)
class EfficiencyPoint:
    """Speedup and parallel efficiency at one unit count, with the unit named."""

    units: int
    unit: str  # "cores", "nodes", ...
    speedup: float
    efficiency: float

    def __post_init__(self):
        if self.units < 1:
            raise ParameterError("units must be >= 1")
        if not self.speedup > 0:
            raise ParameterError("speedup must be > 0")


@dataclass(frozen=True)
class EnergyMetrics:
    """Energy-to-solution (kJ), energy-delay product (kJ s), optional work/J.

    ``init_fraction`` records what share of the measured energy an untimed
    initialization phase is believed to contribute; it is carried as metadata
    only, never applied as a correction.
    """

    e2s_kj: float
    edp_kjs: float
    work_per_joule: AppMetric | None = None
    init_fraction: float | None = None

    def __post_init__(self):
        if self.e2s_kj < 0 or self.edp_kjs < 0:
            raise ParameterError("energy metrics must be non-negative")
        if self.init_fraction is not None and not 0 <= self.init_fraction < 1:
            raise ParameterError("init_fraction must be within [0, 1) when present")


def strong_efficiency(t1: float, ti: float, i: int, *, unit: str) -> EfficiencyPoint:
    """Fixed-problem scaling: speedup t1/ti, efficiency t1/(ti*i)."""
    if not (t1 > 0 and ti > 0):
        raise ParameterError("times must be positive")
    if i < 1:
        raise ParameterError("unit count must be >= 1")
    speedup = t1 / ti
    return EfficiencyPoint(units=i, unit=unit, speedup=speedup, efficiency=speedup / i)


def weak_efficiency(metric1: float, metric_i: float, i: int, *, unit: str) -> EfficiencyPoint:
    """Fixed per-unit problem: efficiency is the aggregate rate over i times the baseline rate.

    At i == 1 the point is its own baseline, so both ratios are 1 by definition.
    """
    if not (metric1 > 0 and metric_i > 0):
        raise ParameterError("rates must be positive")
    if i < 1:
        raise ParameterError("unit count must be >= 1")
    if i == 1:
        return EfficiencyPoint(units=1, unit=unit, speedup=1.0, efficiency=1.0)
    speedup = metric_i / metric1
    return EfficiencyPoint(units=i, unit=unit, speedup=speedup, efficiency=speedup / i)


def energy_metrics(record: RunRecord, init_fraction: float | None = None) -> EnergyMetrics | None:
    """Energy metrics of one run, or None when the record carries no energy.

    work_per_joule is derived from a rate metric as rate * time / energy
    (e.g. MLUP/s becomes MLUP/J); non-rate metrics are left out.
    """
    if record.energy is None:
        return None
    e2s_kj = record.energy / 1000.0
    edp_kjs = e2s_kj * record.time
    work = None
    if record.app_metric is not None and record.app_metric.is_rate():
        value = record.app_metric.value * record.time / record.energy
        unit = record.app_metric.unit[: -len("/s")] + "/J"
        work = AppMetric(value, unit)
    return EnergyMetrics(
        e2s_kj=e2s_kj, edp_kjs=edp_kjs, work_per_joule=work, init_fraction=init_fraction
    )


@dataclass(frozen=True)
class ComparisonCell:
    """One (app, platform/compiler) entry of a comparison table."""

    mean: float
    stddev: float
    n: int
    delta_pct: float  # how far the best improves on this value, in percent
    rank: int  # 1 = best


@dataclass(frozen=True)
class ComparisonTable:
    """Per-app rows against (platform, compiler) columns."""

    metric: str  # "time" (lower is better) or "rate" (higher is better)
    columns: tuple[tuple[str, str], ...]  # (platform, compiler)
    rows: tuple[tuple[str, dict], ...]  # (app, {column: ComparisonCell})

    def to_csv_rows(self) -> list[list]:
        out = [["app", "platform", "compiler", "mean", "stddev", "n", "delta_pct", "rank"]]
        for app, cells in self.rows:
            for col in self.columns:
                cell = cells.get(col)
                if cell is None:
                    continue
                out.append(
                    [app, col[0], col[1], cell.mean, cell.stddev, cell.n, cell.delta_pct, cell.rank]
                )
        return out

    def to_text(self) -> str:
        headers = ["app"] + [f"{p}/{c}" for p, c in self.columns]
        body = []
        for app, cells in self.rows:
            line = [app]
            for col in self.columns:
                cell = cells.get(col)
                if cell is None:
                    line.append("-")
                else:
                    line.append(f"{cell.mean:.2f} ({cell.delta_pct:+.1f}%, r{cell.rank})")
            body.append(line)
        widths = [max(len(row[i]) for row in [headers] + body) for i in range(len(headers))]
        fmt = "  ".join(f"{{:<{w}}}" for w in widths)
        lines = [fmt.format(*headers), fmt.format(*["-" * w for w in widths])]
        lines += [fmt.format(*row) for row in body]
        return "\n".join(lines)


def compare_platforms(records: Sequence[RunRecord], metric: str = "time") -> ComparisonTable:
    """Cross-platform comparison of shared applications.

    ``delta_pct`` states how much of a run the best group saves: for times,
    100 * (1 - best/value); for rates, 100 * (1 - value/best). Requires at
    least two distinct platforms sharing an app.
    """
    if metric == "time":
        value = lambda r: r.time
        usable = list(records)
        lower_is_better = True
    elif metric == "rate":
        usable = [r for r in records if r.app_metric is not None and r.app_metric.is_rate()]
        value = lambda r: r.app_metric.value
        lower_is_better = False
    else:
        raise ParameterError(f"metric must be 'time' or 'rate', got {metric!r}")

    stats = aggregate(usable, group_key=("app", "platform", "compiler"), value=value)
    by_app: dict[str, dict[tuple[str, str], object]] = {}
    for (app, platform, compiler), st in stats.items():
        by_app.setdefault(app, {})[(platform, compiler)] = st

    comparable = {
        app: cols for app, cols in by_app.items() if len({p for p, _ in cols}) >= 2
    }
    if not comparable:
        raise EmptyComparisonError(
            "comparison needs at least two platforms sharing an application"
        )

    columns = tuple(sorted({col for cols in comparable.values() for col in cols}))
    rows = []
    for app in sorted(comparable):
        cols = comparable[app]
        means = {col: st.mean for col, st in cols.items()}
        best = min(means.values()) if lower_is_better else max(means.values())
        order = sorted(means, key=lambda c: (means[c] if lower_is_better else -means[c]))
        ranks = {col: order.index(col) + 1 for col in means}
        cells = {}
        for col, st in cols.items():
            if lower_is_better:
                delta = 100.0 * (1.0 - best / st.mean)
            else:
                delta = 100.0 * (1.0 - st.mean / best)
            cells[col] = ComparisonCell(st.mean, st.stddev, st.n, delta, ranks[col])
        rows.append((app, cells))
    return ComparisonTable(metric=metric, columns=columns, rows=tuple(rows))
