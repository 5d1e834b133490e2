"""Command-line interface.

Subcommands map one-to-one onto the analysis surfaces:

* ``spec show``        declared platform limits
* ``bench mem``        triad bandwidth runs and thread sweeps
* ``bench flops``      FMA throughput runs
* ``analyze roofline`` ceiling curves plus kernel-point classification
* ``analyze scaling``  strong/weak/share model fits and projections
* ``analyze energy``   E2S, EDP, and work-per-joule per run record
* ``analyze network``  pairwise-bandwidth weak-link detection
* ``report compare``   cross-platform comparison tables

Exit codes: 0 success, 1 analysis or validation failure, 2 usage error.
``PERFCHAR_THREADS`` caps benchmark thread counts. Share files for
``analyze scaling --model mpi-shares`` use the CSV schema
``platform,app,compiler,procs,lb_share_pct,com_share_pct``.
"""

from __future__ import annotations

import argparse
import csv
import os
import sys
from dataclasses import dataclass
from pathlib import Path

from . import __version__
from .exceptions import InvalidDataError, ParameterError, PerfcharError, SchemaError
from .hwmodel import (
    load_platform_spec,
    node_peak_flops,
    peak_bandwidth,
    peak_flops,
    stream_min_elements,
)
from .ingest import (
    RunRecord,
    aggregate,
    detect_weak_links,
    parse_pairwise_bandwidth,
    parse_runs,
)
from .metrics import compare_platforms, energy_metrics
from .microbench import (
    TriadConfig,
    run_fma_kernel,
    run_stream_triad,
    thread_sweep,
)
from .report import (
    atomic_write_text,
    emit_plot_data,
    gnuplot_loglog_script,
    write_sidecar_metadata,
)
from .roofline import (
    CounterSample,
    KernelPoint,
    arithmetic_intensity,
    build_roofline,
    classify,
    roofline_curve,
)
from .scalefit import (
    critical_units,
    fit_amdahl,
    fit_gustafson,
    fit_mpi_shares,
    project,
)

DEFAULT_PROJECTION = (1, 2, 4, 8, 16, 32, 64, 128, 256, 512)

REPORT_FORMATS = ("text", "csv", "all")


@dataclass(frozen=True)
class AnalysisConfig:
    """Resolved inputs and output sink of one analysis invocation."""

    platform_spec_paths: tuple[Path, ...] = ()
    data_paths: tuple[Path, ...] = ()
    output_dir: Path | None = None
    report_format: str = "text"

    def __post_init__(self):
        if self.report_format not in REPORT_FORMATS:
            raise ParameterError(f"report_format must be one of {REPORT_FORMATS}")
        if not self.platform_spec_paths and not self.data_paths:
            raise ParameterError("an analysis needs at least one data or spec path")
        if self.output_dir is not None:
            self.output_dir.mkdir(parents=True, exist_ok=True)
            if not os.access(self.output_dir, os.W_OK):
                raise ParameterError(f"output directory {self.output_dir} is not writable")


def _analysis_config(*, specs=(), data=(), out=None, out_dir=None) -> AnalysisConfig:
    if out_dir is not None:
        output = Path(out_dir)
    elif out is not None:
        output = Path(out).resolve().parent
    else:
        output = None
    return AnalysisConfig(
        platform_spec_paths=tuple(Path(s) for s in specs if s),
        data_paths=tuple(Path(d) for d in data if d),
        output_dir=output,
        report_format="all" if output is not None else "text",
    )


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    try:
        return args.handler(args)
    except PerfcharError as exc:
        message = " ".join(str(exc).split())
        print(f"perfchar: error: {type(exc).__name__}: {message}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"perfchar: error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="perfchar",
        description="Performance characterization and scalability projection toolkit",
    )
    parser.add_argument("--version", action="version", version=f"perfchar {__version__}")
    top = parser.add_subparsers(dest="command", required=True)

    spec = top.add_parser("spec", help="platform spec utilities")
    spec_sub = spec.add_subparsers(dest="action", required=True)
    show = spec_sub.add_parser("show", help="print the limits a spec implies")
    show.add_argument("spec", help="platform spec JSON file")
    show.set_defaults(handler=_cmd_spec_show)

    bench = top.add_parser("bench", help="run a microbenchmark")
    bench_sub = bench.add_subparsers(dest="kernel", required=True)

    mem = bench_sub.add_parser("mem", help="triad memory bandwidth")
    mem.add_argument("--elements", type=int, required=True, help="8-byte elements per array")
    mem.add_argument("--threads", default="1", help="thread count, or comma list for a sweep")
    mem.add_argument("--reps", type=int, default=200, help="repetitions per run (best is kept)")
    mem.add_argument("--pin", default="interleaved", choices=["interleaved", "compact", "none"])
    mem.add_argument("--spec", help="platform spec JSON; enforces the sizing rule")
    mem.add_argument("--out", help="CSV output path (threads,best_gbs)")
    mem.set_defaults(handler=_cmd_bench_mem)

    flops = bench_sub.add_parser("flops", help="FMA floating-point throughput")
    flops.add_argument("--precision", default="double", choices=["single", "double"])
    flops.add_argument("--mode", default="vector", choices=["scalar", "vector"])
    flops.add_argument("--duration", type=float, default=1.0, help="seconds per measurement")
    flops.add_argument("--threads", default="1", help="thread count, or comma list for a sweep")
    flops.add_argument("--out", help="CSV output path (mode,precision,gflops)")
    flops.set_defaults(handler=_cmd_bench_flops)

    analyze = top.add_parser("analyze", help="analyze ingested measurements")
    analyze_sub = analyze.add_subparsers(dest="analysis", required=True)

    roof = analyze_sub.add_parser("roofline", help="ceiling curve and kernel classification")
    roof.add_argument("--spec", help="platform spec JSON providing the peaks")
    roof.add_argument("--flops-gflops", type=float, help="compute peak override, GFlop/s")
    roof.add_argument("--bandwidth-gbs", type=float, help="bandwidth peak override, GB/s")
    roof.add_argument("--scope", default="node", choices=["node", "core"])
    roof.add_argument("--precision", default="double", choices=["single", "double"])
    roof.add_argument("--mode", default="vector", choices=["scalar", "vector"])
    roof.add_argument("--points", help="kernel points CSV: label,intensity[,gflops]")
    roof.add_argument("--out-dir", required=True)
    roof.add_argument("--gnuplot", action="store_true", help="also emit a gnuplot script")
    roof.set_defaults(handler=_cmd_analyze_roofline)

    scaling = analyze_sub.add_parser("scaling", help="fit and project scaling models")
    scaling.add_argument("--model", required=True, choices=["amdahl", "gustafson", "mpi-shares"])
    scaling.add_argument("--in", dest="input", required=True, help="runs CSV/JSON, or share CSV")
    scaling.add_argument(
        "--group", default="app,platform,compiler", help="comma list of grouping fields"
    )
    scaling.add_argument(
        "--project",
        default=",".join(str(p) for p in DEFAULT_PROJECTION),
        help="comma list of unit counts to project to",
    )
    scaling.add_argument("--out-dir", required=True)
    scaling.add_argument("--gnuplot", action="store_true", help="also emit a gnuplot script")
    scaling.set_defaults(handler=_cmd_analyze_scaling)

    energy = analyze_sub.add_parser("energy", help="energy metrics per run record")
    energy.add_argument("--in", dest="input", required=True, help="runs CSV/JSON file")
    energy.add_argument("--out", help="CSV output path")
    energy.set_defaults(handler=_cmd_analyze_energy)

    network = analyze_sub.add_parser("network", help="pairwise bandwidth weak links")
    network.add_argument("--in", dest="input", required=True, help="pairwise CSV/JSON file")
    network.add_argument("--threshold", type=float, default=0.10)
    network.add_argument("--message-size", type=int, help="select one message size (bytes)")
    network.add_argument("--out-dir", required=True)
    network.set_defaults(handler=_cmd_analyze_network)

    report = top.add_parser("report", help="rendered comparison reports")
    report_sub = report.add_subparsers(dest="report_kind", required=True)
    compare = report_sub.add_parser("compare", help="per-app platform/compiler comparison")
    compare.add_argument("--in", dest="input", required=True, help="runs CSV/JSON file")
    compare.add_argument("--metric", default="time", choices=["time", "rate"])
    compare.add_argument("--out", help="CSV output path")
    compare.set_defaults(handler=_cmd_report_compare)

    return parser


def _thread_cap() -> int | None:
    raw = os.environ.get("PERFCHAR_THREADS")
    if not raw:
        return None
    try:
        cap = int(raw)
    except ValueError as exc:
        raise ParameterError(f"PERFCHAR_THREADS must be an integer, got {raw!r}") from exc
    if cap < 1:
        raise ParameterError("PERFCHAR_THREADS must be >= 1")
    return cap


def _parse_thread_list(text: str) -> list[int]:
    try:
        counts = [int(part) for part in text.split(",") if part.strip()]
    except ValueError as exc:
        raise ParameterError(f"bad thread list {text!r}") from exc
    if not counts:
        raise ParameterError("no thread counts given")
    cap = _thread_cap()
    if cap is not None:
        counts = sorted({min(c, cap) for c in counts})
    return counts


def _cmd_spec_show(args) -> int:
    spec = load_platform_spec(args.spec)
    print(f"platform: {spec.name}")
    print(f"cores/node: {spec.cores_per_node} ({spec.sockets} sockets x {spec.cores_per_socket})")
    print(f"frequency: {spec.frequency:.2f} GHz")
    for unit in spec.vector_units:
        single = peak_flops(spec, "single", "vector")
        double = peak_flops(spec, "double", "vector")
        print(
            f"vector unit {unit.extension_name}: {unit.register_width}-bit, "
            f"{single:.2f} / {double:.2f} GFlop/s per core (single/double)"
        )
    if spec.vector_units or spec.scalar_issue_per_cycle is not None:
        print(f"scalar peak: {peak_flops(spec, 'double', 'scalar'):.2f} GFlop/s per core")
    print(
        f"memory: {spec.memory_channels} channels x {spec.channel_peak:.2f} GB/s "
        f"= {peak_bandwidth(spec):.2f} GB/s"
    )
    print(f"bandwidth-benchmark minimum elements: {stream_min_elements(spec)}")
    return 0


def _cmd_bench_mem(args) -> int:
    counts = _parse_thread_list(args.threads)
    spec = load_platform_spec(args.spec) if args.spec else None
    if len(counts) == 1:
        config = TriadConfig(
            elements=args.elements, threads=counts[0], repetitions=args.reps, pinning=args.pin
        )
        result = run_stream_triad(config, spec=spec)
        points = [(result.threads, result.best)]
        meta = result
    else:
        sweep = thread_sweep(
            "triad",
            counts,
            elements=args.elements,
            repetitions=args.reps,
            pinning=args.pin,
            spec=spec,
        )
        points = [(pt.threads, pt.value) for pt in sweep]
        meta = None

    print(f"{'threads':>8}  {'best GB/s':>10}")
    for threads, best in points:
        print(f"{threads:>8}  {best:>10.2f}")
    if meta is not None:
        print(
            f"elements={meta.elements} reps={len(meta.per_repetition)} q={meta.q} "
            f"warmup={meta.warmup_passes} pinning={meta.pinning} pinned={meta.pinned}"
        )
    if args.out:
        emit_plot_data(points, args.out, header=["threads", "best_gbs"])
        write_sidecar_metadata(
            args.out,
            {
                "command": "bench mem",
                "elements": args.elements,
                "repetitions": args.reps,
                "pinning": args.pin,
                "triad_q": 3.0,
                "warmup_passes": 2,
            },
        )
    return 0


def _cmd_bench_flops(args) -> int:
    counts = _parse_thread_list(args.threads)
    rows = []
    for count in counts:
        result = run_fma_kernel(args.precision, args.mode, args.duration, threads=count)
        rows.append((result.mode, result.precision, result.threads, result.gflops))
        print(
            f"{result.mode}/{result.precision} threads={result.threads}: "
            f"{result.gflops:.3f} GFlop/s over {result.duration:.2f} s"
        )
    if args.out:
        emit_plot_data(
            [(m, p, g) for m, p, _, g in rows], args.out, header=["mode", "precision", "gflops"]
        )
        write_sidecar_metadata(
            args.out, {"command": "bench flops", "duration": args.duration}
        )
    return 0


def _load_kernel_points(path: str | Path) -> list[KernelPoint]:
    """Kernel points from CSV: either an intensity column or raw counter totals.

    Columns: ``label`` plus ``intensity``, or ``flops,loads,stores`` (optional
    ``access_bytes``, default 8) from which intensity is derived. Optional
    ``gflops`` and ``time_share_pct`` annotate the point.
    """
    points = []
    with open(path, encoding="utf-8", newline="") as handle:
        reader = csv.DictReader(ln for ln in handle if not ln.lstrip().startswith("#"))
        names = reader.fieldnames or []
        has_intensity = "intensity" in names
        has_counters = all(c in names for c in ("flops", "loads", "stores"))
        if "label" not in names or not (has_intensity or has_counters):
            raise SchemaError(
                f"{path}: kernel points need 'label' plus 'intensity' or 'flops,loads,stores'"
            )
        for row in reader:
            if has_intensity and row.get("intensity"):
                intensity = float(row["intensity"])
            else:
                sample = CounterSample(
                    flops=float(row["flops"]),
                    loads=float(row["loads"]),
                    stores=float(row["stores"]),
                    access_bytes=int(row.get("access_bytes") or 8),
                )
                intensity = arithmetic_intensity(sample)
            measured = row.get("gflops") or None
            share = row.get("time_share_pct") or None
            points.append(
                KernelPoint(
                    label=row["label"],
                    intensity=intensity,
                    measured_perf=float(measured) if measured else None,
                    time_share=float(share) / 100.0 if share else None,
                )
            )
    if not points:
        raise SchemaError(f"{path}: no kernel points")
    return points


def _cmd_analyze_roofline(args) -> int:
    if args.spec or args.points:
        _analysis_config(
            specs=[args.spec] if args.spec else (),
            data=[args.points] if args.points else (),
            out_dir=args.out_dir,
        )
    else:
        # Peaks given explicitly on the command line; no input files involved.
        Path(args.out_dir).mkdir(parents=True, exist_ok=True)
    if args.spec:
        spec = load_platform_spec(args.spec)
        if args.scope == "node":
            flops = node_peak_flops(spec, args.precision, args.mode)
        else:
            flops = peak_flops(spec, args.precision, args.mode)
        bandwidth = args.bandwidth_gbs or peak_bandwidth(spec)
        label = spec.name
    else:
        if args.flops_gflops is None or args.bandwidth_gbs is None:
            raise ParameterError("need --spec, or both --flops-gflops and --bandwidth-gbs")
        flops, bandwidth, label = args.flops_gflops, args.bandwidth_gbs, "model"
    if args.flops_gflops is not None:
        flops = args.flops_gflops
    model = build_roofline(flops, bandwidth, scope=args.scope)

    points = _load_kernel_points(args.points) if args.points else []
    i_min = model.ridge_intensity / 256
    i_max = model.ridge_intensity * 256
    if points:
        positive = [p.intensity for p in points if p.intensity > 0]
        if positive:
            i_min = min(i_min, min(positive) / 2)
            i_max = max(i_max, max(positive) * 2)

    out_dir = Path(args.out_dir)
    curve_rows = [(i, perf, "roof") for i, perf in roofline_curve(model, i_min, i_max)]
    classifications = [classify(model, p) for p in points]
    for point, cls in zip(points, classifications):
        perf = point.measured_perf if point.measured_perf is not None else cls.sustained
        curve_rows.append((point.intensity, perf, point.label))
    curve_path = out_dir / "roofline_curve.csv"
    emit_plot_data(curve_rows, curve_path, header=["intensity", "gflops", "label"])

    files = [curve_path]
    if classifications:
        point_rows = [
            (
                c.label,
                p.intensity,
                "" if p.measured_perf is None else p.measured_perf,
                c.sustained,
                c.bound,
                "" if c.headroom is None else c.headroom,
                c.above_roof,
            )
            for p, c in zip(points, classifications)
        ]
        points_path = out_dir / "roofline_points.csv"
        emit_plot_data(
            point_rows,
            points_path,
            header=["label", "intensity", "measured_gflops", "sustained_gflops", "bound", "headroom", "above_roof"],
        )
        files.append(points_path)

    if args.gnuplot:
        script = gnuplot_loglog_script(
            [f.name for f in files], "roofline.png", f"{label} roofline ({model.scope})",
            "arithmetic intensity [Flop/Byte]", "performance [GFlop/s]",
        )
        atomic_write_text(out_dir / "roofline.gp", script)

    write_sidecar_metadata(
        curve_path,
        {
            "command": "analyze roofline",
            "peak_gflops": flops,
            "peak_gbs": bandwidth,
            "ridge_intensity": model.ridge_intensity,
            "scope": model.scope,
        },
    )
    print(
        f"{label} ({model.scope}): peak {model.peak_flops:.2f} GFlop/s, "
        f"{model.peak_bandwidth:.2f} GB/s, ridge {model.ridge_intensity:.5f} Flop/Byte"
    )
    for cls in classifications:
        print(f"  {cls.label}: {cls.bound} (ceiling {cls.sustained:.3f} GFlop/s)")
    return 0


def _group_records(records: list[RunRecord], fields: tuple[str, ...]):
    groups: dict[tuple, list[RunRecord]] = {}
    for record in records:
        key = tuple(getattr(record, f) for f in fields)
        groups.setdefault(key, []).append(record)
    return dict(sorted(groups.items()))


def _speedup_points(members: list[RunRecord], model: str) -> list[tuple[float, float]]:
    """Speedup per node count: time ratios for strong scaling, rate ratios for weak."""
    if model == "gustafson":
        missing = [r for r in members if r.app_metric is None or not r.app_metric.is_rate()]
        if missing:
            raise InvalidDataError(
                "weak-scaling fits need a rate app_metric (e.g. MLUP/s) on every record"
            )
        by_nodes = aggregate(
            members, group_key=lambda r: (r.nodes,), value=lambda r: r.app_metric.value
        )
        base = by_nodes[(min(k[0] for k in by_nodes),)].mean
        return [(k[0], st.mean / base) for k, st in sorted(by_nodes.items())]
    by_nodes = aggregate(members, group_key=lambda r: (r.nodes,))
    base = by_nodes[(min(k[0] for k in by_nodes),)].mean
    return [(k[0], base / st.mean) for k, st in sorted(by_nodes.items())]


def _parse_share_file(path: str | Path, fields: tuple[str, ...]):
    groups: dict[tuple, list[tuple[float, float, float]]] = {}
    with open(path, encoding="utf-8", newline="") as handle:
        reader = csv.DictReader(ln for ln in handle if not ln.lstrip().startswith("#"))
        needed = ("procs", "lb_share_pct", "com_share_pct")
        if reader.fieldnames is None or any(c not in reader.fieldnames for c in needed):
            raise SchemaError(f"{path}: share files need columns {needed}")
        for row in reader:
            key = tuple(row.get(f, "") for f in fields)
            groups.setdefault(key, []).append(
                (float(row["procs"]), float(row["lb_share_pct"]), float(row["com_share_pct"]))
            )
    if not groups:
        raise SchemaError(f"{path}: no share rows")
    return dict(sorted(groups.items()))


def _cmd_analyze_scaling(args) -> int:
    _analysis_config(data=[args.input], out_dir=args.out_dir)
    fields = tuple(f.strip() for f in args.group.split(",") if f.strip())
    p_list = [float(p) for p in args.project.split(",") if p.strip()]
    out_dir = Path(args.out_dir)

    if args.model == "mpi-shares":
        groups = _parse_share_file(args.input, fields)
        fit_rows, curve_rows = [], []
        for key, pts in groups.items():
            label = "/".join(key)
            fit = fit_mpi_shares(pts)
            lb_only = critical_units(fit, 100.0, "lb_only")
            lb_com = critical_units(fit, 100.0, "lb_plus_com")
            fit_rows.append(
                (
                    label, fit.a, fit.sigma_a, fit.b, fit.sigma_b, fit.c, fit.sigma_c,
                    "" if lb_only is None else lb_only.units,
                    "" if lb_com is None else lb_com.units,
                )
            )
            for p, _, _ in pts:
                curve_rows.append((label, "lb", p, fit.a * p + fit.b))
                curve_rows.append((label, "com", p, fit.c))
            print(
                f"{label}: lb = {fit.a:.3f}*p + {fit.b:.3f} (%), com = {fit.c:.3f} % "
                + (f"(100% at p={lb_only.units:.1f} lb-only, {lb_com.units:.1f} lb+com)"
                   if lb_only and lb_com else "(no critical point)")
            )
        fits_path = out_dir / "mpi_share_fits.csv"
        emit_plot_data(
            fit_rows, fits_path,
            header=["group", "a", "sigma_a", "b", "sigma_b", "c", "sigma_c",
                    "critical_lb_only", "critical_lb_plus_com"],
        )
        curves_path = out_dir / "mpi_share_curves.csv"
        emit_plot_data(curve_rows, curves_path, header=["group", "series", "p", "share_pct"])
        write_sidecar_metadata(fits_path, {"command": "analyze scaling", "model": args.model})
        return 0

    records = parse_runs(args.input)
    groups = _group_records(records, fields)
    fit_rows, proj_rows = [], []
    for key, members in groups.items():
        label = "/".join(str(k) for k in key)
        points = _speedup_points(members, args.model)
        if args.model == "amdahl":
            fit = fit_amdahl(points, unit="nodes")
            fit_rows.append((label, "amdahl", fit.a, fit.sigma_a, fit.b, fit.sigma_b, fit.residual))
            print(f"{label}: a = {fit.a:.4f} +- {fit.sigma_a:.4f}, b = {fit.b:.4f} +- {fit.sigma_b:.4f}")
        else:
            fit = fit_gustafson(points, unit="nodes")
            fit_rows.append((label, "gustafson", fit.a, fit.sigma_a, "", "", fit.residual))
            print(f"{label}: a = {fit.a:.4f} +- {fit.sigma_a:.4f}")
        for point in project(fit, p_list):
            proj_rows.append((label, point.units, point.speedup, point.efficiency))

    fits_path = out_dir / "scaling_fits.csv"
    emit_plot_data(
        fit_rows, fits_path,
        header=["group", "model", "a", "sigma_a", "b", "sigma_b", "residual"],
    )
    proj_path = out_dir / "scaling_projection.csv"
    emit_plot_data(proj_rows, proj_path, header=["group", "p", "speedup", "efficiency"])
    if args.gnuplot:
        script = gnuplot_loglog_script(
            [proj_path.name], "scaling.png", f"{args.model} projection", "units", "speedup"
        )
        atomic_write_text(out_dir / "scaling.gp", script)
    write_sidecar_metadata(fits_path, {"command": "analyze scaling", "model": args.model})
    return 0


def _cmd_analyze_energy(args) -> int:
    _analysis_config(data=[args.input], out=args.out)
    records = parse_runs(args.input)
    rows = []
    for r in sorted(records, key=lambda r: (r.app, r.platform, r.compiler, r.nodes, r.timestamp)):
        em = energy_metrics(r)
        rows.append(
            (
                r.app, r.platform, r.compiler, r.nodes, r.time,
                "" if em is None else em.e2s_kj,
                "" if em is None else em.edp_kjs,
                "" if em is None or em.work_per_joule is None else em.work_per_joule.value,
                "" if em is None or em.work_per_joule is None else em.work_per_joule.unit,
            )
        )
    header = ["app", "platform", "compiler", "nodes", "time_s", "e2s_kj", "edp_kjs",
              "work_per_joule", "work_unit"]
    print("  ".join(header))
    for row in rows:
        print("  ".join(f"{v:.6g}" if isinstance(v, float) else str(v) for v in row))
    if args.out:
        emit_plot_data(rows, args.out, header=header)
        write_sidecar_metadata(args.out, {"command": "analyze energy"})
    return 0


def _cmd_analyze_network(args) -> int:
    _analysis_config(data=[args.input], out_dir=args.out_dir)
    matrix = parse_pairwise_bandwidth(args.input, message_size=args.message_size)
    links = detect_weak_links(matrix, threshold=args.threshold)
    out_dir = Path(args.out_dir)

    link_rows = [
        (w.node_a, w.node_b, w.bandwidth, w.reference, 100.0 * w.deficit) for w in links
    ]
    links_path = out_dir / "weak_links.csv"
    if link_rows:
        emit_plot_data(
            link_rows, links_path,
            header=["node_a", "node_b", "bandwidth_gbs", "reference_gbs", "deficit_pct"],
        )
    else:
        atomic_write_text(links_path, "node_a,node_b,bandwidth_gbs,reference_gbs,deficit_pct\n")
    median_rows = [
        (node, matrix.row_median(i)) for i, node in enumerate(matrix.node_ids)
    ]
    emit_plot_data(median_rows, out_dir / "node_medians.csv", header=["node", "median_gbs"])
    write_sidecar_metadata(
        links_path,
        {
            "command": "analyze network",
            "message_size": matrix.message_size,
            "threshold": args.threshold,
        },
    )

    print(
        f"{len(matrix.node_ids)} nodes at message size {matrix.message_size}; "
        f"{len(links)} weak link(s) at threshold {args.threshold:.0%}"
    )
    for w in links:
        print(
            f"  {w.node_a} <-> {w.node_b}: {w.bandwidth:.3f} GB/s, "
            f"{100 * w.deficit:.1f}% below reference {w.reference:.3f} GB/s"
        )
    if matrix.asymmetry_warnings:
        print(f"  note: {len(matrix.asymmetry_warnings)} pair(s) with asymmetric directions")
    return 0


def _cmd_report_compare(args) -> int:
    _analysis_config(data=[args.input], out=args.out)
    records = parse_runs(args.input)
    table = compare_platforms(records, metric=args.metric)
    print(table.to_text())
    if args.out:
        rows = table.to_csv_rows()
        emit_plot_data(rows[1:], args.out, header=rows[0])
        write_sidecar_metadata(args.out, {"command": "report compare", "metric": args.metric})
    return 0


if __name__ == "__main__":
    sys.exit(main())
