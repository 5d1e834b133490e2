"""perfchar: performance characterization and scalability projection toolkit.

Declared hardware limits, portable microbenchmarks, roofline analysis,
energy metrics, and scaling-law fitting over ingested measurement data.
"""

__version__ = "0.1.0"

from .exceptions import PerfcharError
from .hwmodel import (
    PlatformSpec,
    VectorUnitSpec,
    load_platform_spec,
    node_peak_flops,
    peak_bandwidth,
    peak_flops,
    stream_min_elements,
)
from .ingest import (
    AggregateStats,
    AppMetric,
    PairwiseBandwidthMatrix,
    RunRecord,
    WeakLink,
    aggregate,
    detect_weak_links,
    flag_outliers,
    parse_pairwise_bandwidth,
    parse_runs,
    serialize_runs,
)
from .metrics import (
    EfficiencyPoint,
    EnergyMetrics,
    compare_platforms,
    energy_metrics,
    strong_efficiency,
    weak_efficiency,
)
from .microbench import (
    BandwidthResult,
    ThroughputResult,
    TriadConfig,
    run_fma_kernel,
    run_stream_triad,
    thread_sweep,
)
from .roofline import (
    CounterSample,
    KernelPoint,
    RooflineModel,
    arithmetic_intensity,
    build_roofline,
    classify,
    roofline_curve,
    sustained_perf,
)
from .scalefit import (
    AmdahlFit,
    GustafsonFit,
    MpiShareFit,
    critical_units,
    eval_amdahl,
    eval_gustafson,
    fit_amdahl,
    fit_gustafson,
    fit_mpi_shares,
    project,
    share_decomposition,
    weak_scaling_size,
)
