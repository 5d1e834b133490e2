"""Scaling-law fitting and projection.

Three models cover the measured regimes:

* strong scaling: ``s(p) = 1/((1-a) + a/p) + b`` where ``a`` is the parallel
  fraction and ``b`` approximates a constant parallelization overhead;
* weak scaling: ``s(p) = (1-a) + a*p``;
* MPI-time decomposition: the load-balance share of total time follows a line
  ``a*p + b`` (percent) while the communication share stays constant at ``c``.

The strong-scaling fit is a damped Gauss-Newton (Levenberg-Marquardt style)
loop with analytic partial derivatives. Speedup measurements carry roughly
constant *relative* error, so residuals are weighted by 1/s by default; with
that weighting the reported 1-sigma uncertainties (covariance at the optimum,
scaled by reduced chi-square) are calibrated. The weak-scaling and share
models are linear and solved in closed form.

The unit of ``p`` (MPI processes vs nodes) is carried as a label from the
input data, never assumed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .exceptions import (
    ConvergenceError,
    InvalidDataError,
    ParameterError,
    UnderdeterminedError,
)

A_LOWER_BOUND = 1e-6  # open lower end of the parallel fraction's domain

#: Memory model for lattice weak-scaling sizing: doubles stored per cell.
LATTICE_VALUES_PER_CELL = 41
BYTES_PER_DOUBLE = 8


@dataclass(frozen=True)
class AmdahlFit:
    """Strong-scaling parameters with 1-sigma uncertainties."""

    a: float  # parallel fraction, (0, 1]
    b: float  # overhead offset
    sigma_a: float
    sigma_b: float
    residual: float  # weighted sum of squared residuals
    unit: str = "units"

    def __post_init__(self):
        if not 0 < self.a <= 1:
            raise ParameterError("parallel fraction a must be in (0, 1]")
        if self.sigma_a < 0 or self.sigma_b < 0:
            raise ParameterError("uncertainties must be >= 0")


@dataclass(frozen=True)
class GustafsonFit:
    """Weak-scaling parameter with 1-sigma uncertainty."""

    a: float  # parallel fraction, [0, 1]
    sigma_a: float
    residual: float
    unit: str = "units"

    def __post_init__(self):
        if not 0 <= self.a <= 1:
            raise ParameterError("parallel fraction a must be in [0, 1]")
        if self.sigma_a < 0:
            raise ParameterError("uncertainties must be >= 0")


@dataclass(frozen=True)
class MpiShareFit:
    """MPI-time decomposition parameters, all in percent of total time."""

    a: float  # load-balance share slope, % per unit
    b: float  # load-balance share intercept, %
    c: float  # communication share constant, %
    sigma_a: float
    sigma_b: float
    sigma_c: float
    residual: float
    unit: str = "processes"

    def __post_init__(self):
        if self.c < 0:
            raise ParameterError("communication share must be >= 0")
        if min(self.sigma_a, self.sigma_b, self.sigma_c) < 0:
            raise ParameterError("uncertainties must be >= 0")


@dataclass(frozen=True)
class CriticalPoint:
    """Unit count where a share expression reaches the threshold."""

    units: float
    definition: str  # "lb_only" or "lb_plus_com"
    threshold_pct: float


@dataclass(frozen=True)
class ProjectionPoint:
    units: float
    speedup: float
    efficiency: float


@dataclass(frozen=True)
class WeakScalingSize:
    """Global problem dimensions for a per-unit block times a decomposition."""

    global_dims: tuple[int, int, int]
    total_cells: int
    memory_bytes: int


def eval_amdahl(a: float, b: float, p: float) -> float:
    """Strong-scaling speedup at p units: 1/((1-a) + a/p) + b."""
    if not 0 < a <= 1:
        raise ParameterError("parallel fraction a must be in (0, 1]")
    if p < 1:
        raise ParameterError("unit count p must be >= 1")
    return 1.0 / ((1.0 - a) + a / p) + b


def eval_gustafson(a: float, p: float) -> float:
    """Weak-scaling speedup at p units: (1-a) + a*p."""
    if not 0 <= a <= 1:
        raise ParameterError("parallel fraction a must be in [0, 1]")
    if p < 1:
        raise ParameterError("unit count p must be >= 1")
    return (1.0 - a) + a * p


def _amdahl_model(a: float, b: float, p: np.ndarray) -> np.ndarray:
    return 1.0 / ((1.0 - a) + a / p) + b


def _amdahl_jacobian(a: float, p: np.ndarray) -> np.ndarray:
    denom = (1.0 - a) + a / p
    return np.column_stack([(1.0 - 1.0 / p) / denom**2, np.ones_like(p)])


def fit_amdahl(
    points: Iterable[tuple[float, float]],
    *,
    weighting: str = "relative",
    initial: tuple[float, float] = (0.9, 0.0),
    max_iter: int = 200,
    tol: float = 1e-13,
    unit: str = "units",
) -> AmdahlFit:
    """Fit the strong-scaling model to (p, speedup) points.

    ``weighting="relative"`` divides residuals by the measured speedups
    (constant relative error); ``"absolute"`` uses raw residuals. Raises
    UnderdeterminedError below three distinct p values and ConvergenceError
    (carrying the best iterate) if the loop exhausts ``max_iter``.
    """
    pts = sorted(points)
    p = np.array([q for q, _ in pts], dtype=float)
    s = np.array([v for _, v in pts], dtype=float)
    if len(set(p.tolist())) < 3:
        raise UnderdeterminedError("strong-scaling fit needs >= 3 distinct p values")
    if np.any(p < 1):
        raise ParameterError("unit counts must be >= 1")
    if np.any(s <= 0):
        raise ParameterError("speedups must be positive")
    if weighting == "relative":
        w = 1.0 / s
    elif weighting == "absolute":
        w = np.ones_like(s)
    else:
        raise ParameterError(f"weighting must be 'relative' or 'absolute', got {weighting!r}")

    def ssr_at(a: float, b: float) -> float:
        return float(np.sum((w * (s - _amdahl_model(a, b, p))) ** 2))

    a, b = initial
    a = min(max(a, A_LOWER_BOUND), 1.0)
    lam = 1e-3
    ssr = ssr_at(a, b)
    converged = False
    for _ in range(max_iter):
        jac = w[:, None] * _amdahl_jacobian(a, p)
        resid = w * (s - _amdahl_model(a, b, p))
        jtj = jac.T @ jac
        grad = jac.T @ resid
        step = None
        for _ in range(40):
            damped = jtj + lam * np.diag(np.diag(jtj))
            try:
                step = np.linalg.solve(damped, grad)
            except np.linalg.LinAlgError:
                lam *= 10.0
                continue
            a_new = min(max(a + step[0], A_LOWER_BOUND), 1.0)
            b_new = b + step[1]
            ssr_new = ssr_at(a_new, b_new)
            if ssr_new <= ssr:
                improvement = ssr - ssr_new
                a, b, ssr = a_new, b_new, ssr_new
                lam = max(lam / 10.0, 1e-12)
                break
            lam *= 10.0
        else:
            # No damping level improves the fit: we are at a local optimum.
            converged = True
            break
        if float(np.linalg.norm(step)) < tol or improvement < tol * (1.0 + ssr):
            converged = True
            break

    sigma_a, sigma_b = _amdahl_uncertainties(a, p, w, ssr)
    fit = AmdahlFit(a=a, b=b, sigma_a=sigma_a, sigma_b=sigma_b, residual=ssr, unit=unit)
    if not converged:
        raise ConvergenceError(
            f"strong-scaling fit did not converge within {max_iter} iterations", best_fit=fit
        )
    return fit


def _amdahl_uncertainties(a: float, p: np.ndarray, w: np.ndarray, ssr: float) -> tuple[float, float]:
    jac = w[:, None] * _amdahl_jacobian(a, p)
    dof = len(p) - 2
    scale = ssr / dof if dof > 0 else 0.0
    try:
        cov = scale * np.linalg.inv(jac.T @ jac)
    except np.linalg.LinAlgError:
        return math.inf, math.inf
    return math.sqrt(max(cov[0, 0], 0.0)), math.sqrt(max(cov[1, 1], 0.0))


def fit_gustafson(points: Iterable[tuple[float, float]], *, unit: str = "units") -> GustafsonFit:
    """Closed-form least squares for the weak-scaling model (linear in a)."""
    pts = sorted(points)
    p = np.array([q for q, _ in pts], dtype=float)
    s = np.array([v for _, v in pts], dtype=float)
    if len(set(p.tolist())) < 2:
        raise UnderdeterminedError("weak-scaling fit needs >= 2 distinct p values")
    if np.any(p < 1):
        raise ParameterError("unit counts must be >= 1")
    x = p - 1.0
    y = s - 1.0
    sxx = float(np.sum(x * x))
    a = float(np.sum(x * y)) / sxx
    a_clamped = min(max(a, 0.0), 1.0)
    resid = float(np.sum((s - ((1.0 - a_clamped) + a_clamped * p)) ** 2))
    dof = len(p) - 1
    sigma_a = math.sqrt((resid / dof) / sxx) if dof > 0 else 0.0
    return GustafsonFit(a=a_clamped, sigma_a=sigma_a, residual=resid, unit=unit)


def fit_mpi_shares(
    points: Iterable[tuple[float, float, float]], *, unit: str = "processes"
) -> MpiShareFit:
    """Fit the share decomposition to (p, lb_share_pct, com_share_pct) points.

    The load-balance share is fitted with ordinary least squares; the
    communication share is the sample mean with its standard error.
    """
    pts = sorted(points)
    p = np.array([q for q, _, _ in pts], dtype=float)
    lb = np.array([v for _, v, _ in pts], dtype=float)
    com = np.array([v for _, _, v in pts], dtype=float)
    if len(set(p.tolist())) < 3:
        raise UnderdeterminedError("share fit needs >= 3 distinct p values")
    if np.any(lb < 0) or np.any(lb > 100) or np.any(com < 0) or np.any(com > 100):
        raise InvalidDataError("shares must lie within [0, 100] percent")
    if np.any(lb + com > 100.0):
        bad = p[lb + com > 100.0]
        raise InvalidDataError(
            f"load-balance and communication shares exceed 100% at p = {bad.tolist()}"
        )

    n = len(p)
    design = np.column_stack([p, np.ones_like(p)])
    coef, *_ = np.linalg.lstsq(design, lb, rcond=None)
    a, b = float(coef[0]), float(coef[1])
    resid = float(np.sum((lb - (a * p + b)) ** 2))
    dof = n - 2
    scale = resid / dof if dof > 0 else 0.0
    cov = scale * np.linalg.inv(design.T @ design)
    sigma_a = math.sqrt(max(cov[0, 0], 0.0))
    sigma_b = math.sqrt(max(cov[1, 1], 0.0))

    c = float(np.mean(com))
    if n > 1:
        sigma_c = float(np.std(com, ddof=1)) / math.sqrt(n)
    else:
        sigma_c = 0.0

    fitted_lb = a * p + b
    if np.any(fitted_lb < 0) or np.any(fitted_lb + c > 100.0):
        raise InvalidDataError("fitted shares leave [0, 100] percent at observed p")
    return MpiShareFit(
        a=a, b=b, c=c, sigma_a=sigma_a, sigma_b=sigma_b, sigma_c=sigma_c,
        residual=resid, unit=unit,
    )


def eval_lb_share(fit: MpiShareFit, p: float) -> float:
    """Load-balance share (percent) the fitted line predicts at p."""
    return fit.a * p + fit.b


def critical_units(
    fit: MpiShareFit, threshold_pct: float = 100.0, definition: str = "lb_only"
) -> CriticalPoint | None:
    """Smallest p where the chosen share expression reaches the threshold.

    ``lb_only`` solves a*p + b = threshold; ``lb_plus_com`` adds the constant
    communication share. Returns None when the slope is not positive (the
    share never reaches the threshold).
    """
    if definition not in ("lb_only", "lb_plus_com"):
        raise ParameterError(f"definition must be 'lb_only' or 'lb_plus_com', got {definition!r}")
    if fit.a <= 0:
        return None
    offset = fit.b if definition == "lb_only" else fit.b + fit.c
    units = (threshold_pct - offset) / fit.a
    return CriticalPoint(units=units, definition=definition, threshold_pct=threshold_pct)


def project(fit: AmdahlFit | GustafsonFit, p_list: Sequence[float]) -> list[ProjectionPoint]:
    """Evaluate a fitted model over unit counts, with efficiency = speedup / p."""
    if isinstance(fit, AmdahlFit):
        speedup_at = lambda p: eval_amdahl(fit.a, fit.b, p)
    elif isinstance(fit, GustafsonFit):
        speedup_at = lambda p: eval_gustafson(fit.a, p)
    else:
        raise ParameterError(f"cannot project a {type(fit).__name__}")
    points = []
    for p in sorted(p_list):
        s = speedup_at(p)
        points.append(ProjectionPoint(units=p, speedup=s, efficiency=s / p))
    return points


def share_decomposition(t_cal: float, t_com: float, t_lb: float) -> tuple[float, float, float]:
    """Fractions of total time spent computing, communicating, and waiting.

    The three components are additive, so the returned fractions sum to one.
    """
    if min(t_cal, t_com, t_lb) < 0:
        raise ParameterError("time components must be >= 0")
    total = t_cal + t_com + t_lb
    if total <= 0:
        raise ParameterError("total time must be positive")
    return t_cal / total, t_com / total, t_lb / total


def weak_scaling_size(
    per_unit_dims: tuple[int, int, int],
    decomposition: tuple[int, int, int],
    *,
    values_per_cell: int = LATTICE_VALUES_PER_CELL,
) -> WeakScalingSize:
    """Global lattice size for a per-unit block replicated over a decomposition.

    Memory is cells * values_per_cell * 8 bytes (double precision).
    """
    if len(per_unit_dims) != 3 or len(decomposition) != 3:
        raise ParameterError("dims and decomposition must both have 3 components")
    if min(per_unit_dims) < 1 or min(decomposition) < 1:
        raise ParameterError("all components must be >= 1")
    global_dims = tuple(d * r for d, r in zip(per_unit_dims, decomposition))
    cells = global_dims[0] * global_dims[1] * global_dims[2]
    return WeakScalingSize(
        global_dims=global_dims,
        total_cells=cells,
        memory_bytes=cells * values_per_cell * BYTES_PER_DOUBLE,
    )
