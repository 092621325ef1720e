"""Ball-midpoint iteration for absolutely minimizing Lipschitz extensions.

The interior update replaces ``u(x)`` by the midpoint of the max and min of
``u`` over the metric ball of radius ``r`` around ``x`` (clipped to the
closed working region; distances follow the ambient lattice).  Fixed points
balance the upward and downward metric slopes at scale ``r``, which is
exactly the quantity the uniqueness theory manipulates, and a decreasing
radius schedule sharpens the fixed point toward the extension.

Convergence control: alongside the iterate, the solver runs the same sweeps
on two constant-initialized envelope fields that start above and below
everything.  The update is monotone, so the envelopes squeeze every fixed
point and every iterate; when their gap drops under ``tol`` the returned
field is certified within ``tol`` of the (unique) fixed point in sup norm,
regardless of initialization.  A residual-only stopping rule cannot give
that guarantee, which the uniqueness acceptance check needs.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import InputError, NumericError
from .extensions import BoundaryData, mcshane_lower, mcshane_upper
from .finsler import FinslerStructure
from .grid import GridDomain
from .metric import BallTable, MetricGraph, build_graph

logger = logging.getLogger("finsler_amle")

DEFAULT_TOL_FACTOR = 1e-8  # default tol = factor * oscillation of the data


@dataclass(frozen=True)
class SolverConfig:
    """Radius schedule and stopping parameters for the midpoint iteration."""

    r_schedule: tuple[float, ...]
    tol: float | None = None  # absolute sup-norm tolerance; None -> 1e-8 * osc
    max_iter: int = 200_000
    sweep: str = "gauss-seidel"
    record_history: bool = False

    def __post_init__(self):
        radii = tuple(float(r) for r in self.r_schedule)
        object.__setattr__(self, "r_schedule", radii)
        if not radii:
            raise InputError("r_schedule must not be empty")
        if any(b >= a for a, b in zip(radii, radii[1:])):
            raise InputError("r_schedule must be strictly decreasing")
        if self.tol is not None and not self.tol > 0:
            raise InputError("tol must be positive")
        if self.sweep not in ("gauss-seidel", "jacobi"):
            raise InputError(f"unknown sweep {self.sweep!r}")
        if self.max_iter < 1:
            raise InputError("max_iter must be at least 1")

    @classmethod
    def default(cls, h: float) -> "SolverConfig":
        # Large radii propagate boundary information fast, small ones sharpen.
        return cls(r_schedule=(8 * h, 4 * h, 2 * h))

    def validate_for(self, h: float):
        if any(r < 2 * h - 1e-12 for r in self.r_schedule):
            raise InputError("all radii must be at least 2h")


@dataclass
class SolveReport:
    """Per-radius iteration counts and the convergence certificate."""

    radii: list = field(default_factory=list)
    iterations: list = field(default_factory=list)
    residuals: list = field(default_factory=list)
    gaps: list = field(default_factory=list)
    tol: float = 0.0
    converged: bool = False
    wall_ms: float | None = None
    # Monotonicity log: most positive per-sweep change of max(u) and most
    # negative change of min(u); both stay 0 when the sweeps behave.
    max_increase: float = 0.0
    min_decrease: float = 0.0
    history: list | None = None

    def to_dict(self, include_timing: bool = False) -> dict:
        return {
            "radii": [float(r) for r in self.radii],
            "iterations": [int(i) for i in self.iterations],
            "residuals": [float(r) for r in self.residuals],
            "gaps": [float(g) for g in self.gaps],
            "tol": float(self.tol),
            "converged": bool(self.converged),
            "wall_ms": (float(self.wall_ms)
                        if include_timing and self.wall_ms is not None else None),
            "max_increase": float(self.max_increase),
            "min_decrease": float(self.min_decrease),
        }


# -- ball extrema ----------------------------------------------------------------


def ball_sup(u, graph: MetricGraph, x: int, r: float) -> float:
    """Max of ``u`` over the metric ball (members where ``u`` is defined)."""
    vals = _ball_values(u, graph, x, r)
    return float(vals.max())


def ball_inf(u, graph: MetricGraph, x: int, r: float) -> float:
    """Min of ``u`` over the metric ball (members where ``u`` is defined)."""
    vals = _ball_values(u, graph, x, r)
    return float(vals.min())


def slopes(u, graph: MetricGraph, x: int, r: float) -> tuple[float, float]:
    """Upward and downward metric slopes ((sup - u)/r, (u - inf)/r) at x."""
    vals = _ball_values(u, graph, x, r)
    ux = float(np.asarray(u, dtype=float)[int(x)])
    return (float(vals.max()) - ux) / r, (ux - float(vals.min())) / r


def _ball_values(u, graph, x, r):
    u = np.asarray(u, dtype=float)
    nodes, _ = kernels.dijkstra_truncated(
        graph.indptr, graph.indices, graph.costs, int(x),
        graph.domain.n_nodes, float(r),
    )
    vals = u[nodes]
    vals = vals[np.isfinite(vals)]
    if vals.size == 0:
        raise InputError(f"u is undefined on the whole ball around node {x}")
    return vals


def ball_field_sup(u, table: BallTable) -> np.ndarray:
    """Per-center ball maxima from a precomputed table."""
    return np.maximum.reduceat(np.asarray(u, float)[table.indices],
                               table.indptr[:-1])


def ball_field_inf(u, table: BallTable) -> np.ndarray:
    return np.minimum.reduceat(np.asarray(u, float)[table.indices],
                               table.indptr[:-1])


# -- sweeps ------------------------------------------------------------------------


def harmonious_step(u, graph: MetricGraph, r: float,
                    sweep: str = "gauss-seidel") -> np.ndarray:
    """One ball-midpoint sweep: interior nodes move to (sup + inf)/2.

    Boundary nodes are left untouched.  The update is monotone in ``u`` and
    non-expansive in sup norm.
    """
    if r < 2 * graph.domain.h - 1e-12:
        raise InputError("radius must be at least 2h")
    if sweep not in ("gauss-seidel", "jacobi"):
        raise InputError(f"unknown sweep {sweep!r}")
    table = graph.ball_table(r, "closure")
    centers = np.ascontiguousarray(table.centers, dtype=np.int32)
    out = np.array(u, dtype=float)
    if sweep == "gauss-seidel":
        kernels.gs_sweep(out, table.indptr, table.indices, centers)
    else:
        src = np.array(u, dtype=float)
        kernels.jacobi_sweep(src, out, table.indptr, table.indices, centers)
    return out


# -- driver -----------------------------------------------------------------------


def solve(domain: GridDomain, structure: FinslerStructure, g: BoundaryData,
          config: SolverConfig | None = None, graph: MetricGraph | None = None,
          init=None) -> tuple[np.ndarray, SolveReport]:
    """Extend boundary data by iterating ball midpoints over a radius schedule.

    Returns the field (NaN outside the closed working region) and a report.
    The field interpolates the data exactly, stays inside the McShane
    sandwich and the data's range, and is certified within ``tol`` of the
    final-radius fixed point in sup norm.  Non-convergence flags the report
    and still returns the field.
    """
    t0 = time.perf_counter()
    if graph is None:
        graph = build_graph(domain, structure)
    if config is None:
        config = SolverConfig.default(domain.h)
    config.validate_for(domain.h)
    if g.values.size == 0:
        raise InputError("boundary data is empty")
    osc = float(g.values.max() - g.values.min())

    n = domain.n_nodes
    active = domain.active_mask
    interior = domain.interior_nodes()
    report = SolveReport(history=[] if config.record_history else None)

    if osc == 0.0:
        u = np.full(n, np.nan)
        u[active] = g.values[0]
        report.radii = list(config.r_schedule)
        report.iterations = [1] + [0] * (len(config.r_schedule) - 1)
        report.residuals = [0.0] * len(config.r_schedule)
        report.gaps = [0.0] * len(config.r_schedule)
        report.converged = True
        report.wall_ms = 1000.0 * (time.perf_counter() - t0)
        return u, report

    tol = config.tol if config.tol is not None else DEFAULT_TOL_FACTOR * osc
    report.tol = tol

    if init is None:
        psi = mcshane_upper(g, graph)
        phi = mcshane_lower(g, graph)
        u = 0.5 * (psi + phi)
    else:
        u = np.array(init, dtype=float).reshape(n)
    u[~active] = np.nan
    u[g.nodes] = g.values
    if not np.isfinite(u[active]).all():
        raise InputError("initialization is undefined on active nodes")

    centers = None
    lo = np.full(n, np.nan)
    hi = np.full(n, np.nan)
    boundary_max = float(g.values.max())
    boundary_min = float(g.values.min())
    converged_all = True

    for r in config.r_schedule:
        table = graph.ball_table(r, "closure")
        centers = np.ascontiguousarray(table.centers, dtype=np.int32)
        # Constant envelopes bracket the iterate and every fixed point; the
        # sweep is monotone, so they keep bracketing both forever.
        lo[:] = np.nan
        hi[:] = np.nan
        lo[g.nodes] = g.values
        hi[g.nodes] = g.values
        lo[interior] = min(boundary_min, float(u[interior].min()))
        hi[interior] = max(boundary_max, float(u[interior].max()))

        if config.sweep == "jacobi":
            u2, lo2, hi2 = u.copy(), lo.copy(), hi.copy()

        iters = 0
        resid = np.inf
        gap = np.inf
        prev_max = max(boundary_max, float(u[interior].max()))
        prev_min = min(boundary_min, float(u[interior].min()))
        converged_r = False
        while iters < config.max_iter:
            if config.sweep == "gauss-seidel":
                resid, gap, umax, umin = kernels.gs_sweep3(
                    u, lo, hi, table.indptr, table.indices, centers
                )
            else:
                resid, gap, umax, umin = kernels.jacobi_sweep3(
                    u, lo, hi, u2, lo2, hi2,
                    table.indptr, table.indices, centers,
                )
                u, u2 = u2, u
                lo, lo2 = lo2, lo
                hi, hi2 = hi2, hi
            iters += 1
            if not np.isfinite(resid):
                raise NumericError("non-finite residual during solve")
            cur_max = max(umax, boundary_max)
            cur_min = min(umin, boundary_min)
            report.max_increase = max(report.max_increase, cur_max - prev_max)
            report.min_decrease = min(report.min_decrease, cur_min - prev_min)
            prev_max, prev_min = cur_max, cur_min
            if report.history is not None:
                report.history.append(
                    (float(r), iters, float(resid), float(gap), cur_max, cur_min)
                )
            if gap <= tol:
                converged_r = True
                break
        report.radii.append(float(r))
        report.iterations.append(iters)
        report.residuals.append(float(resid))
        report.gaps.append(float(gap))
        if not converged_r:
            converged_all = False
            logger.warning(
                "radius %g not converged after %d sweeps (gap %.3e > tol %.3e)",
                r, iters, gap, tol,
            )

    if np.isnan(u[active]).any():
        raise NumericError("NaN in solution field")
    report.converged = converged_all
    report.wall_ms = 1000.0 * (time.perf_counter() - t0)
    return u, report


def slope_balance_margin(u, graph: MetricGraph, r: float) -> float:
    """Largest excess of the down-slope over the up-slope of the ball-sup
    field, over nodes whose 2r-ball stays in the open region.

    For a converged extension this is nonpositive up to a discretization
    residue of order h/r.
    """
    domain = graph.domain
    n = domain.n_nodes
    u = np.asarray(u, dtype=float)

    active_nodes = domain.active_nodes()
    closure_table = graph.ball_table(r, "closure", centers=active_nodes)
    w = np.full(n, np.nan)
    w[active_nodes] = ball_field_sup(u, closure_table)

    interior_table = graph.ball_table(r, "closure")
    w_sup = ball_field_sup(w, interior_table)
    w_inf = ball_field_inf(w, interior_table)
    w_center = w[interior_table.centers]

    ambient = graph.ball_table(2.0 * r, "ambient")
    deep = np.minimum.reduceat(
        domain.interior_mask[ambient.indices].astype(np.int8), ambient.indptr[:-1]
    ).astype(bool)
    if not deep.any():
        raise InputError(f"no node is 2r-deep inside for r={r}")
    margins = (2.0 * w_center - w_inf - w_sup) / r
    return float(margins[deep].max())
