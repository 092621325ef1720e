"""Intrinsic distances as shortest paths on a stencil graph.

Each lattice edge carries a quadrature of the dual metric along the
segment (midpoint rule by default, exact for per-cell-constant
structures).  Shortest paths over these edges realize the intrinsic
distance of the dual structure, which stands in for the sup-type
intrinsic distance: the two agree at infinitesimal scale for admissible
structures, and the path metric dominates globally.

The graph spans the whole lattice (exterior nodes included), so distances
to cone vertices outside the closed working region are well defined and
metric balls near the boundary follow the ambient geometry.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import DegenerateInputError, DomainError, InputError
from .finsler import FinslerStructure
from .grid import GridDomain

STENCIL_OFFSETS = {
    "8-neighbor": (
        (-1, -1), (0, -1), (1, -1),
        (-1, 0), (1, 0),
        (-1, 1), (0, 1), (1, 1),
    ),
    "16-neighbor": (
        (-1, -2), (1, -2),
        (-2, -1), (-1, -1), (0, -1), (1, -1), (2, -1),
        (-1, 0), (1, 0),
        (-2, 1), (-1, 1), (0, 1), (1, 1), (2, 1),
        (-1, 2), (1, 2),
    ),
}

# Worst-case ratio between stencil-path length and straight-line length for
# a constant metric: sec(half of the largest angular gap between directions).
KAPPA_STENCIL = {
    "8-neighbor": 1.0 / math.cos(math.pi / 8.0),
    "16-neighbor": 1.0 / math.cos(math.atan(0.5) / 2.0),
}

# Above this node count, stacked all-sources distance matrices are refused
# to bound memory; per-source fields remain available.
ALL_PAIRS_NODE_LIMIT = 10_000


@dataclass(frozen=True)
class DistanceField:
    """Single-source shortest-path distances (length units) per node."""

    source: int
    values: np.ndarray

    def __post_init__(self):
        v = np.ascontiguousarray(self.values, dtype=float)
        v.setflags(write=False)
        object.__setattr__(self, "values", v)


@dataclass(frozen=True)
class BallTable:
    """CSR lists of metric-ball members (and distances) for many centers."""

    r: float
    centers: np.ndarray
    indptr: np.ndarray
    indices: np.ndarray
    dists: np.ndarray

    def ball(self, k: int) -> tuple[np.ndarray, np.ndarray]:
        sl = slice(self.indptr[k], self.indptr[k + 1])
        return self.indices[sl], self.dists[sl]


class MetricGraph:
    """Stencil graph with dual-metric edge costs and cached distance queries.

    Immutable after construction; the per-source cache is a plain dict whose
    values are deterministic, so concurrent insert-or-get (last writer wins)
    is safe.
    """

    def __init__(self, domain, structure, stencil_order, quadrature,
                 indptr, indices, costs):
        self.domain = domain
        self.structure = structure
        self.stencil_order = stencil_order
        self.quadrature = quadrature
        self.indptr = indptr
        self.indices = indices
        self.costs = costs
        self.kappa = KAPPA_STENCIL[stencil_order]
        self.offsets = STENCIL_OFFSETS[stencil_order]
        self._dist_cache: dict[int, DistanceField] = {}
        self._ball_cache: dict[tuple, BallTable] = {}
        for arr in (indptr, indices, costs):
            arr.setflags(write=False)

    # -- distances ------------------------------------------------------------

    def distance(self, source: int) -> DistanceField:
        """Exact single-source shortest distances; cached per source."""
        source = int(source)
        cached = self._dist_cache.get(source)
        if cached is not None:
            return cached
        if not 0 <= source < self.domain.n_nodes:
            raise DomainError(f"source node {source} outside the lattice")
        values = kernels.dijkstra(
            self.indptr, self.indices, self.costs, source, self.domain.n_nodes
        )
        field = DistanceField(source=source, values=values)
        self._dist_cache[source] = field
        return field

    def distance_matrix(self, sources) -> np.ndarray:
        """(m, n) stacked distance fields; refused on very large lattices."""
        if self.domain.n_nodes > ALL_PAIRS_NODE_LIMIT:
            raise DegenerateInputError(
                f"distance_matrix refused above {ALL_PAIRS_NODE_LIMIT} nodes "
                f"(lattice has {self.domain.n_nodes}); query per-source fields"
            )
        return np.stack([self.distance(s).values for s in np.asarray(sources)])

    def clear_cache(self):
        self._dist_cache.clear()
        self._ball_cache.clear()

    # -- metric balls ---------------------------------------------------------

    def metric_ball(self, center: int, r: float) -> np.ndarray:
        """Sorted node ids with distance(center) <= r; always contains center."""
        if r < 0:
            raise InputError(f"ball radius must be nonnegative, got {r}")
        if not 0 <= int(center) < self.domain.n_nodes:
            raise DomainError(f"center node {center} outside the lattice")
        nodes, _ = kernels.dijkstra_truncated(
            self.indptr, self.indices, self.costs, int(center),
            self.domain.n_nodes, float(r),
        )
        return np.sort(nodes.astype(np.int64))

    def ball_table(self, r: float, member: str = "closure",
                   centers=None) -> BallTable:
        """Precomputed balls for many centers, membership-filtered.

        ``member`` selects which nodes can belong to a ball: ``closure``
        (interior plus boundary), ``interior``, or ``ambient`` (all nodes).
        Paths always traverse the ambient lattice.  Results are cached per
        (radius, membership) for the default centers (the interior nodes).
        """
        key = None
        if centers is None:
            centers = self.domain.interior_nodes()
            key = (repr(float(r)), member)
            cached = self._ball_cache.get(key)
            if cached is not None:
                return cached
        masks = {
            "closure": self.domain.active_mask,
            "interior": self.domain.interior_mask,
            "ambient": np.ones(self.domain.n_nodes, dtype=bool),
        }
        try:
            mask = masks[member]
        except KeyError:
            raise InputError(f"unknown membership {member!r}") from None
        centers = np.ascontiguousarray(centers, dtype=np.int32)
        indptr, indices, dists = kernels.ball_table(
            self.indptr, self.indices, self.costs, centers, float(r),
            np.ascontiguousarray(mask, dtype=np.uint8),
        )
        for arr in (indptr, indices, dists):
            arr.setflags(write=False)
        table = BallTable(r=float(r), centers=centers, indptr=indptr,
                          indices=indices, dists=dists)
        if key is not None:
            self._ball_cache[key] = table
        return table

    # -- pointwise queries ------------------------------------------------------

    def metric_derivative(self, x: int, v, t_min: float = 0.0) -> float:
        """Difference quotient d(x, x + t v)/t at the smallest lattice t >= t_min.

        ``v`` must point along a stencil direction.  The quotient never
        exceeds the dual cost by more than the stencil anisotropy plus the
        variation of the structure over the step.
        """
        v = np.asarray(v, dtype=float).reshape(2)
        if not np.isfinite(v).all() or (v == 0).all():
            raise InputError("direction must be a finite nonzero vector")
        offset = None
        for di, dj in self.offsets:
            if abs(v[0] * dj - v[1] * di) <= 1e-12 * np.abs(v).max() * max(
                abs(di), abs(dj)
            ) and v[0] * di + v[1] * dj > 0:
                offset = (di, dj)
                break
        if offset is None:
            raise InputError(f"direction {v} is not a stencil direction")
        h = self.domain.h
        step = h * math.hypot(*offset)
        m = max(1, math.ceil(t_min / step - 1e-12))
        i, j = self.domain.node_ij(int(x))
        ti, tj = int(i) + m * offset[0], int(j) + m * offset[1]
        if not (0 <= ti < self.domain.nx and 0 <= tj < self.domain.ny):
            raise DomainError("probe point x + t v leaves the lattice")
        target = int(self.domain.node_id(ti, tj))
        t = m * step
        # A straight stencil path bounds the distance by beta' * t.
        rmax = t * self.structure.bounds.dual().beta * (1.0 + 1e-9)
        nodes, dists = kernels.dijkstra_truncated(
            self.indptr, self.indices, self.costs, int(x),
            self.domain.n_nodes, rmax,
        )
        hit = np.flatnonzero(nodes == target)
        if hit.size:
            d = dists[hit[0]]
        else:
            d = self.distance(int(x)).values[target]
        return float(d / t)

    def pointwise_lip(self, u, x: int, r: float) -> float:
        """Metric slope of ``u`` at ``x`` over the punctured ball of radius r.

        Ball members where ``u`` is undefined (NaN, e.g. exterior nodes) are
        skipped.
        """
        u = np.asarray(u, dtype=float)
        nodes, dists = kernels.dijkstra_truncated(
            self.indptr, self.indices, self.costs, int(x),
            self.domain.n_nodes, float(r),
        )
        keep = (nodes != int(x)) & np.isfinite(u[nodes])
        if not keep.any():
            raise DegenerateInputError(
                f"punctured ball of radius {r} around node {x} is empty"
            )
        return float(
            (np.abs(u[nodes[keep]] - u[int(x)]) / dists[keep]).max()
        )

    def pair_distances(self, sources, targets) -> np.ndarray:
        """(n_sources, n_targets) distances through the ambient lattice.

        Uses truncated searches with a radius that provably covers all the
        pairs, falling back to full searches if truncation misses.
        """
        sources = np.asarray(sources, dtype=np.int64)
        targets = np.asarray(targets, dtype=np.int64)
        both = np.concatenate([sources, targets])
        coords = self.domain.coords(both)
        span = coords.max(axis=0) - coords.min(axis=0)
        rmax = self.structure.bounds.dual().beta * (
            math.sqrt(2.0) * math.hypot(span[0], span[1]) + 2.0 * self.domain.h
        )
        out = np.empty((sources.size, targets.size))
        lookup = np.full(self.domain.n_nodes, -1, dtype=np.int64)
        lookup[targets] = np.arange(targets.size)
        for row, s in enumerate(sources):
            hit, dist = kernels.dijkstra_truncated(
                self.indptr, self.indices, self.costs, int(s),
                self.domain.n_nodes, rmax,
            )
            cols = lookup[hit]
            found = cols >= 0
            if int(found.sum()) < targets.size:
                out[row] = self.distance(int(s)).values[targets]
            else:
                out[row, cols[found]] = dist[found]
        return out

    def lip_constant(self, u, nodes, min_separation: float = 0.0) -> float:
        """Largest pairwise slope |u(a) - u(b)| / d(a, b) over a node set.

        Distances run through the ambient lattice.  ``min_separation``
        restricts to pairs at least that far apart, which measures the
        slopes the grid can represent above quantization scale.  Internally
        each source uses a truncated search with a radius that provably
        covers every pair, falling back to a full search if truncation
        misses.
        """
        u = np.asarray(u, dtype=float)
        nodes = np.unique(np.asarray(nodes, dtype=np.int64))
        if nodes.size < 2:
            raise DegenerateInputError("lip_constant needs at least two nodes")
        coords = self.domain.coords(nodes)
        span = coords.max(axis=0) - coords.min(axis=0)
        max_euclid = math.hypot(span[0], span[1])
        rmax = (
            self.structure.bounds.dual().beta
            * (math.sqrt(2.0) * max_euclid + 2.0 * self.domain.h)
        )
        in_set = np.zeros(self.domain.n_nodes, dtype=bool)
        in_set[nodes] = True
        best = 0.0
        any_pair = False
        for idx, s in enumerate(nodes[:-1]):
            hit, dist = kernels.dijkstra_truncated(
                self.indptr, self.indices, self.costs, int(s),
                self.domain.n_nodes, rmax,
            )
            keep = in_set[hit] & (hit > s)
            found = int(keep.sum())
            targets = hit[keep]
            dists = dist[keep]
            if found < nodes.size - idx - 1:
                full = self.distance(int(s)).values
                targets = nodes[idx + 1:]
                dists = full[targets]
            if min_separation > 0.0:
                far = dists >= min_separation
                targets = targets[far]
                dists = dists[far]
            if dists.size:
                any_pair = True
                best = max(best, float((np.abs(u[targets] - u[int(s)]) / dists).max()))
        if not any_pair:
            raise DegenerateInputError(
                f"no node pair is separated by at least {min_separation}"
            )
        return best

    def ball_anisotropy(self, r: float) -> float:
        """Ratio r / (smallest directional support) of a deep metric ball.

        Quantifies how far the discrete ball deviates from the metric disk;
        it governs the slope inflation of ball-midpoint fixed points.
        """
        d = self.domain
        center = int(d.node_id(d.nx // 2, d.ny // 2))
        nodes, _ = kernels.dijkstra_truncated(
            self.indptr, self.indices, self.costs, center, d.n_nodes, float(r)
        )
        rel = d.coords(nodes) - d.coords([center])[0]
        theta = np.linspace(0.0, np.pi, 64, endpoint=False)
        dirs = np.stack([np.cos(theta), np.sin(theta)], axis=1)
        support = np.abs(rel @ dirs.T).max(axis=0)
        return float(r / support.min())


def build_graph(domain: GridDomain, structure: FinslerStructure,
                stencil_order: str = "8-neighbor",
                quadrature: str = "midpoint") -> MetricGraph:
    """Assemble the stencil graph with dual-metric quadrature edge costs.

    Midpoint quadrature is exact for per-cell-constant structures; Simpson
    quadrature (``quadrature="simpson"``) helps for smoothly varying ones.
    Edge costs are symmetric bit-for-bit.
    """
    if stencil_order not in STENCIL_OFFSETS:
        raise InputError(f"unknown stencil order {stencil_order!r}")
    if quadrature not in ("midpoint", "simpson"):
        raise InputError(f"unknown quadrature {quadrature!r}")
    offsets = STENCIL_OFFSETS[stencil_order]
    n = domain.n_nodes
    nx, ny = domain.nx, domain.ny
    all_i, all_j = domain.node_ij(np.arange(n))
    coords = domain.coords()

    valid = []
    for di, dj in offsets:
        ni, nj = all_i + di, all_j + dj
        valid.append((ni >= 0) & (ni < nx) & (nj >= 0) & (nj < ny))
    degree = np.sum(valid, axis=0)
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(degree, out=indptr[1:])
    m = int(indptr[-1])
    indices = np.empty(m, dtype=np.int32)
    costs = np.empty(m)
    pos = indptr[:-1].copy()

    for (di, dj), ok in zip(offsets, valid):
        x = np.flatnonzero(ok)
        y = x + dj * nx + di
        delta = np.array([di * domain.h, dj * domain.h])
        mid = 0.5 * (coords[x] + coords[y])
        dvec = np.broadcast_to(delta, (len(x), 2))
        c = structure.dual_field(mid, dvec)
        if quadrature == "simpson":
            end_sum = structure.dual_field(coords[x], dvec) + structure.dual_field(
                coords[y], dvec
            )
            c = (4.0 * c + end_sum) / 6.0
        slot = pos[x]
        indices[slot] = y
        costs[slot] = c
        pos[x] += 1

    return MetricGraph(domain, structure, stencil_order, quadrature,
                       indptr, indices, costs)


# Functional aliases matching the operation-style API.

def shortest_distance(graph: MetricGraph, source: int) -> DistanceField:
    return graph.distance(source)


def metric_ball(graph: MetricGraph, center: int, r: float) -> np.ndarray:
    return graph.metric_ball(center, r)


def metric_derivative(graph: MetricGraph, x: int, v, t_min: float = 0.0) -> float:
    return graph.metric_derivative(x, v, t_min)


def pointwise_lip(graph: MetricGraph, u, x: int, r: float) -> float:
    return graph.pointwise_lip(u, x, r)


def lip_constant(graph: MetricGraph, u, nodes, min_separation: float = 0.0) -> float:
    return graph.lip_constant(u, nodes, min_separation)
