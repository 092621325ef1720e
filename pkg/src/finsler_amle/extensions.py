"""Closed-form reference fields: McShane envelopes and cone functions.

The upper and lower McShane extensions are the largest and smallest
extensions with the data's intrinsic Lipschitz constant; they sandwich
every admissible extension but are generically not minimizers themselves
(the verifier uses them as foils).  Cone functions are affine images of
single-source distance fields and are the comparison objects of the
minimizer characterization.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InputError
from .metric import MetricGraph


@dataclass(frozen=True)
class BoundaryData:
    """Values on boundary nodes plus their intrinsic Lipschitz constant.

    ``lip_const`` is always computed from the graph metric, never supplied.
    """

    nodes: np.ndarray
    values: np.ndarray
    lip_const: float

    def __post_init__(self):
        nodes = np.ascontiguousarray(self.nodes, dtype=np.int64)
        values = np.ascontiguousarray(self.values, dtype=float)
        if nodes.ndim != 1 or nodes.shape != values.shape:
            raise InputError("boundary nodes and values must be aligned 1-d arrays")
        if not np.isfinite(values).all():
            raise InputError("boundary values must be finite")
        nodes.setflags(write=False)
        values.setflags(write=False)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "values", values)

    @classmethod
    def from_values(cls, graph: MetricGraph, values, nodes=None) -> "BoundaryData":
        """Attach data to boundary nodes (default: the domain's boundary).

        ``values`` may be aligned with ``nodes`` or a full lattice array.
        """
        if nodes is None:
            nodes = graph.domain.boundary_nodes()
        nodes = np.ascontiguousarray(nodes, dtype=np.int64)
        if nodes.size == 0:
            raise InputError("boundary is empty")
        values = np.asarray(values, dtype=float)
        if values.shape == (graph.domain.n_nodes,):
            values = values[nodes]
        if values.shape != nodes.shape:
            raise InputError(
                f"expected {nodes.size} boundary values, got {values.shape}"
            )
        if nodes.size == 1:
            lip = 0.0
        else:
            full = np.zeros(graph.domain.n_nodes)
            full[nodes] = values
            lip = graph.lip_constant(full, nodes)
        return cls(nodes=nodes, values=values, lip_const=lip)

    @property
    def osc(self) -> float:
        return float(self.values.max() - self.values.min())

    def field(self, n_nodes: int) -> np.ndarray:
        """Full lattice array: values on the data nodes, NaN elsewhere."""
        out = np.full(n_nodes, np.nan)
        out[self.nodes] = self.values
        return out


@dataclass(frozen=True)
class ConeSpec:
    """Cone ``b + a * d(x0, .)`` with vertex ``x0`` (a lattice node)."""

    b: float
    a: float
    x0: int


def cone_field(spec: ConeSpec, graph: MetricGraph) -> np.ndarray:
    """Evaluate the cone on every lattice node."""
    return spec.b + spec.a * graph.distance(int(spec.x0)).values


def mcshane_upper(g: BoundaryData, graph: MetricGraph) -> np.ndarray:
    """Largest extension of ``g`` with its Lipschitz constant:
    ``min over boundary y of g(y) + L d(., y)``; equals ``g`` on the data
    nodes exactly."""
    out = np.full(graph.domain.n_nodes, np.inf)
    for y, gy in zip(g.nodes, g.values):
        np.minimum(out, gy + g.lip_const * graph.distance(int(y)).values, out=out)
    out[g.nodes] = g.values
    return out


def mcshane_lower(g: BoundaryData, graph: MetricGraph) -> np.ndarray:
    """Smallest extension of ``g`` with its Lipschitz constant:
    ``max over boundary y of g(y) - L d(., y)``."""
    out = np.full(graph.domain.n_nodes, -np.inf)
    for y, gy in zip(g.nodes, g.values):
        np.maximum(out, gy - g.lip_const * graph.distance(int(y)).values, out=out)
    out[g.nodes] = g.values
    return out
