"""Rectangular node lattices with interior/boundary masks.

The lattice spans the full ``nx * ny`` rectangle.  A (possibly smaller)
working region is marked by two disjoint masks: ``interior_mask`` for the
open region the solver updates and ``boundary_mask`` for the nodes that
carry boundary data.  Nodes outside both masks are exterior; they still
take part in distance computations (the metric lives on the whole
rectangle) which lets cone vertices sit outside the closed working region.

Node ids are flat indices ``id = j * nx + i`` with ``i`` the x-index and
``j`` the y-index; all arrays indexed by node use this order.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConstructionError

# 8-neighbor stencil offsets (di, dj), fixed order used everywhere.
NEIGHBOR_OFFSETS_8 = (
    (-1, -1), (0, -1), (1, -1),
    (-1, 0), (1, 0),
    (-1, 1), (0, 1), (1, 1),
)


@dataclass(frozen=True)
class GridDomain:
    """Immutable grid geometry plus interior/boundary masks."""

    nx: int
    ny: int
    h: float
    origin: tuple[float, float] = (0.0, 0.0)
    interior_mask: np.ndarray = field(default=None, repr=False)
    boundary_mask: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        if self.nx < 2 or self.ny < 2:
            raise ConstructionError("grid needs at least 2 nodes per axis")
        if not (self.h > 0 and np.isfinite(self.h)):
            raise ConstructionError(f"grid spacing must be positive, got {self.h}")
        n = self.nx * self.ny
        for name in ("interior_mask", "boundary_mask"):
            mask = getattr(self, name)
            if mask is None:
                raise ConstructionError(f"{name} is required")
            mask = np.ascontiguousarray(mask, dtype=bool)
            if mask.shape != (n,):
                raise ConstructionError(f"{name} must be flat with {n} entries")
            mask.setflags(write=False)
            object.__setattr__(self, name, mask)
        if np.any(self.interior_mask & self.boundary_mask):
            raise ConstructionError("interior and boundary masks overlap")
        self._validate_closure()
        self._validate_connected()

    # -- construction -----------------------------------------------------

    @classmethod
    def rectangle(cls, nx, ny, h, origin=(0.0, 0.0), margin=0):
        """Full-rectangle domain: ring boundary around a rectangular interior.

        ``margin`` exterior node layers are left outside the working region
        (useful for cone vertices outside the closed domain).
        """
        if margin < 0:
            raise ConstructionError("margin must be nonnegative")
        if nx - 2 * margin < 3 or ny - 2 * margin < 3:
            raise ConstructionError("domain too small for the requested margin")
        ii, jj = np.meshgrid(np.arange(nx), np.arange(ny), indexing="xy")
        ii = ii.ravel()
        jj = jj.ravel()
        lo_i, hi_i = margin, nx - 1 - margin
        lo_j, hi_j = margin, ny - 1 - margin
        active = (ii >= lo_i) & (ii <= hi_i) & (jj >= lo_j) & (jj <= hi_j)
        ring = active & (
            (ii == lo_i) | (ii == hi_i) | (jj == lo_j) | (jj == hi_j)
        )
        return cls(nx, ny, h, origin, interior_mask=active & ~ring, boundary_mask=ring)

    # -- indexing helpers ---------------------------------------------------

    @property
    def n_nodes(self) -> int:
        return self.nx * self.ny

    def node_id(self, i, j):
        return np.asarray(j) * self.nx + np.asarray(i)

    def node_ij(self, node):
        node = np.asarray(node)
        return node % self.nx, node // self.nx

    def coords(self, nodes=None) -> np.ndarray:
        """(m, 2) physical coordinates of the given nodes (default: all)."""
        if nodes is None:
            nodes = np.arange(self.n_nodes)
        i, j = self.node_ij(nodes)
        ox, oy = self.origin
        return np.stack([ox + i * self.h, oy + j * self.h], axis=-1).astype(float)

    @property
    def active_mask(self) -> np.ndarray:
        return self.interior_mask | self.boundary_mask

    def interior_nodes(self) -> np.ndarray:
        return np.flatnonzero(self.interior_mask)

    def boundary_nodes(self) -> np.ndarray:
        return np.flatnonzero(self.boundary_mask)

    def active_nodes(self) -> np.ndarray:
        return np.flatnonzero(self.active_mask)

    # -- validation ---------------------------------------------------------

    def _neighbors_of(self, nodes):
        """All in-grid 8-neighbors of the given nodes (with repetitions)."""
        i, j = self.node_ij(nodes)
        out = []
        for di, dj in NEIGHBOR_OFFSETS_8:
            ni, nj = i + di, j + dj
            ok = (ni >= 0) & (ni < self.nx) & (nj >= 0) & (nj < self.ny)
            out.append((self.node_id(ni[ok], nj[ok]), np.flatnonzero(ok)))
        return out

    def _validate_closure(self):
        interior = self.interior_nodes()
        if interior.size == 0:
            return
        i, j = self.node_ij(interior)
        active = self.active_mask
        for di, dj in NEIGHBOR_OFFSETS_8:
            ni, nj = i + di, j + dj
            inside = (ni >= 0) & (ni < self.nx) & (nj >= 0) & (nj < self.ny)
            if not inside.all():
                raise ConstructionError(
                    "interior node touches the lattice border; leave at least "
                    "one boundary layer"
                )
            if not active[self.node_id(ni, nj)].all():
                raise ConstructionError(
                    "interior node has an exterior stencil neighbor"
                )

    def _validate_connected(self):
        interior = self.interior_nodes()
        if interior.size == 0:
            return
        seen = np.zeros(self.n_nodes, dtype=bool)
        stack = [int(interior[0])]
        seen[interior[0]] = True
        nx = self.nx
        while stack:
            node = stack.pop()
            i, j = node % nx, node // nx
            for di, dj in NEIGHBOR_OFFSETS_8:
                ni, nj = i + di, j + dj
                if 0 <= ni < self.nx and 0 <= nj < self.ny:
                    nid = nj * nx + ni
                    if self.interior_mask[nid] and not seen[nid]:
                        seen[nid] = True
                        stack.append(nid)
        if seen[interior].sum() != interior.size:
            raise ConstructionError("interior is not connected in the stencil graph")
