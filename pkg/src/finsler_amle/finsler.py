"""Measurable Finsler metrics on a grid: evaluation, convex duals, smoothing.

A structure assigns to every node-centered cell a symmetric norm on R^2.
Five families are built in:

* ``euclidean-scaled``  -- ``s(x) * |v|`` with a positive per-cell scale
* ``riemannian``        -- ``sqrt(<A(x) v, v>)`` with a per-cell SPD matrix
* ``p-norm``            -- ``s(x) * ||v||_p`` with one exponent ``p`` in [1, inf]
* ``piecewise-constant-norm`` -- per-cell choice among a small set of
  (p, scale) media
* ``custom-table``      -- per-cell polygonal unit ball given by gauge values
  on a shared fan of directions

Every family is absolutely 1-homogeneous and convex in the direction
argument, and is piecewise constant in the space argument at grid
resolution: evaluation at an arbitrary point uses the cell (Voronoi square)
of the nearest node, with points exactly on a cell edge assigned to the
larger index.  Duals are closed-form except for ``custom-table``, whose
dual is the (exact) support function over the polygon vertices.  A generic
sampled maximization over unit directions backs the double dual and serves
as an independent route for cross-checks.
"""

from __future__ import annotations

import numpy as np

from .errors import (
    ConstructionError,
    DegenerateInputError,
    DomainError,
    InputError,
    NumericError,
)
from .grid import GridDomain

FAMILIES = (
    "euclidean-scaled",
    "riemannian",
    "p-norm",
    "piecewise-constant-norm",
    "custom-table",
)

# Angular resolution of the sampled support maximization.  With local
# golden-section refinement the relative duality error stays below 1e-4
# for all admissible structures (documented in README).
DUAL_SAMPLING_DIRECTIONS = 4096
DUAL_SAMPLING_REL_TOL = 1e-4
_GOLDEN_ITERS = 48
_MOLLIFY_TABLE_DIRECTIONS = 64


class EllipticityBounds:
    """Uniform constants ``alpha * |v| <= F(x, v) <= beta * |v|`` on the grid."""

    __slots__ = ("alpha", "beta")

    def __init__(self, alpha: float, beta: float):
        alpha = float(alpha)
        beta = float(beta)
        if not (0.0 < alpha <= beta and np.isfinite(beta)):
            raise ConstructionError(
                f"ellipticity bounds need 0 < alpha <= beta, got ({alpha}, {beta})"
            )
        self.alpha = alpha
        self.beta = beta

    def dual(self) -> "EllipticityBounds":
        """Bounds satisfied by the dual norm (roles swapped and inverted)."""
        return EllipticityBounds(1.0 / self.beta, 1.0 / self.alpha)

    def __eq__(self, other):
        return (
            isinstance(other, EllipticityBounds)
            and self.alpha == other.alpha
            and self.beta == other.beta
        )

    def __repr__(self):
        return f"EllipticityBounds(alpha={self.alpha:.6g}, beta={self.beta:.6g})"


def _p_norm_euclid_factors(p: float) -> tuple[float, float]:
    """(lo, hi) with lo*|v| <= ||v||_p <= hi*|v| in R^2."""
    if p == 2.0:
        return 1.0, 1.0
    gap = 2.0 ** (1.0 / p - 0.5) if np.isfinite(p) else 2.0 ** (-0.5)
    if p < 2.0:
        return 1.0, gap
    return gap, 1.0


def _conjugate_exponent(p: float) -> float:
    if p == 1.0:
        return np.inf
    if np.isinf(p):
        return 1.0
    return p / (p - 1.0)


def _p_norm_values(v: np.ndarray, p: float) -> np.ndarray:
    av = np.abs(v)
    if p == 1.0:
        return av[:, 0] + av[:, 1]
    if np.isinf(p):
        return np.maximum(av[:, 0], av[:, 1])
    if p == 2.0:
        return np.hypot(av[:, 0], av[:, 1])
    return (av[:, 0] ** p + av[:, 1] ** p) ** (1.0 / p)


class FinslerStructure:
    """Per-cell norm field with dual evaluation and box smoothing.

    Instances are immutable after construction and safe to share across
    workers; all evaluation methods are pure.
    """

    def __init__(self, family, grid: GridDomain, params, bounds,
                 p=None, media=None, directions=None):
        if family not in FAMILIES:
            raise ConstructionError(f"unknown family {family!r}")
        self.family = family
        self.grid = grid
        self.params = {k: self._freeze(v) for k, v in params.items()}
        self.bounds = bounds
        self.p = p
        self.media = tuple(media) if media is not None else None
        self.directions = self._freeze(directions) if directions is not None else None
        self._angles = None
        if self.directions is not None:
            self._angles = self._freeze(
                np.arctan2(self.directions[:, 1], self.directions[:, 0])
            )

    @staticmethod
    def _freeze(a):
        a = np.ascontiguousarray(a)
        a.setflags(write=False)
        return a

    # -- constructors -------------------------------------------------------

    @classmethod
    def euclidean_scaled(cls, grid: GridDomain, scale=1.0) -> "FinslerStructure":
        scale = cls._cell_field(grid, scale)
        if not (np.isfinite(scale).all() and (scale > 0).all()):
            raise ConstructionError("scale field must be positive and finite")
        bounds = EllipticityBounds(scale.min(), scale.max())
        return cls("euclidean-scaled", grid, {"scale": scale}, bounds)

    @classmethod
    def riemannian(cls, grid: GridDomain, a11, a12=0.0, a22=None) -> "FinslerStructure":
        """``F(x, v) = sqrt(<A(x) v, v>)`` for per-cell SPD ``A``.

        Accepts a constant 2x2 matrix, per-cell component fields, or scalars.
        """
        if a22 is None and np.ndim(a11) >= 2 and np.shape(a11)[-2:] == (2, 2):
            mat = np.asarray(a11, dtype=float)
            a11, a12, a22 = mat[..., 0, 0], mat[..., 0, 1], mat[..., 1, 1]
            if not np.allclose(mat[..., 0, 1], mat[..., 1, 0]):
                raise ConstructionError("matrix field must be symmetric")
        if a22 is None:
            raise ConstructionError("riemannian needs a22 (or a full matrix)")
        a11 = cls._cell_field(grid, a11)
        a12 = cls._cell_field(grid, a12)
        a22 = cls._cell_field(grid, a22)
        det = a11 * a22 - a12 * a12
        if not ((a11 > 0).all() and (det > 0).all() and np.isfinite(det).all()):
            raise ConstructionError("matrix field must be symmetric positive definite")
        tr = a11 + a22
        disc = np.sqrt(np.maximum(tr * tr - 4.0 * det, 0.0))
        lam_min = (tr - disc) / 2.0
        lam_max = (tr + disc) / 2.0
        bounds = EllipticityBounds(np.sqrt(lam_min.min()), np.sqrt(lam_max.max()))
        return cls("riemannian", grid, {"a11": a11, "a12": a12, "a22": a22}, bounds)

    @classmethod
    def p_norm(cls, grid: GridDomain, p, scale=1.0) -> "FinslerStructure":
        p = float(p)
        if not p >= 1.0:
            raise InputError(f"p-norm exponent must be >= 1, got {p}")
        scale = cls._cell_field(grid, scale)
        if not (np.isfinite(scale).all() and (scale > 0).all()):
            raise ConstructionError("scale field must be positive and finite")
        lo, hi = _p_norm_euclid_factors(p)
        bounds = EllipticityBounds(scale.min() * lo, scale.max() * hi)
        return cls("p-norm", grid, {"scale": scale}, bounds, p=p)

    @classmethod
    def piecewise_constant_norm(cls, grid: GridDomain, media, medium_id) -> "FinslerStructure":
        """Per-cell pick among ``media = [(p, scale), ...]``."""
        media = [(float(p), float(s)) for p, s in media]
        if not media:
            raise ConstructionError("need at least one medium")
        for p, s in media:
            if not (p >= 1.0 and s > 0 and np.isfinite(s)):
                raise ConstructionError(f"bad medium (p={p}, scale={s})")
        medium_id = cls._cell_field(grid, medium_id).astype(np.int64)
        if medium_id.min() < 0 or medium_id.max() >= len(media):
            raise ConstructionError("medium_id out of range")
        alphas, betas = [], []
        for p, s in media:
            lo, hi = _p_norm_euclid_factors(p)
            alphas.append(s * lo)
            betas.append(s * hi)
        bounds = EllipticityBounds(min(alphas), max(betas))
        return cls(
            "piecewise-constant-norm", grid, {"medium": medium_id}, bounds, media=media
        )

    @classmethod
    def custom_table(cls, grid: GridDomain, directions, values) -> "FinslerStructure":
        """Polygonal norms from gauge values on a shared direction fan.

        ``directions`` is (k, 2) covering half the circle (any angles); the
        fan is symmetrized internally, so evaluation is absolutely
        homogeneous by construction.  ``values`` is (k,) shared or (n, k)
        per cell; each cell's polygon with vertices ``dir / value`` must be
        convex, otherwise the norm would not be admissible.
        """
        dirs = np.asarray(directions, dtype=float)
        if dirs.ndim != 2 or dirs.shape[1] != 2 or dirs.shape[0] < 2:
            raise ConstructionError("directions must be (k >= 2, 2)")
        norms = np.hypot(dirs[:, 0], dirs[:, 1])
        if not (norms > 0).all():
            raise ConstructionError("zero direction in table")
        dirs = dirs / norms[:, None]
        values = np.asarray(values, dtype=float)
        if values.ndim == 1:
            values = np.broadcast_to(values, (grid.n_nodes, values.shape[0]))
        values = np.array(values, dtype=float)
        if values.shape != (grid.n_nodes, dirs.shape[0]):
            raise ConstructionError(
                f"values must be (k,) or (n_nodes, k), got {values.shape}"
            )
        values = values / norms[None, :]  # gauge of the unnormalized input
        if not (np.isfinite(values).all() and (values > 0).all()):
            raise ConstructionError("table values must be positive and finite")
        # Symmetrize and sort the fan by angle (idempotent: a fan that is
        # already symmetric collapses back onto itself).
        dirs = np.concatenate([dirs, -dirs], axis=0)
        values = np.concatenate([values, values], axis=1)
        ang = np.arctan2(dirs[:, 1], dirs[:, 0])
        order = np.argsort(ang, kind="stable")
        dirs, values, ang = dirs[order], values[:, order], ang[order]
        keep = np.concatenate([[True], np.diff(ang) > 1e-12])
        if not keep.all():
            rep = np.flatnonzero(keep)[np.cumsum(keep) - 1]
            dup = ~keep
            same = np.abs(values[:, dup] - values[:, rep[dup]]) <= 1e-9 * np.abs(
                values[:, dup]
            )
            if not same.all():
                raise ConstructionError(
                    "conflicting values for duplicate table directions"
                )
            dirs, values, ang = dirs[keep], values[:, keep], ang[keep]
        self = cls("custom-table", grid, {"values": values}, None, directions=dirs)
        self._validate_convex()
        self.bounds = self._table_bounds()
        return self

    @staticmethod
    def _cell_field(grid: GridDomain, value) -> np.ndarray:
        arr = np.asarray(value)
        if arr.ndim == 0:
            return np.full(grid.n_nodes, arr[()])
        flat = np.ascontiguousarray(arr).reshape(-1)
        if flat.shape[0] != grid.n_nodes:
            raise ConstructionError(
                f"per-cell field needs {grid.n_nodes} entries, got {flat.shape[0]}"
            )
        return flat

    # -- cell lookup ----------------------------------------------------------

    def cells_of(self, points) -> np.ndarray:
        """Node-cell index of each point; DomainError outside the lattice box."""
        pts = np.asarray(points, dtype=float).reshape(-1, 2)
        if not np.isfinite(pts).all():
            raise InputError("non-finite point coordinates")
        g = self.grid
        ox, oy = g.origin
        fi = (pts[:, 0] - ox) / g.h
        fj = (pts[:, 1] - oy) / g.h
        slack = 0.5 + 1e-9
        if (
            (fi < -slack).any() or (fi > g.nx - 1 + slack).any()
            or (fj < -slack).any() or (fj > g.ny - 1 + slack).any()
        ):
            raise DomainError("point outside the lattice bounding box")
        ci = np.clip(np.floor(fi + 0.5).astype(np.int64), 0, g.nx - 1)
        cj = np.clip(np.floor(fj + 0.5).astype(np.int64), 0, g.ny - 1)
        return cj * g.nx + ci

    # -- evaluation -------------------------------------------------------------

    def eval(self, x, v) -> float:
        """Cost of direction ``v`` at point ``x``."""
        return float(self.eval_field(np.asarray(x, float)[None, :],
                                     np.asarray(v, float)[None, :])[0])

    def eval_field(self, points, vectors) -> np.ndarray:
        """Vectorized ``eval`` over matching (m, 2) points and vectors."""
        cells = self.cells_of(points)
        return self._eval_cells(cells, np.asarray(vectors, dtype=float).reshape(-1, 2))

    def _eval_cells(self, cells, v) -> np.ndarray:
        if not np.isfinite(v).all():
            raise InputError("non-finite direction vector")
        if self.family == "euclidean-scaled":
            return self.params["scale"][cells] * np.hypot(v[:, 0], v[:, 1])
        if self.family == "riemannian":
            a11 = self.params["a11"][cells]
            a12 = self.params["a12"][cells]
            a22 = self.params["a22"][cells]
            q = a11 * v[:, 0] ** 2 + 2.0 * a12 * v[:, 0] * v[:, 1] + a22 * v[:, 1] ** 2
            return np.sqrt(np.maximum(q, 0.0))
        if self.family == "p-norm":
            return self.params["scale"][cells] * _p_norm_values(v, self.p)
        if self.family == "piecewise-constant-norm":
            medium = self.params["medium"][cells]
            out = np.empty(len(v), dtype=float)
            for idx, (p, s) in enumerate(self.media):
                mask = medium == idx
                if mask.any():
                    out[mask] = s * _p_norm_values(v[mask], p)
            return out
        return self._table_gauge(cells, v)

    def dual_eval(self, x, w) -> float:
        """Dual cost ``sup { <v, w> : F(x, v) <= 1 }`` (closed form)."""
        return float(self.dual_field(np.asarray(x, float)[None, :],
                                     np.asarray(w, float)[None, :])[0])

    def dual_field(self, points, covectors) -> np.ndarray:
        cells = self.cells_of(points)
        return self._dual_cells(cells, np.asarray(covectors, dtype=float).reshape(-1, 2))

    def _dual_cells(self, cells, w) -> np.ndarray:
        if not np.isfinite(w).all():
            raise InputError("non-finite covector")
        if self.family == "euclidean-scaled":
            return np.hypot(w[:, 0], w[:, 1]) / self.params["scale"][cells]
        if self.family == "riemannian":
            a11 = self.params["a11"][cells]
            a12 = self.params["a12"][cells]
            a22 = self.params["a22"][cells]
            det = a11 * a22 - a12 * a12
            q = (a22 * w[:, 0] ** 2 - 2.0 * a12 * w[:, 0] * w[:, 1]
                 + a11 * w[:, 1] ** 2) / det
            return np.sqrt(np.maximum(q, 0.0))
        if self.family == "p-norm":
            return _p_norm_values(w, _conjugate_exponent(self.p)) / self.params["scale"][cells]
        if self.family == "piecewise-constant-norm":
            medium = self.params["medium"][cells]
            out = np.empty(len(w), dtype=float)
            for idx, (p, s) in enumerate(self.media):
                mask = medium == idx
                if mask.any():
                    out[mask] = _p_norm_values(w[mask], _conjugate_exponent(p)) / s
            return out
        # custom-table: support function, exact max over polygon vertices
        verts = self.directions[None, :, :] / self.params["values"][cells][:, :, None]
        return np.einsum("mkd,md->mk", verts, w).max(axis=1)

    # -- sampled duality ---------------------------------------------------------

    def dual_eval_sampled(self, x, w, n_dirs=DUAL_SAMPLING_DIRECTIONS) -> float:
        """Dual cost by maximizing ``<w, v/F(x, v)>`` over sampled directions.

        Independent of the closed forms; used for cross-checks and available
        for structures added without an analytic dual.
        """
        cell = self.cells_of(np.asarray(x, float)[None, :])
        return self._sampled_support(
            np.asarray(w, dtype=float).reshape(2),
            lambda dirs: self._eval_cells(np.repeat(cell, len(dirs)), dirs),
            n_dirs,
        )

    def double_dual_eval(self, x, v, n_dirs=DUAL_SAMPLING_DIRECTIONS) -> float:
        """Apply the sampled maximization to the dual; recovers ``eval`` for
        admissible structures within the sampling tolerance."""
        cell = self.cells_of(np.asarray(x, float)[None, :])
        return self._sampled_support(
            np.asarray(v, dtype=float).reshape(2),
            lambda dirs: self._dual_cells(np.repeat(cell, len(dirs)), dirs),
            n_dirs,
        )

    @staticmethod
    def _sampled_support(target, gauge_of, n_dirs, refine_iters=_GOLDEN_ITERS):
        if not np.isfinite(target).all():
            raise InputError("non-finite vector")
        if target[0] == 0.0 and target[1] == 0.0:
            return 0.0
        theta = (np.arange(n_dirs) + 0.5) * (2.0 * np.pi / n_dirs)
        dirs = np.stack([np.cos(theta), np.sin(theta)], axis=1)
        gauges = gauge_of(dirs)
        obj = (dirs @ target) / gauges
        k = int(np.argmax(obj))
        best = obj[k]
        if not (np.isfinite(best) and best > 0.0):
            raise NumericError(
                "support maximization found no positive value "
                f"(best={best!r}, n_dirs={n_dirs})"
            )

        def f(t):
            d = np.array([[np.cos(t), np.sin(t)]])
            return float((d[0] @ target) / gauge_of(d)[0])

        # Golden-section refinement on the coarse bracket around the argmax.
        step = 2.0 * np.pi / n_dirs
        a, b = theta[k] - step, theta[k] + step
        invphi = (np.sqrt(5.0) - 1.0) / 2.0
        c, d = b - invphi * (b - a), a + invphi * (b - a)
        fc, fd = f(c), f(d)
        for _ in range(refine_iters):
            if fc < fd:
                a, c, fc = c, d, fd
                d = a + invphi * (b - a)
                fd = f(d)
            else:
                b, d, fd = d, c, fc
                c = b - invphi * (b - a)
                fc = f(c)
        return max(best, fc, fd)

    # -- custom-table internals ----------------------------------------------

    def _sectors_of(self, v):
        ang = np.arctan2(v[:, 1], v[:, 0])
        k = np.searchsorted(self._angles, ang, side="right") - 1
        return np.where(k < 0, len(self._angles) - 1, k)

    def _table_gauge(self, cells, v):
        zero = (v[:, 0] == 0.0) & (v[:, 1] == 0.0)
        k = self._sectors_of(v)
        k2 = (k + 1) % len(self._angles)
        vals = self.params["values"][cells]
        p1 = self.directions[k] / np.take_along_axis(vals, k[:, None], 1)
        p2 = self.directions[k2] / np.take_along_axis(vals, k2[:, None], 1)
        det = p1[:, 0] * p2[:, 1] - p1[:, 1] * p2[:, 0]
        a = (v[:, 0] * p2[:, 1] - v[:, 1] * p2[:, 0]) / det
        b = (p1[:, 0] * v[:, 1] - p1[:, 1] * v[:, 0]) / det
        out = a + b
        out[zero] = 0.0
        return out

    def _vertices(self) -> np.ndarray:
        """(n_cells, k, 2) polygon vertices per cell."""
        return self.directions[None, :, :] / self.params["values"][:, :, None]

    def _validate_convex(self):
        p = self._vertices()
        q = np.roll(p, -1, axis=1)
        r = np.roll(p, -2, axis=1)
        cross = (q[..., 0] - p[..., 0]) * (r[..., 1] - q[..., 1]) - (
            (q[..., 1] - p[..., 1]) * (r[..., 0] - q[..., 0])
        )
        scale = np.abs(p).max()
        if (cross < -1e-9 * scale * scale).any():
            raise ConstructionError(
                "table values describe a non-convex unit ball; "
                "admissible structures must be convex in the direction"
            )

    def _table_bounds(self) -> EllipticityBounds:
        p = self._vertices()
        radii = np.hypot(p[..., 0], p[..., 1])
        alpha = 1.0 / radii.max()
        q = np.roll(p, -1, axis=1)
        seg = q - p
        seg_len2 = (seg ** 2).sum(-1)
        t = np.clip(-(p * seg).sum(-1) / seg_len2, 0.0, 1.0)
        foot = p + t[..., None] * seg
        dist = np.hypot(foot[..., 0], foot[..., 1])
        beta = 1.0 / dist.min()
        return EllipticityBounds(alpha, beta)

    # -- mollification ------------------------------------------------------------

    def mollify(self, epsilon: float) -> "FinslerStructure":
        """Box-average the per-cell parameters over an ``epsilon`` window.

        The kernel is uniform over the square window ``|dx| <= epsilon``,
        ``|dy| <= epsilon`` (truncated at the lattice border), so the output
        parameters are convex combinations of the inputs: admissibility and
        the ellipticity interval are preserved, and the output varies by at
        most ``osc / epsilon`` per unit length.
        """
        if not (epsilon > 0 and np.isfinite(epsilon)):
            raise InputError(f"epsilon must be positive, got {epsilon}")
        w = int(np.floor(epsilon / self.grid.h + 1e-9))
        if w < 1:
            raise DegenerateInputError(
                f"epsilon={epsilon} is below the cell size h={self.grid.h}; "
                "no averaging window exists"
            )
        if self.family == "euclidean-scaled":
            return FinslerStructure.euclidean_scaled(
                self.grid, self._box_average(self.params["scale"], w)
            )
        if self.family == "riemannian":
            return FinslerStructure.riemannian(
                self.grid,
                self._box_average(self.params["a11"], w),
                self._box_average(self.params["a12"], w),
                self._box_average(self.params["a22"], w),
            )
        if self.family == "p-norm":
            return FinslerStructure.p_norm(
                self.grid, self.p, self._box_average(self.params["scale"], w)
            )
        if self.family == "piecewise-constant-norm":
            table = self._as_table(_MOLLIFY_TABLE_DIRECTIONS)
            return table.mollify(epsilon)
        values = np.empty_like(self.params["values"])
        for k in range(values.shape[1]):
            values[:, k] = self._box_average(self.params["values"][:, k], w)
        return FinslerStructure.custom_table(self.grid, self.directions, values)

    def _as_table(self, k: int) -> "FinslerStructure":
        """Resample any family onto a custom table with ``k`` directions.

        Exact on the fan; between directions the inscribed polygon deviates
        by at most a factor sec(pi / 2k) (~3e-4 at the default k = 64).
        """
        theta = np.arange(k) * (np.pi / k)
        dirs = np.stack([np.cos(theta), np.sin(theta)], axis=1)
        cells = np.arange(self.grid.n_nodes)
        values = np.empty((self.grid.n_nodes, k))
        for i in range(k):
            values[:, i] = self._eval_cells(cells, np.broadcast_to(dirs[i], (len(cells), 2)))
        return FinslerStructure.custom_table(self.grid, dirs, values)

    def _box_average(self, flat, w):
        g = self.grid
        field = flat.reshape(g.ny, g.nx).astype(float)
        for axis in (0, 1):
            field = _box1d(field, w, axis)
        return field.reshape(-1)


def _box1d(a: np.ndarray, w: int, axis: int) -> np.ndarray:
    """Mean over the inclusive window [i-w, i+w], truncated at the ends."""
    n = a.shape[axis]
    c = np.cumsum(a, axis=axis)
    c = np.concatenate([np.zeros_like(np.take(c, [0], axis=axis)), c], axis=axis)
    hi = np.minimum(np.arange(n) + w + 1, n)
    lo = np.maximum(np.arange(n) - w, 0)
    sums = np.take(c, hi, axis=axis) - np.take(c, lo, axis=axis)
    counts = hi - lo
    shape = [1, 1]
    shape[axis] = n
    return sums / counts.reshape(shape)


# -- convenience parameter fields ------------------------------------------------


def two_media_scale(grid: GridDomain, low, high, split=0.0, axis="x") -> np.ndarray:
    """Piecewise-constant scale: ``low`` below the split line, ``high`` above.

    Cells whose center lies exactly on the line get the mean of the two
    media (the natural symmetric trace of the jump).
    """
    coords = grid.coords()[:, 0 if axis == "x" else 1]
    out = np.where(coords < split, float(low), float(high))
    out[np.abs(coords - split) < 1e-12 * max(1.0, abs(split), grid.h)] = 0.5 * (
        float(low) + float(high)
    )
    return out


def checkerboard_matrices(grid: GridDomain, a_even, a_odd):
    """(a11, a12, a22) fields alternating between two 2x2 SPD matrices."""
    a_even = np.asarray(a_even, dtype=float)
    a_odd = np.asarray(a_odd, dtype=float)
    i, j = grid.node_ij(np.arange(grid.n_nodes))
    odd = (i + j) % 2 == 1
    comp = []
    for r, c in ((0, 0), (0, 1), (1, 1)):
        comp.append(np.where(odd, a_odd[r, c], a_even[r, c]))
    return comp[0], comp[1], comp[2]
