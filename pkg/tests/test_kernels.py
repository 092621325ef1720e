"""Backend equivalence: the compiled kernels and the pure-Python fallback
must return bit-identical arrays on identical inputs."""

import numpy as np
import pytest

from finsler_amle import FinslerStructure, GridDomain, build_graph, two_media_scale
from finsler_amle.kernels import available_backends

BACKENDS = available_backends()
needs_both = pytest.mark.skipif(
    len(BACKENDS) < 2, reason="compiled backend unavailable"
)


def graphs():
    out = []
    d = GridDomain.rectangle(9, 9, 1.0, origin=(-4.0, -4.0))
    out.append(build_graph(d, FinslerStructure.euclidean_scaled(d, 1.0)))
    out.append(build_graph(d, FinslerStructure.euclidean_scaled(
        d, two_media_scale(d, 1.0, 3.0))))
    out.append(build_graph(d, FinslerStructure.riemannian(d, 4.0, 1.0, 2.0),
                           stencil_order="16-neighbor"))
    return out


@needs_both
@pytest.mark.parametrize("gi", [0, 1, 2])
def test_dijkstra_bitwise_equal(gi):
    g = graphs()[gi]
    n = g.domain.n_nodes
    py, cy = BACKENDS["python"], BACKENDS["cython"]
    for source in (0, n // 2, n - 1):
        a = py.dijkstra(g.indptr, g.indices, g.costs, source, n)
        b = cy.dijkstra(g.indptr, g.indices, g.costs, source, n)
        assert np.array_equal(a, b)


@needs_both
@pytest.mark.parametrize("gi", [0, 1, 2])
def test_truncated_and_tables_bitwise_equal(gi):
    g = graphs()[gi]
    n = g.domain.n_nodes
    py, cy = BACKENDS["python"], BACKENDS["cython"]
    for source, rmax in ((0, 2.5), (n // 2, 4.0)):
        na, da = py.dijkstra_truncated(g.indptr, g.indices, g.costs, source, n, rmax)
        nb, db = cy.dijkstra_truncated(g.indptr, g.indices, g.costs, source, n, rmax)
        assert np.array_equal(na, nb)
        assert np.array_equal(da, db)
    centers = np.ascontiguousarray(g.domain.interior_nodes(), dtype=np.int32)
    mask = np.ascontiguousarray(g.domain.active_mask, dtype=np.uint8)
    ta = py.ball_table(g.indptr, g.indices, g.costs, centers, 3.0, mask)
    tb = cy.ball_table(g.indptr, g.indices, g.costs, centers, 3.0, mask)
    for x, y in zip(ta, tb):
        assert np.array_equal(x, y)


@needs_both
def test_sweeps_bitwise_equal():
    g = graphs()[1]
    n = g.domain.n_nodes
    py, cy = BACKENDS["python"], BACKENDS["cython"]
    centers = np.ascontiguousarray(g.domain.interior_nodes(), dtype=np.int32)
    mask = np.ascontiguousarray(g.domain.active_mask, dtype=np.uint8)
    indptr, indices, dists = py.ball_table(
        g.indptr, g.indices, g.costs, centers, 2.5, mask
    )
    rng = np.random.default_rng(3)
    u0 = rng.normal(size=n)

    ua, ub = u0.copy(), u0.copy()
    ra = py.gs_sweep(ua, indptr, indices, centers)
    rb = cy.gs_sweep(ub, indptr, indices, centers)
    assert ra == rb and np.array_equal(ua, ub)

    src = u0.copy()
    da, db = u0.copy(), u0.copy()
    ra = py.jacobi_sweep(src, da, indptr, indices, centers)
    rb = cy.jacobi_sweep(src, db, indptr, indices, centers)
    assert ra == rb and np.array_equal(da, db)

    lo0 = u0 - 1.0
    hi0 = u0 + 1.0
    a = (u0.copy(), lo0.copy(), hi0.copy())
    b = (u0.copy(), lo0.copy(), hi0.copy())
    outa = py.gs_sweep3(*a, indptr, indices, centers)
    outb = cy.gs_sweep3(*b, indptr, indices, centers)
    assert outa == outb
    for x, y in zip(a, b):
        assert np.array_equal(x, y)

    srcs = (u0.copy(), lo0.copy(), hi0.copy())
    dsta = tuple(x.copy() for x in srcs)
    dstb = tuple(x.copy() for x in srcs)
    outa = py.jacobi_sweep3(*srcs, *dsta, indptr, indices, centers)
    outb = cy.jacobi_sweep3(*srcs, *dstb, indptr, indices, centers)
    assert outa == outb
    for x, y in zip(dsta, dstb):
        assert np.array_equal(x, y)


def test_dijkstra_repeat_deterministic():
    g = graphs()[1]
    n = g.domain.n_nodes
    for mod in BACKENDS.values():
        a = mod.dijkstra(g.indptr, g.indices, g.costs, 7, n)
        b = mod.dijkstra(g.indptr, g.indices, g.costs, 7, n)
        assert np.array_equal(a, b)


def test_jacobi_constant_field_fixed():
    g = graphs()[0]
    n = g.domain.n_nodes
    centers = np.ascontiguousarray(g.domain.interior_nodes(), dtype=np.int32)
    mask = np.ascontiguousarray(g.domain.active_mask, dtype=np.uint8)
    for mod in BACKENDS.values():
        indptr, indices, _ = mod.ball_table(
            g.indptr, g.indices, g.costs, centers, 2.0, mask
        )
        u = np.full(n, 3.25)
        dst = u.copy()
        resid = mod.jacobi_sweep(u, dst, indptr, indices, centers)
        assert resid == 0.0
        assert np.array_equal(dst, u)
