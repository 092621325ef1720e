"""Compare the compiled kernels against the pure-Python fallback.

Runs the three hot operations (single-source shortest paths, ball-table
construction, Gauss-Seidel ball sweeps) on a two-media problem and prints
per-backend timings.  Both backends return bit-identical arrays; the point
of the compiled core is the speed column.

Usage: python benchmarks/bench_kernels.py [--size N] [--repeat K]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from finsler_amle import FinslerStructure, GridDomain, build_graph, two_media_scale
from finsler_amle.kernels import available_backends


def bench(fn, repeat):
    best = np.inf
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--size", type=int, default=64)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    n = args.size
    h = 2.0 / (n - 1)
    domain = GridDomain.rectangle(n, n, h, origin=(-1.0, -1.0))
    structure = FinslerStructure.euclidean_scaled(
        domain, two_media_scale(domain, 1.0, 2.0)
    )
    graph = build_graph(domain, structure)
    centers = np.ascontiguousarray(domain.interior_nodes(), dtype=np.int32)
    mask = np.ascontiguousarray(domain.active_mask, dtype=np.uint8)
    r = 4 * h

    backends = available_backends()
    print(f"lattice {n}x{n} ({domain.n_nodes} nodes), ball radius 4h, "
          f"backends: {', '.join(backends)}")
    rows = {}
    reference = {}
    for name, mod in backends.items():
        t_dij, dist = bench(
            lambda: mod.dijkstra(graph.indptr, graph.indices, graph.costs, 0,
                                 domain.n_nodes),
            args.repeat,
        )
        t_tab, table = bench(
            lambda: mod.ball_table(graph.indptr, graph.indices, graph.costs,
                                   centers, r, mask),
            args.repeat,
        )
        tab_indptr, tab_indices, _ = table
        u0 = np.where(np.isfinite(dist), dist, 0.0)

        def sweep():
            u = u0.copy()
            mod.gs_sweep(u, tab_indptr, tab_indices, centers)
            return u

        t_sweep, swept = bench(sweep, args.repeat)
        rows[name] = (t_dij, t_tab, t_sweep)
        reference[name] = (dist, tab_indices, swept)

    names = list(rows)
    if len(names) == 2:
        a, b = names
        same = all(
            np.array_equal(x, y)
            for x, y in zip(reference[a], reference[b])
        )
        print(f"bit-identical results across backends: {same}")

    print(f"{'backend':<10} {'dijkstra':>12} {'ball_table':>12} {'gs_sweep':>12}")
    for name, (t1, t2, t3) in rows.items():
        print(f"{name:<10} {t1 * 1e3:>10.2f}ms {t2 * 1e3:>10.2f}ms "
              f"{t3 * 1e3:>10.2f}ms")
    if len(names) == 2 and "cython" in rows and "python" in rows:
        sp = [rows["python"][k] / rows["cython"][k] for k in range(3)]
        print(f"{'speedup':<10} {sp[0]:>11.1f}x {sp[1]:>11.1f}x {sp[2]:>11.1f}x")


if __name__ == "__main__":
    main()
