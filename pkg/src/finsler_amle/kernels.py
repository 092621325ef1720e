"""Kernel backend selection: compiled extension with pure-Python fallback.

The compiled module is preferred when it imported cleanly; set the
environment variable ``FINSLER_AMLE_KERNELS=python`` to force the fallback.
Both backends implement the same functions and produce bit-identical
results; the compiled one is one to three orders of magnitude faster
(see ``benchmarks/bench_kernels.py``).
"""

from __future__ import annotations

import os

from . import _kernels_py

try:
    from . import _kernels
except ImportError:  # pragma: no cover - depends on the build environment
    _kernels = None

if os.environ.get("FINSLER_AMLE_KERNELS", "") == "python" or _kernels is None:
    _active = _kernels_py
else:
    _active = _kernels

BACKEND = _active.NAME

dijkstra = _active.dijkstra
dijkstra_truncated = _active.dijkstra_truncated
ball_table = _active.ball_table
gs_sweep = _active.gs_sweep
jacobi_sweep = _active.jacobi_sweep
gs_sweep3 = _active.gs_sweep3
jacobi_sweep3 = _active.jacobi_sweep3


def available_backends() -> dict:
    """Name -> module for every importable backend (used by the benchmark)."""
    out = {"python": _kernels_py}
    if _kernels is not None:
        out["cython"] = _kernels
    return out
