"""Batch front door: solve, verify, and distance subcommands.

Exit codes: 0 success, 1 usage/config error, 2 solver non-convergence,
3 verification failure.  With ``output.timing = none`` (the default) two
sequential runs of the same configuration produce byte-identical outputs;
``--threads`` (or ``FINSLER_AMLE_THREADS``) caps worker counts and is
currently informational since all kernels run sequentially.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys

import numpy as np

from . import config as cfgmod
from .checks import (
    check_best_extension,
    check_comparison_principle,
    check_cone_comparison,
    check_gradient_slope_agreement,
    check_minimality_vs_competitors,
    check_mollification_convergence,
)
from .config import ProblemConfig
from .errors import FinslerAmleError
from .extensions import mcshane_lower, mcshane_upper
from .metric import build_graph
from .solver import solve

logger = logging.getLogger("finsler_amle")


def _fmt(v: float) -> str:
    return f"{float(v):.17g}"


def write_field_csv(path, domain, values, nodes) -> None:
    """Solution-style CSV: x_index,y_index,x,y,value over the given nodes."""
    coords = domain.coords(nodes)
    i, j = domain.node_ij(np.asarray(nodes))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("x_index,y_index,x,y,value\n")
        for k in range(len(nodes)):
            fh.write(
                f"{int(i[k])},{int(j[k])},{_fmt(coords[k, 0])},"
                f"{_fmt(coords[k, 1])},{_fmt(values[nodes[k]])}\n"
            )


def read_field_csv(path, domain) -> np.ndarray:
    """Inverse of ``write_field_csv``; NaN on nodes absent from the file."""
    out = np.full(domain.n_nodes, np.nan)
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline()
        if not header.startswith("x_index"):
            raise FinslerAmleError(f"{path}: not a field CSV")
        for line in fh:
            parts = line.strip().split(",")
            if len(parts) != 5:
                raise FinslerAmleError(f"{path}: malformed row {line!r}")
            i, j = int(parts[0]), int(parts[1])
            if not (0 <= i < domain.nx and 0 <= j < domain.ny):
                raise FinslerAmleError(f"{path}: node ({i},{j}) outside lattice")
            out[domain.node_id(i, j)] = float(parts[4])
    return out


def write_json(path, obj) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(json.dumps(obj, indent=2, sort_keys=True))
        fh.write("\n")


def _prepare(cfg: ProblemConfig):
    domain = cfgmod.build_domain(cfg)
    structure = cfgmod.build_structure(cfg, domain)
    graph = cfgmod.build_metric_graph(cfg, domain, structure)
    return domain, structure, graph


def run_solve(cfg: ProblemConfig) -> int:
    domain, structure, graph = _prepare(cfg)
    g = cfgmod.build_boundary(cfg, domain, graph)
    solver_cfg = cfgmod.build_solver_config(cfg, domain)
    u, report = solve(domain, structure, g, solver_cfg, graph=graph)

    outdir = cfg.get("output.dir")
    os.makedirs(outdir, exist_ok=True)
    active = domain.active_nodes()
    write_field_csv(os.path.join(outdir, "u.csv"), domain, u, active)
    fields = {t.strip() for t in cfg.get("output.fields").split(",")}
    if "psi" in fields:
        write_field_csv(os.path.join(outdir, "psi.csv"), domain,
                        mcshane_upper(g, graph), active)
    if "phi" in fields:
        write_field_csv(os.path.join(outdir, "phi.csv"), domain,
                        mcshane_lower(g, graph), active)
    write_json(
        os.path.join(outdir, "report.json"),
        report.to_dict(include_timing=cfg.get("output.timing") == "measured"),
    )
    return 0 if report.converged else 2


def run_verify(cfg: ProblemConfig, solution_path: str) -> int:
    domain, structure, graph = _prepare(cfg)
    u = read_field_csv(solution_path, domain)
    active = domain.active_mask
    if not np.isfinite(u[active]).all():
        raise FinslerAmleError(
            f"{solution_path} does not cover the configured domain "
            f"({domain.nx}x{domain.ny}, margin {cfg.get('domain.margin')})"
        )
    seed = cfg.get("verify.seed")
    samples = cfg.get("verify.samples")
    subdomains = cfg.get("verify.subdomains")
    reports = []
    for name in cfgmod.parse_checks(cfg):
        if name == "cone-comparison":
            reports.append(check_cone_comparison(u, graph, samples=samples,
                                                 rng_seed=seed))
        elif name == "best-extension":
            reports.append(check_best_extension(
                u, graph, subdomain_samples=subdomains, rng_seed=seed))
        elif name == "gradient-slope":
            r = cfgmod.parse_lengths(cfg.get("verify.slope_scale"), domain.h,
                                     "verify.slope_scale")[0]
            reports.append(check_gradient_slope_agreement(u, structure, graph, r))
        elif name == "comparison-principle":
            g = cfgmod.build_boundary(cfg, domain, graph)
            psi = mcshane_upper(g, graph)
            phi = mcshane_lower(g, graph)
            # The discrete fixed point carries the grid's slope inflation,
            # so against the envelopes the sandwich tolerance applies.
            kappa = 2.0 * g.lip_const * domain.h + 1e-12
            upper = check_comparison_principle(u, psi, graph, kappa=kappa)
            upper.name = "comparison-principle-vs-upper"
            lower = check_comparison_principle(phi, u, graph, kappa=kappa)
            lower.name = "comparison-principle-vs-lower"
            reports.extend([upper, lower])
        elif name == "minimality":
            reports.append(check_minimality_vs_competitors(
                u, structure, graph,
                competitor_count=3 * max(2, subdomains // 10), rng_seed=seed))
        else:  # mollification
            g = cfgmod.build_boundary(cfg, domain, graph)
            eps = cfgmod.parse_lengths(cfg.get("verify.mollify_epsilons"),
                                       domain.h, "verify.mollify_epsilons")
            rng = np.random.default_rng(seed)
            act = domain.active_nodes()
            pairs = [
                (int(rng.choice(act)), int(rng.choice(act)))
                for _ in range(cfg.get("verify.probe_pairs"))
            ]
            stencil = cfg.get("domain.stencil")
            reports.append(check_mollification_convergence(
                structure,
                lambda s: build_graph(domain, s, stencil_order=stencil),
                eps, pairs, g=g,
                config=cfgmod.build_solver_config(cfg, domain),
            ))
    outdir = cfg.get("output.dir")
    os.makedirs(outdir, exist_ok=True)
    all_passed = all(r.passed for r in reports)
    write_json(os.path.join(outdir, "verify.json"), {
        "all_passed": all_passed,
        "checks": [r.to_dict() for r in reports],
    })
    return 0 if all_passed else 3


def run_distance(cfg: ProblemConfig, source_spec: str) -> int:
    domain, _structure, graph = _prepare(cfg)
    source = cfgmod.parse_node(source_spec, domain, "--source")
    if not domain.active_mask[source]:
        raise FinslerAmleError(
            f"--source: node {source_spec} is outside the working region"
        )
    dist = graph.distance(source).values
    outdir = cfg.get("output.dir")
    os.makedirs(outdir, exist_ok=True)
    path = os.path.join(outdir, "dist.csv")
    i, j = domain.node_ij(np.arange(domain.n_nodes))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("x_index,y_index,value\n")
        for k in range(domain.n_nodes):
            fh.write(f"{int(i[k])},{int(j[k])},{_fmt(dist[k])}\n")
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="finsler-amle",
        description="Lipschitz extension solver for grid Finsler metrics",
    )
    parser.add_argument("--threads", type=int, default=None,
                        help="cap worker count (1 guarantees determinism)")
    sub = parser.add_subparsers(dest="command", required=True)
    p_solve = sub.add_parser("solve", help="solve and write u.csv/report.json")
    p_solve.add_argument("config")
    p_verify = sub.add_parser("verify", help="run checks against a solution")
    p_verify.add_argument("config")
    p_verify.add_argument("--solution", required=True)
    p_dist = sub.add_parser("distance", help="single-source distance field")
    p_dist.add_argument("config")
    p_dist.add_argument("--source", required=True, metavar="i,j")

    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 1

    threads = args.threads
    if threads is None:
        env = os.environ.get("FINSLER_AMLE_THREADS")
        threads = int(env) if env else 1
    if threads < 1:
        print("error: --threads must be at least 1", file=sys.stderr)
        return 1
    logger.debug("worker cap: %d (kernels are sequential)", threads)

    try:
        cfg = ProblemConfig.load(args.config)
        if args.command == "solve":
            return run_solve(cfg)
        if args.command == "verify":
            return run_verify(cfg, args.solution)
        return run_distance(cfg, args.source)
    except FinslerAmleError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
