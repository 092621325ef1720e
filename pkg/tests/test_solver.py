import numpy as np
import pytest

from finsler_amle import (
    BoundaryData,
    FinslerStructure,
    GridDomain,
    InputError,
    SolverConfig,
    ball_inf,
    ball_sup,
    build_graph,
    harmonious_step,
    mcshane_lower,
    mcshane_upper,
    shortest_distance,
    slope_balance_margin,
    slopes,
    solve,
)
from conftest import aronsson_values

RNG = np.random.default_rng(5)


# -- ball extrema and slopes ------------------------------------------------------


def test_ball_extrema_constant(grid9, euclid9):
    _, g = euclid9
    u = np.full(grid9.n_nodes, 4.0)
    x = int(grid9.node_id(4, 4))
    assert ball_sup(u, g, x, 2.0) == 4.0
    assert ball_inf(u, g, x, 2.0) == 4.0
    assert slopes(u, g, x, 2.0) == (0.0, 0.0)


def test_ball_extrema_cone(grid9, euclid9):
    # triangle inequality brackets the extrema; the deficit is the ball's
    # directional quantization (radius 2h reaches only sqrt(2)h diagonally)
    _, g = euclid9
    x0 = int(grid9.node_id(0, 0))
    u = shortest_distance(g, x0).values
    x = int(grid9.node_id(5, 5))
    r = 2.0
    deficit = r - np.sqrt(2.0)
    assert u[x] + r >= ball_sup(u, g, x, r) >= u[x] + r - deficit - 1e-12
    assert u[x] - r <= ball_inf(u, g, x, r) <= u[x] - r + deficit + 1e-12
    sp, sm = slopes(u, g, x, r)
    assert 1.0 >= sp >= 1.0 - deficit / r - 1e-12
    assert 1.0 >= sm >= 1.0 - deficit / r - 1e-12


def test_slopes_at_local_max(grid9, euclid9):
    _, g = euclid9
    u = -shortest_distance(g, int(grid9.node_id(4, 4))).values
    sp, sm = slopes(u, g, int(grid9.node_id(4, 4)), 2.0)
    assert sp == 0.0
    assert sm > 0.0


def test_ball_sup_linear(grid9, euclid9):
    _, g = euclid9
    u = grid9.coords()[:, 0]
    x = int(grid9.node_id(4, 4))
    r = 2.0
    assert ball_sup(u, g, x, r) - u[x] == pytest.approx(r, abs=1e-12)


# -- harmonious step -------------------------------------------------------------


def test_step_keeps_boundary_and_linear_fixed(grid9, euclid9):
    _, g = euclid9
    u = grid9.coords()[:, 0].copy()
    out = harmonious_step(u, g, 2.0, sweep="jacobi")
    assert np.array_equal(out[grid9.boundary_nodes()], u[grid9.boundary_nodes()])
    # linear fields are exact fixed points away from the one-sided
    # boundary-clipped balls (within r of the ring)
    deep = np.zeros(grid9.n_nodes, dtype=bool)
    i, j = grid9.node_ij(np.arange(grid9.n_nodes))
    deep[(i >= 3) & (i <= 5) & (j >= 3) & (j <= 5)] = True
    assert np.abs(out - u)[deep].max() <= 1e-12
    assert np.abs(out - u).max() <= 0.5 + 1e-12  # (r - h)/2 at the ring


def test_step_monotone_and_nonexpansive(grid9, euclid9):
    _, g = euclid9
    u = RNG.normal(size=grid9.n_nodes)
    v = u + np.abs(RNG.normal(size=grid9.n_nodes))
    su = harmonious_step(u, g, 2.0)
    sv = harmonious_step(v, g, 2.0)
    assert np.all(su <= sv + 1e-15)  # order preserved
    gap = np.abs(u - v).max()
    assert np.abs(su - sv).max() <= gap + 1e-15  # sup-norm non-expansive


def test_step_rejects_small_radius(grid9, euclid9):
    _, g = euclid9
    with pytest.raises(InputError):
        harmonious_step(np.zeros(grid9.n_nodes), g, 0.5)
    with pytest.raises(InputError):
        harmonious_step(np.zeros(grid9.n_nodes), g, 2.0, sweep="checkerboard")


def test_step_cone_near_fixed(grid9, euclid9):
    _, g = euclid9
    d = GridDomain.rectangle(13, 13, 1.0, margin=2)
    s = FinslerStructure.euclidean_scaled(d, 1.0)
    gg = build_graph(d, s)
    cone = gg.distance(int(d.node_id(0, 0))).values
    out = harmonious_step(cone, gg, 2.0, sweep="jacobi")
    # per-node drift bounded by half the ball's diagonal quantization deficit
    bound = 0.5 * (2.0 - np.sqrt(2.0)) + 1e-12
    assert np.abs(out - cone)[d.active_mask].max() <= bound


# -- solve -------------------------------------------------------------------------


def test_constant_data_short_circuit(grid9, euclid9):
    s, g = euclid9
    bd = BoundaryData.from_values(g, np.full(grid9.boundary_nodes().size, 7.0))
    u, rep = solve(grid9, s, bd, graph=g)
    act = grid9.active_nodes()
    assert np.all(u[act] == 7.0)
    assert rep.converged
    assert rep.iterations[0] == 1 and sum(rep.iterations[1:]) == 0


def test_solver_config_validation():
    with pytest.raises(InputError):
        SolverConfig(r_schedule=())
    with pytest.raises(InputError):
        SolverConfig(r_schedule=(1.0, 2.0))
    with pytest.raises(InputError):
        SolverConfig(r_schedule=(2.0,), tol=0.0)
    with pytest.raises(InputError):
        SolverConfig(r_schedule=(2.0,), sweep="red-black")
    cfg = SolverConfig(r_schedule=(1.0,))
    with pytest.raises(InputError):
        cfg.validate_for(h=1.0)  # radius below 2h


def test_solve_basic_contracts(aronsson33):
    domain, structure, graph, g = aronsson33
    h = domain.h
    u, rep = solve(domain, structure, g,
                   SolverConfig(r_schedule=(8 * h, 4 * h, 2 * h)), graph=graph)
    act = domain.active_nodes()
    assert rep.converged
    assert np.array_equal(u[g.nodes], g.values)  # exact interpolation
    assert np.isnan(u[~domain.active_mask]).all()
    # comparison with constants
    assert u[act].max() <= g.values.max() + rep.tol
    assert u[act].min() >= g.values.min() - rep.tol
    # monotone max/min diagnostics
    assert rep.max_increase <= 0.0
    assert rep.min_decrease >= 0.0
    # accuracy against the closed form
    exact = aronsson_values(domain)
    assert np.abs(u[act] - exact[act]).max() <= 0.06 * g.osc


def test_uniqueness_from_envelope_inits(aronsson33):
    domain, structure, graph, g = aronsson33
    h = domain.h
    cfg = SolverConfig(r_schedule=(4 * h, 2 * h))
    psi = mcshane_upper(g, graph)
    phi = mcshane_lower(g, graph)
    u_hi, rep_hi = solve(domain, structure, g, cfg, graph=graph, init=psi)
    u_lo, rep_lo = solve(domain, structure, g, cfg, graph=graph, init=phi)
    act = domain.active_mask
    assert np.abs(u_hi[act] - u_lo[act]).max() <= 2.0 * rep_hi.tol


def test_comparison_of_solves(aronsson33):
    domain, structure, graph, g = aronsson33
    h = domain.h
    cfg = SolverConfig(r_schedule=(4 * h, 2 * h))
    u, rep_u = solve(domain, structure, g, cfg, graph=graph)
    g2 = BoundaryData.from_values(graph, g.values + 0.25, nodes=g.nodes)
    v, rep_v = solve(domain, structure, g2, cfg, graph=graph)
    act = domain.active_mask
    # ordered data gives ordered solutions; shifted data shifts the solution
    assert np.all(u[act] <= v[act] + rep_u.tol + rep_v.tol)
    assert np.abs(v[act] - u[act] - 0.25).max() <= rep_u.tol + rep_v.tol + 1e-12


def test_jacobi_matches_gauss_seidel(aronsson33):
    domain, structure, graph, g = aronsson33
    h = domain.h
    u_gs, rep_gs = solve(domain, structure, g,
                         SolverConfig(r_schedule=(4 * h, 2 * h)), graph=graph)
    u_j, rep_j = solve(domain, structure, g,
                       SolverConfig(r_schedule=(4 * h, 2 * h), sweep="jacobi"),
                       graph=graph)
    act = domain.active_mask
    assert rep_j.converged
    assert np.abs(u_gs[act] - u_j[act]).max() <= rep_gs.tol + rep_j.tol


def test_solve_deterministic(aronsson33):
    domain, structure, graph, g = aronsson33
    h = domain.h
    cfg = SolverConfig(r_schedule=(4 * h, 2 * h))
    u1, _ = solve(domain, structure, g, cfg, graph=graph)
    u2, _ = solve(domain, structure, g, cfg, graph=graph)
    assert np.array_equal(u1[domain.active_mask], u2[domain.active_mask])


def test_non_convergence_flagged(aronsson33):
    domain, structure, graph, g = aronsson33
    h = domain.h
    cfg = SolverConfig(r_schedule=(4 * h, 2 * h), max_iter=2)
    u, rep = solve(domain, structure, g, cfg, graph=graph)
    assert not rep.converged
    assert np.isfinite(u[domain.active_mask]).all()  # field still returned
    assert rep.iterations == [2, 2]


def test_bad_init_rejected(aronsson33):
    domain, structure, graph, g = aronsson33
    bad = np.full(domain.n_nodes, np.nan)
    with pytest.raises(InputError):
        solve(domain, structure, g, graph=graph, init=bad)


def test_record_history(aronsson33):
    domain, structure, graph, g = aronsson33
    h = domain.h
    cfg = SolverConfig(r_schedule=(4 * h,), record_history=True, max_iter=50)
    _, rep = solve(domain, structure, g, cfg, graph=graph)
    assert rep.history
    maxes = [row[4] for row in rep.history]
    mins = [row[5] for row in rep.history]
    assert all(b <= a + 1e-15 for a, b in zip(maxes, maxes[1:]))
    assert all(b >= a - 1e-15 for a, b in zip(mins, mins[1:]))


def test_lipschitz_non_inflation(aronsson33):
    domain, structure, graph, g = aronsson33
    h = domain.h
    u, _ = solve(domain, structure, g,
                 SolverConfig(r_schedule=(8 * h, 4 * h, 2 * h)), graph=graph)
    from finsler_amle import lip_constant
    lip_u = lip_constant(graph, u, domain.active_nodes())
    # micro-pair slopes inflate by at most the final ball's quantization
    # anisotropy (sqrt(2) at r = 2h on the 8-neighbor stencil)
    kappa_tol = graph.ball_anisotropy(2 * h) - 1.0
    assert lip_u <= g.lip_const * (1.0 + kappa_tol) * (1.0 + 1e-9)


def test_slope_balance_at_fixed_point(aronsson33):
    domain, structure, graph, g = aronsson33
    h = domain.h
    u, _ = solve(domain, structure, g,
                 SolverConfig(r_schedule=(8 * h, 4 * h, 2 * h)), graph=graph)
    r = 2 * h
    margin = slope_balance_margin(u, graph, r)
    assert margin <= 3.0 * h / r


def test_report_dict_shape(aronsson33):
    domain, structure, graph, g = aronsson33
    h = domain.h
    _, rep = solve(domain, structure, g, SolverConfig(r_schedule=(4 * h, 2 * h)),
                   graph=graph)
    d = rep.to_dict()
    assert set(d) == {"radii", "iterations", "residuals", "gaps", "tol",
                      "converged", "wall_ms", "max_increase", "min_decrease"}
    assert d["wall_ms"] is None  # timing excluded unless requested
    assert rep.to_dict(include_timing=True)["wall_ms"] > 0.0
