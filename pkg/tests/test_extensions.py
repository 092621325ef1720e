import numpy as np
import pytest

from finsler_amle import (
    BoundaryData,
    ConeSpec,
    FinslerStructure,
    GridDomain,
    InputError,
    SolverConfig,
    build_graph,
    cone_field,
    lip_constant,
    mcshane_lower,
    mcshane_upper,
    pointwise_lip,
    solve,
)
from conftest import aronsson_values
from oracles import mcshane_by_loops


def test_boundary_data_lip_recomputable(grid9, euclid9):
    _, g = euclid9
    values = grid9.coords(grid9.boundary_nodes())[:, 0]
    bd = BoundaryData.from_values(g, values)
    assert bd.lip_const == lip_constant(g, bd.field(grid9.n_nodes), bd.nodes)
    # full-array form gives the same object
    full = np.zeros(grid9.n_nodes)
    full[bd.nodes] = values
    bd2 = BoundaryData.from_values(g, full)
    assert np.array_equal(bd.values, bd2.values)


def test_boundary_data_validation(euclid9):
    _, g = euclid9
    with pytest.raises(InputError):
        BoundaryData.from_values(g, [1.0, np.nan], nodes=[0, 1])
    with pytest.raises(InputError):
        BoundaryData.from_values(g, [1.0, 2.0, 3.0], nodes=[0, 1])


def test_two_point_mcshane_hand_checked():
    # boundary {P, Q} on a 3x3 lattice, g(P)=0, g(Q)=1, d(P,Q)=2 so L=1/2
    interior = np.zeros(9, dtype=bool)
    boundary = np.zeros(9, dtype=bool)
    P, Q = 3, 5  # (0,1) and (2,1)
    boundary[[P, Q]] = True
    d = GridDomain(3, 3, 1.0, interior_mask=interior, boundary_mask=boundary)
    s = FinslerStructure.euclidean_scaled(d, 1.0)
    g = build_graph(d, s)
    bd = BoundaryData.from_values(g, np.array([0.0, 1.0]), nodes=[P, Q])
    assert bd.lip_const == pytest.approx(0.5)
    psi = mcshane_upper(bd, g)
    phi = mcshane_lower(bd, g)
    rows = [g.distance(P).values, g.distance(Q).values]
    exp_psi = mcshane_by_loops([P, Q], [0.0, 1.0], 0.5, rows, 9, upper=True)
    exp_phi = mcshane_by_loops([P, Q], [0.0, 1.0], 0.5, rows, 9, upper=False)
    assert np.allclose(psi, exp_psi, atol=1e-15)
    assert np.allclose(phi, exp_phi, atol=1e-15)
    assert np.all(phi <= psi + 1e-15)
    # spot hand values: center node sees min(0.5*1, 1+0.5*1) = 0.5
    assert psi[4] == pytest.approx(0.5)
    assert phi[4] == pytest.approx(0.5)
    # corner (0,0): d to P is 1; to Q it is 1 + sqrt(2) via a king path
    dq = 1.0 + np.sqrt(2.0)
    assert psi[0] == pytest.approx(min(0.5 * 1.0, 1.0 + 0.5 * dq))
    assert phi[0] == pytest.approx(max(-0.5 * 1.0, 1.0 - 0.5 * dq))


def test_constant_data(euclid9, grid9):
    _, g = euclid9
    bd = BoundaryData.from_values(g, np.full(grid9.boundary_nodes().size, 2.5))
    assert bd.lip_const == 0.0
    psi = mcshane_upper(bd, g)
    phi = mcshane_lower(bd, g)
    assert np.allclose(psi, 2.5, atol=0)
    assert np.allclose(phi, 2.5, atol=0)


def test_affine_data_recovered_exactly(grid9, euclid9):
    _, g = euclid9
    linear = grid9.coords()[:, 0]
    bd = BoundaryData.from_values(g, linear[grid9.boundary_nodes()])
    psi = mcshane_upper(bd, g)
    phi = mcshane_lower(bd, g)
    assert np.allclose(psi, linear, atol=1e-12)
    assert np.allclose(phi, linear, atol=1e-12)


def test_cone_restriction_extends_exactly():
    # vertex outside the closed working region; geodesics to it exit through
    # the ring, so the upper extension reproduces the cone on the 8-stencil
    d = GridDomain.rectangle(13, 13, 1.0, margin=2)
    s = FinslerStructure.euclidean_scaled(d, 1.0)
    g = build_graph(d, s)
    x0 = int(d.node_id(0, 0))  # exterior corner
    cone = 1.5 * g.distance(x0).values
    bd = BoundaryData.from_values(g, cone[d.boundary_nodes()])
    psi = mcshane_upper(bd, g)
    act = d.active_nodes()
    assert np.allclose(psi[act], cone[act], atol=1e-12)


def test_boundary_interpolation_exact(grid9, euclid9):
    _, g = euclid9
    rng = np.random.default_rng(0)
    values = rng.normal(size=grid9.boundary_nodes().size)
    bd = BoundaryData.from_values(g, values)
    psi = mcshane_upper(bd, g)
    phi = mcshane_lower(bd, g)
    assert np.array_equal(psi[bd.nodes], values)
    assert np.array_equal(phi[bd.nodes], values)
    assert np.all(phi <= psi + 1e-12)


def test_mcshane_lipschitz_bound(grid9, euclid9):
    _, g = euclid9
    rng = np.random.default_rng(1)
    values = rng.normal(size=grid9.boundary_nodes().size)
    bd = BoundaryData.from_values(g, values)
    psi = mcshane_upper(bd, g)
    phi = mcshane_lower(bd, g)
    act = grid9.active_nodes()
    # min/max of L-Lipschitz cones stays L-Lipschitz in the graph metric
    assert lip_constant(g, psi, act) <= bd.lip_const * (1.0 + 1e-12)
    assert lip_constant(g, phi, act) <= bd.lip_const * (1.0 + 1e-12)


def test_sandwich_on_solver_output(aronsson33):
    domain, structure, graph, g = aronsson33
    h = domain.h
    u, _ = solve(domain, structure, g, SolverConfig(r_schedule=(4 * h, 2 * h)),
                 graph=graph)
    psi = mcshane_upper(g, graph)
    phi = mcshane_lower(g, graph)
    act = domain.active_nodes()
    # discrete fixed points carry the ball-quantization slope inflation, so
    # the sandwich holds up to that scale
    tol = 2.0 * g.lip_const * domain.h
    assert np.all(u[act] <= psi[act] + tol)
    assert np.all(u[act] >= phi[act] - tol)


def test_cone_field_examples(grid9, euclid9):
    _, g = euclid9
    x0 = int(grid9.node_id(0, 0))
    flat = cone_field(ConeSpec(b=2.0, a=0.0, x0=x0), g)
    assert np.allclose(flat, 2.0, atol=0)
    unit = cone_field(ConeSpec(b=0.0, a=1.0, x0=x0), g)
    assert np.array_equal(unit, g.distance(x0).values)
    affine = cone_field(ConeSpec(b=5.0, a=-2.0, x0=x0), g)
    assert np.allclose(affine, 5.0 - 2.0 * unit, atol=1e-12)
    # unit cone has metric slope 1 away from the vertex
    x = int(grid9.node_id(5, 5))
    assert pointwise_lip(g, unit, x, 2.0) == pytest.approx(1.0, abs=1e-12)


def test_aronsson_data_lipschitz(aronsson33):
    domain, _, graph, g = aronsson33
    assert g.lip_const == pytest.approx(
        lip_constant(graph, g.field(domain.n_nodes), g.nodes)
    )
    assert g.osc == pytest.approx(2.0, rel=1e-12)
