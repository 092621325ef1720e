import numpy as np
import pytest

from finsler_amle import (
    BoundaryData,
    FinslerStructure,
    GridDomain,
    build_graph,
    two_media_scale,
)


@pytest.fixture(scope="session")
def grid9():
    return GridDomain.rectangle(9, 9, 1.0)


@pytest.fixture(scope="session")
def euclid9(grid9):
    structure = FinslerStructure.euclidean_scaled(grid9, 1.0)
    return structure, build_graph(grid9, structure)


@pytest.fixture(scope="session")
def riem9(grid9):
    structure = FinslerStructure.riemannian(grid9, 4.0, 0.0, 1.0)
    return structure, build_graph(grid9, structure)


@pytest.fixture(scope="session")
def two_media9():
    # 9x9 over [-4, 4]^2, cheap-left / expensive-right scale
    domain = GridDomain.rectangle(9, 9, 1.0, origin=(-4.0, -4.0))
    structure = FinslerStructure.euclidean_scaled(
        domain, two_media_scale(domain, 1.0, 3.0)
    )
    return domain, structure, build_graph(domain, structure)


def aronsson_values(domain, nodes=None):
    coords = domain.coords(nodes)
    return np.abs(coords[:, 1]) ** (4.0 / 3.0) - np.abs(coords[:, 0]) ** (4.0 / 3.0)


@pytest.fixture(scope="session")
def aronsson33():
    n = 33
    h = 2.0 / (n - 1)
    domain = GridDomain.rectangle(n, n, h, origin=(-1.0, -1.0))
    structure = FinslerStructure.euclidean_scaled(domain, 1.0)
    graph = build_graph(domain, structure)
    g = BoundaryData.from_values(
        graph, aronsson_values(domain, domain.boundary_nodes())
    )
    return domain, structure, graph, g


def bump_boundary_values(domain):
    """Three localized boundary bumps with generic heights: data that does
    not saturate its Lipschitz constant, so the McShane envelopes differ."""
    nodes = domain.boundary_nodes()
    coords = domain.coords(nodes)
    anchors = np.array([[-1.0, 0.1], [0.3, -1.0], [1.0, 0.6]])
    heights = np.array([0.9, -0.35, 0.2])
    values = np.zeros(nodes.size)
    for (ax, ay), v in zip(anchors, heights):
        arc = np.hypot(coords[:, 0] - ax, coords[:, 1] - ay)
        values += v * np.maximum(0.0, 1.0 - (arc / 0.35) ** 2) ** 2
    return values
