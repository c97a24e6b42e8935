import pytest

import ptgraph as pg


@pytest.fixture(scope="session")
def graph123():
    return pg.make_star_graph([1.0, 1.5, 2.0])


@pytest.fixture(scope="session")
def graph111():
    return pg.make_star_graph([1.0, 1.0, 1.0])


@pytest.fixture(scope="session")
def graph_inc():
    """Lengths without sine-zero coincidences below k ~ 31; every root in the
    working window is regular, so deep bases exist."""
    return pg.make_star_graph([1.0, 1.3, 1.7])


@pytest.fixture(scope="session")
def basis123_d(graph123):
    return pg.build_basis(graph123, pg.PT_DIRICHLET, 20.0)


@pytest.fixture(scope="session")
def basis123_n(graph123):
    return pg.build_basis(graph123, pg.PT_NEUMANN, 20.0)


@pytest.fixture(scope="session")
def basis123_k(graph123):
    return pg.build_basis(graph123, pg.KIRCHHOFF_REF, 20.0)


@pytest.fixture(scope="session")
def basis_inc_d(graph_inc):
    return pg.build_basis(graph_inc, pg.PT_DIRICHLET, 34.0)


@pytest.fixture(scope="session")
def basis_inc_n(graph_inc):
    return pg.build_basis(graph_inc, pg.PT_NEUMANN, 34.0)
