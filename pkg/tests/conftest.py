import numpy as np
import pytest

from campbell.mesh import enumerate_nodes, find_node
from campbell.model import RotorModel, example_6dof


@pytest.fixture(scope="session")
def model6():
    return example_6dof()


@pytest.fixture(scope="session")
def nodes6(model6):
    """Upper half-plane nodes of the bundled model in the plotting range."""
    return enumerate_nodes(model6.omegas, (0.0, 2.5))


@pytest.fixture(scope="session")
def nodes6_all(model6):
    """Every crossing of the bundled model, conjugates included."""
    return enumerate_nodes(model6.omegas, include_negative_frequency=True)


@pytest.fixture(scope="session")
def node_definite(nodes6):
    return find_node(nodes6, 2.0 / 3.0, 5.0 / 3.0)


@pytest.fixture(scope="session")
def node_mixed(nodes6):
    return find_node(nodes6, 4.0 / 3.0, 1.0 / 3.0)


@pytest.fixture(scope="session")
def node_standstill(nodes6):
    return find_node(nodes6, 0.0, 1.0)


def two_mode_model(d11=0.0, k_couple=((0.0, 0.0), (0.0, 0.0)),
                   n_couple=((0.0, 0.0), (0.0, 0.0))):
    """Minimal two-doublet rotor (w = 1, 3) with prescribed coupling blocks.

    d11 fills D[0, 0]; k_couple and n_couple fill the mode-(1,2) blocks of K
    and N with the symmetric/antisymmetric completion.
    """
    d = np.zeros((4, 4))
    d[0, 0] = d11
    k = np.zeros((4, 4))
    k[0:2, 2:4] = np.asarray(k_couple, dtype=float)
    k[2:4, 0:2] = k[0:2, 2:4].T
    n = np.zeros((4, 4))
    n[0:2, 2:4] = np.asarray(n_couple, dtype=float)
    n[2:4, 0:2] = -n[0:2, 2:4].T
    return RotorModel(omegas=(1.0, 3.0), D=d, K=k, N=n)
