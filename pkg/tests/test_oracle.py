import numpy as np
import pytest

from dirext.errors import ConfigError
from dirext.fixtures import hat
from dirext.functions import EmbeddedH1
from dirext.oracle import GalerkinMesh, convergence_report, discrete_decompose, graded_nodes

REQUIRED = (-1.0, 0.0, 1.0)


@pytest.mark.parametrize("n", [4, 50, 400])
def test_graded_nodes_nested_and_sorted(n):
    coarse = graded_nodes(n, required=REQUIRED)
    fine = graded_nodes(2 * n, required=REQUIRED)
    assert np.all(np.diff(coarse) > 0)
    assert coarse[0] == -16.0 and coarse[-1] == 16.0
    assert np.all(np.isin(coarse, fine))
    assert np.all(np.isin(REQUIRED, coarse))


@pytest.mark.parametrize("n", [1, 3, 51])
def test_graded_nodes_reject_odd(n):
    with pytest.raises(ConfigError):
        graded_nodes(n)


def test_graded_nodes_cluster_at_center():
    x = graded_nodes(100)
    h = np.diff(x)
    # sinh grading with κ = 3: outer cells about cosh(3) times the central ones
    assert h[len(h) // 2] < h[0] / 5


@pytest.fixture(scope="module")
def mesh100():
    from dirext.fixtures import twoline_extension

    return GalerkinMesh(twoline_extension(alpha=0.5), 100, required=REQUIRED)


def test_matrices_symmetric_positive(mesh100):
    K = mesh100.K.toarray() if hasattr(mesh100.K, "toarray") else mesh100.K
    np.testing.assert_allclose(K, K.T, atol=1e-13)
    assert np.linalg.eigvalsh(K).min() > 0


def test_hat_alone_is_recovered_exactly(twoline, mesh100):
    h = EmbeddedH1(twoline, hat())
    d = discrete_decompose(mesh100, h, h)
    assert d.residual_energy < 1e-12
    assert mesh100.norm(d.f2) < 1e-12


def test_complement_element_is_orthogonal_to_discrete_h1(e25, mesh100):
    d = discrete_decompose(mesh100, e25)
    assert d.max_orthogonality < 1e-10
    # f in the complement: the H1 part is small and shrinks with refinement
    assert d.residual_energy < 1e-2


def test_pythagoras(twoline, e25, mesh100):
    h = EmbeddedH1(twoline, hat())
    d = discrete_decompose(mesh100, e25 + h, h)
    K = mesh100.K
    total = d.f @ K @ d.f
    assert abs(total - d.f1 @ K @ d.f1 - d.f2 @ K @ d.f2) <= 1e-10 * total


def test_interpolation_reproduces_nodal_values(twoline, e25, mesh100):
    c = mesh100.interpolate(e25)
    x = mesh100.x_nodes[1:-1]
    x = x[np.abs(x) > 1.0]
    np.testing.assert_allclose(mesh100.evaluate(c, x), e25.value(x), atol=1e-12)


def test_convergence_report(twoline, e25):
    h = EmbeddedH1(twoline, hat())
    rep = convergence_report(twoline, e25 + h, n_list=(50, 100, 200, 400), h1_part=h, required=REQUIRED)
    res = [r["residual_energy"] for r in rep["rows"]]
    assert rep["strictly_decreasing"]
    assert res[-1] <= 1e-3
    assert rep["observed_order"] == pytest.approx(2.0, abs=0.3)


@pytest.mark.parametrize("n_list", [(50, 120), (50, 100, 150)])
def test_convergence_requires_doubling(twoline, e25, n_list):
    with pytest.raises(ConfigError):
        convergence_report(twoline, e25, n_list=n_list)


def test_convergence_of_exactly_representable_function(cantor):
    # a hat whose breaks are mesh nodes lies in every discrete space
    h = EmbeddedH1(cantor, hat(0.5))
    rep = convergence_report(cantor, h, n_list=(32, 64), h1_part=h, required=(-1.0, -0.5, 0.0, 0.5, 1.0, 1.5))
    assert rep["exact"] and rep["converged"]
    assert rep["observed_order"] is None
