import numpy as np
import pytest
from hypothesis import given

from quatquot._lattice import lattice_index, smith_invariants
from quatquot.group_action import (
    build_omega,
    infinitesimal,
    infinitesimal_matrix,
    integer_kernel,
    kernel_for,
    kernel_report,
    locally_free_screen,
    quotient_is_F,
)
from quatquot.qalg import UPoint, torus_act
from quatquot.toric_data import DataError, DerivedData, derive_T, validate_S

from .conftest import VALID, lattice_data, load_fixture

K3 = [(1, 0), (0, 1), (-1, 1)]


def test_k3_kernel():
    assert kernel_for(K3).D == ((1, -1, 1),)
    assert quotient_is_F(K3)


@given(lattice_data())
def test_kernel_annihilates_and_is_saturated(S):
    T = derive_T(S)
    Om = build_omega(T).as_array()
    D = integer_kernel(build_omega(T)).as_array()
    assert D.shape == (len(S) - 2, len(S))
    assert not np.any(Om @ D.T)
    assert set(smith_invariants(D.tolist())) == {1}


@given(lattice_data())
def test_quotient_is_F_matches_generation(S):
    # the image of the T^k lattice is spanned by u_k and v_2..v_k, i.e. by u_1..u_k
    assert quotient_is_F(S) == (lattice_index(S, 2) == 1) == validate_S(S).checks["generates"]


def test_sublattice_is_not_F():
    assert not quotient_is_F(load_fixture("sublattice").S)


def test_rank_deficient_omega_rejected():
    with pytest.raises(DataError):
        integer_kernel(build_omega(DerivedData(((1, 0), (2, 0), (3, 0)))))


def test_foreign_kernel_rejected():
    with pytest.raises(DataError):
        quotient_is_F(K3, kernel_for([(1, 0), (1, 1), (0, 1), (-1, 1)]))


@pytest.mark.parametrize("name", VALID)
def test_locally_free_on_valid_fixtures(name):
    rep = locally_free_screen(load_fixture(name).T)
    assert rep.status == "PASS"
    assert rep.witnesses == [] and rep.dependent_pairs == []


def test_degenerate_data_yields_witness():
    # u_2 and u_3 parallel
    S = [(1, 0), (-1, 1), (-2, 2)]
    rep = locally_free_screen(derive_T(S))
    assert rep.status == "FAIL"
    assert rep.dependent_pairs == [3]
    assert any(w["m"] == 3 and w["identity_holds"] for w in rep.witnesses)
    for w in rep.witnesses:
        d = np.array(w["d"])
        assert not np.any(build_omega(derive_T(S)).as_array() @ d)


def test_kernel_report_schema():
    rep = kernel_report(K3)
    assert {"kernel_basis", "quotient_is_F", "locally_free", "witnesses"} <= rep.keys()
    assert rep["kernel_basis"] == [[1, -1, 1]]


def test_infinitesimal_matches_finite_difference():
    rng = np.random.default_rng(0)
    p = UPoint(rng.normal(size=4) + 1j * rng.normal(size=4), rng.normal(size=4) + 1j * rng.normal(size=4))
    d = rng.normal(size=4)
    h = 1e-6
    fd = (torus_act(np.exp(1j * h * d), p).to_real() - torus_act(np.exp(-1j * h * d), p).to_real()) / (2 * h)
    assert np.allclose(infinitesimal(d, p).to_real(), fd, atol=1e-8)
    assert np.allclose(infinitesimal_matrix(p) @ d, fd, atol=1e-8)
