import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from abelgerbe.complex import Chain, Cochain, boundary, coboundary, fundamental_cycle
from abelgerbe.errors import DegreeOverflow, NotABoundary, NotACycle, NotUnimodular
from abelgerbe.generators import generate_flat_torus, generate_rp3, torus_axis_loop
from abelgerbe.homology import (
    cohomology,
    cup_product,
    dual_cocycle_basis,
    dual_homology_basis,
    find_bounding_chain,
    homology,
    homology_report,
    is_cocycle,
    pairing_matrix,
)

from conftest import KNOWN_BETTI, mesh


@pytest.mark.parametrize("name", list(KNOWN_BETTI))
def test_betti(name):
    K = mesh(name)
    assert tuple(homology(K, k).betti for k in range(K.dim + 1)) == KNOWN_BETTI[name]
    assert tuple(cohomology(K, k).betti for k in range(K.dim + 1)) == KNOWN_BETTI[name]


def test_rp3_torsion_and_universal_coefficients():
    K = generate_rp3()
    assert [homology(K, k).betti for k in range(4)] == [1, 0, 0, 1]
    assert homology(K, 1).torsion == (2,)
    assert homology(K, 2).torsion == ()
    # H^2 picks up the torsion of H_1
    assert cohomology(K, 2).torsion == (2,)
    assert cohomology(K, 1).torsion == ()
    z, order = homology(K, 1).torsion_reps[0]
    assert order == 2
    with pytest.raises(NotABoundary) as info:
        find_bounding_chain(K, z)
    assert info.value.torsion == (1,)
    g = find_bounding_chain(K, z * 2)
    assert boundary(K, g) == z * 2


def test_free_reps_and_cocycles_are_dual():
    K = mesh("g2")
    h, c = homology(K, 1), cohomology(K, 1)
    E = np.array([[phi(z) for z in h.free_reps] for phi in c.free_reps])
    assert np.array_equal(E, np.eye(4, dtype=int))
    for phi in c.free_reps:
        assert is_cocycle(K, phi)


def test_coordinates_of_element():
    K = mesh("g2")
    h = homology(K, 1)
    z = h.element((1, -2, 0, 3))
    assert h.coordinates(z) == ((1, -2, 0, 3), ())


@settings(max_examples=25, deadline=None)
@given(st.lists(st.integers(-2, 2), min_size=6, max_size=6), st.integers(0, 10**6))
def test_bounding_chain_exact(coeffs, seed):
    K = mesh("T2r4")
    rng = np.random.default_rng(seed)
    g = np.zeros(K.count(2), dtype=np.int64)
    g[rng.choice(K.count(2), 6, replace=False)] = coeffs
    z = boundary(K, Chain(2, g))
    assert boundary(K, find_bounding_chain(K, z)) == z


def test_not_a_boundary_and_not_a_cycle():
    K = mesh("T2r4")
    loop = torus_axis_loop(K, 4, 0)
    with pytest.raises(NotABoundary) as info:
        find_bounding_chain(K, loop)
    assert any(info.value.free)
    with pytest.raises(NotACycle):
        homology(K, 1).coordinates(K.chain([((0, 1), 1)]))


def test_cup_leibniz_and_fundamental_class():
    K = mesh("T2r4")
    rng = np.random.default_rng(1)
    a = Cochain(0, rng.integers(-3, 4, K.count(0)), True)
    b = Cochain(1, rng.integers(-3, 4, K.count(1)), True)
    lhs = coboundary(K, cup_product(K, a, b))
    rhs = cup_product(K, coboundary(K, a), b) + cup_product(K, a, coboundary(K, b))
    assert np.array_equal(lhs.values, rhs.values)
    c = cohomology(K, 1).free_reps
    X = fundamental_cycle(K)
    P = np.array([[cup_product(K, x, y)(X) for y in c] for x in c])
    assert abs(round(np.linalg.det(P))) == 1
    assert np.array_equal(P, -P.T)
    with pytest.raises(DegreeOverflow):
        cup_product(K, b, cup_product(K, b, b))


@pytest.mark.parametrize("name,p", [("T2r4", 1), ("g2", 1), ("T3r3", 1), ("T3r3", 2), ("S2", 0)])
def test_pairing_unimodular(name, p):
    K = mesh(name)
    P = pairing_matrix(K, p)
    assert P.dtype.kind == "i"
    assert abs(round(np.linalg.det(P.astype(float)))) == 1


def test_dual_bases():
    K = mesh("T3r3")
    thetas = cohomology(K, 2).free_reps
    Y = dual_homology_basis(K, 2, thetas)
    E = np.array([[t(y) for t in thetas] for y in Y])
    assert np.array_equal(E, np.eye(3, dtype=int))
    back = dual_cocycle_basis(K, 2, Y)
    E2 = np.array([[t(y) for t in back] for y in Y])
    assert np.array_equal(E2, np.eye(3, dtype=int))
    with pytest.raises(NotUnimodular):
        dual_cocycle_basis(K, 2, [y * 2 for y in Y])


def test_report_plain_data():
    rep = homology_report(generate_flat_torus(2, 3))
    assert [d["betti"] for d in rep["degrees"]] == [1, 2, 1]
    assert len(rep["degrees"][1]["free_representatives"]) == 2
