import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from abelgerbe.generators import generate_rp3
from abelgerbe.hodge import build_hodge
from abelgerbe.homology import homology, pairing_matrix
from abelgerbe.moduli import (
    TorusPoint,
    jacobi_point,
    jacobi_scan,
    jacobi_to_picard,
    moduli_add,
    moduli_class,
    moduli_eq,
    moduli_neg,
    moduli_table,
    moduli_zero,
    period_matrix_check,
    picard_lattice_image,
    picard_to_jacobi,
)

from conftest import hodge, mesh, random_chain, random_cycle

coords = st.lists(st.floats(-5, 5, allow_nan=False), min_size=3, max_size=3)


@given(coords, coords)
def test_torus_point_group(a, b):
    p, q = TorusPoint(np.array(a), "jacobi", 1), TorusPoint(np.array(b), "jacobi", 1)
    assert np.all((p.coords >= 0) & (p.coords < 1))
    assert (p + q - q).distance(p) < 1e-9
    assert (p + -p).is_zero(1e-9)
    assert p.distance(q) == pytest.approx(q.distance(p))


def test_torus_point_mismatch():
    with pytest.raises(ValueError):
        TorusPoint(np.zeros(2), "jacobi", 1) + TorusPoint(np.zeros(2), "picard", 1)


@pytest.mark.parametrize("name,d", [("T2r4", 0), ("g2", 0), ("T3r3", 1), ("T3r3", 0)])
def test_moduli_group_laws(name, d):
    K, hs = mesh(name), hodge(name)
    T = moduli_table(K, hs, d)
    rng = np.random.default_rng(17)
    for _ in range(4):
        Z1, Z2, Z3 = (random_cycle(K, d, rng) for _ in range(3))
        x, y, z = (moduli_class(T, Z) for Z in (Z1, Z2, Z3))
        # the class map is a homomorphism
        assert moduli_eq(moduli_class(T, Z1 + Z2), moduli_add(T, x, y), 1e-9)
        assert moduli_eq(moduli_add(T, moduli_add(T, x, y), z),
                         moduli_add(T, x, moduli_add(T, y, z)), 1e-9)
        assert moduli_eq(moduli_add(T, x, moduli_zero(T)), x, 1e-9)
        assert moduli_eq(moduli_add(T, x, moduli_neg(T, x)), moduli_zero(T), 1e-9)
        assert moduli_eq(moduli_class(T, -Z1), moduli_neg(T, x), 1e-9)


def test_moduli_with_torsion():
    K = generate_rp3()
    hs = build_hodge(K)
    T = moduli_table(K, hs, 1)
    z, _ = homology(K, 1).torsion_reps[0]
    x = moduli_class(T, z)
    assert x.torsion == (1,)
    assert moduli_eq(moduli_add(T, x, x), moduli_zero(T))


@pytest.mark.parametrize("name,e", [("T2r4", 1), ("g2", 1), ("g2", 2), ("T3r3", 2)])
def test_picard_round_trip(name, e):
    K, hs = mesh(name), hodge(name)
    rng = np.random.default_rng(e)
    for _ in range(5):
        J = jacobi_point(K, hs, random_chain(K, e, rng))
        P = jacobi_to_picard(K, hs, J)
        assert P.kind == "picard" and P.degree == K.dim - e
        alpha = hs.lattice_matrix(K.dim - e) @ P.coords
        back = picard_to_jacobi(K, hs, alpha, degree=e)
        assert back.distance(J) < 1e-9


def test_picard_lattice_image_is_pairing():
    K, hs = mesh("T3r3"), hodge("T3r3")
    img = picard_lattice_image(K, hs, 2)
    P = pairing_matrix(K, 1, hs.cocycles(1), hs.cocycles(2))
    assert np.allclose(img, P, atol=1e-10)


def test_period_matrix_identity():
    K, hs = mesh("g2"), hodge("g2")
    chk = period_matrix_check(K, hs, 1)
    assert chk["ok"] and chk["matrix"].shape == (4, 4)


def test_scan_report():
    K, hs = mesh("T2r8"), hodge("T2r8")
    a = jacobi_scan(K, hs, 0, 3000, seed=3)
    b = jacobi_scan(K, hs, 0, 3000, seed=3)
    assert a["covering_radius"] == b["covering_radius"]
    # the image is the grid (Z/8)^2: radius of the half-cell probes
    assert a["closure_size"] == 64
    assert a["closure_covering_radius"] == pytest.approx(1 / 16 - 1 / 128, abs=1e-9)
    assert sum(a["histograms"][0]) == 3000
    empty = jacobi_scan(mesh("S2"), hodge("S2"), 0, 100)
    assert empty["dimension"] == 0 and empty["samples"] == 0
