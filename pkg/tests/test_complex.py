import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from abelgerbe.complex import (
    Chain,
    Cochain,
    boundary,
    boundary_matrix,
    build_complex,
    coboundary,
    coboundary_matrix,
    fundamental_cycle,
)
from abelgerbe.errors import (
    DuplicateSimplex,
    Disconnected,
    EmptyInput,
    NonManifold,
    NonOrientable,
    ResolutionTooSmall,
)
from abelgerbe.generators import (
    generate_flat_torus,
    generate_genus_surface,
    generate_rp3,
    generate_sphere,
    torus_axis_loop,
    winding_numbers,
)
from abelgerbe.meshio import chain_from_dict, chain_to_dict, mesh_from_dict, mesh_to_dict

TETRA = [(0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3)]
TETRA_XYZ = np.array([[0, 0, 0], [1, 0, 0], [0, 1, 0], [0, 0, 1]], dtype=float)
RP2 = [(1, 2, 3), (1, 3, 4), (1, 4, 5), (1, 5, 6), (1, 2, 6),
       (2, 3, 5), (2, 4, 5), (2, 4, 6), (3, 4, 6), (3, 5, 6)]


def test_counts_and_euler():
    for K, chi in [(generate_sphere(2), 2), (generate_flat_torus(2, 4), 0),
                   (generate_flat_torus(3, 3), 0), (generate_genus_surface(2, 0), -2),
                   (generate_rp3(), 0), (generate_sphere(3), 0)]:
        assert K.euler_characteristic() == chi


def test_torus_counts():
    K = generate_flat_torus(2, 4)
    assert [K.count(k) for k in range(3)] == [16, 48, 32]
    assert K.volume() == pytest.approx(1.0, abs=1e-14)


def test_fundamental_cycle_is_closed():
    for K in (generate_sphere(2), generate_flat_torus(3, 3), generate_rp3()):
        X = fundamental_cycle(K)
        assert boundary(K, X).is_zero()
        assert np.all(np.abs(X.coeffs) == 1)


def test_boundary_squared_zero_and_adjoint():
    K = generate_genus_surface(2, 0)
    assert (boundary_matrix(K, 1) @ boundary_matrix(K, 2)).nnz == 0 or \
        not (boundary_matrix(K, 1) @ boundary_matrix(K, 2)).toarray().any()
    assert (abs(coboundary_matrix(K, 1) - boundary_matrix(K, 2).T)).max() == 0


@settings(max_examples=30, deadline=None)
@given(st.lists(st.integers(-3, 3), min_size=48, max_size=48),
       st.lists(st.integers(-3, 3), min_size=48, max_size=48))
def test_stokes_pairing(c, v):
    """<d f, c> == <f, boundary c> for integer cochains and chains."""
    K = generate_flat_torus(2, 4)
    chain = Chain(2, np.array(c[:32], dtype=np.int64))
    f = Cochain(1, np.array(v, dtype=np.int64), True)
    assert coboundary(K, f)(chain) == f(boundary(K, chain))


def test_chain_arithmetic():
    a = Chain(1, np.array([1, 0, -2]))
    b = Chain(1, np.array([0, 3, 2]))
    assert (a + b) == Chain(1, np.array([1, 3, 0]))
    assert (a - a).is_zero()
    assert (-a * 2) == Chain(1, np.array([-2, 0, 4]))
    assert list(a.support()) == [0, 2]
    with pytest.raises(ValueError):
        a + Chain(2, np.array([1, 0, 0]))


def test_orientation_of_chain_terms():
    K = generate_sphere(2)
    z = K.chain([((1, 0), 1)])
    assert z == K.chain([((0, 1), -1)])


def test_validation_errors():
    with pytest.raises(EmptyInput):
        build_complex([], TETRA_XYZ)
    with pytest.raises(DuplicateSimplex):
        build_complex(TETRA + [(2, 1, 0)], TETRA_XYZ)
    with pytest.raises(NonManifold):
        build_complex(TETRA + [(0, 1, 4)], np.vstack([TETRA_XYZ, [[1, 1, 1]]]))
    xyz = np.random.default_rng(0).normal(size=(7, 3))
    with pytest.raises(NonOrientable):
        build_complex([tuple(v - 1 for v in t) for t in RP2], xyz[:6])
    two = TETRA + [tuple(v + 4 for v in t) for t in TETRA]
    with pytest.raises(Disconnected):
        build_complex(two, np.vstack([TETRA_XYZ, TETRA_XYZ + 5]))
    with pytest.raises(ResolutionTooSmall):
        generate_flat_torus(2, 2)


def test_mesh_round_trip():
    K = generate_flat_torus(2, 3)
    L = mesh_from_dict(mesh_to_dict(K))
    assert [L.count(k) for k in range(3)] == [K.count(k) for k in range(3)]
    assert np.array_equal(L.top_orientations, K.top_orientations)
    assert np.allclose(L.cell_coords, K.cell_coords)
    z = torus_axis_loop(K, 3, 0)
    assert chain_from_dict(L, chain_to_dict(K, z)) == z


def test_winding_numbers():
    K = generate_flat_torus(2, 5)
    assert list(winding_numbers(K, torus_axis_loop(K, 5, 0))) == [1, 0]
    assert list(winding_numbers(K, torus_axis_loop(K, 5, 1, offset=(2, 3)))) == [0, 1]
