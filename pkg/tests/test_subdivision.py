import numpy as np
import pytest

from abelgerbe.complex import boundary_matrix, fundamental_cycle
from abelgerbe.generators import generate_flat_torus, generate_sphere
from abelgerbe.homology import homology
from abelgerbe.subdivision import barycentric_subdivide

from conftest import mesh


@pytest.mark.parametrize("make", [lambda: generate_sphere(2), lambda: generate_flat_torus(2, 3),
                                  lambda: mesh("g2")])
def test_chain_map_and_invariants(make):
    K = make()
    sub = barycentric_subdivide(K)
    Kp = sub.complex
    n = K.dim
    assert Kp.count(n) == K.count(n) * 6
    assert Kp.euler_characteristic() == K.euler_characteristic()
    assert Kp.volume() == pytest.approx(K.volume(), rel=1e-12)
    for k in range(1, n + 1):
        lhs = boundary_matrix(Kp, k) @ sub.chain_matrices[k]
        rhs = sub.chain_matrices[k - 1] @ boundary_matrix(K, k)
        assert abs(lhs - rhs).max() == 0
    assert sub.chain_map(fundamental_cycle(K)) == fundamental_cycle(Kp)
    for k in range(n + 1):
        assert homology(Kp, k).betti == homology(K, k).betti


def test_cochain_pullback_is_transpose():
    K = generate_flat_torus(2, 3)
    sub = barycentric_subdivide(K)
    rep = homology(K, 1).free_reps[0]
    from abelgerbe.homology import cohomology
    phi = cohomology(sub.complex, 1).free_reps[0]
    assert sub.cochain_pullback(phi)(rep) == phi(sub.chain_map(rep))
    assert np.array_equal(sub.complex.periods, K.periods)
