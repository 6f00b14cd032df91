import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from abelgerbe.complex import Cochain
from abelgerbe.errors import NotUnimodular, RankAmbiguous
from abelgerbe.hodge import SolverProfile, build_hodge, hodge_decompose, integral_harmonic_lattice
from abelgerbe.homology import cohomology, is_cocycle

from conftest import hodge, mesh


@pytest.mark.parametrize("name", ["S2", "T2r4", "T3r3", "g2"])
@pytest.mark.parametrize("mass", ["whitney", "lumped"])
def test_harmonic_dims_and_orthonormality(name, mass):
    K = mesh(name)
    hs = hodge(name, mass)
    for k in range(K.dim + 1):
        H = hs.harmonic_basis(k)
        assert H.shape[1] == hs.betti(k)
        assert np.allclose(H.T @ (hs.M(k) @ H), np.eye(H.shape[1]), atol=1e-10)
        if k < K.dim and H.shape[1]:
            assert np.abs(hs.d(k) @ H).max() < 1e-9
        if k > 0 and H.shape[1]:
            assert np.abs(hs.codifferential(k, H[:, 0])).max() < 1e-7


def test_lattice_has_integer_periods():
    K, hs = mesh("g2"), hodge("g2")
    thetas = integral_harmonic_lattice(hs, 1)
    cyc = hs.cocycles(1)
    # harmonic theta_i differs from the integer cocycle by an exact form
    for t, c in zip(thetas, cyc):
        diff = t.values - c.values
        assert is_cocycle(K, Cochain(1, diff))
        d = hodge_decompose(hs, Cochain(1, diff))
        assert np.abs(d.harmonic).max() < 1e-9


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10**6), st.integers(0, 2))
def test_decomposition_orthogonal(seed, k):
    K, hs = mesh("T2r4"), hodge("T2r4")
    c = np.random.default_rng(seed).normal(size=K.count(k))
    d = hodge_decompose(hs, Cochain(k, c))
    assert np.allclose(d.harmonic + d.exact + d.coexact, c, atol=1e-12)
    parts = [d.harmonic, d.exact, d.coexact]
    scale = hs.inner(k, c, c)
    for i in range(3):
        for j in range(i + 1, 3):
            assert abs(hs.inner(k, parts[i], parts[j])) <= 1e-9 * max(scale, 1.0)
    assert np.allclose(hs.project(k, d.harmonic), d.harmonic, atol=1e-12)
    assert d.residual < 1e-8


def test_codifferential_adjoint():
    K, hs = mesh("T3r3"), hodge("T3r3")
    rng = np.random.default_rng(3)
    for k in range(1, 4):
        x, y = rng.normal(size=K.count(k - 1)), rng.normal(size=K.count(k))
        lhs = hs.inner(k, hs.d(k - 1) @ x, y)
        rhs = hs.inner(k - 1, x, hs.codifferential(k, y))
        assert lhs == pytest.approx(rhs, rel=1e-10, abs=1e-12)


def test_fast_profile_agrees():
    K = mesh("g2")
    a, b = build_hodge(K), build_hodge(K, profile="fast")
    assert np.allclose(a.lattice_matrix(1), b.lattice_matrix(1), atol=1e-8)
    assert SolverProfile.named("fast").rtol > SolverProfile.named("deterministic").rtol


def test_custom_basis_checked():
    K = mesh("T2r4")
    c = cohomology(K, 1).free_reps
    with pytest.raises(NotUnimodular):
        build_hodge(K, cocycle_bases={1: [c[0] * 2, c[1]]})
    with pytest.raises(ValueError):
        build_hodge(K, cocycle_bases={1: [Cochain(1, np.ones(K.count(1), dtype=np.int64), True),
                                          c[1]]})


def test_rank_gap_enforced():
    with pytest.raises(RankAmbiguous):
        build_hodge(mesh("S2"), rank_gap=1e30)


def test_report_structure():
    rep = hodge("T2r4").report()
    assert rep["mass"] == "whitney"
    assert [d["degree"] for d in rep["degrees"]] == [0, 1, 2]
    assert all(d["eig_gap_ratio"] > 1e3 for d in rep["degrees"])
