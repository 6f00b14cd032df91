"""Shared fixture meshes, Hodge structures and random chain helpers."""
from __future__ import annotations

from functools import lru_cache

import numpy as np
import pytest

from abelgerbe.complex import Chain, boundary
from abelgerbe.generators import (
    axis_cocycle_basis,
    generate_flat_torus,
    generate_genus_surface,
    generate_sphere,
)
from abelgerbe.hodge import build_hodge
from abelgerbe.homology import homology

FIXTURES = {
    "S2": lambda: generate_sphere(2),
    "T2r4": lambda: generate_flat_torus(2, 4),
    "T2r8": lambda: generate_flat_torus(2, 8),
    "T3r3": lambda: generate_flat_torus(3, 3),
    "g2": lambda: generate_genus_surface(2, 0),
}

KNOWN_BETTI = {
    "S2": (1, 0, 1),
    "T2r4": (1, 2, 1),
    "T2r8": (1, 2, 1),
    "T3r3": (1, 3, 3, 1),
    "g2": (1, 4, 1),
}


@lru_cache(maxsize=None)
def mesh(name: str):
    return FIXTURES[name]()


@lru_cache(maxsize=None)
def hodge(name: str, mass: str = "whitney"):
    K = mesh(name)
    bases = {1: axis_cocycle_basis(K)} if K.periods is not None else None
    return build_hodge(K, mass=mass, cocycle_bases=bases)


def random_chain(K, k: int, rng, max_terms: int = 4) -> Chain:
    m = K.count(k)
    t = int(rng.integers(1, min(max_terms, m) + 1))
    coeffs = np.zeros(m, dtype=np.int64)
    idx = rng.choice(m, size=t, replace=False)
    coeffs[idx] = rng.choice([-2, -1, 1, 2], size=t)
    return Chain(k, coeffs)


def random_cycle(K, k: int, rng) -> Chain:
    """Random homology combination plus a random boundary."""
    h = homology(K, k)
    z = Chain(k, np.zeros(K.count(k), dtype=np.int64))
    for rep in h.free_reps:
        z = z + rep * int(rng.integers(-2, 3))
    if k < K.dim:
        z = z + boundary(K, random_chain(K, k + 1, rng))
    if z.is_zero():
        z = h.free_reps[0] if h.free_reps else boundary(K, random_chain(K, k + 1, rng))
    return z


def random_boundary(K, d: int, rng) -> tuple[Chain, Chain]:
    """A nonzero d-boundary Z and a chain bounding it."""
    while True:
        G = random_chain(K, d + 1, rng)
        Z = boundary(K, G)
        if not Z.is_zero():
            return Z, G


def circle_dist(a, b) -> float:
    diff = np.mod(np.asarray(a, dtype=float) - np.asarray(b, dtype=float), 1.0)
    return float(np.minimum(diff, 1.0 - diff).max()) if diff.size else 0.0


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def record(number: int, ok: bool, detail: str) -> None:
    ACCEPTANCE[number] = (bool(ok), detail)
    print(f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[number]
        terminalreporter.write_line(f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
