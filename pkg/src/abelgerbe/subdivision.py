"""Barycentric subdivision with the subdivision chain map."""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import permutations

import numpy as np
import scipy.sparse as sp

from .complex import (
    Chain,
    Cochain,
    SimplicialComplex,
    build_complex,
    fundamental_cycle,
    permutation_sign,
)

__all__ = ["Subdivision", "barycentric_subdivide", "transfer_cocycles"]


@dataclass(frozen=True)
class Subdivision:
    """Result of one barycentric subdivision K -> K'.

    ``chain_matrices[k]`` maps k-chains of K to k-chains of K' and commutes
    with the boundary.  ``cochain_pullback`` is its transpose: a K'-cochain
    evaluated on the image of a K-chain.
    """

    original: SimplicialComplex
    complex: SimplicialComplex
    chain_matrices: dict = field(repr=False)
    barycenter: dict = field(repr=False)

    def chain_map(self, chain: Chain) -> Chain:
        return Chain(chain.degree, self.chain_matrices[chain.degree] @ chain.coeffs)

    def cochain_pullback(self, cochain: Cochain) -> Cochain:
        mat = self.chain_matrices[cochain.degree]
        return Cochain(cochain.degree, mat.T @ cochain.values, cochain.integral)


def barycentric_subdivide(K: SimplicialComplex) -> Subdivision:
    n = K.dim
    bary: dict[tuple[int, ...], int] = {}
    for level in K.simplices:
        for s in level:
            bary[s] = len(bary)

    coords = np.zeros((len(bary), K.cell_coords.shape[2]))
    seen = np.zeros(len(bary), dtype=bool)
    tops, cells = [], []
    for tsimp, cell in zip(K.simplices[n], K.cell_coords):
        pos = {v: cell[i] for i, v in enumerate(tsimp)}
        for perm in permutations(tsimp):
            flag = [tuple(sorted(perm[: i + 1])) for i in range(n + 1)]
            verts = [bary[f] for f in flag]
            pts = np.array([np.mean([pos[v] for v in f], axis=0) for f in flag])
            tops.append(verts)
            cells.append(pts)
            for v, p in zip(verts, pts):
                if not seen[v]:
                    coords[v] = p
                    seen[v] = True

    Kp = build_complex(tops, coords, cell_coords=np.array(cells), periods=K.periods)

    # subdivision operator sd(s) = b_s * sd(boundary s), as ordered tuples
    memo: dict[tuple[int, ...], dict[tuple[int, ...], int]] = {}

    def sd(s: tuple[int, ...]) -> dict[tuple[int, ...], int]:
        if s in memo:
            return memo[s]
        if len(s) == 1:
            out = {(bary[s],): 1}
        else:
            out: dict[tuple[int, ...], int] = {}
            for i in range(len(s)):
                sign = -1 if i % 2 else 1
                for tup, c in sd(s[:i] + s[i + 1:]).items():
                    key = (bary[s],) + tup
                    out[key] = out.get(key, 0) + sign * c
            out = {k: v for k, v in out.items() if v}
        memo[s] = out
        return out

    mats = {}
    for k in range(n + 1):
        rows, cols, vals = [], [], []
        for j, s in enumerate(K.simplices[k]):
            for tup, c in sd(s).items():
                rows.append(Kp.index(tup))
                cols.append(j)
                vals.append(permutation_sign(tup) * c)
        mats[k] = sp.csr_matrix(
            (np.array(vals, dtype=np.int64), (rows, cols)), shape=(Kp.count(k), K.count(k))
        )

    # orient K' compatibly with K
    image = mats[n] @ fundamental_cycle(K).coeffs
    if np.array_equal(image, -Kp.top_orientations):
        Kp = SimplicialComplex(Kp.simplices, Kp.coords, Kp.cell_coords,
                               -Kp.top_orientations, Kp.periods)
    return Subdivision(K, Kp, mats, bary)


def transfer_cocycles(sub: Subdivision, k: int, cocycles) -> list[Cochain]:
    """Integer k-cocycles on the subdivision dual to the images of the
    homology basis dual to ``cocycles`` on the original complex.

    Lattices built from the returned cocycles measure the same homology
    classes as the originals, so Jacobi coordinates are comparable.
    """
    from .homology import dual_cocycle_basis, dual_homology_basis

    Y = dual_homology_basis(sub.original, k, cocycles)
    return dual_cocycle_basis(sub.complex, k, [sub.chain_map(y) for y in Y])
