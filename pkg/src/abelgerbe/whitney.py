"""Mass matrices: Gram matrices of Whitney forms under the PL metric.

For a k-face ``s`` of a top simplex the Whitney form is

    W_s = k! * sum_j (-1)^j lam_{s_j} dlam_{s_0} ^ .. (omit j) .. ^ dlam_{s_k}

and the pointwise inner product of two wedges of barycentric differentials
is the determinant of the corresponding block of the gradient Gram matrix.
Products of barycentric coordinates integrate in closed form.
"""
from __future__ import annotations

from itertools import combinations
from math import comb, factorial

import numpy as np
import scipy.sparse as sp

from .complex import SimplicialComplex, simplex_volume
from .errors import DegreeOutOfRange

__all__ = ["barycentric_gradients", "whitney_mass", "lumped_mass", "mass_matrix"]


def barycentric_gradients(cells: np.ndarray) -> np.ndarray:
    """Gradients of the barycentric coordinates, shape (T, n+1, N).

    ``cells`` has shape (T, n+1, N); the gradients live in the affine hull
    of each cell.
    """
    edges = cells[:, 1:, :] - cells[:, :1, :]
    pinv = np.linalg.pinv(edges)  # (T, N, n)
    rest = np.transpose(pinv, (0, 2, 1))
    first = -rest.sum(axis=1, keepdims=True)
    return np.concatenate([first, rest], axis=1)


def _local_terms(n: int, k: int):
    """For each pair of local k-faces, the (j, l, sign) expansion terms."""
    faces = list(combinations(range(n + 1), k + 1))
    terms = []
    for a, s in enumerate(faces):
        for b, t in enumerate(faces):
            for j in range(k + 1):
                for l in range(k + 1):
                    rs = s[:j] + s[j + 1:]
                    cs = t[:l] + t[l + 1:]
                    terms.append((a, b, s[j], t[l], rs, cs, (-1) ** (j + l)))
    return faces, terms


def whitney_mass(K: SimplicialComplex, k: int) -> sp.csr_matrix:
    """Whitney-form mass matrix in degree ``k`` (sparse, symmetric)."""
    n = K.dim
    if not 0 <= k <= n:
        raise DegreeOutOfRange(f"mass degree {k} outside 0..{n}")
    cells = K.cell_coords
    T = cells.shape[0]
    vols = K.top_volumes()
    grads = barycentric_gradients(cells)
    gram = np.einsum("tai,tbi->tab", grads, grads)
    faces, terms = _local_terms(n, k)
    nf = len(faces)
    local = np.zeros((T, nf, nf))
    scale = factorial(k) ** 2
    lam = vols / ((n + 1) * (n + 2))
    for a, b, p, q, rs, cs, sign in terms:
        integral = lam * (2.0 if p == q else 1.0)
        if k == 0:
            det = 1.0
        else:
            det = np.linalg.det(gram[:, list(rs)][:, :, list(cs)])
        local[:, a, b] += sign * scale * integral * det

    index = K._index[k]
    glob = np.array(
        [[index[tuple(top[i] for i in f)] for f in faces] for top in K.simplices[n]],
        dtype=np.int64,
    )
    rows = np.repeat(glob, nf, axis=1).ravel()
    cols = np.tile(glob, (1, nf)).ravel()
    M = sp.coo_matrix((local.ravel(), (rows, cols)), shape=(K.count(k), K.count(k))).tocsr()
    M.sum_duplicates()
    return ((M + M.T) * 0.5).tocsr()


def lumped_mass(K: SimplicialComplex, k: int) -> sp.csr_matrix:
    """Diagonal mass: each top cell shares its volume equally among its
    k-faces, divided by the squared k-volume of the face.

    Agrees with the Whitney mass in degree n and with row-sum lumping in
    degree 0.
    """
    n = K.dim
    if not 0 <= k <= n:
        raise DegreeOutOfRange(f"mass degree {k} outside 0..{n}")
    share = K.top_volumes() / comb(n + 1, k + 1)
    diag = np.zeros(K.count(k))
    size = np.zeros(K.count(k))
    index = K._index[k]
    for top, cell, w in zip(K.simplices[n], K.cell_coords, share):
        for f in combinations(range(n + 1), k + 1):
            i = index[tuple(top[v] for v in f)]
            diag[i] += w
            if size[i] == 0.0:
                size[i] = simplex_volume(cell[list(f)]) if k else 1.0
    return sp.diags(diag / size**2).tocsr()


def mass_matrix(K: SimplicialComplex, k: int, variant: str = "whitney") -> sp.csr_matrix:
    key = ("mass", variant, k)
    if key not in K._cache:
        if variant == "whitney":
            K._cache[key] = whitney_mass(K, k)
        elif variant == "lumped":
            K._cache[key] = lumped_mass(K, k)
        else:
            raise ValueError(f"unknown mass variant {variant!r}")
    return K._cache[key]
