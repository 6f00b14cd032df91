"""Smith normal form over the integers with unimodular transforms.

Arithmetic runs in int64 while every entry stays below 2**31 (so no product
or sum of two entries can wrap) and switches to Python integers otherwise.
The result is exact either way.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .errors import OverflowPolicyError

__all__ = [
    "SmithDecomposition",
    "smith_normal_form",
    "is_smith_normal_form",
    "integer_inverse",
    "int_matmul",
]

_SAFE = 2**31


@dataclass(frozen=True)
class SmithDecomposition:
    """``U @ A @ V == D`` with ``U``, ``V`` unimodular.

    Transforms that were not requested are ``None``.  ``Uinv``/``Vinv`` are
    the exact inverses, maintained alongside.
    """

    D: np.ndarray
    U: np.ndarray | None
    V: np.ndarray | None
    Uinv: np.ndarray | None
    Vinv: np.ndarray | None

    @property
    def rank(self) -> int:
        k = min(self.D.shape)
        diag = [self.D[i, i] for i in range(k)]
        return sum(1 for x in diag if x != 0)

    @property
    def divisors(self) -> list[int]:
        """Nonzero elementary divisors d1 | d2 | ... (all positive)."""
        return [int(self.D[i, i]) for i in range(self.rank)]


def _as_dense(A) -> np.ndarray:
    if sp.issparse(A):
        A = A.toarray()
    A = np.asarray(A)
    if A.ndim != 2:
        raise ValueError("matrix expected")
    if A.dtype == object:
        return A.copy()
    if not np.issubdtype(A.dtype, np.integer):
        if not np.all(np.mod(A, 1) == 0):
            raise ValueError("integer matrix expected")
    return np.array(A, dtype=np.int64)


class _Work:
    """Matrix plus the requested transforms, sharing one dtype."""

    def __init__(self, A, want, max_bits):
        m, n = A.shape
        self.max_bits = max_bits
        self.D = A
        self.U = np.eye(m, dtype=np.int64) if "U" in want else None
        self.Uinv = np.eye(m, dtype=np.int64) if "Uinv" in want else None
        self.V = np.eye(n, dtype=np.int64) if "V" in want else None
        self.Vinv = np.eye(n, dtype=np.int64) if "Vinv" in want else None
        self.exact = A.dtype == object
        if not self.exact and A.size and np.abs(A).max() >= _SAFE:
            self._promote()

    def _promote(self):
        for name in ("D", "U", "Uinv", "V", "Vinv"):
            a = getattr(self, name)
            if a is not None and a.dtype != object:
                b = np.empty(a.shape, dtype=object)
                b[...] = [[int(x) for x in row] for row in a.tolist()] if a.size else a
                setattr(self, name, b)
        self.exact = True

    def guard(self, *blocks):
        for b in blocks:
            if b.size == 0:
                continue
            big = np.abs(b).max()
            if self.max_bits is not None and int(big).bit_length() > self.max_bits:
                raise OverflowPolicyError(
                    f"entry of {int(big).bit_length()} bits exceeds cap of {self.max_bits}"
                )
            if not self.exact and big >= _SAFE:
                self._promote()
                return

    # elementary operations, mirrored on the transforms

    def swap_rows(self, i, j):
        if i == j:
            return
        for a in (self.D, self.U):
            if a is not None:
                a[[i, j]] = a[[j, i]]
        if self.Uinv is not None:
            self.Uinv[:, [i, j]] = self.Uinv[:, [j, i]]

    def swap_cols(self, i, j):
        if i == j:
            return
        for a in (self.D, self.V):
            if a is not None:
                a[:, [i, j]] = a[:, [j, i]]
        if self.Vinv is not None:
            self.Vinv[[i, j]] = self.Vinv[[j, i]]

    def _pre(self, q):
        # entries are < 2**31, so each product is < 2**31 * |q|; a sum of
        # len(q) of them must stay clear of 2**63
        if not self.exact and int(np.abs(q).max()) * len(q) >= _SAFE:
            self._promote()
            q = np.array([int(x) for x in q], dtype=object)
        return q

    def row_eliminate(self, t, rows, q):
        """row_r -= q_r * row_t for every r in ``rows``."""
        q = self._pre(q)
        self.D[rows] -= np.outer(q, self.D[t])
        touched = [self.D[rows]]
        if self.U is not None:
            self.U[rows] -= np.outer(q, self.U[t])
            touched.append(self.U[rows])
        if self.Uinv is not None:
            self.Uinv[:, t] += self.Uinv[:, rows] @ q
            touched.append(self.Uinv[:, t])
        self.guard(*touched)

    def col_eliminate(self, t, cols, q):
        """col_c -= q_c * col_t for every c in ``cols``."""
        q = self._pre(q)
        self.D[:, cols] -= np.outer(self.D[:, t], q)
        touched = [self.D[:, cols]]
        if self.V is not None:
            self.V[:, cols] -= np.outer(self.V[:, t], q)
            touched.append(self.V[:, cols])
        if self.Vinv is not None:
            self.Vinv[t] += q @ self.Vinv[cols]
            touched.append(self.Vinv[t])
        self.guard(*touched)

    def add_row(self, t, i):
        """row_t += row_i."""
        self.D[t] += self.D[i]
        touched = [self.D[t]]
        if self.U is not None:
            self.U[t] += self.U[i]
            touched.append(self.U[t])
        if self.Uinv is not None:
            self.Uinv[:, i] -= self.Uinv[:, t]
            touched.append(self.Uinv[:, i])
        self.guard(*touched)

    def negate_row(self, t):
        self.D[t] *= -1
        if self.U is not None:
            self.U[t] *= -1
        if self.Uinv is not None:
            self.Uinv[:, t] *= -1


def _smallest(values: np.ndarray) -> int | None:
    """Index of the smallest-magnitude nonzero entry (lowest index on ties)."""
    nz = np.flatnonzero(values)
    if nz.size == 0:
        return None
    mags = np.abs(values[nz])
    return int(nz[np.argmin(mags)])


def smith_normal_form(A, *, transforms=("U", "V", "Uinv", "Vinv"),
                      max_bits: int | None = None) -> SmithDecomposition:
    """Smith normal form of an integer matrix (dense, sparse or nested lists).

    Pivot rule: the smallest-magnitude nonzero entry of the remaining block,
    ties broken by lowest row-major index.  ``max_bits`` caps coefficient
    growth; exceeding it raises :class:`OverflowPolicyError`.
    """
    D0 = _as_dense(A)
    w = _Work(D0, set(transforms), max_bits)
    m, n = D0.shape
    for t in range(min(m, n)):
        block = w.D[t:, t:]
        flat = _smallest(block.ravel())
        if flat is None:
            break
        i, j = divmod(flat, n - t)
        w.swap_rows(t, t + i)
        w.swap_cols(t, t + j)
        while True:
            p = w.D[t, t]
            col = w.D[t + 1:, t]
            rows = np.flatnonzero(col)
            if rows.size:
                q = col[rows] // p
                w.row_eliminate(t, rows + t + 1, q)
                rem = _smallest(w.D[t + 1:, t])
                if rem is not None:
                    w.swap_rows(t, t + 1 + rem)
                    continue
            row = w.D[t, t + 1:]
            cols = np.flatnonzero(row)
            if cols.size:
                q = row[cols] // p
                w.col_eliminate(t, cols + t + 1, q)
                rem = _smallest(w.D[t, t + 1:])
                if rem is not None:
                    w.swap_cols(t, t + 1 + rem)
                    continue
            if abs(p) != 1:
                rest = w.D[t + 1:, t + 1:]
                bad = np.argwhere(rest % p != 0)
                if len(bad):
                    w.add_row(t, t + 1 + int(bad[0][0]))
                    continue
            break
        if w.D[t, t] < 0:
            w.negate_row(t)
    return SmithDecomposition(w.D, w.U, w.V, w.Uinv, w.Vinv)


def is_smith_normal_form(D) -> bool:
    D = np.asarray(D)
    m, n = D.shape
    off = D.copy()
    k = min(m, n)
    diag = [int(D[i, i]) for i in range(k)]
    for i in range(k):
        off[i, i] = 0
    if np.any(off != 0):
        return False
    seen_zero = False
    for i, x in enumerate(diag):
        if x < 0:
            return False
        if x == 0:
            seen_zero = True
        elif seen_zero:
            return False
        if i and x and diag[i - 1] and x % diag[i - 1]:
            return False
    return True


def integer_inverse(A) -> np.ndarray:
    """Exact inverse of a unimodular integer matrix (raises if not unimodular)."""
    A = _as_dense(A)
    if A.shape[0] != A.shape[1]:
        raise ValueError("square matrix expected")
    if A.shape[0] == 0:
        return np.zeros((0, 0), dtype=np.int64)
    s = smith_normal_form(A)
    if s.rank != A.shape[0] or any(d != 1 for d in s.divisors):
        raise ValueError("matrix is not unimodular")
    # U A V = I  =>  A^{-1} = V U
    return int_matmul(s.V, s.U)


def int_matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    if a.dtype == object or b.dtype == object:
        return np.asarray(a, dtype=object) @ np.asarray(b, dtype=object)
    out = a @ b
    # verify no wraparound with a float magnitude bound
    bound = np.abs(a.astype(float)) @ np.abs(b.astype(float))
    if bound.size and bound.max() >= 2**62:
        return np.asarray(a, dtype=object) @ np.asarray(b, dtype=object)
    return out
