"""Oriented simplicial complexes, integer chains and real/integer cochains.

A complex is stored as sorted vertex tuples per degree.  Geometry lives in
``cell_coords``: for every top simplex, the coordinates of its vertices in a
covering space (for identification meshes such as tori and polygon surfaces
the same vertex may carry different coordinates in different top cells).
All metric quantities are computed from ``cell_coords``.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from itertools import combinations
from math import factorial
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sp

from .errors import (
    ComplexError,
    DegreeOutOfRange,
    Disconnected,
    DuplicateSimplex,
    EmptyInput,
    NonManifold,
    NonOrientable,
)

__all__ = [
    "Chain",
    "Cochain",
    "SimplicialComplex",
    "build_complex",
    "boundary",
    "boundary_matrix",
    "coboundary",
    "coboundary_matrix",
    "fundamental_cycle",
    "permutation_sign",
    "simplex_volume",
]


def permutation_sign(seq: Sequence[int]) -> int:
    """Sign of the permutation sorting ``seq`` (entries must be distinct)."""
    seq = list(seq)
    sign = 1
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                sign = -sign
    return sign


def simplex_volume(points: np.ndarray) -> float:
    """Unsigned k-volume of the simplex spanned by the rows of ``points``."""
    points = np.asarray(points, dtype=float)
    k = points.shape[0] - 1
    if k == 0:
        return 1.0
    edges = points[1:] - points[0]
    gram = edges @ edges.T
    det = np.linalg.det(gram)
    return float(np.sqrt(max(det, 0.0)) / factorial(k))


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Chain:
    """Integer chain of a fixed degree, indexed by ``K.simplices[degree]``."""

    degree: int
    coeffs: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "coeffs", _frozen(np.asarray(self.coeffs, dtype=np.int64)))

    def __len__(self):
        return len(self.coeffs)

    def _check(self, other: "Chain"):
        if not isinstance(other, Chain) or other.degree != self.degree or len(other) != len(self):
            raise ValueError("chains of different degree or size")

    def __add__(self, other: "Chain") -> "Chain":
        self._check(other)
        return Chain(self.degree, self.coeffs + other.coeffs)

    def __sub__(self, other: "Chain") -> "Chain":
        self._check(other)
        return Chain(self.degree, self.coeffs - other.coeffs)

    def __neg__(self) -> "Chain":
        return Chain(self.degree, -self.coeffs)

    def __mul__(self, m: int) -> "Chain":
        if int(m) != m:
            raise TypeError("chains only scale by integers")
        return Chain(self.degree, self.coeffs * int(m))

    __rmul__ = __mul__

    def __eq__(self, other):
        return (
            isinstance(other, Chain)
            and other.degree == self.degree
            and np.array_equal(other.coeffs, self.coeffs)
        )

    def __hash__(self):
        return hash((self.degree, self.coeffs.tobytes()))

    def is_zero(self) -> bool:
        return not self.coeffs.any()

    def support(self) -> np.ndarray:
        return np.flatnonzero(self.coeffs)


@dataclass(frozen=True, eq=False)
class Cochain:
    """Cochain of a fixed degree; ``integral`` tags exact integer data."""

    degree: int
    values: np.ndarray
    integral: bool = False

    def __post_init__(self):
        dtype = np.int64 if self.integral else float
        object.__setattr__(self, "values", _frozen(np.asarray(self.values, dtype=dtype)))

    def __len__(self):
        return len(self.values)

    def __call__(self, chain: Chain):
        return self.evaluate(chain)

    def evaluate(self, chain: Chain):
        if chain.degree != self.degree or len(chain) != len(self):
            raise ValueError("cochain and chain do not match")
        if self.integral:
            return int(np.dot(self.values, chain.coeffs))
        return float(np.dot(self.values, chain.coeffs))

    def _combine(self, other: "Cochain", sign: int) -> "Cochain":
        if other.degree != self.degree or len(other) != len(self):
            raise ValueError("cochains of different degree or size")
        integral = self.integral and other.integral
        return Cochain(self.degree, self.values + sign * other.values, integral)

    def __add__(self, other):
        return self._combine(other, 1)

    def __sub__(self, other):
        return self._combine(other, -1)

    def __neg__(self):
        return Cochain(self.degree, -self.values, self.integral)

    def __mul__(self, s):
        integral = self.integral and int(s) == s
        return Cochain(self.degree, self.values * (int(s) if integral else s), integral)

    __rmul__ = __mul__

    def astype_float(self) -> "Cochain":
        return Cochain(self.degree, self.values.astype(float), False)


class SimplicialComplex:
    """Closed, connected, oriented pseudomanifold with PL geometry.

    Build instances with :func:`build_complex`; the constructor trusts its
    arguments.
    """

    def __init__(self, simplices, coords, cell_coords, top_orientations, periods=None):
        self.dim = len(simplices) - 1
        self.simplices: tuple[tuple[tuple[int, ...], ...], ...] = tuple(
            tuple(level) for level in simplices
        )
        self._index = tuple({s: i for i, s in enumerate(level)} for level in self.simplices)
        self.coords = _frozen(np.asarray(coords, dtype=float))
        self.cell_coords = _frozen(np.asarray(cell_coords, dtype=float))
        self.top_orientations = _frozen(np.asarray(top_orientations, dtype=np.int64))
        self.periods = None if periods is None else _frozen(np.asarray(periods, dtype=float))
        # derived data (homology, matrices) keyed by name; the complex itself never changes
        self._cache: dict = {}

    def __repr__(self):
        counts = ", ".join(str(self.count(k)) for k in range(self.dim + 1))
        return f"SimplicialComplex(dim={self.dim}, counts=({counts}))"

    @property
    def n_vertices(self) -> int:
        return len(self.simplices[0])

    def count(self, k: int) -> int:
        if not 0 <= k <= self.dim:
            return 0
        return len(self.simplices[k])

    def index(self, simplex: Iterable[int]) -> int:
        s = tuple(sorted(simplex))
        try:
            return self._index[len(s) - 1][s]
        except (IndexError, KeyError):
            raise KeyError(f"{s} is not a simplex of the complex") from None

    def euler_characteristic(self) -> int:
        return sum((-1) ** k * self.count(k) for k in range(self.dim + 1))

    # -- chains and cochains ---------------------------------------------

    def zero_chain(self, k: int) -> Chain:
        return Chain(k, np.zeros(self.count(k), dtype=np.int64))

    def zero_cochain(self, k: int, integral: bool = False) -> Cochain:
        return Cochain(k, np.zeros(self.count(k)), integral)

    def chain(self, terms, degree: int | None = None) -> Chain:
        """Chain from ``(vertex tuple, coefficient)`` pairs or a dict.

        Vertex tuples may be given in any order; the coefficient picks up the
        sign of the sorting permutation.
        """
        if isinstance(terms, dict):
            terms = terms.items()
        terms = [(tuple(s), int(c)) for s, c in terms]
        if degree is None:
            if not terms:
                raise ValueError("degree required for an empty chain")
            degree = len(terms[0][0]) - 1
        coeffs = np.zeros(self.count(degree), dtype=np.int64)
        for s, c in terms:
            if len(s) != degree + 1 or len(set(s)) != len(s):
                raise ValueError(f"bad simplex {s} for degree {degree}")
            coeffs[self.index(s)] += permutation_sign(s) * c
        return Chain(degree, coeffs)

    def edge_path(self, vertices: Sequence[int]) -> Chain:
        """1-chain traversing consecutive vertices of ``vertices``."""
        if len(vertices) < 2:
            return self.zero_chain(1)
        return self.chain([((a, b), 1) for a, b in zip(vertices[:-1], vertices[1:])], degree=1)

    def vertex_chain(self, weights: dict[int, int]) -> Chain:
        coeffs = np.zeros(self.count(0), dtype=np.int64)
        for v, c in weights.items():
            coeffs[v] += int(c)
        return Chain(0, coeffs)

    def terms(self, chain: Chain) -> list[tuple[tuple[int, ...], int]]:
        level = self.simplices[chain.degree]
        return [(level[i], int(chain.coeffs[i])) for i in chain.support()]

    # -- geometry --------------------------------------------------------

    def top_volumes(self) -> np.ndarray:
        if "top_volumes" not in self._cache:
            self._cache["top_volumes"] = _frozen(
                [simplex_volume(cell) for cell in self.cell_coords]
            )
        return self._cache["top_volumes"]

    def volume(self) -> float:
        return float(self.top_volumes().sum())

    def face_coords(self, top: int, face: Sequence[int]) -> np.ndarray:
        """Cover coordinates of ``face`` inside top simplex number ``top``."""
        tsimp = self.simplices[self.dim][top]
        return self.cell_coords[top][[tsimp.index(v) for v in face]]


def boundary_matrix(K: SimplicialComplex, k: int) -> sp.csr_matrix:
    """Integer boundary operator C_k -> C_{k-1} in the sorted-tuple basis."""
    if not 1 <= k <= K.dim:
        raise DegreeOutOfRange(f"boundary degree {k} outside 1..{K.dim}")
    key = ("boundary", k)
    if key not in K._cache:
        rows, cols, vals = [], [], []
        index = K._index[k - 1]
        for j, s in enumerate(K.simplices[k]):
            for i in range(k + 1):
                rows.append(index[s[:i] + s[i + 1:]])
                cols.append(j)
                vals.append(-1 if i % 2 else 1)
        mat = sp.csr_matrix(
            (np.array(vals, dtype=np.int64), (rows, cols)), shape=(K.count(k - 1), K.count(k))
        )
        K._cache[key] = mat
    return K._cache[key]


def coboundary_matrix(K: SimplicialComplex, k: int) -> sp.csr_matrix:
    """Coboundary C^k -> C^{k+1}; the transpose of the boundary of degree k+1."""
    if not 0 <= k <= K.dim - 1:
        raise DegreeOutOfRange(f"coboundary degree {k} outside 0..{K.dim - 1}")
    key = ("coboundary", k)
    if key not in K._cache:
        K._cache[key] = boundary_matrix(K, k + 1).T.tocsr()
    return K._cache[key]


def boundary(K: SimplicialComplex, chain: Chain) -> Chain:
    if chain.degree == 0:
        raise DegreeOutOfRange("0-chains have no boundary")
    return Chain(chain.degree - 1, boundary_matrix(K, chain.degree) @ chain.coeffs)


def coboundary(K: SimplicialComplex, cochain: Cochain) -> Cochain:
    d = coboundary_matrix(K, cochain.degree)
    return Cochain(cochain.degree + 1, d @ cochain.values, cochain.integral)


def fundamental_cycle(K: SimplicialComplex) -> Chain:
    return Chain(K.dim, K.top_orientations)


def _unwrap(points: np.ndarray, periods: np.ndarray) -> np.ndarray:
    """Shift points by period vectors to the copy nearest the first point."""
    base = points[0]
    # fractional coordinates of the displacements in the period basis
    frac = np.linalg.lstsq(periods.T, (points - base).T, rcond=None)[0].T
    return points - np.rint(frac) @ periods


def build_complex(
    top_simplices,
    coords,
    *,
    periods=None,
    cell_coords=None,
) -> SimplicialComplex:
    """Validate top simplices and enumerate the complex.

    ``periods`` (rows are translation vectors) identifies the coordinates
    modulo a lattice; each top cell is unwrapped to its nearest copy.
    ``cell_coords`` overrides per-cell geometry entirely and is given in the
    caller's vertex order for each top simplex.
    """
    tops = [tuple(int(v) for v in t) for t in top_simplices]
    if not tops:
        raise EmptyInput("no top simplices")
    n = len(tops[0]) - 1
    if n < 1:
        raise ComplexError("complex must have dimension at least 1")
    if any(len(t) != n + 1 for t in tops):
        raise ComplexError("top simplices of mixed dimension")
    coords = np.asarray(coords, dtype=float)
    if coords.ndim != 2 or coords.shape[1] < n:
        raise ComplexError(f"need vertex coordinates in R^N with N >= {n}")
    nv = coords.shape[0]
    for t in tops:
        if len(set(t)) != n + 1:
            raise ComplexError(f"degenerate simplex {t}")
        if min(t) < 0 or max(t) >= nv:
            raise ComplexError(f"vertex index out of range in {t}")

    order = [tuple(sorted(t)) for t in tops]
    if len(set(order)) != len(order):
        raise DuplicateSimplex("top simplex listed twice (possibly with another vertex order)")

    # keep caller geometry aligned with the sorted order of each cell
    if cell_coords is not None:
        cell_coords = np.asarray(cell_coords, dtype=float)
        if cell_coords.shape[:2] != (len(tops), n + 1):
            raise ComplexError("cell_coords must have shape (n_top, n+1, N)")
        perm = [np.argsort(t, kind="stable") for t in tops]
        cells = np.stack([cell_coords[i][p] for i, p in enumerate(perm)])
    else:
        cells = np.stack([coords[list(s)] for s in order])
        if periods is not None:
            periods = np.atleast_2d(np.asarray(periods, dtype=float))
            cells = np.stack([_unwrap(c, periods) for c in cells])

    # canonical order of top simplices; geometry follows
    idx = sorted(range(len(order)), key=lambda i: order[i])
    order = [order[i] for i in idx]
    cells = cells[idx]

    levels: list[set] = [set() for _ in range(n + 1)]
    for t in order:
        for k in range(n + 1):
            levels[k].update(combinations(t, k + 1))
    used = sorted(v for (v,) in levels[0])
    if used != list(range(nv)):
        raise ComplexError("every vertex must belong to some top simplex")
    simplices = [sorted(level) for level in levels]

    ridge_index = {r: i for i, r in enumerate(simplices[n - 1])}
    cofaces: list[list[tuple[int, int]]] = [[] for _ in simplices[n - 1]]
    for j, t in enumerate(order):
        for i in range(n + 1):
            cofaces[ridge_index[t[:i] + t[i + 1:]]].append((j, -1 if i % 2 else 1))
    for r, cf in zip(simplices[n - 1], cofaces):
        if len(cf) != 2:
            raise NonManifold(f"ridge {r} has {len(cf)} cofaces (need exactly 2)")

    adjacency: list[list[tuple[int, int, int]]] = [[] for _ in order]
    for (a, sa), (b, sb) in cofaces:
        # orientations o must satisfy o_a*sa + o_b*sb = 0
        adjacency[a].append((b, sa, sb))
        adjacency[b].append((a, sb, sa))
    orient = np.zeros(len(order), dtype=np.int64)
    orient[0] = 1
    queue = deque([0])
    while queue:
        a = queue.popleft()
        for b, sa, sb in adjacency[a]:
            want = -orient[a] * sa * sb
            if orient[b] == 0:
                orient[b] = want
                queue.append(b)
            elif orient[b] != want:
                raise NonOrientable("no consistent orientation of the top simplices")
    if (orient == 0).any():
        raise Disconnected("complex is not connected through ridges")

    for c, s in zip(cells, order):
        if simplex_volume(c) <= 1e-14 * max(1.0, np.abs(c).max()) ** n:
            raise ComplexError(f"top simplex {s} has degenerate geometry")

    return SimplicialComplex(simplices, coords, cells, orient, periods)
