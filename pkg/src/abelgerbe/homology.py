"""Integer homology and cohomology with torsion, cup products and duality.

Both groups come out of the same two-step reduction.  For a chain complex
``C_{k+1} -A-> C_k -B-> C_{k-1}`` the Smith form of ``B`` gives an integer
basis of ``ker B``; writing the image of ``A`` in that basis and reducing
again presents ``H_k = ker B / im A`` as ``Z^b + sum Z/d_i`` together with
representatives and a coordinate map.  Cohomology runs the same reduction on
the transposed complex.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .complex import Chain, Cochain, SimplicialComplex, boundary_matrix, fundamental_cycle
from .errors import (
    DegreeOutOfRange,
    DegreeOverflow,
    NotABoundary,
    NotACycle,
    NotUnimodular,
    OverflowPolicyError,
    SingularPairing,
)
from .snf import int_matmul, smith_normal_form

__all__ = [
    "HomologyData",
    "CohomologyData",
    "homology",
    "cohomology",
    "cup_product",
    "pairing_matrix",
    "dual_homology_basis",
    "dual_cocycle_basis",
    "find_bounding_chain",
    "homology_report",
    "is_cocycle",
]


def _to_int64(a: np.ndarray) -> np.ndarray:
    if a.dtype != object:
        return a.astype(np.int64)
    if a.size and max(abs(int(x)) for x in a.ravel()) >= 2**63:
        raise OverflowPolicyError("representative coefficients exceed 64 bits")
    return a.astype(np.int64)


@dataclass(frozen=True)
class _Quotient:
    """``ker(out) / im(inc)`` in the coordinates of a Smith reduction.

    ``kernel`` columns form a basis of ker(out); ``kernel_coords`` maps a
    kernel element back to its coefficients.  ``U @ inc_in_kernel @ V`` is
    diagonal with ``divisors`` as its nonzero entries.
    """

    kernel: np.ndarray
    kernel_coords: np.ndarray
    U: np.ndarray
    Uinv: np.ndarray
    V: np.ndarray
    divisors: tuple[int, ...]
    n_in: int

    @property
    def rank(self) -> int:
        return len(self.divisors)

    @property
    def betti(self) -> int:
        return self.kernel.shape[1] - self.rank

    def reduced(self, x: np.ndarray) -> np.ndarray:
        """Coordinates of a kernel element in the Smith basis of the quotient."""
        return int_matmul(self.U, int_matmul(self.kernel_coords, x.reshape(-1, 1))).ravel()

    def representative(self, j: int) -> np.ndarray:
        return _to_int64(int_matmul(self.kernel, self.Uinv[:, j:j + 1]).ravel())


def _quotient(out_mat, in_mat, n_cells: int) -> _Quotient:
    if out_mat is None:
        kernel = np.eye(n_cells, dtype=np.int64)
        coords = kernel
    else:
        s = smith_normal_form(out_mat.toarray(), transforms=("V", "Vinv"))
        r = s.rank
        kernel, coords = s.V[:, r:], s.Vinv[r:, :]
    m = kernel.shape[1]
    if in_mat is None:
        A = np.zeros((m, 0), dtype=np.int64)
    else:
        A = int_matmul(coords, in_mat.toarray())
    sA = smith_normal_form(A, transforms=("U", "Uinv", "V"))
    return _Quotient(kernel, coords, sA.U, sA.Uinv, sA.V, tuple(sA.divisors), A.shape[1])


def _boundary_or_none(K, k):
    return boundary_matrix(K, k) if 1 <= k <= K.dim else None


def _check_degree(K, k):
    if not 0 <= k <= K.dim:
        raise DegreeOutOfRange(f"degree {k} outside 0..{K.dim}")


@dataclass(frozen=True)
class HomologyData:
    """H_k(K; Z) with representatives and an exact coordinate map."""

    degree: int
    betti: int
    torsion: tuple[int, ...]
    free_reps: tuple[Chain, ...]
    torsion_reps: tuple[tuple[Chain, int], ...]
    _q: _Quotient = field(repr=False)
    _out: object = field(repr=False)

    def _cycle_vector(self, z: Chain) -> np.ndarray:
        if z.degree != self.degree or len(z) != self._q.kernel.shape[0]:
            raise ValueError(f"expected a {self.degree}-chain of this complex")
        if self._out is not None and (self._out @ z.coeffs).any():
            raise NotACycle(f"{self.degree}-chain has nonzero boundary")
        return z.coeffs

    def coordinates(self, z: Chain) -> tuple[tuple[int, ...], tuple[int, ...]]:
        """``(free, torsion)`` coordinates of the class of the cycle ``z``.

        Torsion coordinates are reduced modulo their orders.
        """
        y = self._q.reduced(self._cycle_vector(z))
        r = self._q.rank
        free = tuple(int(v) for v in y[r:])
        tors = tuple(int(y[i]) % d for i, d in enumerate(self._q.divisors) if d > 1)
        return free, tors

    def bounding_chain(self, z: Chain) -> Chain:
        """A (k+1)-chain with boundary ``z``; :class:`NotABoundary` otherwise."""
        y = self._q.reduced(self._cycle_vector(z))
        r = self._q.rank
        divs = self._q.divisors
        free = tuple(int(v) for v in y[r:])
        tors = tuple(int(y[i]) % d for i, d in enumerate(divs) if d > 1)
        if any(free) or any(tors):
            raise NotABoundary(
                f"cycle has homology coordinates free={free} torsion={tors}", free, tors
            )
        x = np.zeros(self._q.n_in, dtype=object)
        for i, d in enumerate(divs):
            x[i] = int(y[i]) // d
        gamma = _to_int64(int_matmul(self._q.V, x.reshape(-1, 1)).ravel())
        return Chain(self.degree + 1, gamma)

    def is_boundary(self, z: Chain) -> bool:
        free, tors = self.coordinates(z)
        return not any(free) and not any(tors)

    def element(self, free: Sequence[int], torsion: Sequence[int] = ()) -> Chain:
        """Cycle with the given coordinates, built from the representatives."""
        if len(free) != self.betti or len(torsion) != len(self.torsion):
            raise ValueError("coordinate vector has the wrong length")
        out = np.zeros(self._q.kernel.shape[0], dtype=np.int64)
        for c, rep in zip(free, self.free_reps):
            out += int(c) * rep.coeffs
        for c, (rep, _) in zip(torsion, self.torsion_reps):
            out += int(c) * rep.coeffs
        return Chain(self.degree, out)


@dataclass(frozen=True)
class CohomologyData:
    """H^k(K; Z).  The free cocycles are dual to the homology free basis."""

    degree: int
    betti: int
    torsion: tuple[int, ...]
    free_reps: tuple[Cochain, ...]
    torsion_reps: tuple[tuple[Cochain, int], ...]
    _homology: HomologyData = field(repr=False)
    _q: _Quotient = field(repr=False)
    _out: object = field(repr=False)

    def coordinates(self, c: Cochain) -> tuple[tuple[int, ...], tuple[int, ...]]:
        if c.degree != self.degree or not c.integral:
            raise ValueError(f"expected an integer {self.degree}-cochain")
        if self._out is not None and (self._out @ c.values).any():
            raise NotACycle(f"{self.degree}-cochain is not a cocycle")
        free = tuple(c(z) for z in self._homology.free_reps)
        rest = c.values.copy()
        for a, phi in zip(free, self.free_reps):
            rest = rest - a * phi.values
        y = self._q.reduced(rest)
        tors = tuple(int(y[i]) % d for i, d in enumerate(self._q.divisors) if d > 1)
        return free, tors


def homology(K: SimplicialComplex, k: int) -> HomologyData:
    _check_degree(K, k)
    key = ("homology", k)
    if key not in K._cache:
        out = _boundary_or_none(K, k)
        q = _quotient(out, _boundary_or_none(K, k + 1), K.count(k))
        r = q.rank
        free = tuple(Chain(k, q.representative(j)) for j in range(r, r + q.betti))
        tors = tuple(
            (Chain(k, q.representative(i)), d) for i, d in enumerate(q.divisors) if d > 1
        )
        K._cache[key] = HomologyData(
            k, q.betti, tuple(d for d in q.divisors if d > 1), free, tors, q, out
        )
    return K._cache[key]


def cohomology(K: SimplicialComplex, k: int) -> CohomologyData:
    _check_degree(K, k)
    key = ("cohomology", k)
    if key not in K._cache:
        h = homology(K, k)
        hq = h._q
        # phi_j(x) = (U_A Vinv x)_j: kills im(boundary), dual to the free reps
        phis = int_matmul(hq.U[hq.rank:], hq.kernel_coords)
        free = tuple(Cochain(k, _to_int64(np.asarray(row)), True) for row in phis)
        out = _boundary_or_none(K, k + 1)
        out_t = None if out is None else out.T.tocsr()
        inc = _boundary_or_none(K, k)
        inc_t = None if inc is None else inc.T.tocsr()
        q = _quotient(out_t, inc_t, K.count(k))
        if q.betti != h.betti:
            raise AssertionError("free ranks of homology and cohomology disagree")
        tors = tuple(
            (Cochain(k, q.representative(i), True), d) for i, d in enumerate(q.divisors) if d > 1
        )
        K._cache[key] = CohomologyData(
            k, h.betti, tuple(d for d in q.divisors if d > 1), free, tors, h, q, out_t
        )
    return K._cache[key]


def is_cocycle(K: SimplicialComplex, c: Cochain) -> bool:
    if c.degree == K.dim:
        return True
    d = boundary_matrix(K, c.degree + 1).T @ c.values
    return not np.any(d != 0) if c.integral else bool(np.allclose(d, 0.0))


def find_bounding_chain(K: SimplicialComplex, z: Chain) -> Chain:
    """Integer chain ``g`` with ``boundary(g) == z`` exactly.

    Raises :class:`NotACycle` or :class:`NotABoundary` (carrying the
    nonzero homology coordinates).
    """
    if not 0 <= z.degree <= K.dim:
        raise DegreeOutOfRange(f"no {z.degree}-chains on a {K.dim}-complex")
    return homology(K, z.degree).bounding_chain(z)


# -- cup product -----------------------------------------------------------


def _face_indices(K: SimplicialComplex, p: int, q: int) -> tuple[np.ndarray, np.ndarray]:
    key = ("cup_faces", p, q)
    if key not in K._cache:
        front, back = [], []
        for s in K.simplices[p + q]:
            front.append(K._index[p][s[: p + 1]])
            back.append(K._index[q][s[p:]])
        K._cache[key] = (np.array(front, dtype=np.int64), np.array(back, dtype=np.int64))
    return K._cache[key]


def cup_product(K: SimplicialComplex, a: Cochain, b: Cochain) -> Cochain:
    """Alexander-Whitney cup product on sorted vertex tuples.

    ``(a cup b)[v0..v_{p+q}] = a[v0..vp] * b[vp..v_{p+q}]``.
    """
    p, q = a.degree, b.degree
    if p + q > K.dim:
        raise DegreeOverflow(f"cup product degree {p + q} exceeds dimension {K.dim}")
    if len(a) != K.count(p) or len(b) != K.count(q):
        raise ValueError("cochains do not belong to this complex")
    front, back = _face_indices(K, p, q)
    return Cochain(p + q, a.values[front] * b.values[back], a.integral and b.integral)


def _integer_unimodular(P: np.ndarray) -> bool:
    if P.shape[0] != P.shape[1]:
        return False
    if P.shape[0] == 0:
        return True
    s = smith_normal_form(P, transforms=())
    return s.rank == P.shape[0] and all(d == 1 for d in s.divisors)


def pairing_matrix(K: SimplicialComplex, p: int, left=None, right=None) -> np.ndarray:
    """``P[a, b] = (left_a cup right_b)([X])`` for free cocycle bases.

    ``left`` defaults to the free cocycles of degree ``p``, ``right`` to those
    of degree ``n - p``.  Raises :class:`SingularPairing` unless det = +-1.
    """
    n = K.dim
    _check_degree(K, p)
    left = cohomology(K, p).free_reps if left is None else tuple(left)
    right = cohomology(K, n - p).free_reps if right is None else tuple(right)
    X = fundamental_cycle(K)
    P = np.zeros((len(left), len(right)), dtype=np.int64)
    for i, a in enumerate(left):
        for j, b in enumerate(right):
            P[i, j] = cup_product(K, a, b)(X)
    if not _integer_unimodular(P):
        raise SingularPairing(f"degree-{p} duality pairing is not unimodular:\n{P}")
    return P


# -- dual bases ------------------------------------------------------------


def _evaluation_matrix(cochains, chains) -> np.ndarray:
    E = np.zeros((len(cochains), len(chains)), dtype=np.int64)
    for i, c in enumerate(cochains):
        for j, z in enumerate(chains):
            E[i, j] = c(z)
    return E


def _solve_unimodular(E: np.ndarray, what: str) -> np.ndarray:
    from .snf import integer_inverse

    if not _integer_unimodular(E):
        raise NotUnimodular(f"{what} evaluation matrix is not invertible over Z:\n{E}")
    return _to_int64(integer_inverse(E))


def dual_homology_basis(K: SimplicialComplex, k: int, thetas=None) -> list[Chain]:
    """Integer cycles ``Y_i`` with ``thetas[j](Y_i) == delta_ij`` exactly."""
    h = homology(K, k)
    if thetas is None:
        thetas = cohomology(K, k).free_reps
    thetas = list(thetas)
    for t in thetas:
        if not t.integral or t.degree != k:
            raise ValueError(f"expected integer {k}-cocycles")
        if not is_cocycle(K, t):
            raise NotACycle("input cochain is not a cocycle")
    if len(thetas) != h.betti:
        raise NotUnimodular(f"need {h.betti} cocycles, got {len(thetas)}")
    E = _evaluation_matrix(thetas, h.free_reps)
    B = _solve_unimodular(E.T, "cocycle")
    reps = np.array([z.coeffs for z in h.free_reps]).reshape(h.betti, -1)
    return [Chain(k, B[i] @ reps) for i in range(h.betti)]


def dual_cocycle_basis(K: SimplicialComplex, k: int, cycles) -> list[Cochain]:
    """Integer cocycles ``theta_i`` with ``theta_i(cycles[j]) == delta_ij``.

    The cycles must represent a basis of H_k / torsion.
    """
    c = cohomology(K, k)
    cycles = list(cycles)
    for z in cycles:
        homology(K, k).coordinates(z)  # validates the cycle
    if len(cycles) != c.betti:
        raise NotUnimodular(f"need {c.betti} cycles, got {len(cycles)}")
    E = _evaluation_matrix(c.free_reps, cycles)
    B = _solve_unimodular(E, "cycle")
    phis = np.array([phi.values for phi in c.free_reps]).reshape(c.betti, -1)
    return [Cochain(k, B[i] @ phis, True) for i in range(c.betti)]


def homology_report(K: SimplicialComplex, degrees=None) -> dict:
    """Plain-data summary: Betti numbers, torsion and representatives."""
    degrees = range(K.dim + 1) if degrees is None else degrees
    out = {"dimension": K.dim, "counts": [K.count(k) for k in range(K.dim + 1)], "degrees": []}
    for k in degrees:
        h = homology(K, k)
        out["degrees"].append({
            "degree": k,
            "betti": h.betti,
            "torsion": list(h.torsion),
            "free_representatives": [
                [[list(s), c] for s, c in K.terms(z)] for z in h.free_reps
            ],
            "torsion_representatives": [
                {"order": d, "terms": [[list(s), c] for s, c in K.terms(z)]}
                for z, d in h.torsion_reps
            ],
        })
    return out
