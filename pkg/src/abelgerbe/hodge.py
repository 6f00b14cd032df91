"""Discrete Hodge theory on cochains.

Inner products come from mass matrices ``M_k``; the codifferential is the
M-adjoint of the coboundary, ``delta_k = M_{k-1}^{-1} d_{k-1}^T M_k``.  The
harmonic space of degree k is built from integer cocycles: each cocycle
``t`` is corrected by an exact cochain, ``theta = t - d a``, chosen so that
``theta`` is M-orthogonal to all exact cochains.  The resulting ``theta``
are harmonic, have integer periods and span the integral lattice.  A dense
generalized eigenproblem cross-checks the dimension on small meshes.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as la
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .complex import Cochain, SimplicialComplex, boundary_matrix
from .errors import DegreeOutOfRange, RankAmbiguous, SingularMass, SolverDiverged
from .homology import cohomology, dual_homology_basis, homology, is_cocycle
from .whitney import mass_matrix

__all__ = [
    "SolverProfile",
    "HodgeStructure",
    "HodgeDecomposition",
    "build_hodge",
    "hodge_decompose",
    "integral_harmonic_lattice",
    "solve_singular_spd",
]

# meshes larger than this skip the dense spectral cross-check
DENSE_SPECTRAL_LIMIT = 2500


@dataclass(frozen=True)
class SolverProfile:
    """Settings shared by every iterative solve.

    ``deterministic`` uses a tight residual target; ``fast`` relaxes it.
    Both run single-threaded code paths with fixed iteration caps, so
    repeated runs give identical results.
    """

    name: str = "deterministic"
    rtol: float = 1e-12
    maxiter_factor: int = 10

    @classmethod
    def named(cls, name: str) -> "SolverProfile":
        if name == "deterministic":
            return cls()
        if name == "fast":
            return cls("fast", 1e-10, 4)
        raise ValueError(f"unknown solver profile {name!r}")


def solve_singular_spd(A: sp.spmatrix, b: np.ndarray, profile: SolverProfile | None = None,
                       *, accept: float = 1e-9) -> np.ndarray:
    """Solve a consistent, symmetric positive semidefinite system.

    Conjugate gradients from zero (which stays in the range of ``A``) with a
    deterministic iteration cap; falls back to dense least squares when CG
    misses the target.  Raises :class:`SolverDiverged` if even the fallback
    leaves a relative residual above ``accept``.
    """
    profile = profile or SolverProfile()
    b = np.asarray(b, dtype=float)
    nb = np.linalg.norm(b)
    if nb == 0.0:
        return np.zeros(A.shape[1])
    maxiter = profile.maxiter_factor * A.shape[0] + 100
    x, _ = spla.cg(A, b, rtol=profile.rtol, atol=0.0, maxiter=maxiter)
    res = np.linalg.norm(A @ x - b) / nb
    if res > max(10 * profile.rtol, 1e-11) and np.isfinite(accept):
        x = la.lstsq(A.toarray(), b, lapack_driver="gelsd")[0]
        res = np.linalg.norm(A @ x - b) / nb
    if res > accept:
        raise SolverDiverged(f"relative residual {res:.3e} above {accept:.1e}")
    return x


def _exact_potential(S, d, M, c, profile, passes: int = 3) -> np.ndarray:
    """Potential ``a`` of the M-orthogonal exact part of ``c``.

    CG stops on a residual relative to its right-hand side, so the exact
    part left over after one solve is re-projected (a few refinement passes
    until the leftover is at rounding level).
    """
    rest = np.asarray(c, dtype=float)
    # a right-hand side at rounding level of |d^T| |M c| means c has no
    # exact part; its noise need not be consistent, so do not solve for it
    dnorm = float(abs(d).sum(axis=1).max()) if d.nnz else 0.0
    floor = 1e-13 * dnorm * np.linalg.norm(M @ rest)
    rhs = d.T @ (M @ rest)
    if np.linalg.norm(rhs) <= floor:
        return np.zeros(d.shape[1])
    a = solve_singular_spd(S, rhs, profile)
    rest = rest - d @ a
    size = np.linalg.norm(d.T @ (M @ rest))
    for _ in range(passes - 1):
        if size <= floor:
            break
        # the leftover right-hand side is at rounding level and may be
        # slightly inconsistent, so accept whatever CG reaches
        step = solve_singular_spd(S, d.T @ (M @ rest), profile, accept=np.inf)
        trial = rest - d @ step
        trial_size = np.linalg.norm(d.T @ (M @ trial))
        if not trial_size < 0.5 * size:
            break
        a, rest, size = a + step, trial, trial_size
    return a


@dataclass
class _Degree:
    k: int
    M: sp.csr_matrix
    solve: object
    cocycles: list
    lattice: np.ndarray          # columns theta_i (float)
    corrections: np.ndarray      # columns a_i with theta_i = cocycle_i - d a_i
    basis: np.ndarray            # M-orthonormal harmonic basis
    diagnostics: dict = field(default_factory=dict)


class HodgeStructure:
    """Mass matrices, codifferentials, harmonic bases and integral lattices.

    Build with :func:`build_hodge`.  All methods take and return plain
    vectors indexed like the simplices of the relevant degree, except where
    :class:`Cochain` is stated.
    """

    def __init__(self, K: SimplicialComplex, mass: str, profile: SolverProfile):
        self.K = K
        self.mass = mass
        self.profile = profile
        self._deg: dict[int, _Degree] = {}
        self._d: dict[int, sp.csr_matrix] = {}
        # per-structure derived objects (moduli tables)
        self._cache: dict = {}

    @property
    def dim(self) -> int:
        return self.K.dim

    def _check(self, k):
        if not 0 <= k <= self.dim:
            raise DegreeOutOfRange(f"degree {k} outside 0..{self.dim}")

    # -- operators -------------------------------------------------------

    def M(self, k: int) -> sp.csr_matrix:
        self._check(k)
        return self._deg[k].M

    def d(self, k: int) -> sp.csr_matrix:
        """Coboundary C^k -> C^{k+1} as a float matrix."""
        if not 0 <= k < self.dim:
            raise DegreeOutOfRange(f"coboundary degree {k} outside 0..{self.dim - 1}")
        if k not in self._d:
            self._d[k] = boundary_matrix(self.K, k + 1).T.astype(float).tocsr()
        return self._d[k]

    def mass_solve(self, k: int, x: np.ndarray) -> np.ndarray:
        """Apply ``M_k^{-1}`` by a factorized solve."""
        self._check(k)
        return self._deg[k].solve(np.asarray(x, dtype=float))

    def inner(self, k: int, x, y) -> float:
        return float(np.dot(x, self._deg[k].M @ y))

    def norm(self, k: int, x) -> float:
        return float(np.sqrt(max(self.inner(k, x, x), 0.0)))

    def codifferential(self, k: int, y: np.ndarray) -> np.ndarray:
        """``delta_k y``, mapping C^k -> C^{k-1}."""
        if not 1 <= k <= self.dim:
            raise DegreeOutOfRange(f"codifferential degree {k} outside 1..{self.dim}")
        return self.mass_solve(k - 1, self.d(k - 1).T @ (self.M(k) @ y))

    def laplacian(self, k: int, x: np.ndarray) -> np.ndarray:
        """``(d delta + delta d) x`` in degree k."""
        self._check(k)
        out = np.zeros(self.K.count(k))
        if k < self.dim:
            out += self.codifferential(k + 1, self.d(k) @ x)
        if k > 0:
            out += self.d(k - 1) @ self.codifferential(k, x)
        return out

    def exact_stiffness(self, k: int) -> sp.csr_matrix:
        """``d_{k-1}^T M_k d_{k-1}``: the normal operator for exact parts."""
        d = self.d(k - 1)
        return (d.T @ self.M(k) @ d).tocsr()

    def coexact_stiffness(self, k: int) -> sp.csr_matrix:
        """``d_k^T M_{k+1} d_k``."""
        d = self.d(k)
        return (d.T @ self.M(k + 1) @ d).tocsr()

    # -- harmonic data ---------------------------------------------------

    def betti(self, k: int) -> int:
        self._check(k)
        return self._deg[k].basis.shape[1]

    def harmonic_basis(self, k: int) -> np.ndarray:
        """M-orthonormal basis of harmonic k-cochains, one per column."""
        self._check(k)
        return self._deg[k].basis

    def lattice_matrix(self, k: int) -> np.ndarray:
        """Integral harmonic lattice basis ``theta_i`` as columns."""
        self._check(k)
        return self._deg[k].lattice

    def lattice(self, k: int) -> list[Cochain]:
        L = self.lattice_matrix(k)
        return [Cochain(k, L[:, i]) for i in range(L.shape[1])]

    def cocycles(self, k: int) -> list[Cochain]:
        """The integer cocycles the lattice was built from."""
        self._check(k)
        return list(self._deg[k].cocycles)

    def corrections(self, k: int) -> np.ndarray:
        """Columns ``a_i`` (degree k-1) with ``theta_i = cocycle_i - d a_i``."""
        self._check(k)
        return self._deg[k].corrections

    def project(self, k: int, c: np.ndarray) -> np.ndarray:
        """M-orthogonal projection onto harmonic k-cochains."""
        H = self.harmonic_basis(k)
        c = np.asarray(c, dtype=float)
        if H.shape[1] == 0:
            return np.zeros_like(c)
        return H @ (H.T @ (self.M(k) @ c))

    def lattice_coordinates(self, k: int, h: np.ndarray) -> np.ndarray:
        """Coefficients of a harmonic cochain in the lattice basis."""
        L = self.lattice_matrix(k)
        G = L.T @ (self.M(k) @ L)
        return np.linalg.solve(G, L.T @ (self.M(k) @ h)) if L.shape[1] else np.zeros(0)

    def diagnostics(self, k: int | None = None) -> dict:
        if k is None:
            return {j: dict(self._deg[j].diagnostics) for j in sorted(self._deg)}
        self._check(k)
        return dict(self._deg[k].diagnostics)

    def report(self) -> dict:
        return {
            "mass": self.mass,
            "profile": self.profile.name,
            "degrees": [{"degree": k, **self._deg[k].diagnostics} for k in sorted(self._deg)],
        }


def _factorize(M: sp.csr_matrix):
    if (M - sp.diags(M.diagonal())).nnz == 0:
        diag = M.diagonal()
        if np.any(diag <= 0):
            raise SingularMass("lumped mass has a nonpositive entry")
        return lambda x: (x.T / diag).T if x.ndim > 1 else x / diag
    lu = spla.splu(M.tocsc())
    return lu.solve


def _min_eig(M: sp.csr_matrix) -> float:
    if M.shape[0] == 0:
        return float("inf")
    if M.shape[0] <= DENSE_SPECTRAL_LIMIT:
        return float(la.eigvalsh(M.toarray(), subset_by_index=[0, 0])[0])
    return float(spla.eigsh(M, k=1, which="SA", tol=1e-10, return_eigenvectors=False)[0])


def _validate_cocycles(K, k, cocycles):
    cocycles = list(cocycles)
    for c in cocycles:
        if c.degree != k or not c.integral or len(c) != K.count(k):
            raise ValueError(f"expected integer {k}-cochains on this complex")
        if not is_cocycle(K, c):
            raise ValueError("supplied cochain is not a cocycle")
    # raises NotUnimodular unless the cocycles are a lattice basis mod torsion
    dual_homology_basis(K, k, cocycles)
    return cocycles


def build_hodge(K: SimplicialComplex, *, mass: str = "whitney", rank_gap: float = 1e3,
                cocycle_bases: dict | None = None, profile: SolverProfile | str | None = None,
                spectral_check: bool | None = None, tol: float = 1e-8) -> HodgeStructure:
    """Assemble the Hodge structure of every degree and verify its invariants.

    ``cocycle_bases`` may fix the integer cocycles generating the lattice in
    chosen degrees (they must form a basis of H^k / torsion).  The dense
    spectral cross-check runs when every cochain space has at most
    ``DENSE_SPECTRAL_LIMIT`` entries, unless forced by ``spectral_check``.
    """
    if isinstance(profile, str) or profile is None:
        profile = SolverProfile.named(profile or "deterministic")
    n = K.dim
    hs = HodgeStructure(K, mass, profile)
    cocycle_bases = cocycle_bases or {}
    small = max(K.count(k) for k in range(n + 1)) <= DENSE_SPECTRAL_LIMIT
    do_spectral = small if spectral_check is None else spectral_check
    rng = np.random.default_rng(0)

    for k in range(n + 1):
        M = mass_matrix(K, k, mass)
        lam_min = _min_eig(M)
        if not lam_min > 0:
            raise SingularMass(f"degree-{k} mass matrix has eigenvalue {lam_min:.3e}")
        solve = _factorize(M)
        if k in cocycle_bases:
            cocycles = _validate_cocycles(K, k, cocycle_bases[k])
        else:
            cocycles = list(cohomology(K, k).free_reps)
        b = len(cocycles)
        T = np.array([c.values for c in cocycles], dtype=float).T.reshape(K.count(k), b)
        hs._deg[k] = _Degree(k, M, solve, cocycles, T, np.zeros((K.count(k - 1), b)), T)
        A = np.zeros((K.count(k - 1) if k else 0, b))
        if k > 0 and b:
            S = hs.exact_stiffness(k)
            d = hs.d(k - 1)
            for i in range(b):
                A[:, i] = _exact_potential(S, d, M, T[:, i], profile)
            T = T - d @ A
        if b:
            G = T.T @ (M @ T)
            try:
                C = np.linalg.cholesky(G)
            except np.linalg.LinAlgError:
                raise RankAmbiguous(f"degree-{k} lattice Gram matrix is not positive") from None
            basis = la.solve_triangular(C, T.T, lower=True).T
        else:
            basis = T
        hs._deg[k] = _Degree(k, M, solve, cocycles, T, A, basis)

    for k in range(n + 1):
        hs._deg[k].diagnostics = _verify_degree(hs, k, rank_gap, do_spectral, tol, rng)
    return hs


def _cancellation(A: sp.csr_matrix, x: np.ndarray) -> float:
    """``|A x| / (|A| |x|)``: relative size of a product that should cancel."""
    scale = np.linalg.norm(abs(A) @ np.abs(x))
    return float(np.linalg.norm(A @ x) / scale) if scale > 0 else 0.0


def _verify_degree(hs: HodgeStructure, k: int, rank_gap: float, spectral: bool,
                   tol: float, rng) -> dict:
    K, n = hs.K, hs.dim
    M = hs.M(k)
    b = hs.betti(k)
    diag: dict = {
        "betti": homology(K, k).betti,
        "harmonic_dim": b,
        "size": K.count(k),
        "mass_min_eig": _min_eig(M),
    }
    if b != diag["betti"]:
        raise RankAmbiguous(f"degree {k}: harmonic dimension {b} != Betti number {diag['betti']}")

    # closedness and co-closedness of the lattice, each relative to the
    # size of the terms that cancel (scale free, rounding level if exact)
    worst, lap = 0.0, 0.0
    for i in range(b):
        th = hs.lattice_matrix(k)[:, i]
        if k < n:
            d = hs.d(k)
            worst = max(worst, _cancellation(d, th))
        if k > 0:
            d = hs.d(k - 1)
            worst = max(worst, _cancellation(d.T, M @ th))
        lap = max(lap, hs.norm(k, hs.laplacian(k, th)) / max(hs.norm(k, th), 1e-300))
    diag["harmonic_residual"] = worst
    diag["laplacian_norm_ratio"] = lap

    # adjointness of d and delta on random cochains
    if k < n:
        x = rng.standard_normal(K.count(k))
        y = rng.standard_normal(K.count(k + 1))
        dx = hs.d(k) @ x
        lhs = hs.inner(k + 1, dx, y)
        rhs = hs.inner(k, x, hs.codifferential(k + 1, y))
        scale = hs.norm(k + 1, dx) * hs.norm(k + 1, y)
        diag["adjoint_residual"] = abs(lhs - rhs) / max(scale, 1e-300)
        if diag["adjoint_residual"] > 1e-12:
            raise SolverDiverged(f"degree {k}: d/delta adjointness residual "
                                 f"{diag['adjoint_residual']:.2e}")

    if worst > tol:
        raise RankAmbiguous(f"degree {k}: lattice harmonic residual {worst:.2e} above {tol:.0e}")

    diag["eig_low"] = None
    diag["eig_gap_ratio"] = None
    if spectral:
        S = np.zeros((K.count(k), K.count(k)))
        if k < n:
            S += hs.coexact_stiffness(k).toarray()
        if k > 0:
            D = hs.d(k - 1)
            MD = (M @ D).toarray()
            S += MD @ hs.mass_solve(k - 1, MD.T)
        S = 0.5 * (S + S.T)
        ev = la.eigh(S, M.toarray(), eigvals_only=True)
        top = max(abs(ev[-1]), 1e-300)
        floor = max(ev[b - 1], np.finfo(float).eps * top) if b else np.finfo(float).eps * top
        ratio = ev[b] / floor if b < len(ev) else float("inf")
        diag["eig_low"] = [float(v) for v in ev[: min(len(ev), b + 2)]]
        diag["eig_max"] = float(ev[-1])
        diag["eig_gap_ratio"] = float(ratio)
        if ratio < rank_gap:
            raise RankAmbiguous(f"degree {k}: spectral gap ratio {ratio:.3e} below {rank_gap:.0e}")
    return diag


def integral_harmonic_lattice(hs: HodgeStructure, k: int) -> list[Cochain]:
    """Harmonic representatives ``theta_i`` of the integer cocycle basis."""
    return hs.lattice(k)


@dataclass(frozen=True)
class HodgeDecomposition:
    """``c = harmonic + exact + coexact`` with ``exact = d a`` and
    ``coexact = delta b``."""

    harmonic: np.ndarray
    exact: np.ndarray
    coexact: np.ndarray
    exact_potential: np.ndarray
    coexact_potential: np.ndarray
    residual: float


def hodge_decompose(hs: HodgeStructure, c) -> HodgeDecomposition:
    """M-orthogonal Hodge decomposition of a k-cochain (vector or Cochain)."""
    if isinstance(c, Cochain):
        k, vec = c.degree, c.values.astype(float)
    else:
        raise TypeError("hodge_decompose expects a Cochain")
    K, n = hs.K, hs.dim
    h = hs.project(k, vec)
    if k > 0:
        a = _exact_potential(hs.exact_stiffness(k), hs.d(k - 1), hs.M(k), vec, hs.profile)
        exact = hs.d(k - 1) @ a
    else:
        a = np.zeros(0)
        exact = np.zeros_like(vec)
    coexact = vec - h - exact
    # a coexact remainder at rounding level is noise, not a part to solve for
    if k < n and hs.norm(k, coexact) > 1e-10 * hs.norm(k, vec):
        # b with delta b = coexact: d^T M_{k+1} b = M_k coexact; take b = d w
        S = hs.coexact_stiffness(k)
        w = solve_singular_spd(S, hs.M(k) @ coexact, hs.profile)
        b = hs.d(k) @ w
    else:
        b = np.zeros(K.count(k + 1)) if k < n else np.zeros(0)
    rebuilt = h + exact + (hs.codifferential(k + 1, b) if k < n else 0.0)
    residual = hs.norm(k, vec - rebuilt) / max(hs.norm(k, vec), 1e-300)
    return HodgeDecomposition(h, exact, coexact, a, b, residual)
