"""Abel gerbes of cycles, the Poisson field, Picard representatives,
Jacobi vectors and the linear-equivalence test.

Currents of degree n-d are represented by their M-duals in degree d: the
Dirac cochain of a d-chain Z is ``u = M_d^{-1} z`` (so ``<u, psi>_M =
psi(Z)``), its harmonic part is the curvature ``eta~ = Pi u`` and the
Poisson equation is solved for a coexact d-cochain H.  The cup-product
picture (a harmonic (n-d)-form with integer periods) is recovered from the
duality pairing.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .complex import Chain, SimplicialComplex, boundary
from .errors import DegreeOutOfRange, NotACycle, SolverDiverged
from .hodge import HodgeStructure, _exact_potential, solve_singular_spd
from .homology import homology, pairing_matrix
from .snf import integer_inverse

__all__ = [
    "DiracCochain",
    "PoissonSolution",
    "PoincareDual",
    "AbelGerbe",
    "PicardRep",
    "Verdict",
    "dirac_cochain",
    "poincare_dual",
    "solve_poisson",
    "abel_gerbe",
    "picard_rep",
    "jacobi_vector",
    "jacobi_parts",
    "is_linearly_trivial",
    "lin_equiv",
    "torsion_diagnostic",
    "complement_residual",
]

RESIDUAL_TOL = 1e-8
INTEGRALITY_TOL = 1e-6


def _same(K: SimplicialComplex, hs: HodgeStructure):
    if hs.K is not K:
        raise ValueError("Hodge structure was built on a different complex")


def _require_cycle(K: SimplicialComplex, Z: Chain):
    if not 0 <= Z.degree <= K.dim or len(Z) != K.count(Z.degree):
        raise ValueError("chain does not belong to this complex")
    if Z.degree > 0 and not boundary(K, Z).is_zero():
        raise NotACycle(f"{Z.degree}-chain has nonzero boundary")


def _require_codim(K: SimplicialComplex, d: int):
    if not 0 <= d <= K.dim - 1:
        raise DegreeOutOfRange(f"cycle degree {d} outside 0..{K.dim - 1}")


# -- Dirac cochain -----------------------------------------------------------


@dataclass(frozen=True)
class DiracCochain:
    """``values = M^{-1} z``: the M-representative of ``psi -> psi(Z)``."""

    degree: int
    values: np.ndarray
    source: Chain = field(repr=False)


def dirac_cochain(K: SimplicialComplex, hs: HodgeStructure, Z: Chain) -> DiracCochain:
    _same(K, hs)
    z = Z.coeffs.astype(float)
    u = hs.mass_solve(Z.degree, z) if z.any() else np.zeros_like(z)
    return DiracCochain(Z.degree, u, Z)


# -- Poincare dual -----------------------------------------------------------


@dataclass(frozen=True)
class PoincareDual:
    """Both pictures of the harmonic Poincare dual of a d-cycle.

    ``eta_tilde`` (degree d) satisfies ``<eta_tilde, theta>_M = theta(Z)``
    for harmonic theta.  ``eta`` (degree n-d) is ``sum beta_free[a] *
    theta_a`` over the integral lattice and satisfies
    ``(eta cup theta_b)[X] = theta_b(Z)``.  ``periods[b] = cocycle_b(Z)``.
    """

    degree: int
    eta_tilde: np.ndarray
    eta: np.ndarray
    beta_free: tuple[int, ...]
    beta_torsion: tuple[int, ...]
    periods: tuple[int, ...]
    curvature_periods: np.ndarray


def poincare_dual(K: SimplicialComplex, hs: HodgeStructure, Z: Chain) -> PoincareDual:
    _same(K, hs)
    d, n = Z.degree, K.dim
    _require_codim(K, d)
    _require_cycle(K, Z)
    H = hs.harmonic_basis(d)
    eta_tilde = H @ (H.T @ Z.coeffs.astype(float))
    periods = tuple(int(c(Z)) for c in hs.cocycles(d))
    P = pairing_matrix(K, n - d, hs.cocycles(n - d), hs.cocycles(d))
    # P^T x = w has an integer solution because P is unimodular
    x = integer_inverse(P.T) @ np.array(periods, dtype=np.int64) if periods else np.zeros(0)
    beta_free = tuple(int(v) for v in x)
    L = hs.lattice_matrix(n - d)
    eta = L @ np.asarray(beta_free, dtype=float) if beta_free else np.zeros(K.count(n - d))
    _, torsion = homology(K, d).coordinates(Z)
    curv = hs.lattice_matrix(d).T @ (hs.M(d) @ eta_tilde)
    return PoincareDual(d, eta_tilde, eta, beta_free, torsion, periods, curv)


# -- Poisson equation --------------------------------------------------------


@dataclass(frozen=True)
class PoissonSolution:
    """Coexact ``H`` with ``L H = u - eta~`` and ``G = -dH``, so that
    ``delta G = eta~ - u``.  Residuals are relative M-norms."""

    degree: int
    H: np.ndarray
    G: np.ndarray
    laplace_residual: float
    field_residual: float


def solve_poisson(K: SimplicialComplex, hs: HodgeStructure, Z: Chain, *,
                  tol: float = RESIDUAL_TOL) -> PoissonSolution:
    _same(K, hs)
    d = Z.degree
    _require_codim(K, d)
    _require_cycle(K, Z)
    z = Z.coeffs.astype(float)
    if not z.any():
        return PoissonSolution(d, np.zeros(K.count(d)), np.zeros(K.count(d + 1)), 0.0, 0.0)
    M = hs.M(d)
    u = hs.mass_solve(d, z)
    eta = hs.project(d, u)
    source = u - eta
    S = hs.coexact_stiffness(d)
    # d^T M' d H = M (u - eta~); any solution, then keep its coexact part
    Hs = solve_singular_spd(S, M @ source, hs.profile, accept=tol)
    Hs = Hs - hs.project(d, Hs)
    if d > 0:
        Hs = Hs - hs.d(d - 1) @ _exact_potential(hs.exact_stiffness(d), hs.d(d - 1), M, Hs,
                                                 hs.profile)
    G = -(hs.d(d) @ Hs)
    scale = max(hs.norm(d, source), 1e-300)
    lap = hs.norm(d, hs.laplacian(d, Hs) - source) / scale
    fld = hs.norm(d, hs.codifferential(d + 1, G) + source) / scale
    if max(lap, fld) > tol:
        raise SolverDiverged(f"Poisson residuals {lap:.2e}, {fld:.2e} above {tol:.0e}")
    return PoissonSolution(d, Hs, G, lap, fld)


# -- the gerbe ---------------------------------------------------------------


@dataclass(frozen=True)
class AbelGerbe:
    """Discrete invariants of the gerbe of a d-cycle Z."""

    cycle: Chain = field(repr=False)
    degree: int
    homology_free: tuple[int, ...]
    homology_torsion: tuple[int, ...]
    dual: PoincareDual = field(repr=False)
    poisson: PoissonSolution = field(repr=False)

    @property
    def curvature(self) -> np.ndarray:
        return self.dual.eta_tilde

    @property
    def curvature_form(self) -> np.ndarray:
        return self.dual.eta

    @property
    def characteristic_free(self) -> tuple[int, ...]:
        return self.dual.beta_free

    @property
    def characteristic_torsion(self) -> tuple[int, ...]:
        return self.dual.beta_torsion

    def invariants(self) -> dict:
        """Every stored quantity, as arrays, for comparisons."""
        return {
            "homology_free": np.array(self.homology_free, dtype=float),
            "curvature": self.dual.eta_tilde,
            "curvature_form": self.dual.eta,
            "characteristic_free": np.array(self.dual.beta_free, dtype=float),
            "periods": np.array(self.dual.periods, dtype=float),
            "curvature_periods": self.dual.curvature_periods,
            "H": self.poisson.H,
            "G": self.poisson.G,
        }


def abel_gerbe(K: SimplicialComplex, hs: HodgeStructure, Z: Chain) -> AbelGerbe:
    dual = poincare_dual(K, hs, Z)
    pois = solve_poisson(K, hs, Z)
    free, tors = homology(K, Z.degree).coordinates(Z)
    return AbelGerbe(Z, Z.degree, free, tors, dual, pois)


# -- Picard representative and Jacobi vector ---------------------------------


@dataclass(frozen=True)
class PicardRep:
    """Harmonic part of the Dirac cochain of a (d+1)-chain Gamma.

    ``alpha_tilde`` (degree d+1) pairs with harmonic theta as
    ``theta(Gamma)``.  ``picard_coords`` are the coefficients of the
    cup-picture representative in the degree n-d-1 lattice; ``jacobi``
    holds ``theta_i(Gamma)``.
    """

    degree: int
    alpha_tilde: np.ndarray
    source: Chain = field(repr=False)
    jacobi: np.ndarray = field(default=None)
    picard_coords: np.ndarray = field(default=None)

    def alpha(self, hs: HodgeStructure) -> np.ndarray:
        """Cup-picture harmonic cochain of degree n-d-1."""
        L = hs.lattice_matrix(hs.dim - self.degree)
        return L @ self.picard_coords if L.shape[1] else np.zeros(L.shape[0])


def picard_rep(K: SimplicialComplex, hs: HodgeStructure, Gamma: Chain) -> PicardRep:
    _same(K, hs)
    e = Gamma.degree
    if not 1 <= e <= K.dim:
        raise DegreeOutOfRange(f"chain degree {e} outside 1..{K.dim}")
    H = hs.harmonic_basis(e)
    alpha = H @ (H.T @ Gamma.coeffs.astype(float))
    J = hs.lattice_matrix(e).T @ (hs.M(e) @ alpha)
    y = picard_from_jacobi(K, hs, e, J)
    return PicardRep(e, alpha, Gamma, J, y)


def picard_from_jacobi(K: SimplicialComplex, hs: HodgeStructure, e: int,
                       J: np.ndarray) -> np.ndarray:
    """Lattice coordinates y in degree n-e with ``P^T y = J``,
    ``P = pairing(n-e, e)``."""
    if len(J) == 0:
        return np.zeros(0)
    P = pairing_matrix(K, K.dim - e, hs.cocycles(K.dim - e), hs.cocycles(e))
    return integer_inverse(P.T).astype(float) @ np.asarray(J, dtype=float)


def jacobi_parts(K: SimplicialComplex, hs: HodgeStructure,
                 Gamma: Chain) -> tuple[np.ndarray, np.ndarray]:
    """``(cocycle_i(Gamma), a_i(dGamma))``: exact integers and the correction.

    ``theta_i(Gamma)`` is their difference.
    """
    _same(K, hs)
    e = Gamma.degree
    if not 1 <= e <= K.dim:
        raise DegreeOutOfRange(f"chain degree {e} outside 1..{K.dim}")
    ints = np.array([c(Gamma) for c in hs.cocycles(e)], dtype=np.int64)
    dG = boundary(K, Gamma).coeffs.astype(float)
    corr = hs.corrections(e).T @ dG
    return ints, corr


def jacobi_vector(K: SimplicialComplex, hs: HodgeStructure, Gamma: Chain) -> np.ndarray:
    """``theta_i(Gamma)`` over the integral lattice of degree deg(Gamma)."""
    ints, corr = jacobi_parts(K, hs, Gamma)
    return ints.astype(float) - corr


# -- linear equivalence ------------------------------------------------------


@dataclass(frozen=True)
class Verdict:
    """Outcome of the linear-equivalence test with its certificate.

    ``trivial`` is True iff the homology coordinates vanish and every
    Jacobi component of a bounding chain is within ``tol`` of an integer.
    """

    trivial: bool
    homology_free: tuple[int, ...]
    homology_torsion: tuple[int, ...]
    bounding_chain: Chain | None = field(repr=False)
    jacobi: np.ndarray | None
    fractional: np.ndarray | None
    tol: float
    reason: str

    def certificate(self) -> dict:
        out = {
            "trivial": self.trivial,
            "reason": self.reason,
            "homology_free": list(self.homology_free),
            "homology_torsion": list(self.homology_torsion),
            "tol": self.tol,
        }
        if self.jacobi is not None:
            out["jacobi"] = [float(v) for v in self.jacobi]
            out["fractional"] = [float(v) for v in self.fractional]
        return out


def is_linearly_trivial(K: SimplicialComplex, hs: HodgeStructure, Z: Chain,
                        Gamma: Chain | None = None, tol: float = INTEGRALITY_TOL) -> Verdict:
    _same(K, hs)
    d = Z.degree
    _require_codim(K, d)
    _require_cycle(K, Z)
    h = homology(K, d)
    free, tors = h.coordinates(Z)
    if any(free) or any(tors):
        return Verdict(False, free, tors, None, None, None, tol,
                       "cycle is not null-homologous")
    if Gamma is None:
        Gamma = h.bounding_chain(Z)
    elif Gamma.degree != d + 1 or boundary(K, Gamma) != Z:
        raise ValueError("supplied chain does not bound the cycle")
    J = jacobi_vector(K, hs, Gamma)
    frac = J - np.rint(J)
    ok = bool(np.all(np.abs(frac) <= tol))
    reason = "all Jacobi components integral" if ok else "non-integral Jacobi components"
    return Verdict(ok, free, tors, Gamma, J, frac, tol, reason)


def lin_equiv(K: SimplicialComplex, hs: HodgeStructure, Z1: Chain, Z2: Chain,
              tol: float = INTEGRALITY_TOL) -> Verdict:
    return is_linearly_trivial(K, hs, Z1 - Z2, tol=tol)


# -- diagnostics -------------------------------------------------------------


def torsion_diagnostic(K: SimplicialComplex, hs: HodgeStructure, Z: Chain) -> dict:
    """For a torsion cycle: its order m, a chain bounding m*Z, and the
    Jacobi and Picard points of m*Z."""
    _require_cycle(K, Z)
    h = homology(K, Z.degree)
    free, tors = h.coordinates(Z)
    if any(free):
        raise ValueError("cycle has nonzero free homology coordinates")
    m = 1
    for t, order in zip(tors, h.torsion):
        g = order // np.gcd(t, order)
        m = int(np.lcm(m, g))
    mZ = Z * m
    Gamma = h.bounding_chain(mZ)
    J = jacobi_vector(K, hs, Gamma)
    y = picard_from_jacobi(K, hs, Z.degree + 1, J)
    return {
        "order": m,
        "torsion": list(tors),
        "bounding_chain": Gamma,
        "jacobi": np.mod(J, 1.0),
        "picard": np.mod(y, 1.0),
    }


def complement_residual(K: SimplicialComplex, hs: HodgeStructure, Z: Chain) -> float:
    """Largest ``|delta G - eta~|`` over d-simplices outside the support of Z.

    Away from Z the field should satisfy ``delta G = eta~``; with a diagonal
    mass this holds exactly, with Whitney mass only approximately.
    """
    sol = solve_poisson(K, hs, Z)
    eta = hs.project(Z.degree, hs.mass_solve(Z.degree, Z.coeffs.astype(float)))
    r = hs.codifferential(Z.degree + 1, sol.G) - eta
    mask = Z.coeffs == 0
    return float(np.abs(r[mask]).max()) if mask.any() else 0.0
