"""Picard and Jacobi tori, the moduli group of cycles up to linear
equivalence, period matrices and the Jacobi-image scan."""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product

import numpy as np

from .abel import INTEGRALITY_TOL, PicardRep, jacobi_vector, picard_from_jacobi
from .complex import Chain, SimplicialComplex, boundary
from .errors import DegreeOutOfRange, NotACycle
from .hodge import HodgeStructure
from .homology import dual_homology_basis, homology, pairing_matrix

__all__ = [
    "TorusPoint",
    "ModuliClass",
    "ModuliTable",
    "jacobi_point",
    "picard_to_jacobi",
    "jacobi_to_picard",
    "moduli_table",
    "moduli_class",
    "moduli_add",
    "moduli_neg",
    "moduli_eq",
    "moduli_zero",
    "jacobi_scan",
    "period_matrix_check",
]


def _reduce(x) -> np.ndarray:
    x = np.mod(np.asarray(x, dtype=float), 1.0)
    x[x >= 1.0] = 0.0  # mod can round up to exactly 1.0
    return x


@dataclass(frozen=True, eq=False)
class TorusPoint:
    """Point of R^b / Z^b in a fixed lattice basis.

    ``kind`` is ``"jacobi"`` (lattice of degree ``degree``) or ``"picard"``.
    """

    coords: np.ndarray
    kind: str
    degree: int

    def __post_init__(self):
        object.__setattr__(self, "coords", _reduce(self.coords))

    def _check(self, other: "TorusPoint"):
        if (other.kind, other.degree, len(other.coords)) != (self.kind, self.degree,
                                                             len(self.coords)):
            raise ValueError("torus points live on different tori")

    def __add__(self, other: "TorusPoint") -> "TorusPoint":
        self._check(other)
        return TorusPoint(self.coords + other.coords, self.kind, self.degree)

    def __sub__(self, other: "TorusPoint") -> "TorusPoint":
        self._check(other)
        return TorusPoint(self.coords - other.coords, self.kind, self.degree)

    def __neg__(self) -> "TorusPoint":
        return TorusPoint(-self.coords, self.kind, self.degree)

    def distance(self, other: "TorusPoint") -> float:
        """Largest circle distance over the coordinates."""
        self._check(other)
        diff = np.abs(self.coords - other.coords)
        return float(np.minimum(diff, 1.0 - diff).max()) if len(diff) else 0.0

    def is_zero(self, tol: float = INTEGRALITY_TOL) -> bool:
        return self.distance(TorusPoint(np.zeros_like(self.coords), self.kind, self.degree)) <= tol


def jacobi_point(K: SimplicialComplex, hs: HodgeStructure, Gamma: Chain) -> TorusPoint:
    return TorusPoint(jacobi_vector(K, hs, Gamma), "jacobi", Gamma.degree)


def picard_to_jacobi(K: SimplicialComplex, hs: HodgeStructure, alpha, *,
                     degree: int | None = None, picture: str = "cup") -> TorusPoint:
    """Image of a Picard class on the Jacobi torus.

    ``alpha`` is a :class:`PicardRep` or a harmonic cochain vector.  In the
    ``cup`` picture the vector has degree ``n - e`` and pairs with the
    lattice of degree ``e`` by cup product on [X]; in the ``dual`` picture it
    has degree ``e`` and pairs through the mass matrix.  ``degree`` is ``e``,
    the degree of the Jacobi lattice.
    """
    n = K.dim
    if isinstance(alpha, PicardRep):
        e = alpha.degree
        J = hs.lattice_matrix(e).T @ (hs.M(e) @ alpha.alpha_tilde)
        return TorusPoint(J, "jacobi", e)
    if degree is None:
        raise ValueError("degree of the Jacobi lattice is required for a raw cochain")
    e = degree
    if not 1 <= e <= n:
        raise DegreeOutOfRange(f"Jacobi degree {e} outside 1..{n}")
    alpha = np.asarray(alpha, dtype=float)
    if picture == "dual":
        J = hs.lattice_matrix(e).T @ (hs.M(e) @ alpha)
    elif picture == "cup":
        y = hs.lattice_coordinates(n - e, alpha)
        P = pairing_matrix(K, n - e, hs.cocycles(n - e), hs.cocycles(e))
        J = P.T.astype(float) @ y
    else:
        raise ValueError(f"unknown picture {picture!r}")
    return TorusPoint(J, "jacobi", e)


def jacobi_to_picard(K: SimplicialComplex, hs: HodgeStructure, point: TorusPoint) -> TorusPoint:
    """Inverse of :func:`picard_to_jacobi` on coordinates (cup picture)."""
    if point.kind != "jacobi":
        raise ValueError("expected a Jacobi torus point")
    y = picard_from_jacobi(K, hs, point.degree, point.coords)
    return TorusPoint(y, "picard", K.dim - point.degree)


def picard_lattice_image(K: SimplicialComplex, hs: HodgeStructure, e: int) -> np.ndarray:
    """Jacobi coordinates of the Picard lattice basis, one row each.

    Equals the duality pairing matrix; integer with det +-1.
    """
    n = K.dim
    L = hs.lattice_matrix(n - e)
    if not L.shape[1]:
        return np.zeros((0, 0))
    # unreduced lifts: modulo Z every row would be zero
    P = pairing_matrix(K, n - e, hs.cocycles(n - e), hs.cocycles(e)).astype(float)
    Y = np.array([hs.lattice_coordinates(n - e, L[:, a]) for a in range(L.shape[1])])
    return Y @ P


# -- moduli group ------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class ModuliClass:
    """Class of a d-cycle: homology coordinates plus a Jacobi point."""

    free: tuple[int, ...]
    torsion: tuple[int, ...]
    point: TorusPoint


@dataclass
class ModuliTable:
    """Base cycles ``Z_h`` (one per homology class, from the Smith
    representatives) and the correction cocycle of the extension."""

    K: SimplicialComplex
    hs: HodgeStructure
    degree: int
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def homology(self):
        return homology(self.K, self.degree)

    def normalize(self, free, torsion) -> tuple[tuple[int, ...], tuple[int, ...]]:
        orders = self.homology.torsion
        return tuple(int(v) for v in free), tuple(int(t) % o for t, o in zip(torsion, orders))

    def base_cycle(self, free, torsion=()) -> Chain:
        free, torsion = self.normalize(free, torsion)
        key = ("base", free, torsion)
        if key not in self._cache:
            self._cache[key] = self.homology.element(free, torsion)
        return self._cache[key]

    def _point_of_boundary(self, Z: Chain) -> TorusPoint:
        Gamma = self.homology.bounding_chain(Z)
        return jacobi_point(self.K, self.hs, Gamma)

    def correction(self, h1, h2) -> TorusPoint:
        """Jacobi point of ``Z_{h1} + Z_{h2} - Z_{h1+h2}``."""
        (f1, t1), (f2, t2) = h1, h2
        fs = tuple(a + b for a, b in zip(f1, f2))
        ts = tuple(a + b for a, b in zip(t1, t2))
        Z = self.base_cycle(f1, t1) + self.base_cycle(f2, t2) - self.base_cycle(fs, ts)
        return self._point_of_boundary(Z)

    def zero_point(self) -> TorusPoint:
        b = self.hs.betti(self.degree + 1)
        return TorusPoint(np.zeros(b), "jacobi", self.degree + 1)


def moduli_table(K: SimplicialComplex, hs: HodgeStructure, d: int) -> ModuliTable:
    if not 0 <= d <= K.dim - 1:
        raise DegreeOutOfRange(f"cycle degree {d} outside 0..{K.dim - 1}")
    if hs.K is not K:
        raise ValueError("Hodge structure was built on a different complex")
    key = ("moduli_table", d)
    if key not in hs._cache:
        hs._cache[key] = ModuliTable(K, hs, d)
    return hs._cache[key]


def moduli_class(table: ModuliTable, Z: Chain) -> ModuliClass:
    if Z.degree != table.degree:
        raise ValueError(f"expected a {table.degree}-cycle")
    if Z.degree > 0 and not boundary(table.K, Z).is_zero():
        raise NotACycle("chain has nonzero boundary")
    free, tors = table.homology.coordinates(Z)
    point = table._point_of_boundary(Z - table.base_cycle(free, tors))
    return ModuliClass(free, tors, point)


def moduli_zero(table: ModuliTable) -> ModuliClass:
    h = table.homology
    return ModuliClass((0,) * h.betti, (0,) * len(h.torsion), table.zero_point())


def moduli_add(table: ModuliTable, x: ModuliClass, y: ModuliClass) -> ModuliClass:
    free = tuple(a + b for a, b in zip(x.free, y.free))
    free, tors = table.normalize(free, tuple(a + b for a, b in zip(x.torsion, y.torsion)))
    c = table.correction((x.free, x.torsion), (y.free, y.torsion))
    return ModuliClass(free, tors, x.point + y.point + c)


def moduli_neg(table: ModuliTable, x: ModuliClass) -> ModuliClass:
    free, tors = table.normalize(tuple(-a for a in x.free), tuple(-t for t in x.torsion))
    c = table.correction((x.free, x.torsion), (free, tors))
    return ModuliClass(free, tors, -x.point - c)


def moduli_eq(x: ModuliClass, y: ModuliClass, tol: float = INTEGRALITY_TOL) -> bool:
    return x.free == y.free and x.torsion == y.torsion and x.point.distance(y.point) <= tol


# -- period matrix -----------------------------------------------------------


def period_matrix_check(K: SimplicialComplex, hs: HodgeStructure, k: int,
                        tol: float = 1e-8) -> dict:
    """Evaluate the harmonic lattice on its dual homology basis.

    ``matrix[i, j] = theta_j(Y_i)``; the verdict asks for the identity.
    """
    Y = dual_homology_basis(K, k, hs.cocycles(k))
    L = hs.lattice_matrix(k)
    E = np.array([L.T @ y.coeffs.astype(float) for y in Y]).reshape(len(Y), L.shape[1])
    err = float(np.abs(E - np.eye(len(Y))).max()) if len(Y) else 0.0
    return {"degree": k, "matrix": E, "cycles": Y, "max_error": err, "ok": err <= tol}


# -- Jacobi image scan -------------------------------------------------------


def _random_chains(K: SimplicialComplex, e: int, count: int, rng, max_terms: int = 8):
    m = K.count(e)
    for _ in range(count):
        t = int(rng.integers(1, max_terms + 1))
        idx = rng.choice(m, size=t, replace=False)
        coeffs = np.zeros(m, dtype=np.int64)
        coeffs[idx] = rng.choice([-1, 1], size=t)
        yield Chain(e, coeffs)


def _covering_radius(points: np.ndarray, probes: np.ndarray) -> float:
    points = np.unique(np.round(points, 12) % 1.0, axis=0)
    best = np.full(len(probes), np.inf)
    for start in range(0, len(points), 512):
        chunk = points[start:start + 512]
        diff = np.abs(probes[:, None, :] - chunk[None, :, :])
        dist = np.minimum(diff, 1.0 - diff).max(axis=2)
        best = np.minimum(best, dist.min(axis=1))
    return float(best.max())


def _closure(points: np.ndarray, cap: int, digits: int = 9) -> np.ndarray:
    """Elements of the subgroup of R^b/Z^b generated by ``points`` (capped)."""
    seen = {tuple(np.zeros(points.shape[1]))}
    gens = []
    for p in points:
        key = tuple(np.round(_reduce(p), digits) % 1.0)
        if key not in seen and len(gens) < 64:
            gens.append(np.array(key))
        seen.add(key)
    frontier = [np.array(k) for k in seen]
    while frontier and len(seen) < cap:
        new = []
        for x in frontier:
            for g in gens:
                key = tuple(np.round(_reduce(x + g), digits) % 1.0)
                if key not in seen:
                    seen.add(key)
                    new.append(np.array(key))
                    if len(seen) >= cap:
                        break
            if len(seen) >= cap:
                break
        frontier = new
    return np.array(sorted(seen))


def jacobi_scan(K: SimplicialComplex, hs: HodgeStructure, d: int, budget: int,
                seed: int = 0, *, bins: int = 16, probe_limit: int = 4096,
                closure_cap: int = 4096) -> dict:
    """Sample Jacobi points of random small (d+1)-chains.

    Reports the covering radius of the samples (max circle distance from a
    probe grid to the nearest sample), the same radius for the subgroup
    they generate, and per-axis histograms.  Report only: no verdict.
    """
    if not 0 <= d <= K.dim - 1:
        raise DegreeOutOfRange(f"cycle degree {d} outside 0..{K.dim - 1}")
    e = d + 1
    b = hs.betti(e)
    report = {"degree": d, "seed": seed, "budget": budget, "dimension": b, "samples": 0,
              "covering_radius": None, "closure_size": 0, "closure_covering_radius": None,
              "histograms": []}
    if b == 0 or budget <= 0:
        return report
    rng = np.random.default_rng(seed)
    L = hs.lattice_matrix(e)
    pts = np.array([_reduce(L.T @ g.coeffs.astype(float))
                    for g in _random_chains(K, e, budget, rng)])
    per_axis = max(2, int(np.floor(probe_limit ** (1.0 / b))))
    axis = (np.arange(per_axis) + 0.5) / per_axis
    probes = np.array(list(product(axis, repeat=b)))
    closure = _closure(pts, closure_cap)
    report.update({
        "samples": len(pts),
        "probes": len(probes),
        "covering_radius": _covering_radius(pts, probes),
        "closure_size": len(closure),
        "closure_covering_radius": _covering_radius(closure, probes),
        "histograms": [np.histogram(pts[:, i], bins=bins, range=(0.0, 1.0))[0].tolist()
                       for i in range(b)],
    })
    return report
