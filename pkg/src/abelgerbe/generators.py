"""Test manifolds: flat tori, genus-g surfaces, spheres and RP^3."""
from __future__ import annotations

from itertools import combinations, permutations, product

import numpy as np

from .complex import Chain, SimplicialComplex, build_complex
from .errors import ComplexError, ResolutionTooSmall
from .subdivision import barycentric_subdivide

__all__ = [
    "generate_flat_torus",
    "generate_genus_surface",
    "generate_sphere",
    "generate_rp3",
    "torus_vertex",
    "torus_axis_loop",
    "torus_step_path",
    "winding_numbers",
    "axis_cocycle_basis",
]


def torus_vertex(res: int, idx) -> int:
    """Vertex number of grid point ``idx`` (taken mod ``res``) on a flat torus."""
    idx = tuple(int(i) % res for i in idx)
    return int(np.ravel_multi_index(idx, (res,) * len(idx)))


def generate_flat_torus(n: int, res: int) -> SimplicialComplex:
    """Freudenthal triangulation of the unit cube with opposite faces glued.

    Vertex ``i`` sits at ``i / res``; every top simplex is the monotone
    staircase ``v, v + e_p(1), v + e_p(1) + e_p(2), ...`` for a permutation p.
    """
    if n < 1:
        raise ComplexError("torus dimension must be positive")
    if res < 3:
        # res 1 and 2 glue distinct simplices onto the same vertex set
        raise ResolutionTooSmall(f"res={res}: need at least 3 subdivisions per axis")
    grid = list(product(range(res), repeat=n))
    coords = np.array(grid, dtype=float) / res
    eye = np.eye(n, dtype=int)
    tops, cells = [], []
    for base in grid:
        b = np.array(base)
        for perm in permutations(range(n)):
            steps = np.vstack([np.zeros(n, dtype=int), np.cumsum(eye[list(perm)], axis=0)])
            pts = b + steps
            tops.append([torus_vertex(res, p) for p in pts])
            cells.append(pts / res)
    return build_complex(tops, coords, cell_coords=np.array(cells), periods=np.eye(n))


def torus_step_path(K: SimplicialComplex, res: int, start, steps) -> Chain:
    """Edge path on a flat torus from grid point ``start`` along unit ``steps``.

    Each step is a signed axis number: ``+a`` moves along axis ``a-1``,
    ``-a`` moves backwards.  Only positive/negative single-axis moves are
    edges of the Freudenthal triangulation.
    """
    cur = np.array(start, dtype=int)
    verts = [torus_vertex(res, cur)]
    for s in steps:
        cur = cur.copy()
        cur[abs(s) - 1] += 1 if s > 0 else -1
        verts.append(torus_vertex(res, cur))
    return K.edge_path(verts)


def torus_axis_loop(K: SimplicialComplex, res: int, axis: int, offset=None) -> Chain:
    """Closed loop along ``axis`` (0-based) through grid point ``offset``."""
    n = K.dim
    offset = [0] * n if offset is None else list(offset)
    return torus_step_path(K, res, offset, [axis + 1] * res)


def _polygon_surface(g: int, s: int, inner: float) -> SimplicialComplex:
    N = 4 * g
    corners = np.array([[np.cos(2 * np.pi * j / N), np.sin(2 * np.pi * j / N)] for j in range(N)])
    L = N * s

    def boundary_point(j, m):
        t = m / s
        return (1 - t) * corners[j] + t * corners[(j + 1) % N]

    def canonical(j, m):
        if m == 0:
            return ("P",)
        # sides 4i+2, 4i+3 are a_i, b_i traversed backwards
        if j % 4 >= 2:
            return (j - 2, s - m)
        return (j, m)

    ids: dict = {}
    positions: list = []

    def vid(key, pos):
        if key not in ids:
            ids[key] = len(ids)
            positions.append(pos)
        return ids[key]

    ring0, ring0_pos = [], []
    for j in range(N):
        for m in range(s):
            p = boundary_point(j, m)
            ring0.append(vid(canonical(j, m), p))
            ring0_pos.append(p)
    ring0_pos = np.array(ring0_pos)
    ring1 = [vid(("r", i), inner * ring0_pos[i]) for i in range(L)]
    center = vid(("c",), np.zeros(2))

    tops, cells = [], []

    def tri(a, pa, b, pb, c, pc):
        tops.append([a, b, c])
        cells.append([pa, pb, pc])

    for i in range(L):
        k = (i + 1) % L
        b0, b1 = ring0_pos[i], ring0_pos[k]
        r0, r1 = inner * b0, inner * b1
        tri(ring0[i], b0, ring0[k], b1, ring1[i], r0)
        tri(ring0[k], b1, ring1[k], r1, ring1[i], r0)
        tri(ring1[i], r0, ring1[k], r1, center, np.zeros(2))
    return build_complex(tops, np.array(positions), cell_coords=np.array(cells))


def generate_genus_surface(g: int, res: int = 0, *, side_points: int = 3,
                           inner: float = 0.6) -> SimplicialComplex:
    """Orientable closed surface of genus ``g`` from the identified 4g-gon.

    The regular polygon (word a1 b1 a1^-1 b1^-1 ...) is cut into a boundary
    strip, an inner ring and a central fan; ``res`` barycentric subdivisions
    follow.  Geometry is the planar polygon metric, cell by cell.
    """
    if g < 1:
        raise ComplexError("genus must be at least 1")
    if side_points < 3:
        raise ResolutionTooSmall("need at least 3 segments per polygon side")
    K = _polygon_surface(g, side_points, inner)
    for _ in range(res):
        K = barycentric_subdivide(K).complex
    return K


def generate_sphere(n: int = 2) -> SimplicialComplex:
    """Boundary of the standard (n+1)-simplex, vertices on the unit axes."""
    verts = list(range(n + 2))
    tops = [verts[:i] + verts[i + 1:] for i in range(n + 2)]
    return build_complex(tops, np.eye(n + 2))


def generate_rp3() -> SimplicialComplex:
    """Real projective 3-space: antipodal quotient of the subdivided 4-orthoplex.

    H_1 = Z/2, which makes this the torsion fixture.
    """
    dim = 4
    facets = [tuple((a, sg[a]) for a in range(dim)) for sg in product((1, -1), repeat=dim)]

    def point(face):
        p = np.zeros(dim)
        for a, s in face:
            p[a] += s
        return p / len(face)

    def negate(face):
        return tuple(sorted((a, -s) for a, s in face))

    orbit: dict = {}
    coords = []

    def oid(face):
        face = tuple(sorted(face))
        if face not in orbit:
            orbit[face] = orbit[negate(face)] = len(coords)
            coords.append(point(face))
        return orbit[face]

    tops, cells, used = [], [], set()
    for facet in facets:
        for perm in permutations(facet):
            flag = [tuple(sorted(perm[: i + 1])) for i in range(dim)]
            if tuple(negate(f) for f in flag) in used:
                continue
            used.add(tuple(flag))
            tops.append([oid(f) for f in flag])
            cells.append([point(f) for f in flag])
    return build_complex(tops, np.array(coords), cell_coords=np.array(cells))


def winding_numbers(K: SimplicialComplex, z: Chain) -> np.ndarray:
    """Integer winding vector of a 1-cycle on a periodic mesh.

    Sums edge displacements measured inside top cells and expresses the
    total in the period basis.
    """
    if K.periods is None:
        raise ComplexError("winding numbers need a periodic mesh")
    disp = np.zeros((K.count(1), K.cell_coords.shape[2]))
    for top, cell in zip(K.simplices[K.dim], K.cell_coords):
        for a, b in combinations(range(K.dim + 1), 2):
            disp[K.index((top[a], top[b]))] = cell[b] - cell[a]
    total = z.coeffs.astype(float) @ disp
    w = np.linalg.lstsq(K.periods.T, total, rcond=None)[0]
    return np.rint(w).astype(np.int64)


def axis_cocycle_basis(K: SimplicialComplex) -> list:
    """Integer 1-cocycles measuring winding along each period.

    Requires a torus-like mesh (b_1 equal to the number of periods, winding
    map unimodular); the resulting lattice basis is dual to the axis loops.
    """
    from .homology import dual_cocycle_basis, homology
    from .snf import integer_inverse

    h = homology(K, 1)
    W = np.array([winding_numbers(K, z) for z in h.free_reps]).reshape(h.betti, -1)
    if W.shape[0] != W.shape[1]:
        raise ComplexError("mesh is not torus-like: b1 differs from the number of periods")
    reps = np.array([z.coeffs for z in h.free_reps])
    # cycles with winding e_i: rows of W^{-1} applied to the representatives
    B = integer_inverse(W).astype(np.int64)
    cycles = [Chain(1, B[i] @ reps) for i in range(h.betti)]
    return dual_cocycle_basis(K, 1, cycles)
