"""Linear equivalence of point pairs on a flat torus.

On a flat torus the harmonic 1-forms are the constant forms, so the Jacobi
point of p - q is the displacement from q to p in the lattice basis of the
period axes.  Two distinct grid points are never equivalent.
"""
import numpy as np

from abelgerbe import axis_cocycle_basis, build_hodge, generate_flat_torus, lin_equiv
from abelgerbe.complex import Chain
from abelgerbe.generators import torus_vertex

RES = 8
K = generate_flat_torus(2, RES)
hs = build_hodge(K, cocycle_bases={1: axis_cocycle_basis(K)})


def point(idx):
    c = np.zeros(K.count(0), dtype=np.int64)
    c[torus_vertex(RES, idx)] = 1
    return Chain(0, c)


for p, q in [((3, 0), (0, 0)), ((5, 7), (1, 2)), ((4, 4), (4, 4))]:
    v = lin_equiv(K, hs, point(p), point(q))
    frac = np.mod(v.jacobi, 1.0) if v.jacobi is not None else None
    expected = np.mod((np.array(p) - np.array(q)) / RES, 1.0)
    print(f"p={p} q={q}: equivalent={v.trivial}  Jacobi mod 1={frac}  grid displacement={expected}")
