"""How densely small chains fill the Jacobi torus.

Samples Jacobi points of random small 1-chains on a flat torus and reports
their covering radius and the subgroup they generate.  On an 8x8 grid the
image is the finite subgroup (Z/8)^2.
"""
from abelgerbe import axis_cocycle_basis, build_hodge, generate_flat_torus, jacobi_scan

K = generate_flat_torus(2, 8)
hs = build_hodge(K, cocycle_bases={1: axis_cocycle_basis(K)})
rep = jacobi_scan(K, hs, 0, budget=5000, seed=0)
for key in ("samples", "covering_radius", "closure_size", "closure_covering_radius"):
    print(f"{key}: {rep[key]}")
print("histogram of the first coordinate:", rep["histograms"][0])
