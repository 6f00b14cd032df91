"""A torsion cycle on real projective 3-space.

H_1 is Z/2: the generating loop does not bound, but twice it does, and the
linear-equivalence test reports the torsion obstruction in its certificate.
"""
from abelgerbe import build_hodge, generate_rp3, homology, is_linearly_trivial
from abelgerbe.abel import torsion_diagnostic

K = generate_rp3()
hs = build_hodge(K)
h1 = homology(K, 1)
print("H_1: betti", h1.betti, "torsion", h1.torsion)

z, order = h1.torsion_reps[0]
print("loop:", is_linearly_trivial(K, hs, z).certificate())
print("twice the loop:", is_linearly_trivial(K, hs, z * 2).certificate())
diag = torsion_diagnostic(K, hs, z)
print("order", diag["order"], "bounding chain size", len(diag["bounding_chain"].support()))
