"""Abel gerbes, Jacobi tori and integral Hodge theory on triangulated manifolds.

Integer homology comes from a Smith normal form reduction; harmonic forms
from Whitney-form mass matrices.  Together they give exact tests of linear
equivalence of cycles and coordinates on the Jacobi and Picard tori.
"""
from .abel import (
    abel_gerbe,
    is_linearly_trivial,
    jacobi_vector,
    lin_equiv,
    picard_rep,
    poincare_dual,
    solve_poisson,
    torsion_diagnostic,
)
from .complex import Chain, Cochain, SimplicialComplex, boundary, build_complex, coboundary
from .errors import AbelGerbeError
from .generators import (
    axis_cocycle_basis,
    generate_flat_torus,
    generate_genus_surface,
    generate_rp3,
    generate_sphere,
)
from .hodge import HodgeStructure, build_hodge, hodge_decompose
from .homology import cohomology, cup_product, find_bounding_chain, homology, pairing_matrix
from .moduli import (
    TorusPoint,
    jacobi_point,
    jacobi_scan,
    moduli_add,
    moduli_class,
    moduli_table,
    period_matrix_check,
    picard_to_jacobi,
)
from .snf import smith_normal_form
from .subdivision import barycentric_subdivide

__all__ = [
    "AbelGerbeError",
    "Chain",
    "Cochain",
    "HodgeStructure",
    "SimplicialComplex",
    "TorusPoint",
    "abel_gerbe",
    "axis_cocycle_basis",
    "barycentric_subdivide",
    "boundary",
    "build_complex",
    "build_hodge",
    "coboundary",
    "cohomology",
    "cup_product",
    "find_bounding_chain",
    "generate_flat_torus",
    "generate_genus_surface",
    "generate_rp3",
    "generate_sphere",
    "hodge_decompose",
    "homology",
    "is_linearly_trivial",
    "jacobi_point",
    "jacobi_scan",
    "jacobi_vector",
    "lin_equiv",
    "moduli_add",
    "moduli_class",
    "moduli_table",
    "pairing_matrix",
    "period_matrix_check",
    "picard_rep",
    "picard_to_jacobi",
    "poincare_dual",
    "smith_normal_form",
    "solve_poisson",
    "torsion_diagnostic",
]
