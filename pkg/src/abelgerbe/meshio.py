"""JSON mesh and chain files.

Mesh document: ``dimension``, ``vertices`` (coordinate arrays),
``top_simplices`` (vertex-index arrays), optional ``periods`` (lattice
vectors identifying coordinates) and optional ``cell_coords`` (per top
simplex, the cover coordinates of its vertices in the listed order).

Chain document: ``degree`` and ``terms``, a list of ``[vertex list,
integer coefficient]`` pairs; vertex order sets the sign.
"""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .complex import Chain, SimplicialComplex, build_complex
from .errors import ComplexError

__all__ = ["mesh_to_dict", "mesh_from_dict", "write_mesh", "read_mesh",
           "chain_to_dict", "chain_from_dict", "write_chain", "read_chain"]


def mesh_to_dict(K: SimplicialComplex) -> dict:
    doc = {
        "dimension": K.dim,
        "vertices": K.coords.tolist(),
        "top_simplices": [list(t) for t in K.simplices[K.dim]],
        "cell_coords": K.cell_coords.tolist(),
    }
    if K.periods is not None:
        doc["periods"] = K.periods.tolist()
    return doc


def mesh_from_dict(doc: dict) -> SimplicialComplex:
    try:
        dim = int(doc["dimension"])
        verts = doc["vertices"]
        tops = doc["top_simplices"]
    except KeyError as exc:
        raise ComplexError(f"mesh document lacks field {exc}") from None
    if any(len(t) != dim + 1 for t in tops):
        raise ComplexError(f"top simplices must have {dim + 1} vertices")
    cells = doc.get("cell_coords")
    return build_complex(
        tops,
        np.asarray(verts, dtype=float),
        periods=doc.get("periods"),
        cell_coords=None if cells is None else np.asarray(cells, dtype=float),
    )


def write_mesh(K: SimplicialComplex, path) -> None:
    Path(path).write_text(json.dumps(mesh_to_dict(K)))


def read_mesh(path) -> SimplicialComplex:
    return mesh_from_dict(json.loads(Path(path).read_text()))


def chain_to_dict(K: SimplicialComplex, chain: Chain) -> dict:
    return {"degree": chain.degree, "terms": [[list(s), c] for s, c in K.terms(chain)]}


def chain_from_dict(K: SimplicialComplex, doc: dict) -> Chain:
    degree = int(doc["degree"])
    terms = [(tuple(int(v) for v in s), int(c)) for s, c in doc.get("terms", [])]
    return K.chain(terms, degree=degree)


def write_chain(K: SimplicialComplex, chain: Chain, path) -> None:
    Path(path).write_text(json.dumps(chain_to_dict(K, chain)))


def read_chain(K: SimplicialComplex, path) -> Chain:
    return chain_from_dict(K, json.loads(Path(path).read_text()))
