"""Command-line front end.

    abelgerbe generate torus --dim 2 --res 8 --out t2.json
    abelgerbe report homology --mesh t2.json
    abelgerbe abel check --mesh t2.json --cycle z.json
    abelgerbe scan --mesh t2.json --degree 0 --budget 10000 --seed 1

``--mesh`` takes a mesh file or a generator string (``torus:2:8``,
``genus:2:0``, ``sphere:2``).  ``--config FILE`` supplies any flag from a
JSON object (keys are flag names with dashes turned into underscores, plus
``command`` and ``action``); flags given on the command line win.

Exit codes: 0 success / trivial / equivalent, 1 non-trivial / inequivalent,
2 errors and invariant violations.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import abel as ab
from .errors import AbelGerbeError
from .generators import (
    axis_cocycle_basis,
    generate_flat_torus,
    generate_genus_surface,
    generate_sphere,
)
from .hodge import build_hodge
from .homology import homology, homology_report, pairing_matrix
from .meshio import chain_to_dict, read_chain, read_mesh, write_mesh
from .moduli import jacobi_scan, period_matrix_check

log = logging.getLogger("abelgerbe")

EXIT_OK, EXIT_NEGATIVE, EXIT_ERROR = 0, 1, 2


@dataclass
class SessionConfig:
    """Everything needed to rerun a command; serializes to JSON."""

    command: str
    action: str | None = None
    mesh: str | None = None
    degree: int | None = None
    cycle: str | None = None
    cycle2: str | None = None
    chain: str | None = None
    tol: float = ab.INTEGRALITY_TOL
    mass: str = "whitney"
    profile: str = "deterministic"
    basis: str = "auto"
    seed: int = 0
    budget: int = 0
    out: str | None = None
    json: bool = False
    dim: int | None = None
    res: int | None = None
    g: int | None = None
    extra: dict = field(default_factory=dict)

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True)



def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON file mirroring the flags")
    common.add_argument("--json", action="store_const", const=True, default=None,
                        help="machine-readable output")
    common.add_argument("--save-config", help="write the resolved session config here")
    common.add_argument("--mass", choices=["whitney", "lumped"], default=None)
    common.add_argument("--profile", choices=["deterministic", "fast"], default=None)
    common.add_argument("--basis", choices=["auto", "snf", "axes"], default=None,
                        help="lattice basis in degree 1 (axes: winding numbers on tori)")

    parser = argparse.ArgumentParser(prog="abelgerbe", parents=[common],
                                     description="Abel gerbes on triangulated manifolds")
    sub = parser.add_subparsers(dest="command")

    gen = sub.add_parser("generate", parents=[common], help="write a fixture mesh")
    gen.add_argument("action", nargs="?", choices=["torus", "genus", "sphere"])
    gen.add_argument("--dim", type=int, default=None)
    gen.add_argument("--res", type=int, default=None)
    gen.add_argument("--g", type=int, default=None)
    gen.add_argument("--out", default=None)

    rep = sub.add_parser("report", parents=[common], help="homology / hodge / period reports")
    rep.add_argument("action", nargs="?", choices=["homology", "hodge", "periods"])
    rep.add_argument("--mesh", default=None)
    rep.add_argument("--degree", type=int, default=None)

    abl = sub.add_parser("abel", parents=[common], help="linear equivalence and Jacobi points")
    abl.add_argument("action", nargs="?", choices=["check", "jacobi", "equiv"])
    abl.add_argument("--mesh", default=None)
    abl.add_argument("--cycle", default=None)
    abl.add_argument("--cycle2", default=None)
    abl.add_argument("--chain", default=None)
    abl.add_argument("--tol", type=float, default=None)

    scn = sub.add_parser("scan", parents=[common], help="sample the Jacobi image")
    scn.add_argument("--mesh", default=None)
    scn.add_argument("--degree", type=int, default=None)
    scn.add_argument("--budget", type=int, default=None)
    scn.add_argument("--seed", type=int, default=None)
    return parser


def _resolve(ns: argparse.Namespace) -> SessionConfig:
    values = {}
    if ns.config:
        values.update(json.loads(Path(ns.config).read_text()))
    for key, val in vars(ns).items():
        if val is not None and key not in ("config", "save_config"):
            values[key] = val
    if not values.get("command"):
        raise AbelGerbeError("no command given (on the command line or in --config)")
    known = set(SessionConfig.__dataclass_fields__)
    extra = {k: v for k, v in values.items() if k not in known}
    cfg = SessionConfig(**{k: v for k, v in values.items() if k in known})
    cfg.extra.update(extra)
    return cfg


# -- output ------------------------------------------------------------------


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    return obj


def _emit(cfg: SessionConfig, payload: dict) -> None:
    payload = _plain(payload)
    if cfg.json:
        print(json.dumps(payload, indent=2))
        return
    for key, val in payload.items():
        if isinstance(val, list) and val and isinstance(val[0], dict):
            print(f"{key}:")
            for item in val:
                print("  " + ", ".join(f"{k}={_fmt(v)}" for k, v in item.items()))
        else:
            print(f"{key}: {_fmt(val)}")


def _fmt(val) -> str:
    if isinstance(val, float):
        return repr(val)
    if isinstance(val, list):
        return "[" + ", ".join(_fmt(v) for v in val) + "]"
    return str(val)


# -- pipeline pieces ---------------------------------------------------------


def load_mesh(source: str):
    """Mesh from a file path or a generator string like ``torus:2:8``."""
    if source is None:
        raise AbelGerbeError("--mesh is required")
    path = Path(source)
    if path.exists():
        return read_mesh(path)
    name, *params = source.split(":")
    nums = [int(p) for p in params]
    if name == "torus":
        dim, res = (nums + [2, 4][len(nums):])[:2]
        return generate_flat_torus(dim, res)
    if name == "genus":
        g, res = (nums + [2, 0][len(nums):])[:2]
        return generate_genus_surface(g, res)
    if name == "sphere":
        return generate_sphere(nums[0] if nums else 2)
    raise AbelGerbeError(f"mesh {source!r} is neither a file nor a generator string")


def _hodge(cfg: SessionConfig, K):
    bases = {}
    if cfg.basis == "axes" or (cfg.basis == "auto" and K.periods is not None):
        try:
            bases[1] = axis_cocycle_basis(K)
        except AbelGerbeError:
            if cfg.basis == "axes":
                raise
    return build_hodge(K, mass=cfg.mass, profile=cfg.profile, cocycle_bases=bases)


def cmd_generate(cfg: SessionConfig) -> int:
    if cfg.action == "torus":
        K = generate_flat_torus(cfg.dim or 2, cfg.res if cfg.res is not None else 4)
    elif cfg.action == "genus":
        K = generate_genus_surface(cfg.g if cfg.g is not None else 2, cfg.res or 0)
    elif cfg.action == "sphere":
        K = generate_sphere(cfg.dim or 2)
    else:
        raise AbelGerbeError("generate needs one of torus, genus, sphere")
    if not cfg.out:
        raise AbelGerbeError("generate needs --out")
    write_mesh(K, cfg.out)
    _emit(cfg, {"mesh": cfg.out, "dimension": K.dim,
                "counts": [K.count(k) for k in range(K.dim + 1)],
                "euler_characteristic": K.euler_characteristic()})
    return EXIT_OK


def cmd_report(cfg: SessionConfig) -> int:
    K = load_mesh(cfg.mesh)
    degrees = range(K.dim + 1) if cfg.degree is None else [cfg.degree]
    if cfg.action == "homology":
        rep = homology_report(K, degrees)
        rep["betti"] = [d["betti"] for d in rep["degrees"]]
        _emit(cfg, rep)
        return EXIT_OK
    hs = _hodge(cfg, K)
    if cfg.action == "hodge":
        rep = hs.report()
        rep["degrees"] = [r for r in rep["degrees"] if r["degree"] in degrees]
        _emit(cfg, rep)
        return EXIT_OK
    if cfg.action == "periods":
        out = {"degrees": []}
        ok = True
        for k in degrees:
            chk = period_matrix_check(K, hs, k)
            ok &= chk["ok"]
            P = pairing_matrix(K, k, hs.cocycles(k), hs.cocycles(K.dim - k))
            out["degrees"].append({"degree": k, "matrix": chk["matrix"],
                                   "max_error": chk["max_error"], "ok": chk["ok"],
                                   "pairing": P, "pairing_det": int(round(np.linalg.det(P)))
                                   if P.size else 1})
        out["ok"] = ok
        _emit(cfg, out)
        return EXIT_OK if ok else EXIT_ERROR
    raise AbelGerbeError("report needs one of homology, hodge, periods")


def cmd_abel(cfg: SessionConfig) -> int:
    K = load_mesh(cfg.mesh)
    hs = _hodge(cfg, K)
    if cfg.action == "jacobi":
        if cfg.chain:
            Gamma = read_chain(K, cfg.chain)
        elif cfg.cycle:
            Z = read_chain(K, cfg.cycle)
            Gamma = homology(K, Z.degree).bounding_chain(Z)
        else:
            raise AbelGerbeError("abel jacobi needs --chain or --cycle")
        J = ab.jacobi_vector(K, hs, Gamma)
        _emit(cfg, {"degree": Gamma.degree, "jacobi": J, "point": np.mod(J, 1.0),
                    "chain": chain_to_dict(K, Gamma)["terms"]})
        return EXIT_OK
    if not cfg.cycle:
        raise AbelGerbeError(f"abel {cfg.action} needs --cycle")
    Z = read_chain(K, cfg.cycle)
    if cfg.action == "check":
        Gamma = read_chain(K, cfg.chain) if cfg.chain else None
        v = ab.is_linearly_trivial(K, hs, Z, Gamma, tol=cfg.tol)
    elif cfg.action == "equiv":
        if not cfg.cycle2:
            raise AbelGerbeError("abel equiv needs --cycle2")
        v = ab.lin_equiv(K, hs, Z, read_chain(K, cfg.cycle2), tol=cfg.tol)
    else:
        raise AbelGerbeError("abel needs one of check, jacobi, equiv")
    cert = v.certificate()
    if v.bounding_chain is not None:
        cert["bounding_chain"] = chain_to_dict(K, v.bounding_chain)["terms"]
    _emit(cfg, cert)
    return EXIT_OK if v.trivial else EXIT_NEGATIVE


def cmd_scan(cfg: SessionConfig) -> int:
    K = load_mesh(cfg.mesh)
    hs = _hodge(cfg, K)
    d = 0 if cfg.degree is None else cfg.degree
    log.info("scan seed %d", cfg.seed)
    rep = jacobi_scan(K, hs, d, cfg.budget, seed=cfg.seed)
    _emit(cfg, rep)
    return EXIT_OK


COMMANDS = {"generate": cmd_generate, "report": cmd_report, "abel": cmd_abel, "scan": cmd_scan}


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(name)s: %(message)s")
    parser = _parser()
    ns = parser.parse_args(argv)
    try:
        cfg = _resolve(ns)
        if ns.save_config:
            Path(ns.save_config).write_text(cfg.to_json())
        return COMMANDS[cfg.command](cfg)
    except (AbelGerbeError, OSError, ValueError, KeyError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
