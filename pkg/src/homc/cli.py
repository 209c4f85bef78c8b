"""Command-line front end.

Exit codes: 0 success, 1 a requested property check failed, 2 usage or input error.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import analysis, characterize, constructions, solvers
from .errors import HomcError
from .tensor_core import TransitionTensor, tensor_from_json, tensor_to_json, validate

MAX_GRID_N = 5

RECIPES = {
    "base": "all columns f_k; unique stationary vector f_k",
    "two_points": "stationary set {e_1, e_2}",
    "k_points": "stationary set {e_1, ..., e_k}",
    "n_plus_1_points": "stationary set {e_1, ..., e_n, f_n}",
    "face": "stationary set conv{e_1, ..., e_k}",
    "disconnected": "stationary set {f_n} ∪ conv{e_1, ..., e_k}",
}


class UsageError(Exception):
    pass


@dataclass
class CliConfig:
    mode: str | None = None
    tol: float = 1e-12
    seed: int = 0
    restarts: int = 256
    resolution: int = 100
    output: str | None = None

    def __post_init__(self):
        if self.tol <= 0:
            raise UsageError("--tol must be positive")
        if self.restarts < 1:
            raise UsageError("--restarts must be >= 1")
        if self.resolution < 1:
            raise UsageError("--resolution must be >= 1")
        if self.mode not in (None, "float", "rational"):
            raise UsageError(f"unknown mode {self.mode}")


def _add_common(p: argparse.ArgumentParser, suppress: bool) -> None:
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    p.add_argument("--mode", choices=("float", "rational"), default=d(None))
    p.add_argument("--tol", type=float, default=d(1e-12))
    p.add_argument("--seed", type=int, default=d(0))
    p.add_argument("--restarts", type=int, default=d(256))
    p.add_argument("--resolution", type=int, default=d(100))
    p.add_argument("--output", "-o", default=d(None))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="homc", description="Stationary vectors of higher-order Markov chains.")
    _add_common(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True)

    con = sub.add_parser("construct", help="build a tensor and write canonical JSON")
    csub = con.add_subparsers(dest="recipe", required=True)
    t1 = csub.add_parser("theorem1", help="universal second-order chain from a symmetric v")
    t1.add_argument("--n", type=int, required=True)
    t1.add_argument("--v", required=True, help='rows separated by ";", entries by ",", e.g. "0,1/2;1/2,0"')
    for name, helptext in (("theorem2", "second-order recipe"), ("theorem4", "recipe of any order")):
        t = csub.add_parser(name, help=helptext)
        t.add_argument("--n", type=int, required=True)
        t.add_argument("--k", type=int, required=True)
        t.add_argument("--variant", required=True,
                       choices=list(dict.fromkeys([v.replace("_", "-") for v in constructions.VARIANTS]
                                                   + list(constructions.VARIANTS))))
        if name == "theorem4":
            t.add_argument("--m", type=int, required=True)
    li = csub.add_parser("lift", help="raise the order by one: [P | ... | P]")
    li.add_argument("--input", required=True)
    pe = csub.add_parser("permute", help="permute columns within monomial classes")
    pe.add_argument("--input", required=True)
    g = pe.add_mutually_exclusive_group(required=True)
    g.add_argument("--perm", help="new column order as 1-based positions, comma separated")
    g.add_argument("--random", action="store_true", help="random within-class permutation (uses --seed)")
    co = csub.add_parser("combine", help="convex combination of tensors")
    co.add_argument("--input", nargs="+", required=True)
    co.add_argument("--weights", required=True, help='comma separated, e.g. "1/2,1/2"')
    for p in (t1, li, pe, co) + tuple(csub.choices[n] for n in ("theorem2", "theorem4")):
        _add_common(p, suppress=True)

    ch = sub.add_parser("check", help="validate and test properties of a tensor")
    ch.add_argument("--input", required=True)
    ch.add_argument("--universal", action="store_true")
    ch.add_argument("--theorem1", action="store_true", help="recognise the universal second-order form")
    ch.add_argument("--irreducible", action="store_true")

    so = sub.add_parser("solve", help="find stationary vectors")
    so.add_argument("--input", required=True)
    so.add_argument("--closed-form", action="store_true", help="two-state second-order closed form")
    so.add_argument("--max-iter", type=int, default=10_000)
    so.add_argument("--damping", type=float, default=solvers.DEFAULT_DAMPING)
    so.add_argument("--cluster-radius", type=float, default=solvers.DEFAULT_CLUSTER_RADIUS)

    en = sub.add_parser("enumerate", help="grid scan of the simplex for stationary vectors")
    en.add_argument("--input", required=True)
    en.add_argument("--expect", help="description JSON to verify against")
    en.add_argument("--samples", type=int, default=100)

    ve = sub.add_parser("verify", help="check a claimed stationary set")
    ve.add_argument("--input", required=True)
    ve.add_argument("--expect", required=True)
    ve.add_argument("--samples", type=int, default=100)

    for p in (ch, so, en, ve):
        _add_common(p, suppress=True)
    return parser


# ----------------------------------------------------------------------------

def _parse_number(tok: str, mode: str):
    tok = tok.strip()
    return Fraction(tok) if mode == "rational" else float(Fraction(tok))


def _parse_matrix(text: str, mode: str) -> np.ndarray:
    rows = [r for r in text.split(";") if r.strip()]
    return np.array([[_parse_number(t, mode) for t in r.split(",")] for r in rows],
                    dtype=object if mode == "rational" else float)


def _read_json(path: str) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read {path}: {exc}") from None


def _read_tensor(path: str) -> TransitionTensor:
    return tensor_from_json(_read_json(path))


def _emit(payload: dict, cfg: CliConfig) -> None:
    text = json.dumps(payload, indent=1) + "\n"
    if cfg.output:
        Path(cfg.output).write_text(text)
    else:
        sys.stdout.write(text)


def _cmd_construct(args, cfg: CliConfig) -> int:
    mode = cfg.mode or "rational"
    if args.recipe == "theorem1":
        v = _parse_matrix(args.v, mode)
        if v.shape != (args.n, args.n):
            raise UsageError(f"--v has shape {v.shape}, expected ({args.n}, {args.n})")
        P = characterize.build_theorem1(characterize.ThmOneParams(v), mode)
        note = "theorem1: universal second-order chain (every vector stationary)"
    elif args.recipe in ("theorem2", "theorem4"):
        m = 2 if args.recipe == "theorem2" else args.m
        spec = constructions.ConstructionSpec(args.n, m, args.k, args.variant)
        P = constructions.build_construction(spec, mode)
        note = f"{args.recipe} {spec.variant} (n={spec.n}, m={spec.m}, k={spec.k}): {RECIPES[spec.variant]}"
    elif args.recipe == "lift":
        P = constructions.lift(_read_tensor(args.input))
        note = "lift: [P | ... | P], order raised by one"
    elif args.recipe == "permute":
        src = _read_tensor(args.input)
        if args.random:
            perm = constructions.random_class_permutation(src.n, src.m, np.random.default_rng(cfg.seed))
        else:
            perm = [int(t) for t in args.perm.split(",")]
        P = constructions.permute_within_classes(src, perm)
        note = "permute: columns rearranged within monomial classes"
    else:
        tensors = [_read_tensor(p) for p in args.input]
        weights = [_parse_number(t, "rational") for t in args.weights.split(",")]
        if any(T.mode == "float" for T in tensors) or mode == "float":
            weights = [float(w) for w in weights]
        P = constructions.convex_combine(tensors, weights)
        note = "combine: convex combination"
    if cfg.mode:
        P = P.to_mode(cfg.mode)
    print(note, file=sys.stderr)
    _emit(tensor_to_json(P), cfg)
    return 0


def _cmd_check(args, cfg: CliConfig) -> int:
    P = _read_tensor(args.input)
    if cfg.mode:
        P = P.to_mode(cfg.mode)
    violations = validate(P, cfg.tol)
    out: dict = {"valid": not violations, "violations": [str(v) for v in violations]}
    ok = not violations
    if args.universal:
        cert = characterize.is_universally_stationary(P, cfg.tol)
        out["universal"] = cert.to_json()
        ok &= cert.universal
    if args.theorem1:
        if P.m != 2:
            raise UsageError("--theorem1 needs a second-order tensor (m = 2)")
        res = characterize.is_theorem1_form(P, cfg.tol)
        if isinstance(res, characterize.ThmOneParams):
            out["theorem1"] = {"match": True, "v": [[str(x) for x in row] for row in res.v]}
        else:
            out["theorem1"] = {"match": False, "mismatch": res.to_json()}
            ok = False
    if args.irreducible:
        irr = characterize.is_irreducible(P)
        out["irreducible"] = irr.to_json()
        ok &= irr.irreducible
    out["verdict"] = "pass" if ok else "fail"
    _emit(out, cfg)
    return 0 if ok else 1


def _cmd_solve(args, cfg: CliConfig) -> int:
    P = _read_tensor(args.input)
    if args.closed_form:
        if (P.n, P.m) != (2, 2):
            raise UsageError(f"--closed-form needs n = 2 and m = 2, got n = {P.n}, m = {P.m}")
        er = analysis.restrict_to_edge(P, 1, 2)
        sol = er.solve()
        if sol.kind == "interval_all":
            summary = f"case {sol.case_label}: all of [0,1]"
        else:
            summary = f"case {sol.case_label}: x in {{{', '.join(f'{float(r):.12g}' for r in sol.roots)}}}"
        payload = sol.to_json() | {"summary": summary, "parameters": er.to_json(),
                                   "points": [[float(r), 1 - float(r)] for r in sol.roots]}
        print(summary, file=sys.stderr)
        _emit(payload, cfg)
        return 0
    rep = solvers.multi_start_solve(P, cfg.restarts, cfg.seed, cfg.tol, args.max_iter,
                                    args.cluster_radius, args.damping)
    _emit(rep.to_json(), cfg)
    return 0


def _load_description(path: str) -> analysis.StationaryDescription:
    try:
        return analysis.StationaryDescription.from_json(_read_json(path))
    except KeyError as exc:
        raise UsageError(f"description is missing field {exc}") from None


def _cmd_enumerate(args, cfg: CliConfig) -> int:
    P = _read_tensor(args.input)
    if P.n > MAX_GRID_N:
        raise UsageError(f"grid enumeration supports n <= {MAX_GRID_N}; got n = {P.n}")
    pts = solvers.enumerate_stationary_grid(P, cfg.resolution, refine_tol=cfg.tol)
    out: dict = {"resolution": cfg.resolution, "count": len(pts), "points": [list(map(float, p)) for p in pts]}
    code = 0
    if args.expect:
        desc = _load_description(args.expect)
        rep = analysis.verify_description(P, desc, args.samples, cfg.seed, cfg.tol)
        out["verification"] = rep.to_json()
        code = 0 if rep.verdict else 1
    _emit(out, cfg)
    return code


def _cmd_verify(args, cfg: CliConfig) -> int:
    P = _read_tensor(args.input)
    rep = analysis.verify_description(P, _load_description(args.expect), args.samples, cfg.seed, cfg.tol)
    _emit(rep.to_json(), cfg)
    return 0 if rep.verdict else 1


COMMANDS = {"construct": _cmd_construct, "check": _cmd_check, "solve": _cmd_solve,
            "enumerate": _cmd_enumerate, "verify": _cmd_verify}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = CliConfig(args.mode, args.tol, args.seed, args.restarts, args.resolution, args.output)
        return COMMANDS[args.command](args, cfg)
    except (UsageError, HomcError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
