"""Command-line front end.

Exit codes: 0 analysis completed (whatever the verdict), 2 bad input,
3 precondition or certificate failure (e.g. a non-contraction).
"""
from __future__ import annotations

import argparse
import ast
import math
import operator
import sys

import numpy as np

from . import analysis, catalog
from .ballmaps import (
    AffineBallMap,
    ExtremePointParams,
    degenerate_extreme_point,
    extreme_point,
    sample_dm,
)
from .bloch import build_basis
from .config import RunConfig
from .errors import NotAContractionError, PreconditionError
from .interchange import (
    DocumentError,
    dumps,
    map_from_doc,
    map_to_doc,
    matrix_from_doc,
    matrix_to_doc,
    read_document,
    write_document,
)
from .maps import apply_map, build_phi, class_membership
from .sampling import haar_orthogonal

EXIT_OK, EXIT_INPUT, EXIT_PRECONDITION = 0, 2, 3

FAMILIES = ("choi-rotation", "phi-k", "tau-k", "p-family", "witness-236")

_BINOPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul, ast.Div: operator.truediv}


class InputError(Exception):
    pass


def parse_angle(text: str) -> float:
    """Radians as a number or a small expression in ``pi``, e.g. ``-pi/3``, ``2*pi/3``."""

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return float(node.value)
        if isinstance(node, ast.Name) and node.id == "pi":
            return math.pi
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = ev(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            return _BINOPS[type(node.op)](ev(node.left), ev(node.right))
        raise ValueError

    try:
        return ev(ast.parse(text.strip(), mode="eval"))
    except (SyntaxError, ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"invalid angle {text!r} (use radians or e.g. 'pi/3')")


def _positive_int(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def _positive_float(text):
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError("must be > 0")
    return v


def _config(args) -> RunConfig:
    return RunConfig(
        seed=args.seed, starts=args.starts, probes=args.probes, output_format=args.format
    ).with_tol(args.tol)


def _emit(args, doc: dict, text_lines: list[str]) -> None:
    if args.out:
        write_document(args.out, doc)
    if args.format == "structured":
        sys.stdout.write(dumps(doc))
    else:
        print("\n".join(text_lines))


def _fmt_matrix(a: np.ndarray) -> str:
    a = np.asarray(a)
    real = np.allclose(a.imag, 0)
    rows = []
    for row in a:
        if real:
            rows.append("  ".join(f"{z.real: .6f}" for z in row))
        else:
            rows.append("  ".join(f"{z.real: .6f}{z.imag:+.6f}j" for z in row))
    return "\n".join("  " + r for r in rows)


# -- commands ---------------------------------------------------------------


def cmd_basis(args) -> int:
    basis = build_basis(args.n)
    doc = {
        "dim": basis.dim,
        "labels": ["".join(str(p) for p in lab) for lab in basis.labels],
        "generators": [matrix_to_doc(g) for g in basis.generators],
    }
    lines = [f"{basis.size} generators of SU({basis.dim})"]
    for lab, g in zip(doc["labels"], basis.generators):
        lines += [f"{lab}:", _fmt_matrix(g)]
    _emit(args, doc, lines)
    return EXIT_OK


def _affine_from_spec(spec: dict) -> tuple[AffineBallMap, int]:
    if "n" not in spec:
        raise DocumentError("map spec needs field 'n'")
    n = int(spec["n"])
    m = n * n - 1
    if "T" in spec:
        T = np.asarray(spec["T"], dtype=float)
        y = np.asarray(spec.get("y", np.zeros(m)), dtype=float)
        if T.size != m * m or y.size != m:
            raise DocumentError(f"for n={n} the spec needs T with {m * m} entries and y with {m}")
        return AffineBallMap(T.reshape(m, m), y), n
    if "extreme" in spec:
        ex = spec["extreme"]
        if "R1" in ex:
            R1 = np.asarray(ex["R1"], dtype=float).reshape(m, m)
            R2 = np.asarray(ex["R2"], dtype=float).reshape(m, m)
        else:
            rng = np.random.default_rng(int(ex.get("seed", 0)))
            R1, R2 = haar_orthogonal(m, rng), haar_orthogonal(m, rng)
        kappa, delta = float(ex["kappa"]), float(ex.get("delta", 1.0))
        if delta == 0.0:
            return degenerate_extreme_point(kappa, R1, R2), n
        return extreme_point(ExtremePointParams(kappa, delta, R1, R2)), n
    if "sample" in spec:
        sm = spec["sample"]
        kappa = sm.get("kappa")
        return sample_dm(m, int(sm.get("seed", 0)), int(sm.get("k", 3)), kappa=kappa), n
    raise DocumentError("map spec needs one of 'T', 'extreme' or 'sample'")


def cmd_build(args) -> int:
    if args.family is None and args.spec is None:
        raise InputError("build needs a spec file or --family")
    if args.family == "witness-236":
        if not args.p or len(args.p) != 1:
            raise InputError("witness-236 needs exactly one --p value")
        W = catalog.witness_matrix(args.p[0])
        _emit(args, matrix_to_doc(W), [f"witness matrix p={args.p[0]!r}", _fmt_matrix(W)])
        return EXIT_OK
    if args.family is not None:
        phi = _family_map(args)
        member = class_membership(phi)
        doc = map_to_doc(phi, family=args.family, ball_max=member.ball_max, member=member.member)
        lines = [f"built {args.family} on M_{phi.dim}", f"member: {str(member.member).lower()} ({member.reason})"]
    else:
        amap, n = _affine_from_spec(read_document(args.spec))
        phi = build_phi(amap, n)
        cert = amap.certificate if amap.is_certified else amap.certify().certificate
        doc = map_to_doc(phi, certificate=cert)
        lines = [f"built ball-contraction map on M_{n}", f"ball certificate: {cert:.12g}"]
    _emit(args, doc, lines)
    return EXIT_OK


def _family_map(args):
    fam = args.family
    if fam == "choi-rotation":
        if args.alpha is None:
            raise InputError("choi-rotation needs --alpha")
        return catalog.choi_rotation_map(args.alpha)
    if fam in ("phi-k", "tau-k"):
        if args.n is None or args.k is None:
            raise InputError(f"{fam} needs --n and --k")
        return (catalog.phi_k_map if fam == "phi-k" else catalog.tau_k_map)(args.n, args.k)
    if fam == "p-family":
        if not args.p:
            raise InputError("p-family needs --p p0 p1 ... pn")
        return catalog.p_family_map(catalog.PMapParams(len(args.p) - 1, tuple(args.p)))
    raise InputError(f"unknown family {fam!r}")


def cmd_apply(args) -> int:
    phi = map_from_doc(read_document(args.map))
    a = matrix_from_doc(read_document(args.matrix))
    out = apply_map(phi, a)
    _emit(args, matrix_to_doc(out), [_fmt_matrix(out)])
    return EXIT_OK


def cmd_check(args) -> int:
    cfg = _config(args)
    tols = cfg.tolerances
    phi = map_from_doc(read_document(args.map))
    wanted = {name for name in ("cp", "ccp", "positive", "member") if getattr(args, name)}
    if args.all or not wanted:
        wanted = {"cp", "ccp", "positive", "member"}
    results, lines = [], []
    if "cp" in wanted:
        ok, lo = analysis.check_complete_positivity(phi, tols.psd)
        results.append({"check": "cp", "verdict": ok, "min_value": lo})
        lines.append(f"cp: {str(ok).lower()} (min Choi eigenvalue {lo:.6g})")
    if "ccp" in wanted:
        ok, lo = analysis.check_complete_copositivity(phi, tols.psd)
        results.append({"check": "ccp", "verdict": ok, "min_value": lo})
        lines.append(f"ccp: {str(ok).lower()} (min eigenvalue {lo:.6g})")
    if "positive" in wanted:
        rep = analysis.check_positivity(phi, cfg.starts, cfg.seed, cfg.probes)
        verdict = "pass" if rep.min_value >= -tols.psd else "fail"
        results.append({"check": "positive-evidence", "verdict": verdict, **rep.as_dict()})
        lines.append(f"positive-evidence: {verdict} (min <v|phi(uu*)|v> = {rep.min_value:.6g})")
    if "member" in wanted:
        mem = class_membership(phi, tols.contraction)
        results.append({"check": "member", "verdict": mem.member, "min_value": mem.ball_max, **mem.as_dict()})
        lines.append(f"member: {str(mem.member).lower()} ({mem.reason})")
    doc = {"command": "check", "results": results, "config": cfg.as_dict(), "seed": cfg.seed}
    _emit(args, doc, lines)
    return EXIT_OK


def cmd_witness(args) -> int:
    cfg = _config(args)
    if args.map is not None:
        phi = map_from_doc(read_document(args.map))
        label = args.map
    elif args.alpha is not None:
        phi = catalog.choi_rotation_map(args.alpha)
        label = f"choi-rotation alpha={args.alpha!r}"
    else:
        raise InputError("witness needs a map file or --alpha")
    if phi.dim != 3:
        raise InputError("the 9x9 witness applies to maps on M_3")
    ps = args.p or [1.0]
    results, lines = [], [f"witness test for {label}"]
    for p in ps:
        v = analysis.witness_indecomposability(phi, catalog.witness_matrix(p), cfg.tolerances.psd)
        results.append({"check": "witness", "p": p, **v.as_dict()})
        lines.append(f"p={p:g}: {v.verdict} (min eigenvalue {v.min_eigenvalue:.6g})")
    doc = {"command": "witness", "results": results, "config": cfg.as_dict(), "seed": cfg.seed}
    _emit(args, doc, lines)
    return EXIT_OK


# -- parser -----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "structured"), default="text")
    common.add_argument("--out", help="also write the result document to this file")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--starts", type=_positive_int, default=20)
    common.add_argument("--probes", type=_positive_int, default=10_000)
    common.add_argument("--tol", type=_positive_float, default=None)

    parser = argparse.ArgumentParser(prog="posmaps", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("basis", parents=[common], help="print the Gell-Mann generators of SU(n)")
    p.add_argument("--n", type=int, required=True)
    p.set_defaults(func=cmd_basis)

    p = sub.add_parser("build", parents=[common], help="construct a map from a spec file or a named family")
    p.add_argument("spec", nargs="?", help="map-spec JSON file (T/y, extreme or sample)")
    p.add_argument("--family", choices=FAMILIES)
    p.add_argument("--alpha", type=parse_angle)
    p.add_argument("--n", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--p", type=float, nargs="+")
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("apply", parents=[common], help="apply a map file to a matrix file")
    p.add_argument("map")
    p.add_argument("matrix")
    p.set_defaults(func=cmd_apply)

    p = sub.add_parser("check", parents=[common], help="run positivity analyses on a map file")
    p.add_argument("map")
    for flag in ("all", "cp", "ccp", "positive", "member"):
        p.add_argument(f"--{flag}", action="store_true")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("witness", parents=[common], help="indecomposability test with the 9x9 PPT witness")
    p.add_argument("map", nargs="?")
    p.add_argument("--alpha", type=parse_angle)
    p.add_argument("--p", type=_positive_float, action="extend", nargs="+")
    p.set_defaults(func=cmd_witness)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except NotAContractionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        if exc.ball_max is not None:
            print(f"ball_max: {exc.ball_max:.17g}", file=sys.stderr)
        return EXIT_PRECONDITION
    except (InputError, DocumentError, OSError, KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, PreconditionError):
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_PRECONDITION
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
