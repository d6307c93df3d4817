"""Command-line front end: verification runs, Gram determinants, reports, cache."""

from __future__ import annotations

import argparse
import hashlib
import io
import json
import os
import re
import sys
import tempfile
from fractions import Fraction
from typing import List, Optional, TextIO, Tuple

from . import __version__

RATIONAL = re.compile(r"-?\d+(/\d+)?")
TSV_HEADER = "k\tlhs\trhs\tmatch"


def parse_rational(text: str) -> Fraction:
    if not RATIONAL.fullmatch(text):
        raise argparse.ArgumentTypeError(f"not an exact rational p/q: {text!r}")
    value = Fraction(text)
    return value


def parse_int(text: str) -> int:
    if not re.fullmatch(r"-?\d+", text):
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    return int(text)


def _format_rat(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


# -- report emission ---------------------------------------------------------------------

def _as_dict(report) -> dict:
    return report if isinstance(report, dict) else report.to_dict()


def emit_report(reports: List, fmt: str, sink: TextIO) -> None:
    """Deterministic output: JSON with sorted keys, or TSV coefficient tables."""
    dicts = [_as_dict(r) for r in reports]
    if fmt == "json":
        sink.write(json.dumps({"results": dicts}, sort_keys=True, separators=(",", ":")))
        sink.write("\n")
        return
    if fmt != "tsv":
        raise ValueError(f"unknown format {fmt!r}")
    sink.write(TSV_HEADER + "\n")
    for d in dicts:
        if len(dicts) > 1:
            sink.write(f"# {d.get('id', '')} {json.dumps(d.get('params', {}), sort_keys=True)}\n")
        if "rows" in d:
            for r in d["rows"]:
                sink.write(f"{r['k']}\t{r['lhs']}\t{r['rhs']}\t{'1' if r['match'] else '0'}\n")
        else:
            for key in sorted(d):
                sink.write(f"{key}\t{json.dumps(d[key], sort_keys=True, separators=(',', ':'))}\t\t\n")


# -- cache -----------------------------------------------------------------------------------

def cache_dir(flag: Optional[str]) -> Optional[str]:
    return flag or os.environ.get("VERMAFORGE_CACHE") or None


def cache_key(subcommand: str, params: dict) -> str:
    blob = json.dumps([subcommand, params, __version__], sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()


def cache_load(directory: str, key: str) -> Optional[Tuple[int, str]]:
    path = os.path.join(directory, key + ".json")
    try:
        with open(path) as fh:
            entry = json.load(fh)
    except (OSError, ValueError):
        return None
    if entry.get("version") != __version__:
        return None
    return int(entry["code"]), entry["output"]


def cache_store(directory: str, key: str, code: int, output: str) -> None:
    os.makedirs(directory, exist_ok=True)
    entry = json.dumps({"version": __version__, "code": code, "output": output}, sort_keys=True)
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(entry)
        os.replace(tmp, os.path.join(directory, key + ".json"))
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


# -- subcommands ------------------------------------------------------------------------------

def run_verify(args) -> Tuple[int, List]:
    from .identities import parse_id, verify
    name, params = parse_id(args.identity)
    for key in ("n", "l", "k"):
        value = getattr(args, key, None)
        if value is not None:
            params[key] = value
    rep = verify(name, args.order, params)
    return (0 if rep.passed else 1), [rep]


def run_verify_all(args) -> Tuple[int, List]:
    from .identities import load_manifest, verify_all
    reports = verify_all(load_manifest(args.manifest))
    return (0 if all(r.passed for r in reports) else 1), reports


def run_shapovalov(args) -> Tuple[int, List]:
    from .glmod import AlgebraContext, gram
    rep = gram(AlgebraContext(args.n), args.level)
    return 0, [rep.to_dict()]


def run_singular(args) -> Tuple[int, List]:
    from .glmod import AlgebraContext, det_element, is_singular, singular_vectors
    mu = args.mu
    out = {"n": args.n, "mu": _format_rat(mu), "vectors": []}
    code = 0
    if mu.denominator == 1:
        for name, p, q in singular_vectors(AlgebraContext(max(args.n, 1)), int(mu)):
            ctx = AlgebraContext(args.n)
            ok = is_singular(ctx, det_element(ctx, p) ** q, int(mu))
            out["vectors"].append({"name": name, "level": p * p * q, "singular": ok})
            if not ok:
                code = 1
    return code, [out]


def run_jantzen(args) -> Tuple[int, List]:
    from .glmod import AlgebraContext, jantzen_report
    ctx = AlgebraContext(args.n)
    reports = [jantzen_report(ctx, args.a, level).to_dict() for level in range(1, args.max_level + 1)]
    return (0 if all(r["consistent"] for r in reports) else 1), reports


def run_gvm(args) -> Tuple[int, List]:
    from .exact import Poly
    from .ulambda import GVMContext, gvm_gram
    chi = Poly.var("x") if args.chi_h is None else args.chi_h
    ctx = GVMContext(args.algebra, args.lam, args.beta, chi, max_level=max(args.level, 3))
    reports = []
    code = 0
    for level in range(1, args.level + 1):
        rep = gvm_gram(ctx, level)
        sym = all(rep.matrix[i][j] == rep.matrix[j][i]
                  for i in range(len(rep.matrix)) for j in range(i))
        d = rep.to_dict()
        d["symmetric"] = sym
        d["nonzero"] = not rep.det.is_zero()
        reports.append(d)
        if not sym:
            code = 1
    return code, reports


def run_eq29(args) -> Tuple[int, List]:
    from .ulambda import verify_eq29
    reports = [verify_eq29(level, args.s, args.lam) for level in range(1, args.level + 1)]
    return (0 if all(r.passed for r in reports) else 1), reports


COMMANDS = {
    "verify": run_verify,
    "verify-all": run_verify_all,
    "shapovalov": run_shapovalov,
    "singular": run_singular,
    "jantzen": run_jantzen,
    "gvm": run_gvm,
    "eq29": run_eq29,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="vermaforge", description="Exact verification of Shapovalov "
                                     "determinants, Jantzen filtrations and q-series identities.")
    parser.add_argument("--version", action="version", version=__version__)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "tsv"), default="json")
    common.add_argument("--cache-dir", default=None)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", parents=[common], help="verify one identity")
    p.add_argument("identity", help="identity id, e.g. euler10 or higher14(3)")
    p.add_argument("--order", type=parse_int, required=True)
    p.add_argument("--n", type=parse_int)
    p.add_argument("--l", type=parse_int)
    p.add_argument("--k", type=parse_int)

    p = sub.add_parser("verify-all", parents=[common], help="verify every identity in a manifest")
    p.add_argument("--manifest", default=None)

    p = sub.add_parser("shapovalov", parents=[common], help="Gram determinant of Ind_mu")
    p.add_argument("--n", type=parse_int, required=True)
    p.add_argument("--level", type=parse_int, required=True)

    p = sub.add_parser("singular", parents=[common], help="list and check singular vectors")
    p.add_argument("--n", type=parse_int, required=True)
    p.add_argument("--mu", type=parse_rational, required=True)

    p = sub.add_parser("jantzen", parents=[common], help="Jantzen filtration dimensions")
    p.add_argument("--n", type=parse_int, required=True)
    p.add_argument("--a", type=parse_int, required=True)
    p.add_argument("--max-level", type=parse_int, required=True)

    p = sub.add_parser("gvm", parents=[common], help="contravariant form of a generalized Verma module")
    p.add_argument("--algebra", choices=("gl-lambda", "hyperboloid", "cone"), required=True)
    p.add_argument("--lambda", dest="lam", type=parse_rational, default=Fraction(0))
    p.add_argument("--beta", type=parse_rational, required=True)
    p.add_argument("--chi-h", dest="chi_h", type=parse_rational, default=None)
    p.add_argument("--level", type=parse_int, default=3)

    p = sub.add_parser("eq29", parents=[common], help="determinant factorization through band matrices")
    p.add_argument("--s", type=parse_rational, required=True)
    p.add_argument("--lambda", dest="lam", type=parse_rational, required=True)
    p.add_argument("--level", type=parse_int, required=True)
    return parser


def _params(args) -> dict:
    skip = {"command", "format", "cache_dir"}
    out = {}
    for key, value in sorted(vars(args).items()):
        if key in skip:
            continue
        out[key] = _format_rat(value) if isinstance(value, Fraction) else value
    return out


def main(argv: Optional[List[str]] = None, stdout: Optional[TextIO] = None) -> int:
    stdout = stdout or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    directory = cache_dir(args.cache_dir)
    params = _params(args)
    params["format"] = args.format
    key = cache_key(args.command, params)
    if directory:
        hit = cache_load(directory, key)
        if hit is not None:
            stdout.write(hit[1])
            return hit[0]
    try:
        code, reports = COMMANDS[args.command](args)
    except (KeyError, ValueError) as exc:
        print(f"vermaforge: {exc}", file=sys.stderr)
        return 2
    buf = io.StringIO()
    emit_report(reports, args.format, buf)
    output = buf.getvalue()
    stdout.write(output)
    if directory:
        cache_store(directory, key, code, output)
    return code


if __name__ == "__main__":
    sys.exit(main())
