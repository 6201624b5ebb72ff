"""Command-line entry point: ``slicelab <subcommand> [options]``.

Exit codes: 0 success, 1 usage or input errors, 2 when a checked inequality
or theorem-regime condition fails at the requested size.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__
from .bitcore import DimensionError, TableFormatError, read_table
from .fourier import level_weight, wht
from .gowers import gowers_norm_exact, gowers_norm_mc
from .nonclassical import (
    RegimeError,
    TorusPolynomial,
    biased_rank_witness,
    correlation,
    degree,
    verify_degree,
    weight_polynomial,
)
from .slicemodel import DomainSpec, SamplerStall, dense_model_distance
from .testers import (
    decode_linear,
    gowers_test_pass_rate,
    linearity_pass_rate,
    planted_linear,
    random_slice_function,
)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _default_seed() -> int:
    try:
        return int(os.environ.get("GSL_SEED", "0"))
    except ValueError:
        raise UsageError("GSL_SEED must be an integer") from None


def _int(text: str) -> int:
    return int(text, 0)


# --- report emission --------------------------------------------------------


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, Fraction):
        return {"fraction": f"{obj.numerator}/{obj.denominator}", "float": float(obj)}
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    if isinstance(obj, np.generic):
        return _jsonable(obj.item())
    return obj


def _config(args) -> dict:
    skip = {"func", "output", "threads"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


def _json_report(args, result) -> str:
    doc = {"tool": "slicelab", "version": __version__, "config": _config(args), "result": result}
    return json.dumps(_jsonable(doc), indent=2, sort_keys=True) + "\n"


def _csv_report(args, header, rows) -> str:
    buf = io.StringIO()
    buf.write(f"# slicelab {__version__}\n")
    buf.write("# config " + json.dumps(_jsonable(_config(args)), sort_keys=True) + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _emit(args, text: str):
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)


def _fmt(args, default):
    return args.format or default


# --- slice functions --------------------------------------------------------


def _synthetic(spec: str, dim: int) -> np.ndarray:
    """``linear:S=0x3,flip=0.1,seed=1,b=0``, ``random:seed=3``, ``monomial:S=0x3``, ``constant:b=1``."""
    kind, _, rest = spec.partition(":")
    opts = {}
    for part in filter(None, rest.split(",")):
        key, eq, val = part.partition("=")
        if not eq:
            raise UsageError(f"bad synthetic option {part!r}")
        opts[key.strip()] = val.strip()
    try:
        seed = int(opts.pop("seed", "0"), 0)
        if kind == "linear":
            out = planted_linear(dim, int(opts.pop("S", "0"), 0), float(opts.pop("flip", "0")), seed,
                                 int(opts.pop("b", "0")))
        elif kind == "random":
            out = random_slice_function(dim, seed)
        elif kind == "monomial":
            mask = int(opts.pop("S", "0"), 0)
            x = np.arange(1 << dim)
            out = ((x & mask) == mask).astype(np.float64)
        elif kind == "constant":
            out = np.full(1 << dim, float(int(opts.pop("b", "0"))))
        else:
            raise UsageError(f"unknown synthetic function {kind!r}")
    except ValueError as exc:
        raise UsageError(f"bad synthetic spec {spec!r}: {exc}") from None
    if opts:
        raise UsageError(f"unused synthetic options: {', '.join(sorted(opts))}")
    return out


def _slice_function(args) -> np.ndarray:
    if args.input and args.synthetic:
        raise UsageError("give either --input or --synthetic, not both")
    if args.input:
        f = read_table(args.input)
        if args.n is not None and len(f) != 1 << args.n:
            raise UsageError(f"table dimension does not match --n {args.n}")
        return f
    if args.synthetic:
        if args.n is None:
            raise UsageError("--synthetic needs --n")
        return _synthetic(args.synthetic, args.n)
    raise UsageError("need --input or --synthetic")


# --- subcommands -------------------------------------------------------------


def cmd_fourier(args):
    f = read_table(args.input)
    spec = wht(f)
    pairs = spec.top(args.top) if args.top else [(s, spec.coeffs[s]) for s in range(len(spec.coeffs))]
    width = max(1, (spec.dim + 3) // 4)
    rows = [(f"0x{s:0{width}x}", repr(float(c))) for s, c in pairs]
    lw = level_weight(spec, args.level_weight) if args.level_weight is not None else None
    if _fmt(args, "csv") == "json":
        result = {"dim": spec.dim, "coefficients": [{"subset": s, "coefficient": c} for s, c in rows]}
        if lw is not None:
            result["level_weight"] = {"d": args.level_weight, "value": lw}
        return _json_report(args, result)
    text = _csv_report(args, ["subset", "coefficient"], rows)
    if lw is not None:
        text = text.replace("subset,coefficient", f"# level_weight d={args.level_weight} value={lw!r}\nsubset,coefficient", 1)
    return text


def _auto_mode(mode, feasible):
    if mode:
        return mode
    return "exact" if feasible else "mc"


def cmd_gowers(args):
    f = read_table(args.input)
    dim = int(np.log2(len(f)))
    mode = _auto_mode(args.mode, args.order <= 2 or dim * (args.order - 1) <= 24)
    if mode == "exact" or args.order < 3:
        est = gowers_norm_exact(f, args.order, threads=args.threads)
    else:
        est = gowers_norm_mc(f, args.order, args.samples, args.seed, threads=args.threads)
    if _fmt(args, "json") == "csv":
        e = est
        return _csv_report(args, ["s", "value", "value_pow", "mode", "samples", "seed", "ci_radius", "clipped"],
                           [[e.s, repr(e.value), repr(e.value_pow), e.mode, e.samples, e.seed, repr(e.ci_radius), e.clipped]])
    return _json_report(args, est.to_dict())


def cmd_dense_model(args):
    if args.sweep:
        dims = [int(v) for v in args.sweep.split(",") if v.strip()]
    elif args.n is not None:
        dims = [args.n]
    else:
        raise UsageError("dense-model needs --n or --sweep")
    ests = []
    for dim in dims:
        mode = _auto_mode(args.mode, args.order <= 3 or dim * (args.order - 1) <= 24)
        ests.append((dim, dense_model_distance(dim, args.k, args.order, mode, args.samples, args.seed, args.threads)))
    if _fmt(args, "csv") == "json":
        return _json_report(args, [{"2n": d, "k": args.k, **e.to_dict()} for d, e in ests])
    rows = [[d, args.k, e.s, repr(e.value), e.mode, e.samples, e.seed if e.mode != "exact" else ""] for d, e in ests]
    return _csv_report(args, ["2n", "k", "s", "value", "mode", "samples", "seed"], rows)


def cmd_test_linearity(args):
    f = _slice_function(args)
    dim = int(np.log2(len(f)))
    mode = _auto_mode(args.mode, dim <= 12)
    out = linearity_pass_rate(f, mode, args.trials, args.seed)
    result = {"outcome": out.to_dict()}
    if dim <= 24:
        dec = decode_linear(f)
        result["decoding"] = {**dec.to_dict(), "subset_hex": f"0x{dec.subset:x}"}
    return _json_report(args, result)


def cmd_test_gowers(args):
    f = _slice_function(args)
    dim = int(np.log2(len(f)))
    mode = _auto_mode(args.mode, dim * (args.d + 1) <= 26)
    out = gowers_test_pass_rate(f, args.d, mode, args.trials, args.seed)
    return _json_report(args, {"outcome": out.to_dict()})


def _read_torus(path) -> TorusPolynomial:
    return TorusPolynomial.from_fractions(read_table(path, exact=True))


def _triple(text, kind=int):
    parts = text.split(",")
    return [kind(p) for p in parts]


def cmd_nonclassical(args):
    p = None
    if args.weight_poly:
        try:
            j, d, a = _triple(args.weight_poly)
        except ValueError:
            raise UsageError("--weight-poly expects j,d,a") from None
        if args.n is None:
            raise UsageError("--weight-poly needs --n")
        p = weight_polynomial(args.n, j, d, a)
    elif args.input:
        p = _read_torus(args.input)
    result = {}
    if p is not None:
        result["polynomial"] = {"dim": p.dim, "q": p.q, "degree": degree(p),
                                "values": [str(v) for v in p.fractions()] if p.dim <= 8 else None}
    if args.verify_degree is not None:
        if p is None:
            raise UsageError("--verify-degree needs --weight-poly or --input")
        result["verify_degree"] = {"d": args.verify_degree, "holds": verify_degree(p, args.verify_degree)}
    if args.correlate:
        ftab = read_table(args.correlate[0])
        ptab = _read_torus(args.correlate[1])
        dom = DomainSpec.parse(args.domain, ptab.dim)
        rep = correlation(ftab, ptab, dom)
        result["correlation"] = {"value": rep.value, "magnitude": rep.magnitude, "domain": args.domain,
                                 "size": rep.size}
    if args.biased_rank:
        try:
            d_s, delta_s = args.biased_rank.split(",")
            d, delta = int(d_s), float(delta_s)
        except ValueError:
            raise UsageError("--biased-rank expects d,delta") from None
        if p is None:
            raise UsageError("--biased-rank needs --weight-poly or --input")
        try:
            w = biased_rank_witness(p, p.dim, d, delta)
            result["biased_rank"] = {"j": w.j, "residue_bias": w.residue_bias, "threshold": w.threshold,
                                     "slice_bias": w.slice_bias, "class_bias": w.class_bias, "profile": w.profile}
        except RegimeError as exc:
            result["biased_rank"] = {"error": str(exc), "profile": exc.profile, "threshold": exc.threshold}
            _emit(args, _json_report(args, result))
            raise
    if not result:
        raise UsageError("nothing to do; see slicelab nonclassical --help")
    return _json_report(args, result)


def cmd_selftest(args):
    from .selftest import run_selftest

    lines, ok = run_selftest(max_dim=args.max_dim)
    text = _csv_report(args, ["check", "status", "detail"], lines)
    if not ok:
        _emit(args, text)
        raise AssertionError("selftest failed")
    return text


# --- parser -------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("csv", "json"), default=None)
    common.add_argument("--output", "-o", default=None, help="report path (default: stdout)")
    common.add_argument("--threads", type=int, default=os.cpu_count() or 1,
                        help="worker cap; reports do not depend on it")
    seeded = argparse.ArgumentParser(add_help=False)
    seeded.add_argument("--seed", type=int, default=None)

    p = _Parser(prog="slicelab", description="Gowers norms, dense models and testers on the middle slice of the Boolean cube.")
    p.add_argument("--version", action="version", version=f"slicelab {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("fourier", parents=[common], help="Fourier spectrum of a table")
    s.add_argument("--input", required=True)
    s.add_argument("--level-weight", type=int, default=None, metavar="D")
    s.add_argument("--top", type=int, default=None, metavar="K")
    s.set_defaults(func=cmd_fourier)

    s = sub.add_parser("gowers", parents=[common, seeded], help="Gowers U_s norm of a table")
    s.add_argument("--input", required=True)
    s.add_argument("--order", type=int, default=2)
    s.add_argument("--mode", choices=("exact", "mc"), default=None)
    s.add_argument("--samples", type=int, default=4096)
    s.set_defaults(func=cmd_gowers)

    s = sub.add_parser("dense-model", parents=[common, seeded], help="slice vs residue-class distance")
    s.add_argument("--n", type=int, default=None, help="cube dimension 2n")
    s.add_argument("--k", type=int, default=2)
    s.add_argument("--order", type=int, default=2)
    s.add_argument("--mode", choices=("exact", "mc"), default=None)
    s.add_argument("--samples", type=int, default=4096)
    s.add_argument("--sweep", default=None, help="comma-separated list of 2n values")
    s.set_defaults(func=cmd_dense_model)

    for name, func, helptext in (("test-linearity", cmd_test_linearity, "quadruple linearity test"),
                                 ("test-gowers", cmd_test_gowers, "d-Gowers test")):
        s = sub.add_parser(name, parents=[common, seeded], help=helptext)
        s.add_argument("--n", type=int, default=None, help="cube dimension 2n")
        s.add_argument("--mode", choices=("exact", "mc"), default=None)
        s.add_argument("--trials", type=int, default=100_000)
        s.add_argument("--input", default=None)
        s.add_argument("--synthetic", default=None, help="e.g. linear:S=0x3,flip=0.1")
        if name == "test-gowers":
            s.add_argument("--d", type=int, default=2)
        s.set_defaults(func=func)

    s = sub.add_parser("nonclassical", parents=[common], help="torus-valued polynomials")
    s.add_argument("--n", type=int, default=None, help="cube dimension")
    s.add_argument("--weight-poly", default=None, metavar="J,D,A")
    s.add_argument("--input", default=None, help="torus table (dim=<m> header, dyadic values)")
    s.add_argument("--verify-degree", type=int, default=None, metavar="D")
    s.add_argument("--correlate", nargs=2, default=None, metavar=("F_TABLE", "P_TABLE"))
    s.add_argument("--domain", default="cube", help="cube | slice | residue:<k>")
    s.add_argument("--biased-rank", default=None, metavar="D,DELTA")
    s.set_defaults(func=cmd_nonclassical)

    s = sub.add_parser("selftest", parents=[common], help="exhaustive invariant suite")
    s.add_argument("--max-dim", type=int, default=8)
    s.set_defaults(func=cmd_selftest)
    return p


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # --help, --version and usage errors
        return exc.code if isinstance(exc.code, int) else 1
    try:
        if hasattr(args, "seed") and args.seed is None:
            args.seed = _default_seed()
        text = args.func(args)
    except (RegimeError, AssertionError) as exc:
        print(f"slicelab: check failed: {exc}", file=sys.stderr)
        return 2
    except (UsageError, TableFormatError, DimensionError, SamplerStall, OSError, ValueError) as exc:
        print(f"slicelab: error: {exc}", file=sys.stderr)
        return 1
    _emit(args, text)
    return 0


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
