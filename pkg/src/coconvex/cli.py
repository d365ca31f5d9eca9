"""``coconvex`` command-line front end.

Every subcommand prints one JSON report on stdout (or only its verdict line
with ``--quiet``) and exits 0 when the operation succeeds or the checked
property holds, 1 when it fails, and 2 on usage or input errors.
"""

from __future__ import annotations

import argparse
import re
import sys
from pathlib import Path
from typing import Optional

from . import __version__
from .approx import DeviationKind, ModulusConfig, best_shape_approx, check_jackson_bound
from .domainsep import (
    check_dccp,
    check_dcp,
    strictly_separates,
    strongly_separated,
    supporting_hyperplane,
)
from .errors import CoconvexError, Infeasible, Unbounded, UnknownExample
from .funcexpr import PiecewiseFn, affine_pullback, parse_expr, parse_piecewise, to_polynomial
from .polynomial import Interval, Polynomial, inflection_points, preimage_interval, real_roots
from .report import FLOAT_FORMATS, dumps
from .shape import YPartition, in_delta2, secant_convexity_test
from .smoothness import UNIT, Mode, ModulusSpec, modulus
from .worked_examples import replication_report


class UsageError(Exception):
    pass


# -- input parsing -----------------------------------------------------------


def parse_interval(text: str) -> Interval:
    body = text.strip().strip("[]()")
    parts = [s for s in body.split(",")]
    if len(parts) != 2:
        raise UsageError(f"interval must look like [a,b]: {text!r}")
    return Interval(_number(parts[0]), _number(parts[1]))


def parse_list(text: str) -> tuple[float, ...]:
    body = text.strip().strip("[]{}()")
    return tuple(_number(s) for s in body.split(",") if s.strip())


def _number(text: str) -> float:
    try:
        return float(text)
    except ValueError:
        p = to_polynomial(parse_expr(text))
        if p.degree > 0:
            raise UsageError(f"expected a number, got {text!r}") from None
        return p.coeffs[0] if p.coeffs else 0.0


def parse_poly(text: str) -> Polynomial:
    return to_polynomial(parse_expr(text))


def load_fn(text: str, domain: Optional[Interval], base: Path = Path(".")) -> PiecewiseFn:
    """A piecewise function from ``@file``, a file path, inline pieces, or one expression."""
    text = text.strip()
    if text.startswith("@"):
        return parse_piecewise((base / text[1:]).read_text())
    path = base / text
    if ":" not in text and path.is_file():
        return parse_piecewise(path.read_text())
    if ":" in text:
        return parse_piecewise(text)
    if domain is None:
        raise UsageError(f"a single expression {text!r} needs a domain (--interval)")
    return PiecewiseFn.single(text, domain)


def read_config(path: str) -> dict[str, str]:
    """``key = value`` lines; ``#`` starts a comment."""
    p = Path(path)
    out = {}
    for n, raw in enumerate(p.read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{n}: expected 'key = value'")
        key, value = line.split("=", 1)
        out[key.strip()] = value.strip()
    out["__base__"] = str(p.parent)
    return out


class Problem:
    """Everything a DCP / DCCP / Jackson check needs, read from a config file."""

    def __init__(self, cfg: dict[str, str]):
        def need(key):
            if key not in cfg:
                raise UsageError(f"config is missing {key!r}")
            return cfg[key]

        base = Path(cfg.get("__base__", "."))
        self.domain = parse_interval(need("domain"))
        self.p = parse_poly(need("poly"))
        self.f = load_fn(need("f"), self.domain, base)
        self.f2 = load_fn(need("f2"), self.domain, base)
        self.n = int(cfg["n"]) if "n" in cfg else None
        self.y = parse_list(cfg.get("y", ""))
        self.witness = _number(cfg["witness"]) if "witness" in cfg else None
        self.x0 = _number(cfg["x0"]) if "x0" in cfg else None
        self.deviation = DeviationKind(cfg.get("deviation", "sup"))
        mode = cfg.get("mode", "replication")
        self.modulus = ModulusConfig(
            mode=mode,
            k=int(cfg.get("k", 2)),
            r=int(cfg.get("r", 2)),
            t=_number(cfg.get("t", "0.5")),
            h=_number(cfg["h"]) if "h" in cfg else None,
            interval=parse_interval(cfg["modulus_interval"]) if "modulus_interval" in cfg
            else self.domain,
            quoted_delta=_number(cfg["quoted_delta"]) if "quoted_delta" in cfg else None,
        )


def _target(args) -> tuple[object, Interval]:
    """The polynomial or piecewise function named by --poly / --fn, with its interval."""
    interval = parse_interval(args.interval) if args.interval else None
    if args.poly and args.fn:
        raise UsageError("give either --poly or --fn, not both")
    if args.poly:
        return parse_poly(args.poly), interval or Interval(-1.0, 1.0)
    if args.fn:
        f = load_fn(args.fn, interval)
        return f, interval or f.domain
    raise UsageError("need --poly or --fn")


def _need_poly(args) -> tuple[Polynomial, Interval]:
    obj, I = _target(args)
    if not isinstance(obj, Polynomial):
        p = obj.polynomial()
        if p is None:
            raise UsageError("this command needs a polynomial (--poly)")
        obj = p
    return obj, I


def _need_fn(args) -> tuple[PiecewiseFn, Interval]:
    obj, I = _target(args)
    if isinstance(obj, Polynomial):
        obj = PiecewiseFn.from_polynomial(obj, I)
    return obj, I


def _holds(ok: bool) -> tuple[int, str]:
    return (0, "holds") if ok else (1, "fails")


# -- subcommands -------------------------------------------------------------
# each returns (exit status, verdict line, report document)


def cmd_eval(args):
    obj, _ = _target(args)
    v = float(obj(args.x))
    return 0, repr(v + 0.0), {"x": args.x, "value": v}


def cmd_roots(args):
    p, I = _need_poly(args)
    roots = real_roots(p, I)
    return 0, f"{len(roots)} roots", {"poly": p, "interval": I, "roots": roots}


def cmd_inflect(args):
    p, I = _need_poly(args)
    pts = inflection_points(p, I)
    return 0, f"{len(pts)} inflection points", {"poly": p, "interval": I, "inflection_points": pts}


def cmd_preimage(args):
    p, I = _need_poly(args)
    target = parse_interval(args.target)
    parts = preimage_interval(p, target, I)
    return 0, f"{len(parts)} components", {"poly": p, "interval": I, "target": target,
                                           "components": parts}


def cmd_modulus(args):
    f, I = _need_fn(args)
    mode = Mode(args.mode)
    pulled = False
    if mode is Mode.STANDARD:
        if I != UNIT:
            f, pulled = affine_pullback(f, I), True
        spec = ModulusSpec(k=args.k, r=args.r, t=args.t)
    else:
        spec = ModulusSpec(k=args.k, r=args.r, t=args.t, mode=mode, interval=I, h_explicit=args.h)
    value = modulus(f, spec)
    doc = {"k": args.k, "r": args.r, "t": args.t, "mode": mode, "h": args.h, "interval": I,
           "pulled_back_to_unit": pulled, "value": value}
    return 0, repr(value), doc


def cmd_convexity(args):
    f, I = _target(args)
    v = secant_convexity_test(f, I, pair_count=args.pairs)
    code, line = _holds(v.holds)
    return code, line, {"interval": I, "verdict": v}


def cmd_delta2(args):
    f, I = _target(args)
    Y = YPartition(parse_list(args.y or ""), I)
    v = in_delta2(f, Y, samples=args.pairs)
    code, line = _holds(v.holds)
    return code, line, {"interval": I, "y": Y.points, "verdict": v}


def cmd_approx(args):
    f, I = _need_fn(args)
    Y = YPartition(parse_list(args.y or ""), I)
    res = best_shape_approx(f, args.n, Y, grid_size=args.grid, refine=args.refine)
    return 0, repr(res.epsilon), {"n": args.n, "y": Y.points, "result": res}


def _config(args) -> Problem:
    if not args.config:
        raise UsageError("need --config")
    return Problem(read_config(args.config))


def cmd_jackson(args):
    pb = _config(args)
    n = pb.n or max(pb.p.degree + 1, 1)
    rep = check_jackson_bound(pb.f, pb.f2, pb.p, n, pb.modulus, pb.deviation, pb.x0)
    code, line = _holds(rep.bound_holds)
    return code, f"c = {rep.c!r}", {"report": rep}


def cmd_check_dcp(args):
    pb = _config(args)
    rep = check_dcp(pb.p, pb.domain, pb.f, pb.f2, pb.modulus, t_witness=pb.witness, n=pb.n,
                    deviation_kind=pb.deviation, x0=pb.x0)
    code, line = _holds(rep.overall)
    return code, line, {"report": rep}


def cmd_check_dccp(args):
    pb = _config(args)
    Y = YPartition(pb.y, pb.domain)
    rep = check_dccp(pb.p, pb.domain, Y, pb.f, pb.f2, pb.modulus, n=pb.n,
                     deviation_kind=pb.deviation, x0=pb.x0)
    ok = rep.overall_paper and rep.overall_verified
    line = f"declared: {'holds' if rep.overall_paper else 'fails'}; " \
           f"recomputed: {'holds' if rep.overall_verified else 'fails'}"
    return (0 if ok else 1), line, {"report": rep}


def cmd_separate(args):
    p, I = _need_poly(args)
    if sum(map(bool, (args.strict, args.strong, args.support))) != 1:
        raise UsageError("choose exactly one of --strict, --strong, --support")
    if args.strict:
        if args.x is None:
            raise UsageError("--strict needs --x")
        v = strictly_separates(p, I, args.x)
        kind = "strict"
    elif args.support:
        if args.x is None or args.alpha is None:
            raise UsageError("--support needs --x and --alpha")
        v = supporting_hyperplane(p, I, args.x, args.alpha)
        kind = "support"
    else:
        if not (args.poly2 and args.interval2):
            raise UsageError("--strong needs --poly2 and --interval2")
        q, I2 = parse_poly(args.poly2), parse_interval(args.interval2)
        hbar = None
        if args.hbar:
            # the weight is written in t; the expression language only knows x
            hbar = PiecewiseFn.single(re.sub(r"\bt\b", "x", args.hbar), Interval(0.0, 1.0))
        t = None if args.t is None else (args.t if args.t == "all" else _number(args.t))
        v = strongly_separated(p, I, q, I2, hbar, t)
        kind = "strong"
    code, line = _holds(v.holds)
    return code, line, {"kind": kind, "verdict": v}


def cmd_replicate(args):
    try:
        rows, checks = replication_report(args.example)
    except UnknownExample as exc:
        raise UsageError(exc.args[0]) from None
    failed = [r.label for r in rows if not r.pass_]
    doc = {
        "example": args.example,
        "rows": [{"label": r.label, "computed": r.computed, "paper_value": r.paper_value,
                  "tolerance": r.tolerance, "pass": r.pass_, "provenance_note": r.provenance_note}
                 for r in rows],
        "diagnostics": checks,
        "failed": failed,
    }
    line = f"{len(rows) - len(failed)}/{len(rows)} rows pass"
    return (0 if not failed else 1), line, doc


COMMANDS = {
    "eval": cmd_eval,
    "roots": cmd_roots,
    "inflect": cmd_inflect,
    "preimage": cmd_preimage,
    "modulus": cmd_modulus,
    "convexity": cmd_convexity,
    "delta2": cmd_delta2,
    "approx": cmd_approx,
    "jackson": cmd_jackson,
    "check-dcp": cmd_check_dcp,
    "check-dccp": cmd_check_dccp,
    "separate": cmd_separate,
    "replicate": cmd_replicate,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--quiet", action="store_true", help="print only the verdict line")
    common.add_argument("--float-format", choices=FLOAT_FORMATS, default="shortest")

    target = argparse.ArgumentParser(add_help=False)
    target.add_argument("--poly", help="polynomial expression in x")
    target.add_argument("--fn", help="piecewise function: file, @file, or inline '[a,b]: expr; ...'")
    target.add_argument("--interval", help="[a,b]; write --interval=-3,3 when a starts with '-'")

    parser = argparse.ArgumentParser(prog="coconvex", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, *parents, help):
        return sub.add_parser(name, parents=[common, *parents], help=help)

    p = add("eval", target, help="evaluate a polynomial or piecewise function")
    p.add_argument("--x", type=float, required=True)
    add("roots", target, help="real roots in an interval")
    add("inflect", target, help="inflection points in an interval")
    p = add("preimage", target, help="preimage of a target interval")
    p.add_argument("--target", required=True, help="[lo,hi]")

    p = add("modulus", target, help="Ditzian-Totik modulus of smoothness")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--r", type=int, default=0)
    p.add_argument("--t", type=float, default=1.0)
    p.add_argument("--mode", choices=[m.value for m in Mode], default="standard")
    p.add_argument("--h", type=float, help="fixed step (replication mode)")

    for name, help in (("convexity", "secant convexity test"),
                       ("delta2", "membership in the coconvex class for given change points")):
        p = add(name, target, help=help)
        p.add_argument("--pairs", type=int, default=200)
        if name == "delta2":
            p.add_argument("--y", help="comma-separated change points, e.g. --y=-2,-1,1,2")

    p = add("approx", target, help="best uniform coconvex polynomial approximation")
    p.add_argument("--n", type=int, required=True, help="polynomials of degree <= n-1")
    p.add_argument("--y", help="comma-separated change points")
    p.add_argument("--grid", type=int, default=257)
    p.add_argument("--refine", action="store_true")

    for name, help in (("jackson", "Jackson-type constant"),
                       ("check-dcp", "convex-domain check"),
                       ("check-dccp", "coconvex-domain check")):
        p = add(name, help=help)
        p.add_argument("--config", required=True, help="key = value file")

    p = add("separate", target, help="separation predicates")
    mode = p.add_mutually_exclusive_group(required=True)
    mode.add_argument("--strict", action="store_true")
    mode.add_argument("--strong", action="store_true")
    mode.add_argument("--support", action="store_true")
    p.add_argument("--x", type=float, help="point outside (strict) or inside (support) the domain")
    p.add_argument("--alpha", type=float, help="level for --support")
    p.add_argument("--poly2")
    p.add_argument("--interval2")
    p.add_argument("--hbar", help="weight expression in t, e.g. 't' or '1 + t^2'")
    p.add_argument("--t", help="a value in [0,1] or 'all'")

    p = add("replicate", help="recompute a built-in worked example")
    p.add_argument("example", help="example1 or example2")
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        code, line, doc = COMMANDS[args.command](args)
    except (Infeasible, Unbounded) as exc:
        code, line, doc = 1, type(exc).__name__, {"error": str(exc)}
    except (UsageError, CoconvexError, ValueError, OSError, ZeroDivisionError) as exc:
        print(f"coconvex {args.command}: {exc}", file=sys.stderr)
        return 2
    if args.quiet:
        print(line)
    else:
        report = {"command": args.command, **doc, "verdict": line, "status": code}
        print(dumps(report, float_format=args.float_format))
    return code


if __name__ == "__main__":
    sys.exit(main())
