"""Command-line driver: ``bargmann {classify,verify,counterexample,matrix}``.

Exit codes
----------
classify        0 decided, 2 BoundaryUnknown, 1 parse/config error
verify          0 pass, 1 fail or error, 3 empty exactness window
counterexample  0 observed verdict matches prediction, 1 otherwise
matrix          0 written, 1 error
"""

from __future__ import annotations

import argparse
import sys

from . import counterexamples as cx
from . import operators as ops
from . import verify as vf
from .fock import as_weight
from .reports import ConfigError, dumps, envelope, parse_grid, read_config_file, resolve_config, write_atomic
from .symbols import (
    FockVerdict, LambdaVerdict, SymbolSyntaxError, classify_growth, parse_complex, parse_symbol,
)

DEFAULT_TOL = {"remark5": 1e-12}


class CliError(Exception):
    def __init__(self, message: str, code: int = 1):
        super().__init__(message)
        self.code = code


def _common(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("run configuration")
    g.add_argument("--r", type=float, default=None, help="Gaussian weight (default 1)")
    g.add_argument("--N", type=int, default=None, help="truncation degree (default 64)")
    g.add_argument("--tol", type=float, default=None)
    g.add_argument("--grid", type=str, default=None, help="comma-separated complex points")
    g.add_argument("--radial-nodes", dest="radial_nodes", type=int, default=None)
    g.add_argument("--angles", type=int, default=None)
    g.add_argument("--format", choices=("json", "csv"), default=None)
    g.add_argument("--out", type=str, default=None)
    g.add_argument("--config", type=str, default=None, help="file of 'key = value' lines")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bargmann", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", help="order/type and membership verdicts for a symbol")
    p.add_argument("spec")
    p.add_argument("--depth", type=int, default=400)
    _common(p)

    p = sub.add_parser("verify", help="commutation checks")
    p.add_argument("condition", choices=("thm4a", "thm4b", "thm4d", "thm4f", "remark5",
                                         "remark6", "commute"))
    p.add_argument("spec", nargs="?", help="symbol (Phi for remark6)")
    p.add_argument("--Psi", default=None, help="second symbol for remark6")
    p.add_argument("--A", dest="A", default=None, help="operator name or symbol spec")
    p.add_argument("--B", dest="B", default=None, help="operator name or symbol spec")
    p.add_argument("--family", choices=("K", "PK"), default="K")
    p.add_argument("--N-seq", dest="N_seq", default=None, help="truncations for thm4d, e.g. 16,32,64")
    _common(p)

    p = sub.add_parser("counterexample", help="domain pathologies")
    p.add_argument("name", choices=("borderline", "shifted", "gaussian", "sigma", "sigma-over-p"))
    p.add_argument("--M", type=int, default=None)
    p.add_argument("--k", type=int, default=0)
    p.add_argument("--j", type=int, default=0)
    p.add_argument("--w", default="0.6", help="complex literal for the gaussian demo")
    p.add_argument("--a", type=float, default=0.5)
    p.add_argument("--R", default=None, help="comma-separated radii")
    _common(p)

    p = sub.add_parser("matrix", help="export a truncated operator")
    p.add_argument("kind", choices=("creation", "annihilation", "q", "p", "mult", "harmonic"))
    p.add_argument("spec", nargs="?")
    p.add_argument("--Psi", default=None)
    _common(p)
    return parser


def _config(args):
    file_values = read_config_file(args.config) if args.config else {}
    flags = {k: getattr(args, k) for k in ("r", "N", "tol", "radial_nodes", "angles", "format", "out")}
    flags["grid"] = parse_grid(args.grid) if args.grid else None
    return resolve_config(file_values, flags)


def _symbol(spec, cfg, what="symbol"):
    if spec is None:
        raise CliError(f"missing {what} spec")
    return parse_symbol(spec, cfg.r)


def _operator(name, cfg):
    N, r = cfg.N, cfg.r
    if name is None:
        raise CliError("commute needs --A and --B")
    builders = {
        "creation": ops.creation_matrix,
        "annihilation": ops.annihilation_matrix,
        "q": ops.q_matrix,
        "p": ops.p_matrix,
        "identity": ops.identity_operator,
    }
    if name in builders:
        return builders[name](N, r)
    return ops.mult_matrix(parse_symbol(name, r), N, r)


def _emit(cfg, text: str) -> None:
    if cfg.out:
        write_atomic(cfg.out, text)
    else:
        sys.stdout.write(text)


def _json_only(cfg, command):
    if cfg.format != "json":
        raise CliError(f"{command} reports are JSON only")


def cmd_classify(args, cfg) -> int:
    _json_only(cfg, "classify")
    phi = _symbol(args.spec, cfg)
    rep = classify_growth(phi, cfg.r, args.depth)
    _emit(cfg, dumps(envelope("classify", cfg, {"symbol": phi.spec(), "report": rep.to_dict()})))
    unknown = (rep.lambda_verdict is LambdaVerdict.UNKNOWN or rep.fock_verdict is FockVerdict.UNKNOWN)
    return 2 if unknown else 0


def cmd_verify(args, cfg) -> int:
    _json_only(cfg, "verify")
    cond = args.condition
    tol = cfg.tol if cfg.tol is not None else DEFAULT_TOL.get(cond, 1e-8)
    N, r, grid = cfg.N, cfg.r, list(cfg.grid)

    def target():
        if args.A is not None:
            return _operator(args.A, cfg)
        return _symbol(args.spec, cfg)

    try:
        if cond == "thm4a":
            reports = [vf.check_thm4_a(target(), grid, grid, N, r, tol)]
        elif cond == "thm4b":
            reports = [vf.check_thm4_b(target(), grid, N, r, tol)]
        elif cond == "thm4d":
            Ns = [int(s) for s in args.N_seq.split(",")] if args.N_seq else [N // 4, N // 2, N]
            reports = [vf.check_thm4_d(_symbol(args.spec, cfg), grid, Ns, r, tol)]
        elif cond == "thm4f":
            reports = [vf.check_thm4_f(target(), grid, N, r, tol)]
        elif cond == "remark5":
            reports = list(vf.check_remark5(_symbol(args.spec, cfg), N, r, tol))
        elif cond == "remark6":
            Psi = _symbol(args.Psi or "poly:0", cfg)
            reports = [vf.check_harmonic(_symbol(args.spec, cfg), Psi, grid, N, r, tol)]
        else:
            A, B = _operator(args.A, cfg), _operator(args.B, cfg)
            E = vf.TestFamily(args.family, tuple(grid), N, as_weight(r))
            reports = [vf.check_commute_rel(A, B, E, tol)]
    except vf.EmptyWindowError as exc:
        sys.stderr.write(f"bargmann: {exc}\n")
        return 3
    passed = all(rep.passed for rep in reports)
    body = {"condition": cond, "tol": tol, "pass": passed,
            "reports": [rep.to_dict() for rep in reports]}
    _emit(cfg, dumps(envelope("verify", cfg, body)))
    return 0 if passed else 1


def _radii(args, default):
    return [float(s) for s in args.R.split(",")] if args.R else list(default)


def cmd_counterexample(args, cfg) -> int:
    name, r = args.name, cfg.r
    if name == "borderline":
        f, zf = cx.borderline_f(r, args.M or 10_000)
        diags = [f, zf]
        matches = (f.verdict is cx.Verdict.CONVERGES and zf.verdict is cx.Verdict.DIVERGES)
        predicted = ["Converges", "Diverges"]
    elif name == "shifted":
        d = cx.shifted_g(args.k, args.j, r, args.M or 100_000)
        diags = [d]
        predicted = [d.details["predicted"]]
        matches = d.verdict.value == predicted[0]
    elif name == "gaussian":
        rep = cx.gaussian_domain_demo(parse_complex(args.w), args.a, r, args.M or 400)
        _json_only(cfg, "gaussian")
        _emit(cfg, dumps(envelope("counterexample", cfg, {"name": name, "report": rep.to_dict(),
                                                          "matches_prediction": rep.matches_prediction})))
        return 0 if rep.matches_prediction else 1
    elif name == "sigma":
        d = cx.sigma_domain_collapse(cx.LatticeSigma(as_weight(r)), _radii(args, (2, 4, 8)))
        diags = [d]
        predicted = ["Diverges"]
        matches = d.verdict is cx.Verdict.DIVERGES
    else:
        d = cx.sigma_over_p_domain(cx.LatticeSigma(as_weight(r)), args.k, args.j,
                                   _radii(args, (2, 4, 8, 16)))
        diags = [d]
        predicted = [d.details["predicted"]]
        matches = d.verdict.value == predicted[0]
    if cfg.format == "csv":
        _emit(cfg, "".join(f"# {d.label}\n" + d.to_csv() for d in diags))
    else:
        body = {"name": name, "predicted": predicted,
                "observed": [d.verdict.value for d in diags], "matches_prediction": matches,
                "diagnostics": [d.to_dict() for d in diags]}
        _emit(cfg, dumps(envelope("counterexample", cfg, body)))
    return 0 if matches else 1


def cmd_matrix(args, cfg) -> int:
    N, r = cfg.N, cfg.r
    kind = args.kind
    if kind in ("creation", "annihilation", "q", "p"):
        T = _operator(kind, cfg)
    elif kind == "mult":
        T = ops.mult_matrix(_symbol(args.spec, cfg), N, r)
    else:
        Psi = _symbol(args.Psi, cfg, "--Psi")
        T = ops.harmonic_operator(_symbol(args.spec, cfg, "Phi"), Psi, N, r)
    if cfg.format == "csv":
        _emit(cfg, ops.to_csv(T))
    else:
        _emit(cfg, dumps(envelope("matrix", cfg, {"operator": ops.to_json_dict(T)})))
    return 0


COMMANDS = {
    "classify": cmd_classify,
    "verify": cmd_verify,
    "counterexample": cmd_counterexample,
    "matrix": cmd_matrix,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _config(args)
        return COMMANDS[args.command](args, cfg)
    except SymbolSyntaxError as exc:
        sys.stderr.write(f"bargmann: {exc}\n")
        return 1
    except CliError as exc:
        sys.stderr.write(f"bargmann: {exc}\n")
        return exc.code
    except (ConfigError, ValueError, OSError) as exc:
        sys.stderr.write(f"bargmann: {exc}\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
