"""Command-line front end.

Exit codes: 0 success, 1 usage or precondition error, 2 degenerate input.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time

import numpy as np

from .errors import DegeneracyError, TridiagError
from .kernel import BoundaryParams
from .regular import SolverOptions

SCHEMA = "tridiag/1"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def parse_complex(text: str) -> complex:
    """``a+bi`` literals (``j`` also accepted), no spaces."""
    s = str(text).strip()
    if not s or " " in s:
        raise argparse.ArgumentTypeError(f"bad complex literal {text!r}")
    if s[-1] in "iI":
        s = s[:-1] + "j"
    try:
        return complex(s)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad complex literal {text!r}") from None


def _int_list(text: str):
    try:
        return tuple(int(float(x)) for x in str(text).split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad integer list {text!r}") from None


def _cx(z) -> list:
    return [float(np.real(z)), float(np.imag(z))]


def _common(p):
    p.add_argument("--config", help="file of `key = value` lines; flags override it")
    p.add_argument("--format", choices=("json", "csv"), default=None)
    p.add_argument("--threads", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--eps", type=float, default=1e-15)
    p.add_argument("--eps-t", type=float, default=1e-14)
    p.add_argument("--max-iter", type=int, default=60)
    p.add_argument("--n-multiplier", type=int, default=6)
    p.add_argument("--output", "-o", default="-")


def _boundary(p, defaults=(0, 0, 0, 0)):
    for name, d in zip(("b0", "b1", "c0", "cm1"), defaults):
        p.add_argument(f"--{name}", type=parse_complex, default=complex(d))


def build_parser() -> argparse.ArgumentParser:
    from .experiments import DEFAULT_COMPLEX

    parser = _Parser(prog="tridispec", description="O(n) tridiagonal spectra")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    sp = sub.add_parser("spectrum", help="all eigenvalues of the canonical matrix")
    _common(sp)
    sp.add_argument("--n", type=int, required=True)
    _boundary(sp)
    sp.add_argument("--vectors", action="store_true")
    sp.add_argument("--refine-special", action="store_true")
    sp.add_argument("--iterations", type=int, default=None, help="fixed contraction steps M")

    es = sub.add_parser("error-scaling", help="max regular error vs n for M contraction steps")
    _common(es)
    _boundary(es, DEFAULT_COMPLEX)
    es.add_argument("--ns", type=_int_list, default=(50, 150, 250, 350, 450, 550))
    es.add_argument("--Ms", type=_int_list, default=(1, 2, 3, 4))

    tm = sub.add_parser("timing", help="median wall time of eigenvalue solves vs n")
    _common(tm)
    _boundary(tm, DEFAULT_COMPLEX)
    tm.add_argument("--ns", type=_int_list, default=(1000, 10000, 100000))
    tm.add_argument("--reps", type=int, default=3)

    ad = sub.add_parser("advdiff", help="advection-diffusion spectrum")
    _common(ad)
    ad.add_argument("--K", type=float, required=True)
    ad.add_argument("--n", type=int, required=True)
    ad.add_argument("--bc", choices=("dirichlet", "mixed"), default="dirichlet")
    ad.add_argument("--leading", action="store_true")

    pb = sub.add_parser("pbc", help="periodic boundary failure demonstrator")
    _common(pb)
    pb.add_argument("--r1", type=parse_complex, required=True)
    pb.add_argument("--r2", type=parse_complex, required=True)
    pb.add_argument("--side", choices=("left", "right", "both"), default="left")
    pb.add_argument("--verify-n", type=int, default=None)

    rg = sub.add_parser("region", help="rasterised failure region as CSV")
    _common(rg)
    rg.add_argument("--a-min", type=float, default=-0.2)
    rg.add_argument("--a-max", type=float, default=1.2)
    rg.add_argument("--b-min", type=float, default=-0.6)
    rg.add_argument("--b-max", type=float, default=0.6)
    rg.add_argument("--na", type=int, default=141)
    rg.add_argument("--nb", type=int, default=121)

    va = sub.add_parser("validate", help="solver vs dense oracle on random draws")
    _common(va)
    va.add_argument("--kind", choices=("real", "complex"), default="real")
    va.add_argument("--draws", type=int, default=10)
    va.add_argument("--n", type=int, default=100)
    va.add_argument("--iterations", type=int, default=None)
    return parser


def _config_tokens(path: str, parser: argparse.ArgumentParser, command: str) -> list:
    sub = parser._subparsers._group_actions[0].choices[command]
    actions = {a.dest: a for a in sub._actions}
    tokens = []
    try:
        lines = open(path).read().splitlines()
    except OSError as e:
        raise UsageError(f"cannot read config: {e}") from None
    for raw in lines:
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"config line without '=': {raw!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        dest = key.replace("-", "_")
        if dest not in actions or dest == "config":
            raise UsageError(f"unknown config key {key!r}")
        flag = actions[dest].option_strings[0]
        if isinstance(actions[dest], argparse._StoreTrueAction):
            if value.lower() in ("1", "true", "yes", "on"):
                tokens.append(flag)
        else:
            tokens.extend([flag, value])
    return tokens


def parse_args(argv):
    parser = build_parser()
    argv = list(argv)
    if argv and argv[0] in parser._subparsers._group_actions[0].choices and "--config" in argv:
        i = argv.index("--config")
        if i + 1 >= len(argv):
            raise UsageError("--config needs a path")
        path = argv[i + 1]
        rest = argv[1:i] + argv[i + 2:]
        argv = [argv[0]] + _config_tokens(path, parser, argv[0]) + rest
    args = parser.parse_args(argv)
    if args.command is None:
        raise UsageError("a subcommand is required")
    return args


def _opts(args, **kw) -> SolverOptions:
    return SolverOptions(eps=args.eps, eps_t=args.eps_t, max_iter=args.max_iter,
                         n_multiplier=args.n_multiplier, threads=args.threads, **kw)


def _csv(header, rows, comments=()) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([repr(x) if isinstance(x, float) else x for x in r])
    for c in comments:
        buf.write(f"# {c}\n")
    return buf.getvalue()


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=False) + "\n"


def cmd_spectrum(args) -> str:
    from .spectrum import solve_spectrum

    if args.n < 2:
        raise UsageError("--n must be at least 2")
    p = BoundaryParams(args.b0, args.b1, args.c0, args.cm1, args.n)
    res = solve_spectrum(p, _opts(args, vectors=args.vectors, refine_special=args.refine_special,
                                  fixed_iterations=args.iterations))
    if args.format == "csv":
        rows = []
        for e in res.to_dict(include_vectors=False)["eigenvalues"]:
            rows.append([e["re"], e["im"], e["kind"], e.get("t", ""), e.get("residual", "")])
        return _csv(["re", "im", "kind", "t", "residual"], rows)
    return _dump(res.to_dict())


def cmd_error_scaling(args) -> str:
    from .experiments import ErrorScalingConfig, error_scaling, fit_slopes

    cfg = ErrorScalingConfig((args.b0, args.b1, args.c0, args.cm1), args.ns, args.Ms, args.threads or 1)
    rows = error_scaling(cfg)
    slopes = fit_slopes(rows)
    if args.format == "json":
        return _dump({"schema": SCHEMA, "rows": [list(r) for r in rows],
                      "slopes": {str(k): v for k, v in slopes.items()}})
    return _csv(["n", "M", "max_error"], rows, [f"slope M={m}: {s:.4f}" for m, s in slopes.items()])


def cmd_timing(args) -> str:
    from .experiments import TimingConfig, loglog_slope, timing

    cfg = TimingConfig((args.b0, args.b1, args.c0, args.cm1), args.ns, args.reps, args.threads or 1,
                       _opts(args))
    rows = timing(cfg)
    slope = loglog_slope(*zip(*rows)) if len(rows) >= 2 else float("nan")
    if args.format == "json":
        return _dump({"schema": SCHEMA, "rows": [list(r) for r in rows], "slope": slope})
    return _csv(["n", "wall_time_ms"], rows, [f"slope: {slope:.4f}"])


def cmd_advdiff(args) -> str:
    from .applications import advdiff_build, advdiff_spectrum, leading_eigenvalue_asymptotic
    from .errors import NoRootInInterval

    t0 = time.perf_counter()
    sys_ = advdiff_build(args.K, args.n, args.bc)
    nu = advdiff_spectrum(sys_, _opts(args, refine_special=True))
    out = {"schema": SCHEMA, "K": args.K, "n": args.n, "bc": args.bc,
           "bound_checked": args.bc == "dirichlet" or args.K <= 0}
    if args.leading:
        out["leading"] = float(nu[0].real)
        if args.bc == "dirichlet":
            out["limit"] = -args.K ** 2 - np.pi ** 2
        elif args.K > 0:
            out["closed_form"] = -4 * args.K ** 2 / (np.exp(2 * args.K) + 1)
            try:
                out["asymptotic"] = leading_eigenvalue_asymptotic(args.K).nu
            except NoRootInInterval:
                pass
    else:
        out["eigenvalues"] = [_cx(v) for v in nu]
    if args.format == "csv":
        if args.leading:
            keys = [k for k in ("leading", "limit", "closed_form", "asymptotic") if k in out]
            return _csv(keys, [[out[k] for k in keys]])
        return _csv(["re", "im"], [[float(v.real), float(v.imag)] for v in nu])
    out["wall_time_ms"] = 1e3 * (time.perf_counter() - t0)
    return _dump(out)


def cmd_pbc(args) -> str:
    from .applications import FailureSpec, pbc_failure

    n = args.verify_n or 100
    rep = pbc_failure(FailureSpec(args.r1, args.r2, args.side, n), verify=args.verify_n is not None,
                      opts=_opts(args))
    d = {"schema": SCHEMA, **rep.to_dict()}
    if args.format == "csv":
        keys = ["region", "unstable", "predicted_re", "predicted_im"]
        return _csv(keys, [[int(rep.region), int(rep.unstable), rep.predicted.real, rep.predicted.imag]])
    return _dump(d)


def cmd_region(args) -> str:
    from .applications import failure_region_samples, region_csv

    rows = failure_region_samples(args.a_min, args.a_max, args.b_min, args.b_max, args.na, args.nb)
    if args.format == "json":
        return _dump({"schema": SCHEMA, "rows": [list(r) for r in rows]})
    return region_csv(rows)


def cmd_validate(args) -> str:
    from .experiments import oracle_check

    rows = oracle_check(args.kind, args.draws, args.n, args.seed, args.iterations)
    if args.format == "csv":
        return _csv(["draw", "max_dist", "mean_dist"], rows)
    return _dump({"schema": SCHEMA, "kind": args.kind, "n": args.n, "seed": args.seed,
                  "rows": [list(r) for r in rows], "max": max(r[1] for r in rows)})


COMMANDS = {
    "spectrum": cmd_spectrum, "error-scaling": cmd_error_scaling, "timing": cmd_timing,
    "advdiff": cmd_advdiff, "pbc": cmd_pbc, "region": cmd_region, "validate": cmd_validate,
}


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        args = parse_args(argv)
        text = COMMANDS[args.command](args)
    except UsageError as e:
        print(f"tridispec: usage: {e}", file=sys.stderr)
        return 1
    except DegeneracyError as e:
        print(f"tridispec: degenerate: {type(e).__name__}: {e}", file=sys.stderr)
        return 2
    except (TridiagError, ValueError) as e:
        print(f"tridispec: error: {type(e).__name__}: {e}", file=sys.stderr)
        return 1
    if args.output == "-":
        sys.stdout.write(text)
    else:
        with open(args.output, "w") as fh:
            fh.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
