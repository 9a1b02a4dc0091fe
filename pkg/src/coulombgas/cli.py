"""Command-line front end: subcommands, structured tables, verification report.

Every subcommand emits one table: a JSON object with a schema_version, the
resolved parameters, and a list of rows.  CSV is a lossy projection of the
same table (complex values become re/im column pairs, nested details are
dropped).  Errors of any kind are also written as a structured JSON object
on standard error, and the exit code classifies them:

    0  success
    1  usage error (bad flags, malformed grid/rational, unknown suite)
    2  numerical failure (domain violations, singular determinants, blow-ups)
    3  an identity or verification check failed beyond its tolerance

Independent table rows are computed concurrently under --jobs; rows are
assembled in flag order regardless of scheduling, so output is byte-for-byte
deterministic for a fixed command line.  Nothing here reads environment
variables, and no file other than --out is ever written.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from typing import Callable, Sequence

from mpmath import mp

from . import exactfiniten, freeenergy, geometry, ldp, opasymp, painleve, report
from .errors import CoulombGasError, IdentityCheckFailure
from .geometry import Regime

SCHEMA_VERSION = 1

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NUMERICAL = 2
EXIT_IDENTITY = 3


class UsageError(Exception):
    """Bad flag values detected after argparse accepted the syntax."""


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on usage errors; the contract here reserves 2 for
    # numerical failures, so route usage problems through UsageError instead
    def error(self, message):
        raise UsageError(message)


def parse_rational(text: str) -> Fraction:
    """Accept '9/16' style rationals and plain decimals."""
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"not a rational or decimal: {text!r}") from exc


def parse_grid(text: str) -> list[float]:
    """'lo:hi:steps' -> inclusive uniform grid with `steps` points."""
    parts = text.split(":")
    if len(parts) != 3:
        raise UsageError(f"grid must be lo:hi:steps, got {text!r}")
    try:
        lo, hi, steps = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError as exc:
        raise UsageError(f"grid must be lo:hi:steps with numeric parts, "
                         f"got {text!r}") from exc
    if steps < 1:
        raise UsageError(f"grid needs at least one step, got {steps}")
    if steps == 1:
        return [lo]
    return [lo + (hi - lo) * k / (steps - 1) for k in range(steps)]


def parse_int_list(text: str) -> list[int]:
    try:
        values = [int(p) for p in text.split(",") if p]
    except ValueError as exc:
        raise UsageError(f"expected comma-separated integers, got {text!r}") from exc
    if not values:
        raise UsageError("expected at least one integer")
    return values


def _map_rows(fn: Callable, items: Sequence, jobs: int) -> list:
    """Evaluate one row per item, concurrently for jobs > 1, in input order."""
    if jobs <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))


def _cnum(z: complex) -> dict:
    return {"re": z.real, "im": z.imag}


def _flatten(row: dict) -> dict:
    flat = {}
    for key, value in row.items():
        if isinstance(value, dict) and set(value) == {"re", "im"}:
            flat[f"{key}_re"] = value["re"]
            flat[f"{key}_im"] = value["im"]
        elif isinstance(value, (dict, list)):
            continue  # CSV is a lossy projection; nested details are dropped
        else:
            flat[key] = value
    return flat


def render(table: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(table, indent=2, allow_nan=False) + "\n"
    rows = [_flatten(r) for r in table.get("rows", [])]
    header: list[str] = []
    for row in rows:
        header.extend(k for k in row if k not in header)
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=header, lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return buf.getvalue()


def emit(table: dict, args) -> None:
    text = render(table, args.format)
    if args.out:
        with open(args.out, "w") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)


def _table(subcommand: str, params: dict, rows: list, **extra) -> dict:
    out = {"schema_version": SCHEMA_VERSION, "subcommand": subcommand,
           "params": params}
    out.update(extra)
    out["rows"] = rows
    return out


def _require(args, *names) -> None:
    missing = [n for n in names if getattr(args, n.replace("-", "_")) is None]
    if missing:
        flags = ", ".join("--" + n for n in missing)
        raise UsageError(f"missing required flags: {flags}")


def cmd_geometry(args) -> int:
    _require(args, "a", "c")
    a, c = args.a, float(args.c)
    params = geometry.ModelParams.resolve(a, c)
    boundary = geometry.droplet_boundary(params, args.points)
    crit = geometry.critical_values(c)
    info: dict = {"regime": params.regime.name, "a_cri": crit.a_cri,
                  "chi": boundary.chi}
    if params.regime is Regime.PRE:
        g = geometry.pre_geometry(a, c)
        info.update(q=g.q, R=g.R, kappa=g.kappa, beta=_cnum(g.beta), b=g.b)
    else:
        g = geometry.post_geometry(a, c)
        info.update(outer_radius=g.outer_radius, inner_center=g.inner_center,
                    inner_radius=g.inner_radius)
    rows = []
    for comp in boundary.components:
        for theta, point in zip(comp.theta, comp.points):
            rows.append({"component": comp.label, "theta": theta,
                         "point": _cnum(point), "closed": comp.closed})
    emit(_table("geometry", {"a": a, "c": c, "points": args.points},
                rows, droplet=info), args)
    return EXIT_OK


def cmd_free_energy(args) -> int:
    _require(args, "a", "c", "n")
    a, c, n = args.a, float(args.c), args.n
    regime = geometry.classify(a, c)
    result = freeenergy.expansion(n, a, c, regime, M=args.order)
    t = result.terms
    row = {"N": n, "a": a, "c": c, "regime": regime.name,
           "expansion": result.log_z,
           "n2": t.n2, "nlogn": t.nlogn, "n_coeff": t.n_coeff,
           "logn": t.logn, "const": t.const, "chi": t.chi,
           "error_class": t.error_class,
           "tail": [{"power": p, "coefficient": coef} for p, coef in t.tail]}
    if args.exact_compare:
        m = args.c * n
        if m.denominator != 1:
            raise UsageError(f"exact comparison needs integer c*n, got {m}")
        exact = float(exactfiniten.exact_logZ(
            exactfiniten.ExactContext(N=n, m=int(m), a=a)))
        row.update(exact_logz=exact, residual=abs(exact - result.log_z))
    emit(_table("free-energy", {"a": a, "c": c, "n": n, "order": args.order,
                                "exact_compare": args.exact_compare},
                [row]), args)
    return EXIT_OK


def _resolve_m(args) -> int:
    if args.m is not None:
        return args.m
    if args.c is None:
        raise UsageError("need --m, or --c so that m = c*n can be formed")
    m = args.c * args.n
    if m.denominator != 1:
        raise UsageError(f"c*n = {m} is not an integer; pass --c as a "
                         f"rational like 9/16 or give --m explicitly")
    return int(m)


def cmd_exact(args) -> int:
    _require(args, "n", "a")
    ctx = exactfiniten.ExactContext(N=args.n, m=_resolve_m(args), a=args.a,
                                    precision_bits=args.bits)
    with mp.workprec(args.bits):
        log_z = exactfiniten.exact_logZ(ctx)
        a11 = exactfiniten.exact_A11(ctx)
        row = {"N": ctx.N, "m": ctx.m, "a": ctx.a,
               "log_z": float(log_z), "log_z_str": mp.nstr(log_z, 30),
               "a11": float(a11), "a11_str": mp.nstr(a11, 30)}
    emit(_table("exact", {"n": ctx.N, "m": ctx.m, "a": ctx.a,
                          "bits": args.bits}, [row]), args)
    return EXIT_OK


def cmd_duality_check(args) -> int:
    _require(args, "n", "m", "x")
    residual = exactfiniten.duality_residual(args.n, args.m, args.x,
                                             precision_bits=args.bits)
    res_f = float(residual)
    passed = residual < args.tol
    row = {"N": args.n, "m": args.m, "x": args.x, "residual": res_f,
           "tolerance": args.tol, "passed": passed}
    emit(_table("duality-check", {"n": args.n, "m": args.m, "x": args.x,
                                  "bits": args.bits, "tol": args.tol},
                [row]), args)
    if not passed:
        raise IdentityCheckFailure(
            f"duality residual {res_f:.3e} exceeds tolerance {args.tol:.3e}")
    return EXIT_OK


def cmd_tw(args) -> int:
    if args.t is None and args.grid is None:
        raise UsageError("need --t or --grid")
    ts = parse_grid(args.grid) if args.grid else [args.t]
    sol = painleve.hastings_mcleod(tol=args.tol)
    rows = _map_rows(
        lambda t: {"t": t, "cdf": painleve.tw_cdf(sol, t),
                   "survival": painleve.tw_survival(sol, t)},
        ts, args.jobs)
    emit(_table("tw", {"tol": args.tol, "grid": args.grid, "t": args.t},
                rows), args)
    return EXIT_OK


def cmd_critical(args) -> int:
    _require(args, "n", "c", "s")
    c = float(args.c)
    sol = painleve.hastings_mcleod(tol=args.tol)
    a_s = painleve.critical_a(args.s, c, args.n)
    value = painleve.critical_expansion(args.n, c, args.s, solution=sol)
    row = {"N": args.n, "c": c, "s": args.s, "a_s": a_s, "expansion": value}
    if args.exact_compare:
        m = args.c * args.n
        if m.denominator != 1:
            raise UsageError(f"exact comparison needs integer c*n, got {m}")
        exact = float(exactfiniten.exact_logZ(
            exactfiniten.ExactContext(N=args.n, m=int(m), a=a_s)))
        row.update(exact_logz=exact, residual=abs(exact - value))
    emit(_table("critical", {"n": args.n, "c": c, "s": args.s,
                             "tol": args.tol,
                             "exact_compare": args.exact_compare}, [row]),
         args)
    return EXIT_OK


def cmd_ldp(args) -> int:
    _require(args, "alpha")
    alpha = float(args.alpha)
    ts = parse_grid(args.grid) if args.grid else [args.t]
    if ts == [None]:
        raise UsageError("need --t or --grid")
    if args.exact_compare:
        if args.n is None:
            raise UsageError("--exact-compare needs --n")
        if (args.alpha * args.n).denominator != 1:
            raise UsageError(
                f"exact comparison needs integer alpha*n, got "
                f"{args.alpha * args.n}")
    edge_action = ldp.kc_action(ldp.LUEParams.from_alpha(alpha).lambda_minus,
                                alpha)

    def one(t: float) -> dict:
        rate = ldp.phi(t, alpha)
        action_diff = ldp.kc_action(t, alpha) - edge_action
        row = {"t": t, "phi": rate, "action_diff": action_diff,
               "residual": abs(rate - action_diff),
               "psi": ldp.psi(t, alpha)}
        if args.exact_compare:
            row["n"] = args.n
            row["exact_log_p"] = ldp.exact_log_gap_probability(args.n, alpha,
                                                               t)
            row["ldp_log_p"] = ldp.ldp_log_probability(args.n, alpha, t)
        return row

    # exact rows move the mpmath working precision, so keep them sequential
    jobs = 1 if args.exact_compare else args.jobs
    rows = _map_rows(one, ts, jobs)
    worst = max(row["residual"] for row in rows)
    emit(_table("ldp", {"alpha": alpha, "grid": args.grid, "t": args.t,
                        "check_kc": args.check_kc, "tol": args.tol,
                        "exact_compare": args.exact_compare, "n": args.n},
                rows, worst_residual=worst), args)
    if args.check_kc and worst > args.tol:
        raise IdentityCheckFailure(
            f"rate-function identity violated: max gap {worst:.3e} exceeds "
            f"{args.tol:.3e}")
    return EXIT_OK


def cmd_op_compare(args) -> int:
    _require(args, "a", "c")
    a, c = args.a, args.c
    z = complex(args.x if args.x is not None else 3.0,
                args.s if args.s is not None else 0.0)
    ns = args.n_list
    evaluator = opasymp.GEvaluator.build(a, float(c))
    exact_values = {}
    with mp.workprec(args.bits):
        for n in ns:
            m = c * n
            if m.denominator != 1:
                raise UsageError(f"c*n = {m} is not an integer at n = {n}")
            ctx = exactfiniten.ExactContext(N=n, m=int(m), a=a,
                                            precision_bits=args.bits)
            exact_values[n] = complex(
                exactfiniten.eval_polynomial(exactfiniten.exact_op(ctx), z))

    def one(n: int) -> dict:
        exact = exact_values[n]
        asym = opasymp.p_asymp(evaluator, z, n).value
        rel = abs(asym - exact) / abs(exact)
        return {"N": n, "z": _cnum(z), "exact": _cnum(exact),
                "asymptotic": _cnum(asym), "rel_error": rel}

    rows = _map_rows(one, ns, args.jobs)
    emit(_table("op-compare", {"a": a, "c": float(c), "z": _cnum(z),
                               "bits": args.bits, "regime":
                               evaluator.params.regime.name}, rows), args)
    return EXIT_OK


def cmd_report(args) -> int:
    skip = tuple(args.skip or ())
    try:
        results = report.run_checks(skip)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    rows = []
    for res in results:
        row = res.as_dict()
        # timings vary run to run; dropping them keeps the artifact
        # byte-identical across runs, which downstream diffing relies on
        del row["elapsed_seconds"]
        rows.append(row)
    all_passed = all(res.passed for res in results)
    table = {"schema_version": report.SCHEMA_VERSION,
             "kind": "verification_report",
             "skipped_suites": list(skip),
             "all_passed": all_passed,
             "n_passed": sum(res.passed for res in results),
             "n_checks": len(results),
             "rows": rows}
    emit(table, args)
    if not all_passed:
        failed = ", ".join(res.key for res in results if not res.passed)
        raise IdentityCheckFailure(f"criteria failed: {failed}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="coulombgas",
                     description="Planar Coulomb gas toolkit: droplet "
                                 "geometry, free energies, exact finite-N "
                                 "oracles, large deviations, and polynomial "
                                 "asymptotics.")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def common(p, bits=False, tol=None, jobs=True):
        p.add_argument("--format", choices=("json", "csv"), default="json")
        p.add_argument("--out", default=None, help="write the table here "
                                                   "instead of stdout")
        if bits:
            p.add_argument("--bits", type=int, default=256)
        if tol is not None:
            p.add_argument("--tol", type=float, default=tol)
        if jobs:
            p.add_argument("--jobs", type=int, default=1)

    p = sub.add_parser("geometry", help="droplet boundary points")
    p.add_argument("--a", type=float)
    p.add_argument("--c", type=parse_rational)
    p.add_argument("--points", type=int, default=256)
    common(p)
    p.set_defaults(fn=cmd_geometry)

    p = sub.add_parser("free-energy", help="log Z_N expansion terms")
    p.add_argument("--a", type=float)
    p.add_argument("--c", type=parse_rational)
    p.add_argument("--n", type=int)
    p.add_argument("--order", type=int, default=2, metavar="M")
    p.add_argument("--exact-compare", action="store_true",
                   help="add exact log Z and the residual (needs integer c*n)")
    common(p)
    p.set_defaults(fn=cmd_free_energy)

    p = sub.add_parser("exact", help="exact finite-N log Z and A11")
    p.add_argument("--a", type=float)
    p.add_argument("--c", type=parse_rational)
    p.add_argument("--n", type=int)
    p.add_argument("--m", type=int)
    common(p, bits=True)
    p.set_defaults(fn=cmd_exact)

    p = sub.add_parser("duality-check", help="gap probability vs "
                                             "partition-function ratio")
    p.add_argument("--n", type=int)
    p.add_argument("--m", type=int)
    p.add_argument("--x", type=float)
    common(p, bits=True, tol=1e-25)
    p.set_defaults(fn=cmd_duality_check)

    p = sub.add_parser("tw", help="extreme-value distribution values")
    p.add_argument("--t", type=float)
    p.add_argument("--grid", type=str, default=None, metavar="LO:HI:STEPS")
    common(p, tol=painleve.DEFAULT_TOL)
    p.set_defaults(fn=cmd_tw)

    p = sub.add_parser("critical", help="transition-window free energy")
    p.add_argument("--n", type=int)
    p.add_argument("--c", type=parse_rational)
    p.add_argument("--s", type=float)
    p.add_argument("--exact-compare", action="store_true",
                   help="add exact log Z and the residual (needs integer c*n)")
    common(p, tol=painleve.DEFAULT_TOL)
    p.set_defaults(fn=cmd_critical)

    p = sub.add_parser("ldp", help="left-edge rate function table")
    p.add_argument("--alpha", type=parse_rational)
    p.add_argument("--t", type=float)
    p.add_argument("--grid", type=str, default=None, metavar="LO:HI:STEPS")
    p.add_argument("--check-kc", action="store_true",
                   help="exit 3 if the action identity fails anywhere")
    p.add_argument("--exact-compare", action="store_true",
                   help="add finite-n log gap probabilities (needs --n with "
                        "integer alpha*n)")
    p.add_argument("--n", type=int, default=None)
    common(p, tol=1e-10)
    p.set_defaults(fn=cmd_ldp)

    p = sub.add_parser("op-compare", help="asymptotic vs exact polynomials")
    p.add_argument("--a", type=float)
    p.add_argument("--c", type=parse_rational)
    p.add_argument("--n", dest="n_list", type=parse_int_list, default=[4, 8, 16],
                   metavar="N1,N2,...")
    p.add_argument("--x", type=float, help="evaluation point, real part")
    p.add_argument("--s", type=float, help="evaluation point, imaginary part")
    common(p, bits=True)
    p.set_defaults(fn=cmd_op_compare)

    p = sub.add_parser("report", help="run the verification suite")
    p.add_argument("--skip", action="append", choices=report.SUITES,
                   default=None, metavar="SUITE")
    common(p)
    p.set_defaults(fn=cmd_report)

    return parser


def _fail(exc: Exception, code: int) -> int:
    payload = {"error": type(exc).__name__, "message": str(exc),
               "exit_code": code}
    print(json.dumps(payload), file=sys.stderr)
    return code


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        _validate_common(args)
        return args.fn(args)
    except UsageError as exc:
        return _fail(exc, EXIT_USAGE)
    except IdentityCheckFailure as exc:
        return _fail(exc, EXIT_IDENTITY)
    except CoulombGasError as exc:
        return _fail(exc, EXIT_NUMERICAL)
    except OSError as exc:
        return _fail(exc, EXIT_USAGE)
    except Exception as exc:  # never leak a traceback past the CLI boundary
        return _fail(exc, EXIT_NUMERICAL)


def _validate_common(args) -> None:
    bits = getattr(args, "bits", None)
    if bits is not None and bits < 128:
        raise UsageError(f"--bits must be at least 128, got {bits}")
    order = getattr(args, "order", None)
    if order is not None and order < 0:
        raise UsageError(f"--order must be nonnegative, got {order}")
    tol = getattr(args, "tol", None)
    if tol is not None and tol <= 0.0:
        raise UsageError(f"--tol must be positive, got {tol}")
    jobs = getattr(args, "jobs", None)
    if jobs is not None and jobs < 1:
        raise UsageError(f"--jobs must be at least 1, got {jobs}")


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
