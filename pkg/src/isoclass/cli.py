"""Command line front end: ``isoclass {census,density,gekeler,classnum,verify}``.

Exit codes: 0 success, 1 verification failure, 2 usage or parameter error.
Exact rationals are printed as "num/den" strings; JSON output is canonical
(traces and primes ascending, fixed key order) so that re-rendering parsed
output reproduces it byte for byte.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction

from .arith import format_fraction, is_prime, prime_power
from .census import census, census_cap, ordinary_traces
from .classgroups import L1_exact, L1_truncated, QuadraticFieldData, class_group_data
from .densities import euler_factor, nu_ell, nu_infinity
from .measures import (
    VerificationFailure,
    assemble_gekeler,
    bad_primes,
    ordinary_classes,
    verify_class,
)

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2

JOBS_ENV = "ISOCLASS_JOBS"


class UsageError(Exception):
    pass


def fmt_float(x: float) -> float:
    return float(format(x, ".15g"))


def render_json(obj) -> str:
    return json.dumps(obj, indent=2, ensure_ascii=False) + "\n"


def render_table(headers, rows, title=None) -> str:
    cells = [[str(h) for h in headers]] + [[str(c) for c in r] for r in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(headers))]
    lines = [title] if title else []
    for k, r in enumerate(cells):
        lines.append("  ".join(c.rjust(w) for c, w in zip(r, widths)).rstrip())
        if k == 0:
            lines.append("  ".join("-" * w for w in widths))
    return "\n".join(lines) + "\n"


def render_csv(headers, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(headers)
    w.writerows(rows)
    return buf.getvalue()


def _emit(fmt, payload, headers, rows, title=None):
    if fmt == "json":
        return render_json(payload)
    if fmt == "csv":
        return render_csv(headers, rows)
    return render_table(headers, rows, title)


def _prime_power_arg(q):
    pe = prime_power(q)
    if pe is None:
        raise UsageError(f"q = {q} is not a prime power")
    return pe


def _check_census_cap(q):
    p, _ = _prime_power_arg(q)
    if q > census_cap(p):
        raise UsageError(f"q = {q} exceeds the census cap {census_cap(p)} for p = {p}")


def _ordinary_arg(a, q):
    p, _ = _prime_power_arg(q)
    if a % p == 0:
        raise UsageError(f"a = {a} is divisible by p = {p}; only ordinary classes are supported")
    if a * a >= 4 * q:
        raise UsageError(f"a = {a} violates the Hasse bound for q = {q}")


# ---------------------------------------------------------------------------
# commands


def cmd_census(args) -> tuple[int, str]:
    _check_census_cap(args.q)
    result = census(args.q, jobs=args.jobs)
    ordinary = result.ordinary()
    other = {a: c for a, c in result.counts.items() if a not in ordinary}
    payload = {
        "command": "census",
        "q": args.q,
        "family": result.family,
        "group_order": result.group_order,
        "counts": {str(a): format_fraction(c) for a, c in sorted(ordinary.items())},
        "non_ordinary": {str(a): format_fraction(c) for a, c in sorted(other.items())},
        "total_mass": format_fraction(result.total_mass()),
    }
    shown = result.counts if args.all else ordinary
    rows = [
        (a, format_fraction(c), "yes" if a in ordinary else "no")
        for a, c in sorted(shown.items())
    ]
    title = f"weighted isogeny class sizes over F_{args.q} (total mass {payload['total_mass']})"
    return EXIT_OK, _emit(args.format, payload, ["a", "weighted_count", "ordinary"], rows, title)


def cmd_density(args) -> tuple[int, str]:
    _ordinary_arg(args.a, args.q)
    if not is_prime(args.ell):
        raise UsageError(f"ell = {args.ell} is not prime")
    res = nu_ell(args.a, args.q, args.ell, args.n_max, full=args.n_max is not None)
    p = _prime_power_arg(args.q)[0]
    payload = {
        "command": "density",
        "a": args.a,
        "q": args.q,
        "ell": args.ell,
        "ring": "M2" if args.ell == p else "GL",
        "disc_valuation": res.disc_valuation,
        "ladder": [
            {"n": n, "S_n": S, "nu_n": format_fraction(nu)} for n, S, nu in res.values
        ],
        "stabilized_at": res.stabilized_at,
        "nu": format_fraction(res.nu) if res.stabilized else None,
    }
    if args.ell not in bad_primes(args.a, args.q):
        payload["euler_factor"] = format_fraction(euler_factor(args.a, args.q, args.ell))
    rows = [(n, S, format_fraction(nu)) for n, S, nu in res.values]
    title = (
        f"nu_{args.ell}(a={args.a}, q={args.q}) [{payload['ring']}]: "
        f"stabilized_at={res.stabilized_at}, nu={payload['nu']}"
    )
    code = EXIT_OK if res.stabilized else EXIT_FAIL
    return code, _emit(args.format, payload, ["n", "S_n", "nu_n"], rows, title)


def _gekeler_row(a, q, prime_bound):
    g = assemble_gekeler(a, q, prime_bound)
    return {
        "a": a,
        "q": q,
        "fundamental_discriminant": g.fundamental,
        "conductor": g.conductor,
        "nu_infinity": fmt_float(float(nu_infinity(a, q))),
        "gekeler_exact": format_fraction(g.gekeler_exact),
        "gekeler_float": fmt_float(g.gekeler_float),
        "census": format_fraction(g.census_value) if g.census_value is not None else None,
        "weighted_kronecker": format_fraction(g.kronecker_value),
        "local_densities": {
            str(ell): format_fraction(nu_ell(a, q, ell).nu) for ell in bad_primes(a, q)
        },
    }


def cmd_gekeler(args) -> tuple[int, str]:
    _prime_power_arg(args.q)
    if args.a is not None:
        _ordinary_arg(args.a, args.q)
        traces = [args.a]
    else:
        traces = ordinary_traces(args.q)
    rows_json = [_gekeler_row(a, args.q, args.prime_bound) for a in traces]
    payload = {
        "command": "gekeler",
        "q": args.q,
        "prime_bound": args.prime_bound,
        "classes": rows_json,
    }
    headers = ["a", "D_K", "f", "exact", "float", "census", "weighted_kronecker"]
    rows = [
        (
            r["a"], r["fundamental_discriminant"], r["conductor"], r["gekeler_exact"],
            r["gekeler_float"], r["census"] if r["census"] is not None else "-",
            r["weighted_kronecker"],
        )
        for r in rows_json
    ]
    return EXIT_OK, _emit(args.format, payload, headers, rows, f"product formula over F_{args.q}")


def cmd_classnum(args) -> tuple[int, str]:
    if args.D is not None:
        delta = args.D
    elif args.a is not None and args.q is not None:
        _ordinary_arg(args.a, args.q)
        delta = args.a * args.a - 4 * args.q
    else:
        raise UsageError("classnum needs --D or both --a and --q")
    if delta >= 0 or delta % 4 not in (0, 1):
        raise UsageError(f"{delta} is not a negative discriminant")
    data = class_group_data(delta)
    fd = QuadraticFieldData.from_discriminant(delta)
    rational, radicand = L1_exact(fd)
    payload = {
        "command": "classnum",
        "discriminant": delta,
        "fundamental_discriminant": fd.fundamental,
        "conductor": fd.conductor,
        "orders": [{"d": d, "D": D, "h": h, "w": w} for d, D, h, w in data.orders],
        "weighted_sum": format_fraction(data.weighted_sum),
        "hurwitz": format_fraction(2 * data.weighted_sum),
        "L1_rational_part": format_fraction(rational),
        "L1_radicand": radicand,
    }
    if args.prime_bound:
        payload["L1_truncated"] = fmt_float(L1_truncated(fd, args.prime_bound))
    rows = [(d, D, h, w) for d, D, h, w in data.orders]
    title = (
        f"D = {delta} = {fd.conductor}^2 * {fd.fundamental}; "
        f"sum h/w = {payload['weighted_sum']}; "
        f"L(1, chi) = 2 pi ({payload['L1_rational_part']}) / sqrt({radicand})"
    )
    return EXIT_OK, _emit(args.format, payload, ["d", "D", "h", "w"], rows, title)


def _perturbation(target):
    def hook(ell, nu):
        return nu * Fraction(1001, 1000) if ell == target else nu

    return hook


def _verify_one(job):
    a, q, prime_bound, perturb_ell = job
    hook = None if perturb_ell is None else _perturbation(perturb_ell)
    try:
        r = verify_class(a, q, prime_bound, density_hook=hook)
    except VerificationFailure as exc:
        entry = {"a": a, "q": q, "ok": False, "error": str(exc), "primes": list(exc.primes)}
        assembly = exc.details.get("assembly")
        if assembly is not None:
            entry.update({k: format_fraction(v) for k, v in assembly.route_values().items()})
        return entry
    return {
        "a": a,
        "q": q,
        "ok": True,
        "census": format_fraction(r.census_value),
        "weighted_kronecker": format_fraction(r.kronecker_value),
        "langlands_kottwitz": format_fraction(r.lk_value),
        "gekeler_exact": format_fraction(r.gekeler_exact),
        "gekeler_float": fmt_float(r.gekeler_float),
    }


def cmd_verify(args) -> tuple[int, str]:
    if args.q_max < 2:
        raise UsageError("--q-max must be >= 2")
    if args.q_max > 49:
        raise UsageError("--q-max exceeds the census cap 49")
    jobs = [(a, q, args.prime_bound, args.perturb_ell) for a, q in ordinary_classes(args.q_max)]
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            entries = list(pool.map(_verify_one, jobs, chunksize=8))
    else:
        entries = [_verify_one(j) for j in jobs]
    failures = [e for e in entries if not e["ok"]]
    payload = {
        "command": "verify",
        "q_max": args.q_max,
        "prime_bound": args.prime_bound,
        "classes_checked": len(entries),
        "ok": not failures,
        "failing_primes": sorted({p for e in failures for p in e["primes"]}),
        "classes": entries,
    }
    headers = ["a", "q", "ok", "census", "weighted_kronecker", "langlands_kottwitz", "gekeler_exact", "gekeler_float"]
    rows = [
        [e["a"], e["q"], "yes" if e["ok"] else "NO"] + [e.get(h, "-") for h in headers[3:]]
        for e in entries
    ]
    title = f"verified {len(entries) - len(failures)}/{len(entries)} ordinary classes, q <= {args.q_max}"
    out = _emit(args.format, payload, headers, rows, title)
    if failures and args.format != "json":
        out += "\nFAILURES\n" + "".join(
            f"  (a, q) = ({e['a']}, {e['q']}): primes {e['primes']}: {e['error']}\n" for e in failures
        )
    return (EXIT_FAIL if failures else EXIT_OK), out


# ---------------------------------------------------------------------------


def _default_jobs() -> int:
    raw = os.environ.get(JOBS_ENV)
    if not raw:
        return 1
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="isoclass",
        description="Weighted sizes of ordinary isogeny classes of elliptic curves over F_q.",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=["table", "json", "csv"], default="table")
    common.add_argument(
        "--jobs", type=int, default=_default_jobs(),
        help=f"worker processes (default: ${JOBS_ENV} or 1)",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("census", parents=[common], help="enumerate curves over F_q")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--all", action="store_true", help="include non-ordinary traces")
    p.set_defaults(func=cmd_census)

    p = sub.add_parser("density", parents=[common], help="local density ladder nu_{ell,n}")
    p.add_argument("--a", type=int, required=True)
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--ell", type=int, required=True)
    p.add_argument("--n-max", type=int, default=None)
    p.set_defaults(func=cmd_density)

    p = sub.add_parser("gekeler", parents=[common], help="evaluate the product formula")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--a", type=int, default=None)
    p.add_argument("--prime-bound", type=int, default=10_000)
    p.set_defaults(func=cmd_gekeler)

    p = sub.add_parser("classnum", parents=[common], help="class numbers and L(1, chi)")
    p.add_argument("--D", type=int, default=None, help="negative discriminant")
    p.add_argument("--a", type=int, default=None)
    p.add_argument("--q", type=int, default=None)
    p.add_argument("--prime-bound", type=int, default=0, help="also print a truncated Euler product")
    p.set_defaults(func=cmd_classnum)

    p = sub.add_parser("verify", parents=[common], help="check all routes agree for q <= q_max")
    p.add_argument("--q-max", type=int, required=True)
    p.add_argument("--prime-bound", type=int, default=10_000)
    p.add_argument("--perturb-ell", type=int, default=None, help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "jobs", 1) < 1:
        parser.error("--jobs must be >= 1")
    try:
        code, out = args.func(args)
    except (UsageError, ValueError) as exc:
        print(f"isoclass {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    sys.stdout.write(out)
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
