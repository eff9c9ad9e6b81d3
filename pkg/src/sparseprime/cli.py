"""Command-line front end: ``sparseprime <subcommand> ...``.

Exit status is 0 on success, 2 when a bound check fails, 1 on usage or input errors.
"""

from __future__ import annotations

import argparse
import csv
import datetime as _dt
import io
import json
import math
import os
import sys

from . import curves, gauss, harmonic, ntheory, sequences, sieve
from .errors import BoundViolation, SparsePrimeError

EXIT_OK, EXIT_USAGE, EXIT_BOUND = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _threads(value: str | None) -> int:
    if value is None:
        value = os.environ.get("SPARSEPRIME_THREADS", "1")
    if value == "auto":
        return os.cpu_count() or 1
    try:
        n = int(value)
    except ValueError:
        raise UsageError(f"threads must be a positive integer or 'auto', got {value!r}") from None
    if n < 1:
        raise UsageError("threads must be >= 1")
    return n


def _timestamp() -> str:
    return _dt.datetime.now(_dt.timezone.utc).replace(microsecond=0).isoformat()


def render_json(report: dict, stamp: bool) -> str:
    if stamp:
        report = {**report, "generated_at": _timestamp()}
    return json.dumps(report, sort_keys=True, indent=2) + "\n"


def render_csv(header, rows, stamp: bool) -> str:
    buf = io.StringIO()
    if stamp:
        buf.write(f"# generated {_timestamp()}\r\n")
    w = csv.writer(buf, lineterminator="\r\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _dict_rows(report: dict):
    keys = sorted(report)
    return keys, [[json.dumps(report[k], sort_keys=True) if isinstance(report[k], (dict, list)) else report[k] for k in keys]]


# ---------------------------------------------------------------------------
# subcommands; each returns (report dict or (header, rows), default format)


def cmd_omega_bounds(args, threads):
    rep = sieve.deficiency_report(args.case, args.eta, args.grid, args.grid4, threads=threads)
    d = rep.as_dict()
    d["meets_targets"] = _meets(args.case, rep)
    return d


def _meets(j, rep) -> bool:
    o4 = 0.017 if j == 1 else 0.49
    floor = 0.6 if j == 1 else 0.1
    return rep.omega2.value <= 0.38 and rep.omega4.value <= o4 and rep.deficiency >= floor


def cmd_weil_verify(args, threads):
    rep = curves.verify_weil_suite(args.pmax, workers=threads, raise_on_violation=True)
    rows = [[r.lemma, r.p, r.a, r.h, f"{r.observed:.12g}", f"{r.bound:.12g}", f"{r.ratio:.12g}"] for r in rep.rows]
    return ["lemma", "p", "a", "h", "observed", "bound", "ratio"], rows


def cmd_enumerate(args, threads):
    form = sequences.canonical_form(args.form)
    kap = args.kappa
    if kap is None and form != "two_squares":
        kap = ntheory.kappa(1 if form == "quartic_shift" else 2).value
    s = sequences.enumerate(form, args.x, 1.0 if kap is None else kap)
    if args.format == "json":
        return s.summary()
    return ["n", "weight"], [[n, repr(w)] for n, w in zip(s.n.tolist(), s.weight.tolist())]


def cmd_kappa(args, threads):
    k = ntheory.kappa(args.j, args.trunc)
    return {
        "j": k.j,
        "truncation": k.truncation,
        "value": k.value,
        "tail_estimate": k.tail_estimate,
        "numerator": k.numerator,
        "denominator": k.denominator,
    }


def cmd_buchstab(args, threads):
    out = {"u": args.u, "upper": sieve.buchstab_upper(args.u)}
    out["omega"] = sieve.buchstab_omega(args.u) if 1.0 <= args.u <= 5.0 else None
    return out


def cmd_poisson(args, threads):
    r = harmonic.poisson_sides(args.n, args.q, args.a, args.delta, args.h)
    return {"N": args.n, "q": args.q, "a": args.a, "delta": args.delta, "H": r.H,
            "lhs": r.lhs, "rhs": r.rhs, "difference": r.difference}


def cmd_typei(args, threads):
    ds, vals = sequences.typei_profile(args.j, args.x, args.d)
    i = int(vals.argmax())
    return {"j": args.j, "X": args.x, "D": args.d, "discrepancy": float(vals[i]), "worst_d": int(ds[i])}


def cmd_buchstab_identity(args, threads):
    r = sequences.buchstab_identity_check(args.x, args.z)
    return {"X": r.X, "Z": r.Z, "lhs": r.lhs, "main": r.main, "single": r.single, "double": r.double,
            "residual": r.residual, "holds": r.holds}


def cmd_pair_stats(args, threads):
    r = gauss.pair_stats(args.n, args.y)
    return {"N": r.N, "Y": r.Y, "sum_half": r.sum_half, "sum_one": r.sum_one,
            "count_powerful_Y": r.count_powerful_Y, "count_gcd_above_Y": r.count_gcd_above_Y, "pairs": r.pairs}


def _positive_float(s):
    v = float(s)
    if not math.isfinite(v) or v <= 0:
        raise argparse.ArgumentTypeError(f"expected a positive number, got {s!r}")
    return v


def _int(s):
    # accept 1e6-style input for integer parameters
    v = float(s) if any(c in s for c in "eE.") else int(s)
    if isinstance(v, float):
        if not v.is_integer():
            raise argparse.ArgumentTypeError(f"expected an integer, got {s!r}")
        v = int(v)
    return v


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="sparseprime", description=__doc__.splitlines()[0])
    common = _Parser(add_help=False)
    common.add_argument("--out", help="output file (default: stdout)")
    common.add_argument("--format", choices=("csv", "json"))
    common.add_argument("--threads", help="worker count or 'auto' (default: $SPARSEPRIME_THREADS or 1)")
    common.add_argument("--no-timestamp", action="store_true", help="omit the generation timestamp")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("omega-bounds", parents=[common], help="upper bounds for Omega_2(j), Omega_4(j)")
    s.add_argument("--case", type=int, choices=(1, 2), required=True)
    s.add_argument("--eta", type=_positive_float, default=sieve.DEFAULT_ETA)
    s.add_argument("--grid", type=_int, default=sieve.DEFAULT_GRID[2], help="cells per axis, 2-d integral")
    s.add_argument("--grid4", type=_int, default=sieve.DEFAULT_GRID[4], help="cells per axis, 4-d integral")
    s.set_defaults(func=cmd_omega_bounds, fmt="json")

    s = sub.add_parser("weil-verify", parents=[common], help="Weil and Deligne bound checks for p <= pmax")
    s.add_argument("--pmax", type=_int, required=True)
    s.set_defaults(func=cmd_weil_verify, fmt="csv")

    s = sub.add_parser("enumerate", parents=[common], help="tabulate a sequence over (X, 2X]")
    s.add_argument("--form", choices=("b2p1", "cubes", "squares", *sequences.FORMS), required=True)
    s.add_argument("--x", type=_int, required=True)
    s.add_argument("--kappa", type=float, help="normalizing constant (default: computed)")
    s.set_defaults(func=cmd_enumerate, fmt="csv")

    s = sub.add_parser("kappa", parents=[common], help="truncated kappa_j")
    s.add_argument("--j", type=int, choices=(1, 2), required=True)
    s.add_argument("--trunc", type=_int, default=10**4)
    s.set_defaults(func=cmd_kappa, fmt="json")

    s = sub.add_parser("buchstab", parents=[common], help="Buchstab function and its upper bound")
    s.add_argument("--u", type=float, required=True)
    s.set_defaults(func=cmd_buchstab, fmt="json")

    s = sub.add_parser("poisson-check", parents=[common], help="truncated Poisson summation error")
    s.add_argument("--n", type=float, required=True)
    s.add_argument("--q", type=_int, required=True)
    s.add_argument("--a", type=_int, required=True)
    s.add_argument("--delta", type=float, default=0.05)
    s.add_argument("--h", type=_int, help="truncation (default: large enough for 1e-12 accuracy)")
    s.set_defaults(func=cmd_poisson, fmt="json")

    s = sub.add_parser("typei", parents=[common], help="worst single-modulus Type I discrepancy over d in [D, 2D)")
    s.add_argument("--j", type=int, choices=(1, 2), required=True)
    s.add_argument("--x", type=_int, required=True)
    s.add_argument("--d", type=_int, required=True)
    s.set_defaults(func=cmd_typei, fmt="json")

    s = sub.add_parser("buchstab-identity", parents=[common], help="exact check of the doubled Buchstab identity")
    s.add_argument("--x", type=_int, required=True)
    s.add_argument("--z", type=_positive_float, required=True)
    s.set_defaults(func=cmd_buchstab_identity, fmt="json")

    s = sub.add_parser("pair-stats", parents=[common], help="Gaussian pair statistics")
    s.add_argument("--n", type=_int, required=True)
    s.add_argument("--y", type=_positive_float, default=1.0)
    s.set_defaults(func=cmd_pair_stats, fmt="json")
    return p


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        threads = _threads(args.threads)
        fmt = args.format or args.fmt
        args.format = fmt
        result = args.func(args, threads)
    except UsageError as e:
        print(f"usage error: {e}", file=stderr)
        return EXIT_USAGE
    except BoundViolation as e:
        print(f"bound violation: {e}", file=stderr)
        return EXIT_BOUND
    except (SparsePrimeError, ValueError, OverflowError) as e:
        print(f"error: {args.command}: {type(e).__name__}: {e}", file=stderr)
        return EXIT_USAGE
    stamp = not args.no_timestamp
    if isinstance(result, dict):
        text = render_json(result, stamp) if fmt == "json" else render_csv(*_dict_rows(result), stamp)
    else:
        header, rows = result
        if fmt == "json":
            text = render_json({"columns": header, "rows": rows}, stamp)
        else:
            text = render_csv(header, rows, stamp)
    if args.out:
        with open(args.out, "w", newline="", encoding="utf-8") as fh:
            fh.write(text)
    else:
        stdout.write(text)
    return EXIT_OK


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
