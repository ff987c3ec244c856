"""Command-line front end: ``hankel-dirichlet compute|verify|selftest``."""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Iterable, Optional, Sequence

from .errors import (EnvelopeDomainViolated, EnvelopeViolated, InvalidSeries, NotRationalSeries,
                     PrecisionExhausted)
from .numerics import Ball, PrecisionPolicy, Sign, format_ball

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_PRECISION = 2
EXIT_INVALID_SERIES = 3
EXIT_USAGE = 4

MIN_BITS = 64
DEFAULT_MAX_BITS = 8192

RECORD_FIELDS = ("series", "n", "r", "mid", "rad", "sign", "engine", "bits", "exact")
REPORT_FIELDS = ("check", "series", "n", "r", "lhs", "rhs", "holds", "hard", "status")

RECORD_SCHEMA: dict[str, Any] = {
    "type": "object",
    "required": ["series", "n", "r", "mid", "rad", "sign", "engine", "bits"],
    "properties": {
        "series": {"type": "string"},
        "n": {"type": "integer", "minimum": 0},
        "r": {"type": "integer"},
        "mid": {"type": "string"},
        "rad": {"type": "string"},
        "sign": {"enum": [s.value for s in Sign]},
        "engine": {"enum": ["lu", "dodgson", "monien", "exact"]},
        "bits": {"type": "integer", "minimum": 0},
        "exact": {"type": ["string", "null"]},
        "lower_bound": {"type": "boolean"},
    },
    "additionalProperties": False,
}

REPORT_ROW_SCHEMA: dict[str, Any] = {
    "type": "object",
    "required": ["check", "lhs", "rhs", "holds"],
    "properties": {
        "check": {"type": "string"},
        "series": {"type": "string"},
        "n": {"type": ["integer", "null"]},
        "r": {"type": ["integer", "null"]},
        "lhs": {"type": "string"},
        "rhs": {"type": "string"},
        "holds": {"type": "boolean"},
        "hard": {"type": "boolean"},
        "status": {"type": "string"},
    },
}

REPORT_SCHEMA: dict[str, Any] = {
    "type": "object",
    "required": ["command", "series", "rows", "ok"],
    "properties": {
        "command": {"type": "string"},
        "series": {"type": "string"},
        "params": {"type": "object"},
        "rows": {"type": "array", "items": REPORT_ROW_SCHEMA},
        "summary": {"type": "object"},
        "ok": {"type": "boolean"},
    },
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # keep exit code 2 free for PrecisionExhausted
    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# ---------------------------------------------------------------------------
# Configuration
# ---------------------------------------------------------------------------


def parse_range(text: str) -> list[int]:
    """'4', '4..8' (inclusive) or '2,3,7'."""
    text = text.strip()
    try:
        if ".." in text:
            a, b = text.split("..", 1)
            lo, hi = int(a), int(b)
            if hi < lo:
                raise UsageError(f"empty range {text!r}")
            return list(range(lo, hi + 1))
        values = [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise UsageError(f"cannot parse range {text!r}") from None
    if not values:
        raise UsageError("empty range")
    return values


def max_bits_from_env() -> int:
    raw = os.environ.get("HANKEL_MAX_BITS")
    if raw is None:
        return DEFAULT_MAX_BITS
    try:
        bits = int(raw)
    except ValueError:
        raise UsageError(f"HANKEL_MAX_BITS={raw!r} is not an integer") from None
    if bits < MIN_BITS:
        raise UsageError(f"HANKEL_MAX_BITS must be at least {MIN_BITS}")
    return bits


@dataclass
class RunConfig:
    series: str
    n_range: list[int]
    r_range: list[int]
    precision: Optional[int]  # None means auto
    engine: str = "auto"
    max_bits: int = DEFAULT_MAX_BITS
    output: str = "json"
    seed: int = 0

    def __post_init__(self) -> None:
        if not self.n_range:
            raise UsageError("n range is empty")
        if not self.r_range:
            raise UsageError("r range is empty")
        if self.precision is not None and not MIN_BITS <= self.precision <= self.max_bits:
            raise UsageError(f"precision must lie in [{MIN_BITS}, {self.max_bits}]")

    def policy(self, n: int) -> PrecisionPolicy:
        return PrecisionPolicy.for_hankel(n, self.max_bits)


def _precision(text: str) -> Optional[int]:
    if text == "auto":
        return None
    try:
        return int(text)
    except ValueError:
        raise UsageError(f"precision must be 'auto' or an integer, got {text!r}") from None


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"not a rational number: {text!r}") from None


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------


def ball_strings(x: Ball) -> tuple[str, str]:
    return format_ball(x)


def det_record(series: str, det) -> dict[str, Any]:
    if det.exact is not None and det.exact.denominator == 1:
        mid, rad = str(det.exact.numerator), "0"
    else:
        mid, rad = ball_strings(det.value)
    rec = {
        "series": series, "n": det.n, "r": det.r, "mid": mid, "rad": rad,
        "sign": det.sign.value, "engine": det.engine, "bits": det.bits_used,
        "exact": str(det.exact) if det.exact is not None else None,
    }
    if det.lower_bound:
        rec["lower_bound"] = True
    return rec


def _s(x) -> str:
    if x is None:
        return ""
    if isinstance(x, Ball):
        mid, rad = ball_strings(x)
        return mid if rad == "0" else f"{mid} +/- {rad}"
    return str(x)


def report_row(check: str, lhs, rhs, holds: bool, series: str = "", n: int | None = None,
               r: int | None = None, hard: bool = True, status: str | None = None) -> dict[str, Any]:
    return {"check": check, "series": series, "n": n, "r": r, "lhs": _s(lhs), "rhs": _s(rhs),
            "holds": bool(holds), "hard": hard, "status": status or ("holds" if holds else "fails")}


def write_records(records: Sequence[dict], fields: Sequence[str], fmt: str, stream) -> None:
    if fmt == "csv":
        w = csv.DictWriter(stream, fieldnames=list(fields), extrasaction="ignore", lineterminator="\n")
        w.writeheader()
        for rec in records:
            w.writerow({k: ("" if rec.get(k) is None else rec.get(k)) for k in fields})
    else:
        for rec in records:
            stream.write(json.dumps(rec, sort_keys=False) + "\n")


def write_report(report: dict, fmt: str, stream) -> None:
    if fmt == "csv":
        write_records(report["rows"], REPORT_FIELDS, "csv", stream)
    else:
        stream.write(json.dumps(report, indent=2) + "\n")


def _open_out(path: Optional[str]):
    if path is None or path == "-":
        return sys.stdout, False
    return open(path, "w", newline=""), True


# ---------------------------------------------------------------------------
# compute
# ---------------------------------------------------------------------------


def cmd_compute(cfg: RunConfig, monien_cutoff: Optional[int] = None) -> tuple[list[dict], int]:
    from .hankel import hankel_det
    from .sequences import get_series

    spec = get_series(cfg.series)
    records = []
    for n in cfg.n_range:
        for r in cfg.r_range:
            det = hankel_det(spec, n, r, engine=cfg.engine, policy=cfg.policy(n),
                             prec=cfg.precision, monien_cutoff=monien_cutoff)
            records.append(det_record(spec.name, det))
    return records, EXIT_OK


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------


def _report(command: str, series: str, params: dict, rows: list[dict], summary: dict | None = None) -> dict:
    ok = all(row["holds"] for row in rows if row["hard"])
    return {"command": command, "series": series, "params": params, "rows": rows,
            "summary": summary or {}, "ok": ok}


def verify_decay(spec, ns: list[int], r: int, epsilon: Fraction | None, c: Fraction | None,
                 max_bits: int) -> dict:
    from .bounds import verify_quadratic_decay

    if epsilon is None and c is None:
        if spec.name != "zeta":
            raise UsageError("decay needs --epsilon (zeta) or --c")
        epsilon = Fraction(1, 10)
    rep = verify_quadratic_decay(spec, ns, r, epsilon=epsilon, c=c, max_bits=max_bits)
    check = "log H < -n^2 log(2 - epsilon)" if rep.mode == "zeta_epsilon" else "log H < -c n^2"
    rows = [report_row(check, row.log_H, row.bound_rhs, row.holds, spec.name, row.n, r,
                       hard=row.status != "unresolved", status=row.status)
            for row in rep.rows]
    summary = {
        "mode": rep.mode,
        "asymptotic_constant": _s(rep.asymptotic_constant),
        "unresolved": [row.n for row in rep.rows if row.status == "unresolved"],
    }
    params = {"n": ns, "r": r, "epsilon": str(epsilon) if epsilon is not None else None,
              "c": str(c) if c is not None else None, "max_bits": max_bits}
    return _report("verify decay", spec.name, params, rows, summary)


def verify_envelope(spec, ns: list[int], rs: list[int], max_bits: int, prec: int = 256) -> dict:
    from .bounds import envelope_bound, factorial_envelope
    from .hankel import hankel_det
    from .sequences import SeriesKind, calibrate_ratio_bounds

    rows = []
    if spec.kind is SeriesKind.EXPLICIT and spec.name == "factorial_seq":
        env = factorial_envelope(prec)
    else:
        k_min = max(2, int(spec.s0))
        k_max = max(30, 2 * max(ns) + max(rs) + 2)
        try:
            env = calibrate_ratio_bounds(spec, k_min, k_max, prec=prec)
        except EnvelopeViolated as exc:
            rows.append(report_row("ratio envelope calibration", str(exc), "", False, spec.name))
            return _report("verify envelope", spec.name, {"n": ns, "r": rs}, rows)
    summary = {"case": env.case_tag, "c": str(env.c), "K": env.K,
               "verified_range": list(env.verified_range), "label": env.label}
    for n in ns:
        for r in rs:
            try:
                bound = envelope_bound(env, spec, n, r, prec)
            except EnvelopeDomainViolated as exc:
                rows.append(report_row("H < envelope", "", str(exc), False, spec.name, n, r,
                                       status="domain"))
                continue
            det = hankel_det(spec, n, r, engine="lu", policy=PrecisionPolicy.for_hankel(n, max_bits))
            holds = (bound - det.value).sign() is Sign.POSITIVE
            rows.append(report_row("H < envelope", det.value, bound, holds, spec.name, n, r))
    return _report("verify envelope", spec.name, {"n": ns, "r": rs}, rows, summary)


def verify_rationality(spec, m: int, R: Optional[int], base: Fraction, rs: list[int]) -> dict:
    from .rationality import growth_verifier, integrality_check, minimal_R, rational_values

    R = max(0, minimal_R(spec)) if R is None else R
    rows = []
    for n in range(1, m // 2 + 1):
        for r in rs:
            if r < R:
                continue
            value = integrality_check(spec, n, r, R)
            rows.append(report_row(f"D_{2 * n + r - R}^n * H integer", value, "integer",
                                   True, spec.name, n, r))
    ledger = rational_values(spec, R, m)
    growth = growth_verifier(ledger, base)
    for row in growth.rows:
        rows.append(report_row(f"D_{row.m} > base^m", row.D, row.base_power, row.holds, spec.name,
                               hard=False))
    rows.append(report_row("D_m > base^m eventually", growth.first_failure or "", "", growth.eventually_holds,
                           spec.name))
    rows.append(report_row("q_k divides D_m", "", "", all(row.D % q == 0 for row in growth.rows
                                                        for q in ledger.q[: row.m - 1]), spec.name))
    summary = {"R": R, "base": str(base), "D": {str(k): v for k, v in ledger.D.items()},
               "q": list(ledger.q), "rates": [round(row.rate, 12) for row in growth.rows],
               "max_q": [row.max_q for row in growth.rows]}
    return _report("verify rationality", spec.name, {"m": m, "R": R, "base": str(base)}, rows, summary)


def verify_ratio_limit(spec, s: int, tol: Fraction, prec: int = 256) -> dict:
    from .sequences import ratio_limit_statistic

    stat = ratio_limit_statistic(spec, s, prec=prec)
    holds = ((stat - 1).mag() < tol)
    rows = [report_row(f"|statistic(s={s}) - 1| < tol", stat, tol, bool(holds), spec.name)]
    return _report("verify ratio-limit", spec.name, {"s": s, "tol": str(tol)}, rows)


def verify_asymptotics(ns: list[int], max_bits: int) -> dict:
    from .bounds import zagier_fit

    fit = zagier_fit(ns, max_bits=max_bits, with_ratios=True)
    rows = []
    for n, est in fit.A0_estimates:
        err = abs(float(est.mid) - float(fit.A0_reference))
        rows.append(report_row("A0 estimate vs reference (tol 1e-3)", est, fit.A0_reference, err < 1e-3,
                               "zeta", n, 0, hard=False))
    for n, est in fit.ratio_estimates:
        err = (est - fit.ratio_reference).mag()
        rows.append(report_row("A1/A0 vs e^(9/8)/sqrt(6) (tol 1e-2)", est, fit.ratio_reference,
                               err < Fraction(1, 100), "zeta", n, None, hard=False))
    for row in fit.ratio_rows:
        for name, cmp in (("first", row.first), ("second", row.second),
                          ("first reindexed", row.first_reindexed),
                          ("second reindexed", row.second_reindexed)):
            rows.append(report_row(f"{name} ratio normalized residual < 50", f"{cmp.residual:.6g}", "50",
                                   cmp.residual < 50, "zeta", row.n, None, hard=False))
    return _report("verify asymptotics", "zeta", {"n": ns, "max_bits": max_bits}, rows)


# ---------------------------------------------------------------------------
# selftest
# ---------------------------------------------------------------------------


def cmd_selftest(seed: int, inject_fault: bool = False) -> tuple[dict, int]:
    from .selftest import noisy_zeta, run_selftest

    suites = run_selftest(seed, zeta_spec=noisy_zeta(seed) if inject_fault else None)
    ok = all(s.failed == 0 for s in suites)
    report = {
        "seed": seed,
        "status": "ok" if ok else "fail",
        "suites": {s.name: {"passed": s.passed, "failed": s.failed, "failures": s.failures} for s in suites},
    }
    return report, EXIT_OK if ok else EXIT_CHECK_FAILED


def selftest_text(report: dict) -> str:
    lines = [f"seed {report['seed']}"]
    for name, s in report["suites"].items():
        lines.append(f"{name}: {s['passed']} passed, {s['failed']} failed")
        lines.extend(f"  FAIL {label}" for label in s["failures"])
    lines.append(report["status"])
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Argument parsing and dispatch
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="hankel-dirichlet", description="Certified Hankel determinants of Dirichlet series.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, n_default: str | None = None, r_default: str = "0"):
        sp.add_argument("--series", default="zeta", help="catalog name or path to a JSON series file")
        sp.add_argument("--n", default=n_default, required=n_default is None, help="n, a..b or a,b,c")
        sp.add_argument("--r", default=r_default, help="r, a..b or a,b,c")
        sp.add_argument("--output", choices=("json", "csv"), default="json")
        sp.add_argument("--out", default=None, help="output file (default stdout)")

    c = sub.add_parser("compute", help="compute Hankel determinants")
    common(c)
    c.add_argument("--precision", default="auto", help="'auto' or a fixed number of bits")
    c.add_argument("--engine", choices=("auto", "lu", "dodgson", "monien", "exact"), default="auto")
    c.add_argument("--cutoff", type=int, default=None, help="index cutoff for the monien engine")

    v = sub.add_parser("verify", help="run a verification report")
    vsub = v.add_subparsers(dest="check", required=True)
    d = vsub.add_parser("decay")
    common(d, n_default="4..8")
    d.add_argument("--epsilon", default=None)
    d.add_argument("--c", default=None)
    e = vsub.add_parser("envelope")
    common(e, n_default="2..8", r_default="0..4")
    ra = vsub.add_parser("rationality")
    common(ra, n_default="1", r_default="0..3")
    ra.set_defaults(series="pow2")
    ra.add_argument("--m", type=int, default=12)
    ra.add_argument("--R", type=int, default=None)
    ra.add_argument("--base", default="1.9")
    rl = vsub.add_parser("ratio-limit")
    common(rl, n_default="1")
    rl.add_argument("--s", type=int, required=True)
    rl.add_argument("--tol", default="1e-3")
    a = vsub.add_parser("asymptotics")
    common(a, n_default="8..14")

    st = sub.add_parser("selftest", help="run the bundled invariant suite")
    st.add_argument("--seed", type=int, default=0)
    st.add_argument("--output", choices=("text", "json"), default="text")
    st.add_argument("--out", default=None)
    st.add_argument("--inject-fault", action="store_true", help=argparse.SUPPRESS)
    return p


def _run(args: argparse.Namespace) -> int:
    max_bits = max_bits_from_env()
    stream, close = _open_out(getattr(args, "out", None))
    try:
        if args.command == "selftest":
            report, code = cmd_selftest(args.seed, args.inject_fault)
            stream.write(json.dumps(report, indent=2) + "\n" if args.output == "json" else selftest_text(report))
            return code

        from .sequences import get_series

        if args.command == "compute":
            cfg = RunConfig(args.series, parse_range(args.n), parse_range(args.r), _precision(args.precision),
                            args.engine, max_bits, args.output)
            try:
                records, code = cmd_compute(cfg, args.cutoff)
            except PrecisionExhausted as exc:
                print(f"precision exhausted: {exc}", file=sys.stderr)
                return EXIT_PRECISION
            write_records(records, RECORD_FIELDS, cfg.output, stream)
            return code

        spec = get_series(args.series) if args.check != "asymptotics" else None
        if args.check == "decay":
            if args.epsilon is not None and args.c is not None:
                raise UsageError("give only one of --epsilon and --c")
            eps = _fraction(args.epsilon) if args.epsilon is not None else None
            cc = _fraction(args.c) if args.c is not None else None
            report = verify_decay(spec, parse_range(args.n), parse_range(args.r)[0], eps, cc, max_bits)
        elif args.check == "envelope":
            report = verify_envelope(spec, parse_range(args.n), parse_range(args.r), max_bits)
        elif args.check == "rationality":
            report = verify_rationality(spec, args.m, args.R, _fraction(args.base), parse_range(args.r))
        elif args.check == "ratio-limit":
            report = verify_ratio_limit(spec, args.s, _fraction(args.tol))
        else:
            report = verify_asymptotics(parse_range(args.n), max_bits)
        write_report(report, args.output, stream)
        return EXIT_OK if report["ok"] else EXIT_CHECK_FAILED
    finally:
        if close:
            stream.close()


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _run(args)
    except UsageError as exc:
        print(f"hankel-dirichlet: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (InvalidSeries, NotRationalSeries) as exc:
        print(f"invalid series: {exc}", file=sys.stderr)
        return EXIT_INVALID_SERIES
    except PrecisionExhausted as exc:
        print(f"precision exhausted: {exc}", file=sys.stderr)
        return EXIT_PRECISION


if __name__ == "__main__":
    sys.exit(main())
