"""Command-line entry point: ``oddforms <subcommand> ...``.

Exit status: 0 success, 1 verification failure or exceeded cap, 2 usage error.
"""

from __future__ import annotations

import argparse
import sys as _sys
from dataclasses import replace
from pathlib import Path

from .config import ConfigError, PipelineConfig, load_config, parse_config
from .counting import CountQuery, count_record, weighted_prime_count
from .errors import (
    CapExceeded, EvenDegreeError, NoSolutionFound, OddFormsError, SystemSyntaxError, VerificationError,
)
from .forms import FormSystem, format_system, parse_system, scale_variables
from .local import count_points, real_nonsingular_solution
from .padic import find_padic_nonzero_solution, hensel_lift, is_nonsingular
from .pipeline import run_pipeline
from .primes import primes_up_to
from .rank import CSV_FIELDS, block_ranks, verify_lampert_codim, verify_strength_birch
from .regularize import SearchOptions, prepare_reduced_system
from .reports import atomic_write, csv_text, emit
from .scaling import apply_signs, build_multipliers, detect_bad_primes, verify_scaled_local


class UsageError(Exception):
    pass


def _ints(text: str) -> list[int]:
    try:
        return [int(x) for x in text.replace(" ", "").split(",") if x]
    except ValueError:
        raise UsageError(f"expected a comma-separated integer list, got {text!r}") from None


def _read_system(path: str) -> FormSystem:
    try:
        return parse_system(Path(path).read_text())
    except OSError as exc:
        raise UsageError(f"cannot read system file: {exc}") from exc


def _config(args) -> PipelineConfig:
    if getattr(args, "config", None):
        return load_config(args.config)
    return parse_config("")


def _variables(spec: str | None, sys: FormSystem) -> tuple[int, ...]:
    """Comma list of 1-based indices or variable names."""
    if not spec:
        return ()
    out = []
    for tok in spec.replace(" ", "").split(","):
        if not tok:
            continue
        if tok in sys.names:
            out.append(sys.names.index(tok))
        elif tok.isdigit() and 1 <= int(tok) <= sys.s:
            out.append(int(tok) - 1)
        else:
            raise UsageError(f"unknown variable {tok!r}")
    return tuple(sorted(set(out)))


# -- subcommands -----------------------------------------------------------------------


def cmd_regularize(args) -> int:
    cfg = _config(args)
    sys = _read_system(args.system)
    opt = SearchOptions(cfg.coeff_height, cfg.height_bound, cfg.rank_budget, cfg.max_steps,
                        cfg.birch_primes, cfg.sbound)
    red = prepare_reduced_system(sys, cfg.growth, cfg.threshold, cfg.cleanup_primes, cfg.enum_cap,
                                 opt, cfg.max_rounds)
    emit(format_system(red.system), args.output)
    cert = red.certificate.report()
    if args.certificate:
        atomic_write(args.certificate, cert)
    elif args.output not in (None, "-"):
        print(cert, end="")
    ok = red.certificate.replays_exactly() and red.certificate.J_within_bound
    return 0 if ok else 1


def cmd_rank(args) -> int:
    sys = _read_system(args.system)
    primes = tuple(_ints(args.primes))
    ranks = block_ranks(sys, args.coeff_box, args.height_bound, args.budget, primes, args.sbound)
    emit(csv_text(CSV_FIELDS, [r.csv_row() for r in ranks]), args.output)
    sb = verify_strength_birch(sys, ranks)
    lc = verify_lampert_codim(sys, primes, args.sbound, [r.birch for r in ranks], args.sbound)
    print(f"strength_birch holds={str(sb.holds).lower()} h={sb.lhs} rhs={sb.rhs} margin={sb.margin}",
          file=_sys.stderr)
    print(f"lampert_codim holds={str(lc.holds).lower()} measured={lc.measured} bound={lc.bound}",
          file=_sys.stderr)
    return 0 if sb.holds and lc.holds else 1


def cmd_count_fp(args) -> int:
    sys = _read_system(args.system)
    primes = _ints(args.primes) if args.primes else [p for p in primes_up_to(args.p_max) if p >= args.p_min]
    rows = []
    ok = True
    for p in primes:
        c = count_points(sys, p, args.cap)
        rows.append({"p": p, "total": c.total, "expected": str(c.expected), "bound": str(c.bound),
                     "ok": str(c.bound_satisfied).lower()})
        ok = ok and c.bound_satisfied
    emit(csv_text(("p", "total", "expected", "bound", "ok"), rows), args.output)
    return 0 if ok or not args.strict else 1


def cmd_lift(args) -> int:
    sys = _read_system(args.system)
    if args.seed:
        seed = _ints(args.seed)
        if len(seed) != sys.s:
            raise UsageError(f"seed needs {sys.s} coordinates")
        try:
            pt = hensel_lift(sys, seed, args.p, args.k, _variables(args.frozen, sys))
        except ValueError as exc:
            print(f"error: {exc}", file=_sys.stderr)
            return 1
        delta = None
    else:
        res = find_padic_nonzero_solution(sys, args.p, args.k, args.budget, args.delta_max)
        pt, delta = res.point, res.delta
    residues = [f.evaluate(pt.coords, pt.modulus) for f in sys.forms]
    lines = [f"p = {pt.p}", f"k = {pt.k}", "point = " + ",".join(map(str, pt.coords)),
             "signed = " + ",".join(map(str, pt.signed())),
             "valuations = " + ",".join(map(str, pt.valuations)),
             "unit_parts = " + ",".join(map(str, pt.unit_parts)),
             "residues = " + ",".join(map(str, residues))]
    if delta is not None:
        lines.append("layer = " + ",".join(map(str, delta)))
        lines.append(f"nonsingular = {str(is_nonsingular(sys.forms, pt)).lower()}")
    emit("\n".join(lines) + "\n", args.output)
    return 0 if not any(residues) else 1


def cmd_scale(args) -> int:
    cfg = _config(args)
    sys = _read_system(args.system)
    p_max = args.p_max or cfg.p_max
    k = args.k or cfg.precision
    primes = detect_bad_primes(sys, p_max, cfg.enum_cap)
    if primes.undetermined:
        raise CapExceeded(f"primes {list(primes.undetermined)} exceed the enumeration cap")
    plan = build_multipliers(sys, primes.bad, k, cfg.padic_budget, cfg.delta_max, cfg.enum_cap)
    seed = cfg.seed if args.seed is None else args.seed
    try:
        plan = apply_signs(plan, real_nonsingular_solution(sys, cfg.real_tolerance, cfg.real_budget, seed))
    except NoSolutionFound as exc:
        print(f"warning: {exc}; signs left positive", file=_sys.stderr)
    ver = verify_scaled_local(sys, plan, primes_up_to(p_max), k, cfg.enum_cap)
    emit(f"seed = {seed}\n" + plan.report(sys.names) + ver.report(), args.output)
    if args.scaled_system:
        atomic_write(args.scaled_system, format_system(scale_variables(sys, plan.y)))
    return 0 if ver.ok else 1


def cmd_count(args) -> int:
    sys = _read_system(args.system)
    J = _variables(args.J, sys)
    Ns = args.N or [100]
    rows = []
    for N in Ns:
        if args.weighted:
            rows.append({"N": N, "weighted": f"{weighted_prime_count(sys, N, args.cap):.12g}"})
            continue
        q = CountQuery(sys, N, args.Y, J, args.allow_zero_y, sample_limit=0, cap=args.cap)
        rec, _ = count_record(q)
        row = {"N": rec.N, "Y": rec.Y, "count": rec.count, "predicted": f"{rec.predicted:.6g}",
               "ratio": f"{rec.ratio:.6g}"}
        if args.timing:
            row["elapsed"] = f"{rec.elapsed:.3f}"
        rows.append(row)
    if args.weighted:
        fields = ("N", "weighted")
    else:
        fields = ("N", "Y", "count", "predicted", "ratio") + (("elapsed",) if args.timing else ())
    emit(csv_text(fields, rows), args.output)
    return 0


def cmd_pipeline(args) -> int:
    cfg = load_config(args.config)
    if args.output_dir:
        cfg = replace(cfg, output_dir=Path(args.output_dir))
    if not str(cfg.system) or not Path(cfg.system).is_file():
        raise UsageError(f"config 'system' does not name a readable file: {cfg.system}")
    rep = run_pipeline(cfg)
    print(f"verdict = {rep.verdict}")
    print(f"report = {Path(cfg.output_dir) / 'report.txt'}")
    if rep.failure:
        print(f"failure: {rep.failure}", file=_sys.stderr)
    return 0 if rep.verdict == "PASS" else 1


# -- parser -----------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="oddforms", description="Odd-degree form systems: ranks, local "
                                 "solutions, scaling and almost-prime counts.")
    sub = ap.add_subparsers(dest="command", metavar="command")
    sub.required = True

    p = sub.add_parser("regularize", help="reduce a system and write the certificate")
    p.add_argument("system")
    p.add_argument("--config")
    p.add_argument("-o", "--output", help="reduced system file (default stdout)")
    p.add_argument("--certificate", help="certificate report file")
    p.set_defaults(func=cmd_regularize)

    p = sub.add_parser("rank", help="per-block Schmidt/Birch ranks as CSV")
    p.add_argument("system")
    p.add_argument("--height-bound", type=int, default=1)
    p.add_argument("--coeff-box", type=int, default=1)
    p.add_argument("--budget", type=int, default=2000)
    p.add_argument("--primes", default="7,11,13")
    p.add_argument("--sbound", type=int, default=2 * 10**6)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_rank)

    p = sub.add_parser("count-fp", help="exhaustive F_p point counts against p^(s-R)")
    p.add_argument("system")
    p.add_argument("--p-min", type=int, default=2)
    p.add_argument("--p-max", type=int, default=13)
    p.add_argument("--primes", help="explicit comma list (overrides the range)")
    p.add_argument("--cap", type=int, default=10**7)
    p.add_argument("--strict", action="store_true", help="exit 1 if any count misses the bound")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_count_fp)

    p = sub.add_parser("lift", help="Hensel-lift a seed, or search for a p-adic zero")
    p.add_argument("system")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--k", type=int, default=8)
    p.add_argument("--seed", help="comma list of residues mod p; omit to search")
    p.add_argument("--frozen", help="variables held fixed (names or 1-based indices)")
    p.add_argument("--budget", type=int, default=10**7)
    p.add_argument("--delta-max", type=int, default=2)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_lift)

    p = sub.add_parser("scale", help="bad primes, multipliers and local verification")
    p.add_argument("system")
    p.add_argument("--config")
    p.add_argument("--p-max", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("-o", "--output", help="plan report (default stdout)")
    p.add_argument("--scaled-system", help="write the scaled system here")
    p.set_defaults(func=cmd_scale)

    p = sub.add_parser("count", help="almost-prime or von Mangoldt weighted counts")
    p.add_argument("system")
    p.add_argument("--N", type=int, action="append")
    p.add_argument("--Y", type=int, default=1)
    p.add_argument("--J", help="exceptional variables (names or 1-based indices)")
    p.add_argument("--allow-zero-y", action="store_true")
    p.add_argument("--weighted", action="store_true")
    p.add_argument("--cap", type=int, default=2 * 10**9)
    p.add_argument("--timing", action="store_true", help="add an elapsed-seconds column")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_count)

    p = sub.add_parser("pipeline", help="run every stage from a config file")
    p.add_argument("--config", required=True)
    p.add_argument("--output-dir")
    p.set_defaults(func=cmd_pipeline)
    return ap


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, ConfigError, SystemSyntaxError) as exc:
        print(f"usage error: {exc}", file=_sys.stderr)
        return 2
    except EvenDegreeError as exc:
        print(f"error: even degree form: {exc}", file=_sys.stderr)
        return 1
    except CapExceeded as exc:
        print(f"error: cap exceeded: {exc}", file=_sys.stderr)
        return 1
    except (VerificationError, NoSolutionFound, OddFormsError) as exc:
        print(f"error: {exc}", file=_sys.stderr)
        return 1
    except ValueError as exc:
        print(f"usage error: {exc}", file=_sys.stderr)
        return 2


if __name__ == "__main__":  # pragma: no cover
    raise SystemExit(main())
