"""Command line: verify, gen-rtable, oracle-check, estimate."""

import argparse
import logging
import sys

from . import driver, heuristics, kernels, oracle, rtable
from .sieve import SieveConfig, plan_segment


def _int(text):
    # accept 1e6 / 2e9 style as well as plain integers
    try:
        return int(text)
    except ValueError:
        value = float(text)
        if value != int(value):
            raise argparse.ArgumentTypeError(f"not an integer: {text}") from None
        return int(value)


def _sieve_flags(p):
    p.add_argument("--segment-bits", type=int, default=17, help="log2 of the bit-vector length")
    p.add_argument("--s", type=int, default=128, help="minimum candidates per interval")


def build_parser():
    parser = argparse.ArgumentParser(prog="oppermann", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="verify Oppermann's conjecture for start <= n <= end")
    v.add_argument("--start", type=_int, required=True)
    v.add_argument("--end", type=_int, required=True)
    v.add_argument("--workers", type=int, default=1)
    v.add_argument("--rtable", help="R-table file (default: generated in memory)")
    v.add_argument("--checkpoint", help="checkpoint file; an existing matching one is resumed")
    v.add_argument("--report", help="CSV report path (default: stdout)")
    _sieve_flags(v)
    v.add_argument("--min-t", type=int, default=256)
    v.add_argument("--max-t", type=int, default=512)
    v.add_argument("--group-size", type=int, default=64, help="segments per work unit")

    g = sub.add_parser("gen-rtable", help="write a table of proven primes R")
    g.add_argument("--min", type=_int, default=rtable.DEFAULT_MIN)
    g.add_argument("--max", type=_int, default=rtable.DEFAULT_MAX)
    g.add_argument("--out", required=True)

    o = sub.add_parser("oracle-check", help="list primes in (lo, hi) by brute force")
    o.add_argument("--lo", type=_int, required=True)
    o.add_argument("--hi", type=_int, required=True)
    o.add_argument("--mod", type=_int, default=1, help="only primes = 1 mod M")

    e = sub.add_parser("estimate", help="Cramér-model expectations for the plan at n")
    e.add_argument("--n", type=_int, required=True)
    e.add_argument("--rtable")
    _sieve_flags(e)
    return parser


def cmd_verify(args):
    config = driver.RunConfig(
        start_n=args.start,
        end_n=args.end,
        workers=args.workers,
        segment_bits=args.segment_bits,
        s=args.s,
        t_min=args.min_t,
        t_max=args.max_t,
        rtable_path=args.rtable,
        checkpoint_path=args.checkpoint,
        report_path=args.report,
        group_size=args.group_size,
    )
    report = driver.run(config)
    if report.text is not None:
        sys.stdout.write(report.text)
    s = report.summary
    print(
        f"verified {s.intervals} intervals: found={s.found} counterexamples={s.counterexamples} "
        f"unproven={s.unproven} avg_failed_tests={s.avg_failed:.3f} fallback={s.fallback}",
        file=sys.stderr,
    )
    for line in report.attention:
        print(f"ATTENTION {line}", file=sys.stderr)
    return report.status


def cmd_gen_rtable(args):
    table = rtable.generate(args.min, args.max)
    rtable.store(table, args.out)
    print(f"wrote {len(table)} classes ({len(table) * rtable.CLASS_SIZE} primes) to {args.out}")
    return driver.EXIT_OK


def cmd_oracle_check(args):
    for p in oracle.ap_primes_in_range(args.lo, args.hi, args.mod):
        print(p)
    return driver.EXIT_OK


def cmd_estimate(args):
    table = rtable.load(args.rtable) if args.rtable else rtable.default_table()
    config = SieveConfig(segment_bits=args.segment_bits, s=args.s)
    plan = plan_segment(args.n, table, config)
    est = heuristics.plan_estimates(plan)
    print(f"n={plan.n} t={plan.t} R={plan.R} m={plan.m} M={plan.M} B={plan.B} L={plan.L}")
    print(f"candidates_per_interval={est['candidates_per_interval']:.2f}")
    print(f"ap_prime_prob={est['ap_prime_prob']:.6f}")
    print(f"expected_failed_tests={est['expected_failed_tests']:.4f}")
    print(f"interval_miss_prob={est['level1_rate']:.3e}")
    print(f"expected_level1_rate={est['level1_rate']:.3e}")
    print(f"expected_level2_rate={est['level2_rate']:.3e}")
    print(f"mertens_factor={est['mertens_factor']:.4f}")
    return driver.EXIT_OK


COMMANDS = {
    "verify": cmd_verify,
    "gen-rtable": cmd_gen_rtable,
    "oracle-check": cmd_oracle_check,
    "estimate": cmd_estimate,
}


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(asctime)s %(levelname)s %(message)s",
    )
    logging.getLogger(__name__).info("kernel backend: %s", kernels.BACKEND)
    try:
        return COMMANDS[args.command](args)
    except (ValueError, LookupError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return driver.EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
