"""Run orchestration: segment partitioning, worker pool, report and
checkpoint files.

The report is CSV with a ``#`` header block and a ``#`` summary trailer.
Rows are appended one work unit (group of segments) at a time, in order;
after each append the checkpoint is replaced atomically with the new
contiguous prefix and the report byte offset it ends at. Resuming truncates
the report back to that offset, so a killed run never leaves the checkpoint
ahead of the report.
"""

import hashlib
import io
import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from . import oracle, rtable
from .search import COUNTEREXAMPLE, FOUND, verify_segment
from .sieve import BitVector, SieveConfig, plan_segment, sieve_primes

log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_ATTENTION = 2
EXIT_CONDITIONAL = 3

COLUMNS = "n,case,prime,candidates_tested,fallback_level,inconclusive_skips"
LEVELS = 7

DECISION_RULES = {
    "rtable_class": "five-smallest-primes-at-or-above-magnitude",
    "modulus": "R*m-nearest-target;m-even-or-multiple-of-30;ties-smaller-m",
    "alt_r": "same-class-next-prime;m-rederived",
    "bls_base": "2;inconclusive-skipped",
    "algorithm_a": "trial-division-1000;sprp2;deterministic-mr-13",
}


@dataclass(frozen=True)
class RunConfig:
    start_n: int
    end_n: int
    workers: int = 1
    segment_bits: int = 17
    s: int = 128
    t_min: int = 256
    t_max: int = 512
    rtable_path: str | None = None
    checkpoint_path: str | None = None
    report_path: str | None = None
    group_size: int = 64

    def __post_init__(self):
        if not 2 <= self.start_n <= self.end_n:
            raise ValueError(f"need 2 <= start_n <= end_n, got {self.start_n}..{self.end_n}")
        if self.workers < 1 or self.group_size < 1:
            raise ValueError("workers and group_size must be >= 1")

    @property
    def sieve(self):
        return SieveConfig(self.segment_bits, self.s, self.t_min, self.t_max)


@dataclass
class Summary:
    intervals: int = 0
    found: int = 0
    counterexamples: int = 0
    unproven: int = 0
    tested: int = 0
    inconclusive: int = 0
    fallback: list = field(default_factory=lambda: [0] * LEVELS)
    ratio_num: int = 0
    ratio_den: int = 1

    @property
    def failed(self):
        return self.tested - self.found

    @property
    def avg_failed(self):
        return self.failed / self.intervals if self.intervals else 0.0

    def merge(self, other):
        self.intervals += other.intervals
        self.found += other.found
        self.counterexamples += other.counterexamples
        self.unproven += other.unproven
        self.tested += other.tested
        self.inconclusive += other.inconclusive
        self.fallback = [a + b for a, b in zip(self.fallback, other.fallback)]
        self.bump_ratio(other.ratio_num, other.ratio_den)

    def bump_ratio(self, num, den):
        if num * self.ratio_den > self.ratio_num * den:
            self.ratio_num, self.ratio_den = num, den

    def to_items(self):
        return [
            ("intervals", self.intervals),
            ("found", self.found),
            ("counterexamples", self.counterexamples),
            ("unproven", self.unproven),
            ("tested", self.tested),
            ("inconclusive", self.inconclusive),
            ("fallback", ",".join(map(str, self.fallback))),
            ("max_ratio", f"{self.ratio_num}/{self.ratio_den}"),
        ]

    @classmethod
    def from_items(cls, items):
        s = cls()
        for key in ("intervals", "found", "counterexamples", "unproven", "tested", "inconclusive"):
            setattr(s, key, int(items[key]))
        s.fallback = [int(v) for v in items["fallback"].split(",")]
        num, den = items["max_ratio"].split("/")
        s.ratio_num, s.ratio_den = int(num), int(den)
        return s


@dataclass
class VerificationReport:
    header: dict
    summary: Summary
    status: int
    path: str | None = None
    text: str | None = None
    attention: list = field(default_factory=list)


def plan_range(start, end, table, sieve_config):
    """Consecutive segment plans tiling [start, end]."""
    plans = []
    n = start
    while n <= end:
        plan = plan_segment(n, table, sieve_config, t_cap=end - n + 1)
        plans.append(plan)
        n += plan.t
    return plans


# per-process state for workers
_STATE = {}


def _init_worker(groups, L):
    table = rtable.RTable(groups)
    _STATE["table"] = table
    _STATE["x"] = BitVector(L)
    _STATE["primes"] = sieve_primes(L)


def _process_group(plans):
    table = _STATE["table"]
    x = _STATE["x"]
    primes = _STATE["primes"]
    out = io.StringIO()
    summary = Summary()
    flagged = []
    for plan in plans:
        for r in verify_segment(plan, x, table, primes):
            iv = r.interval
            summary.intervals += 1
            summary.tested += r.candidates_tested
            summary.inconclusive += len(r.inconclusive)
            summary.fallback[r.fallback_level] += 1
            skips = ";".join(map(str, r.inconclusive))
            if r.outcome == FOUND:
                summary.found += 1
                summary.unproven += r.unproven
                summary.bump_ratio(r.prime - iv.lo, iv.hi - iv.lo)
                out.write(f"{iv.n},{iv.case},{r.prime},{r.candidates_tested},{r.fallback_level},{skips}\n")
            else:
                summary.counterexamples += 1
                flagged.append((iv.n, iv.case, iv.lo, iv.hi))
                out.write(f"{iv.n},{iv.case},,{r.candidates_tested},{r.fallback_level},{skips}\n")
    return plans[-1].n + plans[-1].t - 1, out.getvalue(), summary, flagged


def report_header(config, table):
    header = {
        "start_n": config.start_n,
        "end_n": config.end_n,
        "segment_bits": config.segment_bits,
        "s": config.s,
        "t_min": config.t_min,
        "t_max": config.t_max,
        "rtable_sha256": table.digest(),
        "rtable_classes": len(table),
    }
    header.update({f"rule.{k}": v for k, v in DECISION_RULES.items()})
    return header


def header_text(header):
    lines = ["# oppermann verification report"]
    lines += [f"# {k}={v}" for k, v in header.items()]
    lines.append(COLUMNS)
    return "\n".join(lines) + "\n"


def summary_text(summary, attention):
    lines = [f"# summary {k}={v}" for k, v in summary.to_items()]
    lines.append(f"# summary avg_failed_tests={summary.avg_failed:.6f}")
    lines.append(f"# summary max_ratio_float={summary.ratio_num / summary.ratio_den:.6f}")
    lines += [f"# attention {a}" for a in attention]
    return "\n".join(lines) + "\n"


def _fingerprint(text):
    return hashlib.sha256(text.encode()).hexdigest()


def write_checkpoint(path, fingerprint, last_n, offset, summary, attention):
    lines = [f"fingerprint={fingerprint}", f"last_n={last_n}", f"report_offset={offset}"]
    lines += [f"{k}={v}" for k, v in summary.to_items()]
    lines += [f"attention={a}" for a in attention]
    tmp = f"{path}.tmp"
    with open(tmp, "w") as fh:
        fh.write("\n".join(lines) + "\n")
        fh.flush()
        os.fsync(fh.fileno())
    os.replace(tmp, path)


def read_checkpoint(path):
    items = {}
    attention = []
    with open(path) as fh:
        for line in fh:
            key, _, value = line.rstrip("\n").partition("=")
            if key == "attention":
                attention.append(value)
            else:
                items[key] = value
    return items, attention


def _recheck(n, case, lo, hi):
    try:
        found = oracle.primes_in_range(lo, hi)
    except oracle.OracleRefused:
        return f"n={n} case={case} lo={lo} hi={hi} oracle=unavailable"
    return f"n={n} case={case} lo={lo} hi={hi} oracle_primes={len(found)}"


def load_table(config):
    if config.rtable_path:
        return rtable.load(config.rtable_path)
    return rtable.default_table()


def run(config, table=None):
    table = table or load_table(config)
    header = report_header(config, table)
    head = header_text(header)
    fingerprint = _fingerprint(head)
    plans = plan_range(config.start_n, config.end_n, table, config.sieve)

    summary = Summary()
    attention = []
    last_n = config.start_n - 1
    if config.report_path:
        fh, offset = _open_report(config, head, fingerprint)
        if offset is not None:
            items, attention = read_checkpoint(config.checkpoint_path)
            summary = Summary.from_items(items)
            last_n = int(items["last_n"])
            log.info("resuming after n=%d", last_n)
    else:
        fh = io.StringIO()
        fh.write(head)

    todo = [p for p in plans if p.n > last_n]
    groups = [todo[i : i + config.group_size] for i in range(0, len(todo), config.group_size)]
    try:
        for last_n, rows, part, flagged in _dispatch(groups, table, config):
            fh.write(rows)
            summary.merge(part)
            attention += [_recheck(*f) for f in flagged]
            if config.report_path:
                fh.flush()
                os.fsync(fh.fileno())
                if config.checkpoint_path:
                    write_checkpoint(config.checkpoint_path, fingerprint, last_n, fh.tell(), summary, attention)
        fh.write(summary_text(summary, attention))
        text = None if config.report_path else fh.getvalue()
    finally:
        if config.report_path:
            fh.close()

    if summary.counterexamples:
        status = EXIT_ATTENTION
    elif summary.unproven:
        status = EXIT_CONDITIONAL
    else:
        status = EXIT_OK
    return VerificationReport(header, summary, status, config.report_path, text, attention)


def _open_report(config, head, fingerprint):
    """Open the report for appending; returns (handle, resume offset|None)."""
    ck = config.checkpoint_path
    if ck and os.path.exists(ck) and os.path.exists(config.report_path):
        items, _ = read_checkpoint(ck)
        offset = int(items.get("report_offset", -1))
        if items.get("fingerprint") == fingerprint and 0 <= offset <= os.path.getsize(config.report_path):
            fh = open(config.report_path, "r+")
            fh.truncate(offset)
            fh.seek(offset)
            return fh, offset
        log.warning("checkpoint %s does not match this run; starting over", ck)
    fh = open(config.report_path, "w")
    fh.write(head)
    if ck:
        fh.flush()
        write_checkpoint(ck, fingerprint, config.start_n - 1, fh.tell(), Summary(), [])
    return fh, None


def _dispatch(groups, table, config):
    if config.workers == 1:
        _init_worker(table.groups, config.sieve.L)
        for g in groups:
            yield _process_group(g)
        return
    with ProcessPoolExecutor(
        max_workers=config.workers,
        initializer=_init_worker,
        initargs=(table.groups, config.sieve.L),
    ) as pool:
        yield from pool.map(_process_group, groups)


def read_rows(path_or_text):
    """Parse report rows into (n, case, prime|None, tested, level, skips)."""
    if "\n" in path_or_text:
        lines = path_or_text.splitlines()
    else:
        with open(path_or_text) as fh:
            lines = fh.read().splitlines()
    rows = []
    for line in lines:
        if not line or line.startswith("#") or line == COLUMNS:
            continue
        n, case, prime, tested, level, skips = line.split(",")
        rows.append((
            int(n), case, int(prime) if prime else None, int(tested), int(level),
            tuple(int(v) for v in skips.split(";")) if skips else (),
        ))
    return rows
