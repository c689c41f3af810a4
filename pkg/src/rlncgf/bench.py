"""Encoding-throughput benchmark.

One measurement point repeatedly encodes a generation of N random source
packets into a single accumulator and reports coded payload bits per
second.  Points sweep packet sizes so that the working set, ``(N + 1) *
packet_bytes``, crosses the L1/L2/L3 boundaries.
"""

from __future__ import annotations

import csv
import glob
import os
import sys
import time
from dataclasses import dataclass, field, replace
from typing import Callable, Iterable, Sequence

import numpy as np

from .fields import FIELDS, FieldSpec, FieldTables, get_tables, oracle_madd
from .kernels import (
    Algorithm,
    CapabilityError,
    FeatureSet,
    KernelId,
    available_kernels,
    detect_features,
    get_madd,
    select_kernel,
    supports,
)
from .kernels import region as _region
from .rlnc import random_coefficients

CSV_HEADER = [
    "field",
    "kernel",
    "packet_bytes",
    "gen_size",
    "repetitions",
    "elapsed_s",
    "throughput_gbps",
    "working_set_bytes",
    "l1d",
    "l2",
    "l3",
    "pinned",
]

DEFAULT_SIZES = [1 << k for k in range(7, 21)]  # 128 B .. 1 MiB
COEFF_POOL = 64


def throughput_gbps(packet_bytes: int, encodings: int, elapsed: float) -> float:
    if elapsed <= 0:
        return float("inf")
    return packet_bytes * 8 * encodings / elapsed / 1e9


def working_set(packet_bytes: int, gen_size: int) -> int:
    return (gen_size + 1) * packet_bytes


@dataclass(frozen=True)
class CacheInfo:
    l1d: int | None = None
    l2: int | None = None
    l3: int | None = None

    def boundaries(self, gen_size: int) -> dict[str, float]:
        """Packet size at which the working set fills each known cache level."""
        out = {}
        for name in ("l1d", "l2", "l3"):
            size = getattr(self, name)
            if size:
                out[name] = size / (gen_size + 1)
        return out


def _parse_size(text: str) -> int:
    text = text.strip().upper().rstrip("B").rstrip("I")
    mult = {"K": 1 << 10, "M": 1 << 20, "G": 1 << 30}.get(text[-1:], 1)
    if mult != 1:
        text = text[:-1]
    return int(text) * mult


def detect_caches(sysfs_root: str = "/sys/devices/system/cpu/cpu0/cache") -> CacheInfo:
    """Best-effort cache sizes; levels that cannot be determined are None."""
    found: dict[str, int] = {}
    for d in sorted(glob.glob(os.path.join(sysfs_root, "index*"))):
        try:
            with open(os.path.join(d, "level")) as fh:
                level = int(fh.read())
            with open(os.path.join(d, "type")) as fh:
                kind = fh.read().strip()
            with open(os.path.join(d, "size")) as fh:
                size = _parse_size(fh.read())
        except (OSError, ValueError):
            continue
        if level == 1 and kind in ("Data", "Unified"):
            found.setdefault("l1d", size)
        elif level == 2:
            found.setdefault("l2", size)
        elif level == 3:
            found.setdefault("l3", size)
    for key, name in (("l1d", "SC_LEVEL1_DCACHE_SIZE"), ("l2", "SC_LEVEL2_CACHE_SIZE"), ("l3", "SC_LEVEL3_CACHE_SIZE")):
        if key in found:
            continue
        try:
            v = os.sysconf(name)
        except (ValueError, OSError, AttributeError):
            continue
        if v and v > 0:
            found[key] = v
    return CacheInfo(**found)


@dataclass
class BenchConfig:
    fields: list[FieldSpec] = field(default_factory=lambda: list(FIELDS.values()))
    kernels: str | list[str] = "auto"
    gen_size: int = 16
    sizes: list[int] = field(default_factory=lambda: list(DEFAULT_SIZES))
    min_time: float = 1.0
    reps: int | None = None
    seed: int = 0
    pin: int | None = None
    l2_bytes: int | None = None
    csv_path: str | None = None
    features: FeatureSet | None = None
    caches: CacheInfo | None = None

    def __post_init__(self) -> None:
        if self.gen_size < 1:
            raise ValueError("generation size must be at least 1")
        for s in self.sizes:
            if s <= 0 or s % _region.BLOCK:
                raise ValueError(f"packet size {s} is not a positive multiple of {_region.BLOCK}")
        if self.reps is not None and self.reps < 1:
            raise ValueError("repetition count must be at least 1")

    def resolved_features(self) -> FeatureSet:
        return detect_features() if self.features is None else self.features

    def kernels_for(self, spec: FieldSpec) -> list[KernelId]:
        feats = self.resolved_features()
        if self.kernels == "auto":
            return [select_kernel(spec, feats)]
        if self.kernels == "all":
            return available_kernels(spec, feats)
        names = [self.kernels] if isinstance(self.kernels, str) else self.kernels
        return [KernelId.parse(n) for n in names]


@dataclass(frozen=True)
class BenchRecord:
    field: str
    kernel: str
    packet_bytes: int
    gen_size: int
    repetitions: int
    elapsed_s: float
    throughput_gbps: float
    working_set_bytes: int
    l1d: int | None = None
    l2: int | None = None
    l3: int | None = None
    pinned: str = "unpinned"

    def row(self) -> list[str]:
        def opt(v):
            return "" if v is None else str(v)

        return [
            self.field,
            self.kernel,
            str(self.packet_bytes),
            str(self.gen_size),
            str(self.repetitions),
            repr(self.elapsed_s),
            repr(self.throughput_gbps),
            str(self.working_set_bytes),
            opt(self.l1d),
            opt(self.l2),
            opt(self.l3),
            self.pinned,
        ]


def pin_to_core(core: int | None) -> str:
    if core is None:
        return "unpinned"
    try:
        os.sched_setaffinity(0, {core})
    except (AttributeError, OSError, ValueError):
        return "unpinned"
    return f"core{core}"


def _timed_loop(
    madd: Callable[[FieldTables, np.ndarray, np.ndarray, int], None],
    tables: FieldTables,
    sources: Sequence[np.ndarray],
    acc: np.ndarray,
    pool: list[list[int]],
    min_time: float,
    reps: int | None,
    clock: Callable[[], float],
) -> tuple[int, float]:
    # nothing in here may allocate a region
    pairs = list(zip(range(len(sources)), sources))
    npool = len(pool)
    done = 0
    start = clock()
    elapsed = 0.0
    while True:
        coeffs = pool[done % npool]
        for i, a in pairs:
            madd(tables, acc, a, coeffs[i])
        done += 1
        elapsed = clock() - start
        if reps is not None:
            if done >= reps:
                break
        elif elapsed >= min_time:
            break
    return done, elapsed


def run_point(
    config: BenchConfig,
    spec: FieldSpec,
    kernel: KernelId,
    size: int,
    *,
    madd: Callable | None = None,
    tables: FieldTables | None = None,
    clock: Callable[[], float] = time.perf_counter,
    pinned: str = "unpinned",
) -> BenchRecord:
    """Measure one (field, kernel, packet size) point.

    Raises ``CapabilityError`` if the kernel cannot run here.
    """
    if not supports(kernel, spec, config.resolved_features()):
        raise CapabilityError(f"{kernel} unavailable for {spec}")
    tables = get_tables(spec) if tables is None else tables
    madd = get_madd(kernel) if madd is None else madd
    n = config.gen_size
    rng = np.random.default_rng(config.seed)
    sources = []
    for _ in range(n):
        r = _region.alloc_region(size, fill=None)
        r[:] = rng.integers(0, 256, size=size, dtype=np.uint8)
        sources.append(r)
    acc = _region.alloc_region(size)
    pool = random_coefficients((COEFF_POOL, n), spec, rng).tolist()
    if kernel.algorithm is Algorithm.XOR:
        pool = [[c & 1 for c in row] for row in pool]

    done, elapsed = _timed_loop(madd, tables, sources, acc, pool, config.min_time, config.reps, clock)
    caches = config.caches or CacheInfo()
    return BenchRecord(
        field=spec.name,
        kernel=kernel.name,
        packet_bytes=size,
        gen_size=n,
        repetitions=done,
        elapsed_s=elapsed,
        throughput_gbps=throughput_gbps(size, done, elapsed),
        working_set_bytes=working_set(size, n),
        l1d=caches.l1d,
        l2=caches.l2,
        l3=caches.l3,
        pinned=pinned,
    )


@dataclass
class VerifyFailure:
    field: str
    kernel: str
    detail: str

    def __str__(self) -> str:
        return f"{self.field} {self.kernel}: {self.detail}"


@dataclass
class VerifyReport:
    checked: list[tuple[str, str]] = field(default_factory=list)
    failures: list[VerifyFailure] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def failed(self, spec: FieldSpec, kernel: KernelId) -> bool:
        return any(f.field == spec.name and f.kernel == kernel.name for f in self.failures)


def verify_kernel(
    spec: FieldSpec,
    kernel: KernelId,
    tables: FieldTables | None = None,
    cases: int = 16,
    seed: int = 0,
) -> VerifyFailure | None:
    """Compare ``kernel`` against the word-wise oracle; None when it agrees."""
    tables = get_tables(spec) if tables is None else tables
    madd = get_madd(kernel)
    rng = np.random.default_rng(seed)
    top = 2 if kernel.algorithm is Algorithm.XOR else spec.q
    coeffs = list(range(top)) + rng.integers(0, top, size=cases).tolist()
    lengths = [64, 128, 4096, 8192]
    for i, c in enumerate(coeffs):
        n = lengths[i % len(lengths)]
        a = _region.alloc_region(n)
        b = _region.alloc_region(n)
        a[:] = rng.integers(0, 256, size=n, dtype=np.uint8)
        b[:] = rng.integers(0, 256, size=n, dtype=np.uint8)
        expected = oracle_madd(b, a, c, spec)
        madd(tables, b, a, c)
        if not np.array_equal(b, expected):
            bad = int(np.flatnonzero(b != expected)[0])
            return VerifyFailure(spec.name, kernel.name, f"c={c} len={n} first mismatch at byte {bad}")
    return None


def verify_mode(
    config: BenchConfig,
    tables_for: Callable[[FieldSpec], FieldTables] = get_tables,
) -> VerifyReport:
    """Run every configured (field, kernel) pair against the oracle.

    ``tables_for`` lets tests inject corrupted tables.
    """
    report = VerifyReport()
    feats = config.resolved_features()
    for spec in config.fields:
        for kernel in config.kernels_for(spec):
            if not supports(kernel, spec, feats):
                continue
            report.checked.append((spec.name, kernel.name))
            fail = verify_kernel(spec, kernel, tables_for(spec), seed=config.seed)
            if fail is not None:
                report.failures.append(fail)
    return report


@dataclass(frozen=True)
class SummaryRow:
    field: str
    kernel: str
    mean_gbps: float
    points: int


def l2_summary(records: Iterable[BenchRecord], l2_bytes: int) -> list[SummaryRow]:
    """Per field: the fastest kernel's mean throughput over points that fit in L2.

    A point fits when its working set is at most ``l2_bytes``.
    """
    groups: dict[tuple[str, str], list[float]] = {}
    for r in records:
        if r.working_set_bytes <= l2_bytes:
            groups.setdefault((r.field, r.kernel), []).append(r.throughput_gbps)
    best: dict[str, SummaryRow] = {}
    for (fld, kern), vals in groups.items():
        row = SummaryRow(fld, kern, sum(vals) / len(vals), len(vals))
        if fld not in best or row.mean_gbps > best[fld].mean_gbps:
            best[fld] = row
    return [best[k] for k in sorted(best, key=lambda name: int(name[3:-1]))]


def write_csv(records: Iterable[BenchRecord], path: str | None) -> None:
    fh = open(path, "w", newline="", encoding="utf-8") if path else sys.stdout
    try:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for r in records:
            w.writerow(r.row())
    finally:
        if path:
            fh.close()


def read_csv(path: str) -> list[dict[str, str]]:
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


@dataclass
class SuiteResult:
    records: list[BenchRecord]
    summary: list[SummaryRow] | None
    skipped: list[str]
    verify: VerifyReport


def run_suite(config: BenchConfig, log: Callable[[str], None] = lambda m: print(m, file=sys.stderr)) -> SuiteResult:
    """Verify, then measure every (field, kernel, size) combination.

    Kernels that fail verification or are unavailable are skipped with a
    notice.  The L2 summary is computed when an L2 size is known.
    """
    if config.csv_path:
        # fail on an unwritable path before spending minutes measuring
        open(config.csv_path, "a").close()
    if config.caches is None:
        config.caches = detect_caches()
    if config.l2_bytes is not None:
        config.caches = replace(config.caches, l2=config.l2_bytes)
    pinned = pin_to_core(config.pin)
    feats = config.resolved_features()
    report = verify_mode(config)
    for f in report.failures:
        log(f"verification failed, not benchmarking: {f}")

    records: list[BenchRecord] = []
    skipped: list[str] = []
    for spec in config.fields:
        tables = get_tables(spec)
        for kernel in config.kernels_for(spec):
            if not supports(kernel, spec, feats):
                msg = f"{spec} {kernel}: not available on this CPU, skipped"
                log(msg)
                skipped.append(msg)
                continue
            if report.failed(spec, kernel):
                skipped.append(f"{spec} {kernel}: failed verification")
                continue
            for size in config.sizes:
                rec = run_point(config, spec, kernel, size, tables=tables, pinned=pinned)
                log(f"{rec.field:8} {rec.kernel:11} {size:>8} B  {rec.throughput_gbps:8.3f} Gbit/s")
                records.append(rec)

    l2 = config.caches.l2
    summary = l2_summary(records, l2) if l2 else None
    write_csv(records, config.csv_path)
    return SuiteResult(records, summary, skipped, report)
