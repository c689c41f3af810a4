"""``rlncgf-bench``: encoding throughput sweeps from the command line.

Exit codes: 0 success, 1 usage error, 2 verification failure.
"""

from __future__ import annotations

import argparse
import sys

from .bench import BenchConfig, _parse_size, detect_caches, run_suite, verify_mode
from .fields import FIELDS, get_tables
from .kernels import FeatureSet, KernelId, available_kernels, detect_features, select_kernel

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VERIFY = 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse would exit with 2
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def parse_sizes(text: str) -> list[int]:
    """``"128,256,4K"`` is a list; ``"128-8K"`` is every power of two in range."""
    text = text.strip()
    if "-" in text and "," not in text:
        lo_s, hi_s = text.split("-", 1)
        lo, hi = _parse_size(lo_s), _parse_size(hi_s)
        if lo <= 0 or lo > hi:
            raise UsageError(f"bad size range {text!r}")
        out = []
        s = lo
        while s <= hi:
            out.append(s)
            s *= 2
        return out
    try:
        return [_parse_size(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise UsageError(f"bad size list {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="rlncgf-bench", description="Benchmark region multiply-and-add kernels for RLNC encoding.")
    p.add_argument("--field", default="all", choices=["2", "4", "16", "256", "all"])
    p.add_argument("--kernel", default="auto", help="kernel name (e.g. shuffle512, imul64, scalar), 'auto' or 'all'")
    p.add_argument("--gen-size", type=int, default=16, metavar="N")
    p.add_argument("--sizes", default="128-1M", help="comma list or power-of-two range, e.g. 128-8K")
    timing = p.add_mutually_exclusive_group()
    timing.add_argument("--min-time", type=float, default=1.0, metavar="SECONDS")
    timing.add_argument("--reps", type=int, metavar="COUNT")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--pin", type=int, metavar="CORE")
    p.add_argument("--l2-bytes", type=int, metavar="BYTES")
    p.add_argument("--csv", metavar="PATH")
    p.add_argument("--verify", action="store_true", help="check kernels against the oracle and exit")
    p.add_argument("--list-kernels", action="store_true")
    p.add_argument(
        "--emulate",
        action="store_true",
        help="expose every vector width regardless of detected CPU features",
    )
    return p


def _config(args) -> BenchConfig:
    fields = list(FIELDS.values()) if args.field == "all" else [FIELDS[int(args.field)]]
    kernels = args.kernel
    if kernels not in ("auto", "all"):
        kernels = [k for k in kernels.split(",") if k]
        for k in kernels:
            try:
                KernelId.parse(k)
            except ValueError as exc:
                raise UsageError(str(exc)) from None
    try:
        return BenchConfig(
            fields=fields,
            kernels=kernels,
            gen_size=args.gen_size,
            sizes=parse_sizes(args.sizes),
            min_time=args.min_time,
            reps=args.reps,
            seed=args.seed,
            pin=args.pin,
            l2_bytes=args.l2_bytes,
            csv_path=args.csv,
            features=FeatureSet.everything() if args.emulate else detect_features(),
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = _config(args)
    except UsageError as exc:
        print(f"rlncgf-bench: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    feats = config.resolved_features()

    if args.list_kernels:
        print(f"features: {feats.describe()}")
        for spec in config.fields:
            best = select_kernel(spec, feats)
            names = [k.name + ("*" if k == best else "") for k in available_kernels(spec, feats)]
            print(f"{spec.name:8} {' '.join(names)}")
        return EXIT_OK

    if args.verify:
        report = verify_mode(config, get_tables)
        for fld, kern in report.checked:
            print(f"{fld:8} {kern:11} {'FAIL' if any(f.field == fld and f.kernel == kern for f in report.failures) else 'ok'}")
        if report.ok:
            print("verified: all kernels match the oracle")
            return EXIT_OK
        for f in report.failures:
            print(f"verification failed: {f}", file=sys.stderr)
        return EXIT_VERIFY

    try:
        result = run_suite(config)
    except OSError as exc:
        print(f"rlncgf-bench: cannot write output: {exc}", file=sys.stderr)
        return EXIT_USAGE

    caches = config.caches or detect_caches()
    bounds = caches.boundaries(config.gen_size)
    for name, size in bounds.items():
        print(f"{name} boundary at packet size {size:.0f} B (N={config.gen_size})", file=sys.stderr)
    if result.summary is None:
        print("L2 size unknown; pass --l2-bytes for the L2-bounded summary", file=sys.stderr)
    else:
        for row in result.summary:
            print(
                f"summary {row.field:8} {row.kernel:11} {row.mean_gbps:8.3f} Gbit/s "
                f"(mean of {row.points} points within L2)",
                file=sys.stderr,
            )
    return EXIT_OK if result.verify.ok else EXIT_VERIFY


if __name__ == "__main__":
    sys.exit(main())
