"""Command-line interface: ``search``, ``verify``, ``parallelograms``, ``stats``.

Exit status: 0 success / all valid, 1 verification failure, 2 usage error,
3 I/O or arithmetic-budget failure.
"""
from __future__ import annotations

import argparse
import contextlib
import json
import logging
import sys
from pathlib import Path

from .search import (
    CHECKPOINT_FORMAT,
    Checkpoint,
    CheckpointError,
    CheckpointMismatch,
    FunnelStats,
    resume,
    search,
)
from .certificate import CertificateParseError, csv_header, read_certificates, reconstruct, verify
from .exact import ArithmeticBudgetError
from .parallelograms import enumerate_range

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_USAGE = 2
EXIT_IO = 3

STATS_FORMAT = "perfect-parallelepiped-stats"
STATS_PREFIX = "STATS "


class UsageError(Exception):
    pass


def _parse_triple(text: str, flag: str) -> tuple[int, int, int]:
    try:
        values = tuple(int(v) for v in text.split(","))
    except ValueError:
        raise UsageError(f"{flag} expects three comma-separated integers, got {text!r}") from None
    if len(values) != 3 or min(values) < 1:
        raise UsageError(f"{flag} expects three positive integers, got {text!r}")
    return values


def _check_bounds(args) -> None:
    if args.max_edge < 1:
        raise UsageError(f"--max-edge must be >= 1, got {args.max_edge}")
    if not 1 <= args.min_edge <= args.max_edge:
        raise UsageError(f"--min-edge must lie in [1, --max-edge], got {args.min_edge}")
    if args.workers < 1:
        raise UsageError(f"--workers must be >= 1, got {args.workers}")


@contextlib.contextmanager
def _open_output(path: str | None):
    if path is None or path == "-":
        yield sys.stdout
        return
    with open(path, "w") as fh:
        yield fh


def stats_record(cp: Checkpoint) -> dict:
    return {
        "format": STATS_FORMAT,
        "version": 1,
        "max_edge": cp.max_edge,
        "min_edge": cp.min_edge,
        "primitive_only": cp.primitive_only,
        "rectangles": cp.rectangles,
        "complete": cp.complete,
        "emitted": cp.emitted,
        "stats": cp.stats.as_dict(),
    }


def _emit_stats(record: dict, stream) -> None:
    stats = FunnelStats.from_dict(record["stats"])
    print(stats.table(), file=stream)
    print(STATS_PREFIX + json.dumps(record, sort_keys=True), file=stream)


def cmd_search(args) -> int:
    _check_bounds(args)
    if args.resume and not args.checkpoint:
        raise UsageError("--resume requires --checkpoint")
    if args.checkpoint and not args.resume and Path(args.checkpoint).exists():
        raise UsageError(
            f"checkpoint {args.checkpoint} already exists; pass --resume to continue it"
        )
    if args.resume and not Path(args.checkpoint).exists():
        raise FileNotFoundError(f"checkpoint {args.checkpoint} not found")

    with _open_output(args.output) as out:
        if args.format == "csv":
            out.write(csv_header() + "\n")

        def on_batch(x1, certs):
            for c in certs:
                out.write((c.to_csv() if args.format == "csv" else c.to_json()) + "\n")
            if certs:
                out.flush()

        options = dict(workers=args.workers, on_batch=on_batch)
        if args.resume:
            result = resume(
                args.checkpoint,
                max_edge=args.max_edge,
                min_edge=args.min_edge,
                primitive_only=args.primitive_only,
                rectangles=args.rectangles,
                **options,
            )
        else:
            result = search(
                args.max_edge,
                args.min_edge,
                primitive_only=args.primitive_only,
                rectangles=args.rectangles,
                checkpoint_path=args.checkpoint,
                **options,
            )
        out.flush()

    cp = Checkpoint(
        max_edge=args.max_edge,
        min_edge=args.min_edge,
        primitive_only=args.primitive_only,
        rectangles=args.rectangles,
        completed_x1=set(range(args.min_edge, args.max_edge + 1)),
        stats=result.stats,
        emitted=len(result.certificates),
    )
    record = stats_record(cp)
    if args.stats_out:
        Path(args.stats_out).write_text(json.dumps(record, sort_keys=True) + "\n")
    _emit_stats(record, sys.stderr)
    return EXIT_OK


def _print_reconstruction(edges, minors) -> int:
    rec = reconstruct(edges, minors)
    print(f"edges: {' '.join(map(str, edges))}")
    print("minor diagonals: " + " ".join(f"d{n}={v}" for n, v in zip(("12", "13", "23"), minors)))
    if rec.certificate is not None:
        c = rec.certificate
        print("major diagonals: " + " ".join(
            f"D{n}={v}" for n, v in zip(("12", "13", "23"), c.major_diagonals)))
        print("body diagonals: " + " ".join(
            f"m{i}={v}" for i, v in enumerate(c.body_diagonals, start=1)))
    else:
        print("major diagonals squared: " + " ".join(
            f"D{n}^2={v}" for n, v in zip(("12", "13", "23"), rec.major_squares)))
        print("body diagonals squared: " + " ".join(
            f"m{i}^2={v}" for i, v in enumerate(rec.body_squares, start=1)))
    print(f"gram_det: {rec.gram_det}")
    print(f"verdict: {rec.verdict}")
    if rec.verdict.valid:
        print(rec.certificate.to_json())
    return EXIT_OK if rec.verdict.valid else EXIT_INVALID


def cmd_verify(args) -> int:
    inline = args.edges is not None or args.minors is not None
    if inline and args.inputs:
        raise UsageError("give either certificate files or --edges/--minors, not both")
    if inline:
        if args.edges is None:
            raise UsageError("--minors requires --edges")
        if args.minors is None:
            raise UsageError("--edges requires --minors")
        return _print_reconstruction(
            _parse_triple(args.edges, "--edges"), _parse_triple(args.minors, "--minors")
        )
    if not args.inputs:
        raise UsageError("no certificate input given (path, '-' for stdin, or --edges/--minors)")

    n_valid = n_total = 0
    for path in args.inputs:
        if path == "-":
            lines, name = sys.stdin.readlines(), "<stdin>"
        else:
            lines, name = Path(path).read_text().splitlines(), path
        for lineno, item in read_certificates(lines):
            n_total += 1
            if isinstance(item, CertificateParseError):
                print(f"{name}:{lineno}: invalid(parse): {item}")
                continue
            verdict = verify(item)
            n_valid += verdict.valid
            print(f"{name}:{lineno}: {verdict} {item.to_csv()}")
    print(f"{n_valid}/{n_total} valid")
    return EXIT_OK if n_valid == n_total else EXIT_INVALID


def cmd_parallelograms(args) -> int:
    _check_bounds(args)
    index = enumerate_range(args.max_edge, args.min_edge, workers=args.workers)
    with _open_output(args.output) as out:
        index.write(out)
    logging.getLogger(__name__).info(
        "%d perfect parallelograms on %d edge pairs, index footprint %.1f MiB",
        index.n_parallelograms, len(index), index.nbytes / 2**20,
    )
    return EXIT_OK


def load_stats(path: str) -> dict:
    """Stats record from a checkpoint, a stats file, or a log containing a STATS line."""
    text = Path(path).read_text()
    try:
        data = json.loads(text)
    except json.JSONDecodeError:
        data = None
    if isinstance(data, dict) and data.get("format") == CHECKPOINT_FORMAT:
        return stats_record(Checkpoint.from_dict(data))
    if data is None:
        lines = [ln for ln in text.splitlines() if ln.startswith(STATS_PREFIX)]
        if not lines:
            raise ValueError(f"{path}: no stats record found")
        data = json.loads(lines[-1][len(STATS_PREFIX):])
    if not isinstance(data, dict) or data.get("format") != STATS_FORMAT:
        raise ValueError(f"{path}: not a stats record")
    stats = FunnelStats.from_dict(data.get("stats"))
    if not stats.is_monotone():
        raise ValueError(f"{path}: funnel counts are not monotone")
    return data


def cmd_stats(args) -> int:
    record = load_stats(args.path)
    if not record.get("complete", True):
        print(f"(partial run: max_edge={record['max_edge']})")
    _emit_stats(record, sys.stdout)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="perfect-pp",
        description="Search for and verify perfect parallelepipeds.",
    )
    parser.add_argument("-q", "--quiet", action="store_true", help="suppress progress output")
    sub = parser.add_subparsers(dest="command", required=True)

    def bounds(p, min_help):
        p.add_argument("--max-edge", type=int, required=True, help="largest edge length to search")
        p.add_argument("--min-edge", type=int, default=1, help=min_help + " (default 1)")
        p.add_argument("--workers", type=int, default=1, help="worker processes (default 1)")
        p.add_argument("-o", "--output", help="output path (default stdout)")

    p = sub.add_parser("search", help="run the full search funnel")
    bounds(p, "only try largest edges x1 >= this")
    p.add_argument("--format", choices=("jsonl", "csv"), default="jsonl",
                   help="jsonl: one certificate record per line; csv: the 13 lengths")
    p.add_argument("--checkpoint", help="checkpoint file, flushed after every x1")
    p.add_argument("--resume", action="store_true", help="continue from --checkpoint")
    p.add_argument("--primitive-only", action="store_true", help="emit only primitive certificates")
    p.add_argument(
        "--no-rectangles", dest="rectangles", action="store_false",
        help="skip assemblies with a rectangular face (strictly acute angles only)",
    )
    p.add_argument("--stats-out", help="also write the final stats record to this file")
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("verify", help="verify certificates")
    p.add_argument("inputs", nargs="*", help="certificate files (jsonl or csv), '-' for stdin")
    p.add_argument("--edges", help="inline edges a,b,c")
    p.add_argument("--minors", help="inline minor diagonals d12,d13,d23")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("parallelograms", help="dump perfect parallelograms")
    bounds(p, "both edges must be >= this")
    p.set_defaults(func=cmd_parallelograms)

    p = sub.add_parser("stats", help="print funnel statistics")
    p.add_argument("path", help="checkpoint, stats file, or search log")
    p.set_defaults(func=cmd_stats)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("%(message)s"))
    pkg_log = logging.getLogger("perfect_parallelepiped")
    pkg_log.addHandler(handler)
    pkg_log.setLevel(logging.WARNING if args.quiet else logging.INFO)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"{parser.prog} {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CheckpointMismatch as exc:
        print(f"{parser.prog} {args.command}: error: refusing to resume: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, ArithmeticBudgetError, CheckpointError, ValueError) as exc:
        print(f"{parser.prog} {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_IO
    finally:
        pkg_log.removeHandler(handler)


if __name__ == "__main__":
    sys.exit(main())
