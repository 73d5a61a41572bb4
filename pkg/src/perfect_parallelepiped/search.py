"""The full funnel: enumerate, assemble, filter, decide, certify.

Work is partitioned by the largest edge ``x1``. Each x1 is independent, so
workers share nothing but the read-only parallelogram index, and results are
merged in ascending x1 order regardless of completion order.
"""
from __future__ import annotations

import json
import logging
import multiprocessing
import os
import tempfile
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Callable, Iterable

import numpy as np

from . import _kernels
from .assembly import BodyDiagonals, CandidateTriple, Decision, classify_det, gram_det
from .certificate import Certificate, build
from .exact import check_edge_budget
from .parallelograms import ParallelogramIndex, enumerate_range

log = logging.getLogger(__name__)

CHECKPOINT_FORMAT = "perfect-parallelepiped-checkpoint"
CHECKPOINT_VERSION = 1


class CheckpointError(RuntimeError):
    """A checkpoint file is unreadable, corrupt, or incompatible with the request."""


class CheckpointMismatch(CheckpointError):
    pass


@dataclass
class FunnelStats:
    configs_tested: int = 0
    pass_ge1: int = 0
    pass_ge2: int = 0
    pass_ge3: int = 0
    pass_all4: int = 0
    realizable: int = 0

    @classmethod
    def from_hist(cls, hist, realizable: int = 0) -> "FunnelStats":
        """Build from ``hist[k]`` = configurations meeting exactly k conditions."""
        h = [int(v) for v in hist]
        return cls(
            configs_tested=sum(h),
            pass_ge1=sum(h[1:]),
            pass_ge2=sum(h[2:]),
            pass_ge3=sum(h[3:]),
            pass_all4=h[4],
            realizable=realizable,
        )

    def __add__(self, other: "FunnelStats") -> "FunnelStats":
        return FunnelStats(*(getattr(self, f.name) + getattr(other, f.name) for f in fields(self)))

    def as_dict(self) -> dict[str, int]:
        return {f.name: getattr(self, f.name) for f in fields(self)}

    @classmethod
    def from_dict(cls, d: dict) -> "FunnelStats":
        names = [f.name for f in fields(cls)]
        if not isinstance(d, dict) or sorted(d) != sorted(names):
            raise ValueError(f"stats record must have exactly the keys {names}")
        values = [d[n] for n in names]
        if not all(isinstance(v, int) and not isinstance(v, bool) and v >= 0 for v in values):
            raise ValueError("stats counters must be nonnegative integers")
        return cls(*values)

    def is_monotone(self) -> bool:
        chain = [getattr(self, f.name) for f in fields(self)]
        return all(a >= b for a, b in zip(chain, chain[1:]))

    def table(self) -> str:
        return "\n".join(
            [
                f"configurations tested:                 {self.configs_tested}",
                f"satisfied at least one body condition: {self.pass_ge1}",
                f"satisfied at least two:                {self.pass_ge2}",
                f"satisfied at least three:              {self.pass_ge3}",
                f"satisfied all four:                    {self.pass_all4}",
                f"realizable perfect parallelepipeds:    {self.realizable}",
            ]
        )


@dataclass(frozen=True)
class Survivor:
    """A triple meeting all four body-diagonal conditions, with its decision."""

    triple: CandidateTriple
    body: BodyDiagonals
    decision: Decision

    def to_row(self) -> list[int]:
        t = self.triple
        return [*t.edges, *t.minors, *self.body, self.decision.det]

    @classmethod
    def from_row(cls, row) -> "Survivor":
        if not isinstance(row, list) or len(row) != 11 or not all(
            isinstance(v, int) and not isinstance(v, bool) for v in row
        ):
            raise ValueError(f"bad survivor row {row!r}")
        t = CandidateTriple(*row[:6])
        det = gram_det(t)
        if det != row[10]:
            raise ValueError(f"survivor {row!r} carries a wrong determinant")
        return cls(t, BodyDiagonals(*row[6:10]), Decision(classify_det(det), det))


@dataclass
class X1Result:
    x1: int
    stats: FunnelStats
    survivors: list[Survivor]


@dataclass
class SearchResult:
    certificates: list[Certificate]
    stats: FunnelStats
    survivors: list[Survivor]

    def __iter__(self):
        # Unpacks as (certificates, stats).
        return iter((self.certificates, self.stats))


@dataclass
class Checkpoint:
    max_edge: int
    min_edge: int
    primitive_only: bool
    rectangles: bool = True
    completed_x1: set[int] = field(default_factory=set)
    stats: FunnelStats = field(default_factory=FunnelStats)
    emitted: int = 0
    survivors: dict[int, list[Survivor]] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "format": CHECKPOINT_FORMAT,
            "version": CHECKPOINT_VERSION,
            "max_edge": self.max_edge,
            "min_edge": self.min_edge,
            "primitive_only": self.primitive_only,
            "rectangles": self.rectangles,
            "completed_x1": sorted(self.completed_x1),
            "stats": self.stats.as_dict(),
            "emitted": self.emitted,
            "survivors": {
                str(x1): [s.to_row() for s in rows]
                for x1, rows in sorted(self.survivors.items())
                if rows
            },
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Checkpoint":
        try:
            if d.get("format") != CHECKPOINT_FORMAT:
                raise ValueError("not a checkpoint file")
            if d.get("version") != CHECKPOINT_VERSION:
                raise ValueError(f"unsupported checkpoint version {d.get('version')!r}")
            cp = cls(
                max_edge=int(d["max_edge"]),
                min_edge=int(d["min_edge"]),
                primitive_only=bool(d["primitive_only"]),
                rectangles=bool(d["rectangles"]),
                completed_x1=set(int(x) for x in d["completed_x1"]),
                stats=FunnelStats.from_dict(d["stats"]),
                emitted=int(d["emitted"]),
                survivors={
                    int(x1): [Survivor.from_row(r) for r in rows]
                    for x1, rows in d["survivors"].items()
                },
            )
        except (KeyError, TypeError, ValueError, AttributeError) as exc:
            raise CheckpointError(f"corrupt checkpoint: {exc}") from None
        if not all(cp.min_edge <= x <= cp.max_edge for x in cp.completed_x1):
            raise CheckpointError("corrupt checkpoint: completed x1 outside bounds")
        if not set(cp.survivors) <= cp.completed_x1:
            raise CheckpointError("corrupt checkpoint: survivors for unfinished x1")
        if not cp.stats.is_monotone():
            raise CheckpointError("corrupt checkpoint: funnel counts are not monotone")
        n_all4 = sum(len(v) for v in cp.survivors.values())
        n_real = sum(s.decision.realizable for v in cp.survivors.values() for s in v)
        if n_all4 != cp.stats.pass_all4 or n_real != cp.stats.realizable:
            raise CheckpointError("corrupt checkpoint: survivors disagree with stats")
        return cp

    def save(self, path: str | os.PathLike) -> None:
        """Atomically replace ``path`` with this checkpoint."""
        if not self.stats.is_monotone():
            raise AssertionError(f"funnel invariant violated: {self.stats}")
        path = Path(path)
        fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name + ".", suffix=".tmp")
        try:
            with os.fdopen(fd, "w") as fh:
                json.dump(self.to_dict(), fh, separators=(",", ":"))
                fh.write("\n")
                fh.flush()
                os.fsync(fh.fileno())
            os.replace(tmp, path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise

    @classmethod
    def load(cls, path: str | os.PathLike) -> "Checkpoint":
        try:
            with open(path) as fh:
                data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise CheckpointError(f"corrupt checkpoint {path}: {exc.msg}") from None
        if not isinstance(data, dict):
            raise CheckpointError(f"corrupt checkpoint {path}: not an object")
        return cls.from_dict(data)

    @property
    def complete(self) -> bool:
        return self.completed_x1 >= set(range(self.min_edge, self.max_edge + 1))


# ---------------------------------------------------------------------------
# per-x1 work

_INDEX: ParallelogramIndex | None = None


def _set_index(index: ParallelogramIndex) -> None:
    global _INDEX
    _INDEX = index


def scan(index: ParallelogramIndex, x1: int) -> tuple[np.ndarray, np.ndarray]:
    """Raw kernel output for one x1: exact-k histogram and all-four survivor rows."""
    if x1 > index.max_edge:
        raise ValueError(f"index covers edges up to {index.max_edge}, not {x1}")
    return _kernels.scan_x1(x1, index.stride, index.offsets, index.diagonals)


def process_x1(index: ParallelogramIndex, x1: int) -> X1Result:
    hist, rows = scan(index, x1)
    survivors = []
    for x2, x3, d12, d13, d23, m1, m2, m3, m4 in rows.tolist():
        t = CandidateTriple(x1, x2, x3, d12, d13, d23)
        det = gram_det(t)
        survivors.append(Survivor(t, BodyDiagonals(m1, m2, m3, m4), Decision(classify_det(det), det)))
    realizable = sum(s.decision.realizable for s in survivors)
    return X1Result(x1, FunnelStats.from_hist(hist, realizable), survivors)


def _work(x1: int) -> X1Result:
    return process_x1(_INDEX, x1)


def certificates_for(survivors: Iterable[Survivor], primitive_only: bool = False) -> list[Certificate]:
    certs = [build(s.triple, s.body) for s in survivors if s.decision.realizable]
    if primitive_only:
        certs = [c for c in certs if c.primitive]
    return certs


# ---------------------------------------------------------------------------
# driver

BatchCallback = Callable[[int, list[Certificate]], None]


def _execute(
    cp: Checkpoint,
    workers: int,
    checkpoint_path: str | os.PathLike | None,
    on_batch: BatchCallback | None,
) -> SearchResult:
    if workers < 1:
        raise ValueError(f"workers must be >= 1, got {workers}")
    x1_values = list(range(cp.min_edge, cp.max_edge + 1))
    pending = [x for x in x1_values if x not in cp.completed_x1]

    certs_by_x1: dict[int, list[Certificate]] = {}
    next_pos = 0

    def flush_in_order() -> None:
        nonlocal next_pos
        while next_pos < len(x1_values) and x1_values[next_pos] in cp.completed_x1:
            x1 = x1_values[next_pos]
            certs = certs_by_x1.setdefault(
                x1, certificates_for(cp.survivors.get(x1, ()), cp.primitive_only)
            )
            if on_batch is not None:
                on_batch(x1, certs)
            next_pos += 1

    flush_in_order()

    if pending:
        index = enumerate_range(cp.max_edge, 1, workers=workers)
        if not cp.rectangles:
            index = index.without_rectangles()
        log.info(
            "indexed %d perfect parallelograms on %d edge pairs (%.1f MiB)",
            index.n_parallelograms, len(index), index.nbytes / 2**20,
        )

        def consume(results: Iterable[X1Result]) -> None:
            for res in results:
                cp.completed_x1.add(res.x1)
                cp.stats = cp.stats + res.stats
                if res.survivors:
                    cp.survivors[res.x1] = res.survivors
                certs = certificates_for(res.survivors, cp.primitive_only)
                certs_by_x1[res.x1] = certs
                cp.emitted += len(certs)
                if checkpoint_path is not None:
                    cp.save(checkpoint_path)
                s = cp.stats
                log.info(
                    "x1=%d done (%d/%d): tested=%d ge1=%d ge2=%d ge3=%d all4=%d realizable=%d",
                    res.x1, len(cp.completed_x1), len(x1_values), s.configs_tested,
                    s.pass_ge1, s.pass_ge2, s.pass_ge3, s.pass_all4, s.realizable,
                )
                flush_in_order()

        if workers == 1:
            consume(process_x1(index, x1) for x1 in pending)
        else:
            method = "fork" if "fork" in multiprocessing.get_all_start_methods() else "spawn"
            ctx = multiprocessing.get_context(method)
            # Forked workers inherit the index; spawned ones receive a copy.
            extra = {} if method == "fork" else {"initializer": _set_index, "initargs": (index,)}
            _set_index(index)
            try:
                with ctx.Pool(workers, **extra) as pool:
                    consume(pool.imap_unordered(_work, pending, chunksize=1))
            finally:
                _set_index(None)

    if checkpoint_path is not None and not pending:
        cp.save(checkpoint_path)
    certificates = [c for x1 in x1_values for c in certs_by_x1[x1]]
    survivors = [s for x1 in x1_values for s in cp.survivors.get(x1, ())]
    return SearchResult(certificates, cp.stats, survivors)


def _check_bounds(max_edge: int, min_edge: int) -> None:
    if not 1 <= min_edge <= max_edge:
        raise ValueError(
            f"need 1 <= min_edge <= max_edge, got min_edge={min_edge}, max_edge={max_edge}"
        )
    check_edge_budget(max_edge)


def search(
    max_edge: int,
    min_edge: int = 1,
    *,
    primitive_only: bool = False,
    rectangles: bool = True,
    workers: int = 1,
    checkpoint_path: str | os.PathLike | None = None,
    on_batch: BatchCallback | None = None,
) -> SearchResult:
    """Fresh search over largest edges in ``[min_edge, max_edge]``.

    ``on_batch(x1, certificates)`` is called once per x1 in ascending order,
    as soon as every smaller x1 has finished. With ``rectangles=False`` no
    face may have a right angle, so only strictly acute assemblies are tried.
    """
    _check_bounds(max_edge, min_edge)
    cp = Checkpoint(
        max_edge=max_edge, min_edge=min_edge, primitive_only=primitive_only, rectangles=rectangles
    )
    return _execute(cp, workers, checkpoint_path, on_batch)


def run(max_edge: int, min_edge: int = 1, **options) -> tuple[list[Certificate], FunnelStats]:
    res = search(max_edge, min_edge, **options)
    return res.certificates, res.stats


def resume(
    checkpoint_path: str | os.PathLike,
    *,
    max_edge: int | None = None,
    min_edge: int | None = None,
    primitive_only: bool | None = None,
    rectangles: bool | None = None,
    workers: int = 1,
    on_batch: BatchCallback | None = None,
) -> SearchResult:
    """Finish the x1 values missing from a checkpoint.

    Any of ``max_edge``, ``min_edge``, ``primitive_only``, ``rectangles``
    that is given must match the checkpoint, otherwise CheckpointMismatch is raised.
    """
    cp = Checkpoint.load(checkpoint_path)
    requested = dict(
        max_edge=max_edge, min_edge=min_edge, primitive_only=primitive_only, rectangles=rectangles
    )
    for name, wanted in requested.items():
        if wanted is not None and getattr(cp, name) != wanted:
            raise CheckpointMismatch(
                f"checkpoint was written with {name}={getattr(cp, name)}, requested {wanted}"
            )
    _check_bounds(cp.max_edge, cp.min_edge)
    return _execute(cp, workers, checkpoint_path, on_batch)
