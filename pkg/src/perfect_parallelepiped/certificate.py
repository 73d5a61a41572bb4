"""Certificates for perfect parallelepipeds: construction, verification, I/O.

Verification trusts only the edges and minor diagonals. Every other field is a
claim that is recomputed in exact integer arithmetic and compared; the
approximate coordinates are carried along for inspection and never consulted.
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from typing import Iterable, Iterator, NamedTuple

from .assembly import (
    BodyDiagonals,
    CandidateTriple,
    ExactCosine,
    body_diagonals,
    embed,
    realizability,
)
from .exact import is_perfect_square, sym3_det

CSV_FIELDS = (
    "x1", "x2", "x3",
    "d12", "d13", "d23",
    "D12", "D13", "D23",
    "m1", "m2", "m3", "m4",
)
RECORD_FIELDS = (
    "edges",
    "minor_diagonals",
    "major_diagonals",
    "body_diagonals",
    "cosines",
    "gram_det",
    "primitive",
    "coords_approx",
)

Vector = tuple[float, float, float]


class CertificateParseError(ValueError):
    pass


@dataclass(frozen=True)
class Certificate:
    edges: tuple[int, int, int]
    minor_diagonals: tuple[int, int, int]
    major_diagonals: tuple[int, int, int]
    body_diagonals: tuple[int, int, int, int]
    cosines: tuple[ExactCosine, ExactCosine, ExactCosine]
    gram_det: int
    primitive: bool
    coords_approx: tuple[Vector, Vector, Vector] | None = None

    @property
    def lengths(self) -> tuple[int, ...]:
        """The 13 lengths in ``CSV_FIELDS`` order."""
        return (*self.edges, *self.minor_diagonals, *self.major_diagonals, *self.body_diagonals)

    @property
    def sort_key(self) -> tuple[int, ...]:
        return (*self.edges, *self.minor_diagonals)

    def to_dict(self) -> dict:
        return {
            "edges": list(self.edges),
            "minor_diagonals": list(self.minor_diagonals),
            "major_diagonals": list(self.major_diagonals),
            "body_diagonals": list(self.body_diagonals),
            "cosines": [[c.num, c.den] for c in self.cosines],
            "gram_det": self.gram_det,
            "primitive": self.primitive,
            "coords_approx": None
            if self.coords_approx is None
            else [list(v) for v in self.coords_approx],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), separators=(",", ":"))

    def to_csv(self) -> str:
        return ",".join(str(v) for v in self.lengths)


def _round15(x: float) -> float:
    return float(f"{x:.15g}")


def is_primitive(c: Certificate) -> bool:
    """True iff the three edges are coprime."""
    return math.gcd(*c.edges) == 1


def is_reduced(c: Certificate) -> bool:
    """True iff the 13 lengths are coprime, i.e. ``c`` is not a scaled copy
    of a smaller perfect parallelepiped.

    Weaker than :func:`is_primitive`: (1120, 1035, 840) has edge gcd 5 but
    is reduced, since 969 is not a multiple of 5.
    """
    return math.gcd(*c.lengths) == 1


def build(t: CandidateTriple, b: BodyDiagonals | None = None) -> Certificate:
    """Certificate for a realizable triple whose body diagonals are all integers."""
    computed = body_diagonals(t)
    if computed is None:
        raise ValueError(f"{t} fails the body-diagonal conditions")
    if b is not None and tuple(b) != tuple(computed):
        raise ValueError(f"body diagonals {tuple(b)} do not belong to {t}")
    decision = realizability(t)
    if not decision.realizable:
        raise ValueError(f"{t} is {decision.status.value} (det={decision.det})")
    majors = []
    for v in t.major_squares():
        r = is_perfect_square(v)
        if r is None:
            raise ValueError(f"{t} has a non-integer major diagonal")
        majors.append(r)
    coords = tuple(tuple(_round15(x) for x in vec) for vec in embed(t))
    cert = Certificate(
        edges=t.edges,
        minor_diagonals=t.minors,
        major_diagonals=tuple(majors),
        body_diagonals=tuple(computed),
        cosines=t.cosines,
        gram_det=decision.det,
        primitive=math.gcd(*t.edges) == 1,
        coords_approx=coords,
    )
    verdict = verify(cert)
    if not verdict.valid:
        raise AssertionError(f"freshly built certificate failed verification: {verdict}")
    return cert


def scale(c: Certificate, k: int) -> Certificate:
    """Every length multiplied by ``k`` (cosine fractions by k^2, det by k^6)."""
    return Certificate(
        edges=tuple(k * v for v in c.edges),
        minor_diagonals=tuple(k * v for v in c.minor_diagonals),
        major_diagonals=tuple(k * v for v in c.major_diagonals),
        body_diagonals=tuple(k * v for v in c.body_diagonals),
        cosines=tuple(ExactCosine(k * k * x.num, k * k * x.den) for x in c.cosines),
        gram_det=c.gram_det * k**6,
        primitive=math.gcd(*(k * v for v in c.edges)) == 1,
        coords_approx=None
        if c.coords_approx is None
        else tuple(tuple(_round15(k * x) for x in vec) for vec in c.coords_approx),
    )


class Verdict(NamedTuple):
    valid: bool
    reason: str | None = None
    detail: str = ""

    def __str__(self) -> str:
        if self.valid:
            return "valid"
        return f"invalid({self.reason})" + (f": {self.detail}" if self.detail else "")


VALID = Verdict(True)


def _is_int(v) -> bool:
    return isinstance(v, int) and not isinstance(v, bool)


def verify(c: Certificate) -> Verdict:
    """Recompute every identity from edges and minor diagonals; report the first failure."""
    try:
        lengths = c.lengths
        ok = len(c.edges) == 3 and len(c.minor_diagonals) == 3
        ok = ok and len(c.major_diagonals) == 3 and len(c.body_diagonals) == 4
    except TypeError:
        return Verdict(False, "parse", "length fields are not sequences")
    if not ok:
        return Verdict(False, "parse", "wrong number of lengths")
    if not all(_is_int(v) and v > 0 for v in lengths):
        return Verdict(False, "lengths", "all 13 lengths must be positive integers")

    x1, x2, x3 = c.edges
    d12, d13, d23 = c.minor_diagonals
    faces = ((x1, x2, d12), (x1, x3, d13), (x2, x3, d23))
    q = []
    for name, (xi, xj, d) in zip(("12", "13", "23"), faces):
        qij = xi * xi + xj * xj - d * d
        if not 0 <= qij < 2 * xi * xj:
            return Verdict(
                False, "minor-diagonal range",
                f"d{name}={d} is not a non-oblique minor diagonal for edges ({xi}, {xj})",
            )
        q.append(qij)

    for name, (xi, xj, d), big in zip(("12", "13", "23"), faces, c.major_diagonals):
        expected = 2 * xi * xi + 2 * xj * xj - d * d
        if big * big != expected:
            return Verdict(
                False, "major-diagonal identity", f"D{name}^2={big * big} but expected {expected}"
            )

    s1, s2, s3 = x1 * x1, x2 * x2, x3 * x3
    a, b, cc = d12 * d12, d13 * d13, d23 * d23
    expected_m = (
        -s1 + s2 + s3 + a + b - cc,
        s1 - s2 + s3 + a - b + cc,
        s1 + s2 - s3 - a + b + cc,
        3 * (s1 + s2 + s3) - a - b - cc,
    )
    for i, (m, expected) in enumerate(zip(c.body_diagonals, expected_m), start=1):
        if m * m != expected:
            return Verdict(
                False, "body-diagonal identity", f"m{i}^2={m * m} but expected {expected}"
            )

    try:
        claimed_cos = [(int(x[0]), int(x[1])) for x in c.cosines]
    except (TypeError, ValueError, IndexError):
        return Verdict(False, "parse", "cosines must be (num, den) pairs")
    expected_cos = [(qij, 2 * xi * xj) for qij, (xi, xj, _) in zip(q, faces)]
    if len(claimed_cos) != 3 or claimed_cos != expected_cos:
        return Verdict(False, "cosine", f"claimed {claimed_cos}, expected {expected_cos}")

    det = sym3_det(2 * s1, 2 * s2, 2 * s3, q[0], q[1], q[2])
    if det <= 0:
        return Verdict(False, "not realizable", f"gram_det={det} <= 0")
    if not _is_int(c.gram_det) or c.gram_det != det:
        return Verdict(False, "gram_det mismatch", f"claimed {c.gram_det}, recomputed {det}")

    if c.primitive is not (math.gcd(x1, x2, x3) == 1):
        return Verdict(False, "primitive flag", f"claimed {c.primitive}")
    return VALID


def coordinate_lengths(coords: tuple[Vector, Vector, Vector]) -> tuple[float, ...]:
    """The 13 lengths spanned by edge vectors u, v, w, in ``CSV_FIELDS`` order."""
    u, v, w = coords

    def comb(a, b, c):
        return math.sqrt(sum((a * ui + b * vi + c * wi) ** 2 for ui, vi, wi in zip(u, v, w)))

    return (
        comb(1, 0, 0), comb(0, 1, 0), comb(0, 0, 1),
        comb(1, -1, 0), comb(1, 0, -1), comb(0, 1, -1),
        comb(1, 1, 0), comb(1, 0, 1), comb(0, 1, 1),
        comb(-1, 1, 1), comb(1, -1, 1), comb(1, 1, -1), comb(1, 1, 1),
    )


def coordinates_match(c: Certificate, rtol: float = 1e-9) -> bool:
    if c.coords_approx is None:
        return False
    got = coordinate_lengths(c.coords_approx)
    return all(abs(g - e) <= rtol * e for g, e in zip(got, c.lengths))


# ---------------------------------------------------------------------------
# serialization


def _int_tuple(value, n: int, name: str) -> tuple[int, ...]:
    if not isinstance(value, list) or len(value) != n or not all(_is_int(v) for v in value):
        raise CertificateParseError(f"{name} must be a list of {n} integers")
    return tuple(value)


def from_dict(record: dict) -> Certificate:
    if not isinstance(record, dict):
        raise CertificateParseError("record is not an object")
    missing = [f for f in RECORD_FIELDS if f not in record]
    if missing:
        raise CertificateParseError(f"missing fields: {', '.join(missing)}")
    cosines = record["cosines"]
    if not isinstance(cosines, list) or len(cosines) != 3:
        raise CertificateParseError("cosines must be three [num, den] pairs")
    cos = tuple(ExactCosine(*_int_tuple(c, 2, "cosine")) for c in cosines)
    if not _is_int(record["gram_det"]):
        raise CertificateParseError("gram_det must be an integer")
    if not isinstance(record["primitive"], bool):
        raise CertificateParseError("primitive must be a boolean")
    coords = record["coords_approx"]
    if coords is not None:
        ok = isinstance(coords, list) and len(coords) == 3 and all(
            isinstance(v, list) and len(v) == 3
            and all(isinstance(x, (int, float)) and not isinstance(x, bool) and math.isfinite(x) for x in v)
            for v in coords
        )
        if not ok:
            raise CertificateParseError("coords_approx must be three finite 3-vectors")
        coords = tuple(tuple(float(x) for x in v) for v in coords)
    return Certificate(
        edges=_int_tuple(record["edges"], 3, "edges"),
        minor_diagonals=_int_tuple(record["minor_diagonals"], 3, "minor_diagonals"),
        major_diagonals=_int_tuple(record["major_diagonals"], 3, "major_diagonals"),
        body_diagonals=_int_tuple(record["body_diagonals"], 4, "body_diagonals"),
        cosines=cos,
        gram_det=record["gram_det"],
        primitive=record["primitive"],
        coords_approx=coords,
    )


def from_json(line: str) -> Certificate:
    try:
        record = json.loads(line)
    except json.JSONDecodeError as exc:
        raise CertificateParseError(f"not JSON: {exc.msg}") from None
    return from_dict(record)


def from_lengths(lengths: Iterable[int]) -> Certificate:
    """Certificate claims derived from 13 lengths (the comma-separated form).

    Cosines, determinant and primitivity are computed from edges and minor
    diagonals; no coordinates are attached.
    """
    values = tuple(lengths)
    if len(values) != 13 or not all(_is_int(v) for v in values):
        raise CertificateParseError("expected 13 integer lengths")
    x = values[0:3]
    d = values[3:6]
    faces = ((x[0], x[1], d[0]), (x[0], x[2], d[1]), (x[1], x[2], d[2]))
    q = [xi * xi + xj * xj - dd * dd for xi, xj, dd in faces]
    cos = tuple(ExactCosine(qij, 2 * xi * xj) for qij, (xi, xj, _) in zip(q, faces))
    det = sym3_det(2 * x[0] ** 2, 2 * x[1] ** 2, 2 * x[2] ** 2, *q)
    return Certificate(
        edges=x,
        minor_diagonals=d,
        major_diagonals=values[6:9],
        body_diagonals=values[9:13],
        cosines=cos,
        gram_det=det,
        primitive=math.gcd(*x) == 1,
    )


def from_csv(line: str) -> Certificate:
    try:
        values = [int(v) for v in line.strip().split(",")]
    except ValueError:
        raise CertificateParseError(f"non-integer field in {line.strip()!r}") from None
    return from_lengths(values)


def csv_header() -> str:
    return ",".join(CSV_FIELDS)


def write_certificates(certs: Iterable[Certificate], fh, fmt: str = "jsonl", header: bool = True) -> None:
    if fmt == "csv" and header:
        fh.write(csv_header() + "\n")
    for c in certs:
        fh.write((c.to_csv() if fmt == "csv" else c.to_json()) + "\n")


def dumps(certs: Iterable[Certificate], fmt: str = "jsonl") -> str:
    buf = io.StringIO()
    write_certificates(certs, buf, fmt)
    return buf.getvalue()


def read_certificates(lines: Iterable[str]) -> Iterator[tuple[int, Certificate | CertificateParseError]]:
    """Parse JSON-lines or comma-separated records, yielding ``(line_no, cert_or_error)``.

    Blank lines and a ``x1,x2,...`` header are skipped.
    """
    for lineno, line in enumerate(lines, start=1):
        text = line.strip()
        if not text or text == csv_header():
            continue
        try:
            if text.startswith("{"):
                yield lineno, from_json(text)
            else:
                row = next(csv.reader([text]))
                yield lineno, from_csv(",".join(row))
        except CertificateParseError as exc:
            yield lineno, exc


class Reconstruction(NamedTuple):
    """Everything derivable from edges and minor diagonals alone."""

    major_squares: tuple[int, int, int]
    body_squares: tuple[int, int, int, int]
    gram_det: int
    certificate: Certificate | None
    verdict: Verdict


def reconstruct(edges: tuple[int, int, int], minors: tuple[int, int, int]) -> Reconstruction:
    """Derive majors, body diagonals and the Gram determinant, then verify.

    ``certificate`` is None when some derived length is not an integer.
    """
    if len(edges) != 3 or len(minors) != 3 or not all(
        _is_int(v) and v > 0 for v in (*edges, *minors)
    ):
        raise ValueError("need three positive integer edges and three minor diagonals")
    x1, x2, x3 = edges
    d12, d13, d23 = minors
    faces = ((x1, x2, d12), (x1, x3, d13), (x2, x3, d23))
    majors_sq = tuple(2 * xi * xi + 2 * xj * xj - d * d for xi, xj, d in faces)
    s1, s2, s3 = x1 * x1, x2 * x2, x3 * x3
    a, b, c = d12 * d12, d13 * d13, d23 * d23
    body_sq = (
        -s1 + s2 + s3 + a + b - c,
        s1 - s2 + s3 + a - b + c,
        s1 + s2 - s3 - a + b + c,
        3 * (s1 + s2 + s3) - a - b - c,
    )
    q = [xi * xi + xj * xj - d * d for xi, xj, d in faces]
    det = sym3_det(2 * s1, 2 * s2, 2 * s3, *q)

    for name, (xi, xj, d), qij in zip(("12", "13", "23"), faces, q):
        if not 0 <= qij < 2 * xi * xj:
            return Reconstruction(majors_sq, body_sq, det, None, Verdict(
                False, "minor-diagonal range",
                f"d{name}={d} is not a non-oblique minor diagonal for edges ({xi}, {xj})",
            ))
    majors = [is_perfect_square(v) for v in majors_sq]
    for name, v, r in zip(("12", "13", "23"), majors_sq, majors):
        if r is None:
            return Reconstruction(majors_sq, body_sq, det, None, Verdict(
                False, "major-diagonal identity", f"D{name}^2={v} is not a square"
            ))
    body = [is_perfect_square(v) if v > 0 else None for v in body_sq]
    for i, (v, r) in enumerate(zip(body_sq, body), start=1):
        if r is None:
            return Reconstruction(majors_sq, body_sq, det, None, Verdict(
                False, "body-diagonal identity", f"m{i}^2={v} is not a positive square"
            ))
    cert = from_lengths((*edges, *minors, *majors, *body))
    return Reconstruction(majors_sq, body_sq, det, cert, verify(cert))
