"""Edge-matched triples of parallelograms and the filters applied to them."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Iterator, NamedTuple

from .exact import is_perfect_square, sym3_det
from .parallelograms import ParallelogramIndex


class ExactCosine(NamedTuple):
    """cos of a face angle as the unreduced fraction ``num / den``."""

    num: int
    den: int

    def __float__(self) -> float:
        return self.num / self.den


@dataclass(frozen=True, order=True)
class CandidateTriple:
    """Three edges ``x1 >= x2 >= x3`` and the minor diagonals of the faces they span.

    Construction enforces the ordering and a non-oblique vertex
    (``0 <= x_i^2 + x_j^2 - d_ij^2 < 2 x_i x_j``). Whether each face is a
    *perfect* parallelogram is reported by :meth:`is_perfect`, not enforced.
    """

    x1: int
    x2: int
    x3: int
    d12: int
    d13: int
    d23: int

    def __post_init__(self):
        if not self.x1 >= self.x2 >= self.x3 >= 1:
            raise ValueError(f"edges must satisfy x1 >= x2 >= x3 >= 1: {self}")
        for (xi, xj), d, q in zip(self.face_edges, self.minors, self.dot2):
            if d < 1 or not 0 <= q < 2 * xi * xj:
                raise ValueError(
                    f"face ({xi}, {xj}) with minor diagonal {d} is oblique or degenerate"
                )

    @property
    def edges(self) -> tuple[int, int, int]:
        return self.x1, self.x2, self.x3

    @property
    def minors(self) -> tuple[int, int, int]:
        return self.d12, self.d13, self.d23

    @property
    def face_edges(self) -> tuple[tuple[int, int], ...]:
        return (self.x1, self.x2), (self.x1, self.x3), (self.x2, self.x3)

    @property
    def dot2(self) -> tuple[int, int, int]:
        """``q_ij = x_i^2 + x_j^2 - d_ij^2``, twice the dot product of edges i and j."""
        return tuple(
            xi * xi + xj * xj - d * d for (xi, xj), d in zip(self.face_edges, self.minors)
        )

    @property
    def cosines(self) -> tuple[ExactCosine, ExactCosine, ExactCosine]:
        return tuple(
            ExactCosine(q, 2 * xi * xj) for (xi, xj), q in zip(self.face_edges, self.dot2)
        )

    def major_squares(self) -> tuple[int, int, int]:
        return tuple(
            2 * xi * xi + 2 * xj * xj - d * d for (xi, xj), d in zip(self.face_edges, self.minors)
        )

    def is_perfect(self) -> bool:
        return all(is_perfect_square(v) is not None for v in self.major_squares())

    def scaled(self, k: int) -> "CandidateTriple":
        return CandidateTriple(*(k * v for v in (*self.edges, *self.minors)))


class BodyDiagonals(NamedTuple):
    """Body diagonal lengths; ``m_i`` has edge i entering negatively, ``m4`` none."""

    m1: int
    m2: int
    m3: int
    m4: int


def body_diagonal_squares(t: CandidateTriple) -> tuple[int, int, int, int]:
    s1, s2, s3 = t.x1 * t.x1, t.x2 * t.x2, t.x3 * t.x3
    a, b, c = t.d12 * t.d12, t.d13 * t.d13, t.d23 * t.d23
    return (
        -s1 + s2 + s3 + a + b - c,
        s1 - s2 + s3 + a - b + c,
        s1 + s2 - s3 - a + b + c,
        3 * (s1 + s2 + s3) - a - b - c,
    )


def body_conditions(t: CandidateTriple) -> tuple[bool, bool, bool, bool]:
    """Which of the four squared body diagonals are positive perfect squares."""
    return tuple(v > 0 and is_perfect_square(v) is not None for v in body_diagonal_squares(t))


def body_diagonals(t: CandidateTriple) -> BodyDiagonals | None:
    """The four integer body diagonals, or None if any condition fails."""
    roots = []
    for v in body_diagonal_squares(t):
        r = is_perfect_square(v) if v > 0 else None
        if r is None:
            return None
        roots.append(r)
    return BodyDiagonals(*roots)


class Realizability(enum.Enum):
    REALIZABLE = "realizable"
    DEGENERATE = "degenerate"
    NON_REALIZABLE = "non_realizable"


class Decision(NamedTuple):
    status: Realizability
    det: int

    @property
    def realizable(self) -> bool:
        return self.status is Realizability.REALIZABLE


def gram_det(t: CandidateTriple) -> int:
    """det of twice the Gram matrix of the edge vectors, exactly."""
    q12, q13, q23 = t.dot2
    return sym3_det(2 * t.x1**2, 2 * t.x2**2, 2 * t.x3**2, q12, q13, q23)


def classify_det(det: int) -> Realizability:
    if det > 0:
        return Realizability.REALIZABLE
    if det == 0:
        return Realizability.DEGENERATE
    return Realizability.NON_REALIZABLE


def realizability(t: CandidateTriple) -> Decision:
    """Decide whether the triple closes up into a nondegenerate parallelepiped.

    The leading 1x1 and 2x2 minors of the doubled Gram matrix are positive for
    any non-oblique triple, so the sign of the full determinant decides.
    """
    det = gram_det(t)
    return Decision(classify_det(det), det)


Vector = tuple[float, float, float]


def embed(t: CandidateTriple) -> tuple[Vector, Vector, Vector]:
    """Floating-point edge vectors u, v, w realising a realizable triple."""
    decision = realizability(t)
    if not decision.realizable:
        raise ValueError(f"cannot embed {t}: {decision.status.value} (det={decision.det})")
    c12, c13, c23 = (float(c) for c in t.cosines)
    s12 = math.sqrt(1.0 - c12 * c12)
    s13 = math.sqrt(1.0 - c13 * c13)
    rho = (c23 - c12 * c13) / (s12 * s13)
    u = (float(t.x1), 0.0, 0.0)
    v = (t.x2 * c12, t.x2 * s12, 0.0)
    w = (t.x3 * c13, t.x3 * rho * s13, t.x3 * math.sqrt(max(0.0, 1.0 - rho * rho)) * s13)
    return u, v, w


def assemble(index: ParallelogramIndex, x1: int) -> Iterator[CandidateTriple]:
    """Every canonical triple whose largest edge is ``x1``.

    Order: x2, then x3, then d12, d13, d23, all ascending.
    """
    for x2 in range(1, x1 + 1):
        l12 = index[x1, x2]
        if not l12:
            continue
        for x3 in range(1, x2 + 1):
            l13 = index[x1, x3]
            if not l13:
                continue
            l23 = index[x2, x3]
            if not l23:
                continue
            for d12 in l12:
                for d13 in l13:
                    for d23 in l23:
                        yield CandidateTriple(x1, x2, x3, d12, d13, d23)
