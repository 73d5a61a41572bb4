"""Independent brute-force reference for the search.

Nothing here touches the package: squares are tested with ``math.isqrt``
only, candidates come from plain nested loops over every length, and
realizability uses the cosine inequality on exact fractions instead of the
integer Gram determinant.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction


def is_square(n: int) -> bool:
    return n >= 0 and math.isqrt(n) ** 2 == n


def parallelograms(max_edge: int, min_edge: int = 1) -> list[tuple[int, int, int, int]]:
    """All (x1, x2, d, D), min_edge <= x2 <= x1 <= max_edge, in lexicographic order."""
    out = []
    for x1 in range(1, max_edge + 1):
        for x2 in range(min_edge, x1 + 1):
            for d in range(1, 2 * max_edge + 1):
                if not (x1 - x2 < d and d * d <= x1 * x1 + x2 * x2):
                    continue
                big2 = 2 * x1 * x1 + 2 * x2 * x2 - d * d
                if is_square(big2):
                    out.append((x1, x2, d, math.isqrt(big2)))
    return out


def _minor_range(xi: int, xj: int) -> range:
    # xi - xj < d <= sqrt(xi^2 + xj^2), with xi >= xj
    return range(xi - xj + 1, math.isqrt(xi * xi + xj * xj) + 1)


def _perfect(xi: int, xj: int, d: int) -> bool:
    return is_square(2 * xi * xi + 2 * xj * xj - d * d)


def cosine_realizable(x, d) -> bool:
    """c12^2 + c13^2 + c23^2 < 1 + 2 c12 c13 c23 on exact fractions."""
    (x1, x2, x3), (d12, d13, d23) = x, d
    c12 = Fraction(x1 * x1 + x2 * x2 - d12 * d12, 2 * x1 * x2)
    c13 = Fraction(x1 * x1 + x3 * x3 - d13 * d13, 2 * x1 * x3)
    c23 = Fraction(x2 * x2 + x3 * x3 - d23 * d23, 2 * x2 * x3)
    return c12 * c12 + c13 * c13 + c23 * c23 < 1 + 2 * c12 * c13 * c23


@dataclass
class NaiveResult:
    hist: list[int] = field(default_factory=lambda: [0] * 5)
    all4: list[tuple[int, ...]] = field(default_factory=list)
    certificates: list[tuple[int, ...]] = field(default_factory=list)


def search(max_edge: int, min_edge: int = 1) -> NaiveResult:
    """Loop over every (x1, x2, x3, d12, d13, d23) with x1 in [min_edge, max_edge].

    ``hist[k]`` counts configurations meeting exactly k body-diagonal
    conditions; certificates are 13-length tuples.
    """
    res = NaiveResult()
    for x1 in range(min_edge, max_edge + 1):
        for x2 in range(1, x1 + 1):
            for d12 in _minor_range(x1, x2):
                if not _perfect(x1, x2, d12):
                    continue
                for x3 in range(1, x2 + 1):
                    for d13 in _minor_range(x1, x3):
                        if not _perfect(x1, x3, d13):
                            continue
                        for d23 in _minor_range(x2, x3):
                            if not _perfect(x2, x3, d23):
                                continue
                            _examine(res, (x1, x2, x3), (d12, d13, d23))
    return res


def _examine(res: NaiveResult, x, d) -> None:
    (x1, x2, x3), (d12, d13, d23) = x, d
    s1, s2, s3 = x1 * x1, x2 * x2, x3 * x3
    a, b, c = d12 * d12, d13 * d13, d23 * d23
    msq = (
        -s1 + s2 + s3 + a + b - c,
        s1 - s2 + s3 + a - b + c,
        s1 + s2 - s3 - a + b + c,
        3 * (s1 + s2 + s3) - a - b - c,
    )
    hits = sum(1 for v in msq if v > 0 and is_square(v))
    res.hist[hits] += 1
    if hits < 4:
        return
    res.all4.append((*x, *d))
    if cosine_realizable(x, d):
        majors = tuple(
            math.isqrt(2 * xi * xi + 2 * xj * xj - dd * dd)
            for xi, xj, dd in ((x1, x2, d12), (x1, x3, d13), (x2, x3, d23))
        )
        res.certificates.append((*x, *d, *majors, *(math.isqrt(v) for v in msq)))


def laplace_det(m) -> Fraction | int:
    """Determinant by cofactor expansion along the first row."""
    if len(m) == 1:
        return m[0][0]
    total = 0
    for j, v in enumerate(m[0]):
        minor = [row[:j] + row[j + 1:] for row in m[1:]]
        total += (-1) ** j * v * laplace_det(minor)
    return total
