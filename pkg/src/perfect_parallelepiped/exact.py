"""Exact integer primitives: square roots, square detection, 3x3 determinants.

Python integers never wrap, so the 128-bit budget is enforced explicitly:
every intermediate of :func:`sym3_det` is checked against ``WIDE_LIMIT`` and
an :class:`ArithmeticBudgetError` is raised instead of returning a value that
a fixed-width implementation could not have represented.
"""
from __future__ import annotations

import math

import numpy as np

# Signed 128-bit magnitude limit.
WIDE_LIMIT = 2**127
# Largest edge bound whose realizability determinant (<= 8 N^6) and kernel
# intermediates (<= 9 N^2 in int64, exact in float64) stay inside the budget.
MAX_EDGE_BUDGET = 10**5

PREFILTER_MODULI = (64, 63, 65, 11)


class ArithmeticBudgetError(OverflowError):
    """An exact computation left the documented magnitude budget."""


def _residue_mask(modulus: int) -> np.ndarray:
    mask = np.zeros(modulus, dtype=np.bool_)
    mask[[(r * r) % modulus for r in range(modulus)]] = True
    return mask


QR64, QR63, QR65, QR11 = (_residue_mask(m) for m in PREFILTER_MODULI)


def isqrt(n: int) -> int:
    """Return floor(sqrt(n)) for a nonnegative integer ``n``."""
    if n < 0:
        raise ValueError(f"isqrt of negative number {n}")
    return math.isqrt(n)


def passes_prefilter(n: int) -> bool:
    """Quadratic-residue screen: False means ``n`` is certainly not a square."""
    return bool(QR64[n & 63] and QR63[n % 63] and QR65[n % 65] and QR11[n % 11])


def prefilter_array(values: np.ndarray) -> np.ndarray:
    """Vectorised :func:`passes_prefilter` over a nonnegative integer array."""
    values = np.asarray(values, dtype=np.int64)
    return QR64[values & 63] & QR63[values % 63] & QR65[values % 65] & QR11[values % 11]


def is_perfect_square(n: int) -> int | None:
    """Return ``sqrt(n)`` if ``n`` is a perfect square, else ``None``.

    >>> is_perfect_square(104329)
    323
    >>> is_perfect_square(2) is None
    True
    """
    if n < 0 or not passes_prefilter(n):
        return None
    r = math.isqrt(n)
    return r if r * r == n else None


def _checked(value: int, what: str) -> int:
    if not -WIDE_LIMIT <= value < WIDE_LIMIT:
        raise ArithmeticBudgetError(
            f"{what} = {value} exceeds the signed 128-bit budget"
        )
    return value


def sym3_det(m11: int, m22: int, m33: int, m12: int, m13: int, m23: int) -> int:
    """Exact determinant of the symmetric matrix

        [[m11, m12, m13],
         [m12, m22, m23],
         [m13, m23, m33]]

    Raises ArithmeticBudgetError if any intermediate product or the result
    falls outside the signed 128-bit range.
    """
    for name, v in zip(
        ("m11", "m22", "m33", "m12", "m13", "m23"), (m11, m22, m33, m12, m13, m23)
    ):
        if not isinstance(v, (int, np.integer)):
            raise TypeError(f"{name} must be an integer, got {type(v).__name__}")
    m11, m22, m33, m12, m13, m23 = map(int, (m11, m22, m33, m12, m13, m23))
    diag = _checked(_checked(m11 * m22, "m11*m22") * m33, "m11*m22*m33")
    cross = _checked(_checked(2 * m12 * m13, "2*m12*m13") * m23, "2*m12*m13*m23")
    t1 = _checked(m11 * _checked(m23 * m23, "m23^2"), "m11*m23^2")
    t2 = _checked(m22 * _checked(m13 * m13, "m13^2"), "m22*m13^2")
    t3 = _checked(m33 * _checked(m12 * m12, "m12^2"), "m33*m12^2")
    acc = _checked(diag + cross, "det partial sum")
    acc = _checked(acc - t1, "det partial sum")
    acc = _checked(acc - t2, "det partial sum")
    return _checked(acc - t3, "det")


def check_edge_budget(max_edge: int) -> None:
    """Raise ArithmeticBudgetError when ``max_edge`` exceeds the supported bound."""
    if max_edge > MAX_EDGE_BUDGET:
        raise ArithmeticBudgetError(
            f"max_edge {max_edge} exceeds the arithmetic budget ({MAX_EDGE_BUDGET})"
        )
