import math
import random

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from naive import laplace_det
from perfect_parallelepiped import _kernels
from perfect_parallelepiped.exact import (
    ArithmeticBudgetError,
    is_perfect_square,
    isqrt,
    prefilter_array,
    sym3_det,
)


@pytest.mark.parametrize("n, root", [(0, 0), (139876, 374), (143, 11), (1, 1), (10**30, 10**15)])
def test_isqrt_examples(n, root):
    assert isqrt(n) == root


def test_isqrt_rejects_negative():
    with pytest.raises(ValueError):
        isqrt(-1)


@given(st.integers(min_value=0, max_value=2**200))
def test_isqrt_brackets(n):
    r = isqrt(n)
    assert r * r <= n < (r + 1) ** 2


@pytest.mark.parametrize("n, root", [(104329, 323), (0, 0), (2, None), (-4, None), (139876, 374)])
def test_is_perfect_square_examples(n, root):
    assert is_perfect_square(n) == root


def test_theorem_major_diagonal_value():
    assert 2 * 271**2 + 2 * 106**2 - 255**2 == 104329


@given(st.integers(min_value=0, max_value=10**20))
def test_squares_recognised(r):
    assert is_perfect_square(r * r) == r


@given(st.integers(min_value=0, max_value=10**20))
def test_non_squares_rejected(n):
    if math.isqrt(n) ** 2 != n:
        assert is_perfect_square(n) is None


def test_prefilter_sound_up_to_1e7():
    n = np.arange(10**7 + 1, dtype=np.int64)
    roots = np.arange(math.isqrt(10**7) + 1, dtype=np.int64)
    assert prefilter_array(roots * roots).all()
    # kernel square test agrees with exact isqrt on every n <= 10^7 (0 is reported as -1)
    got = _kernels.square_roots(n)
    expected = np.full(n.shape, -1, dtype=np.int64)
    expected[roots * roots] = roots
    expected[0] = -1
    assert np.array_equal(got, expected)


def test_python_prefilter_matches_exact_on_sample():
    rng = random.Random(7)
    for _ in range(20000):
        n = rng.randrange(10**12)
        assert (is_perfect_square(n) is not None) == (math.isqrt(n) ** 2 == n)


def test_sym3_det_examples():
    assert sym3_det(1, 1, 1, 0, 0, 0) == 1
    assert sym3_det(2, 2, 2, 1, 1, 1) == 4


def test_sym3_det_theorem_matrix_positive():
    # 2 * Gram matrix of the Theorem 1 edges; value from cofactor expansion
    q12 = 271**2 + 106**2 - 255**2
    q13 = 271**2 + 103**2 - 266**2
    q23 = 106**2 + 103**2 - 101**2
    m = [[2 * 271**2, q12, q13], [q12, 2 * 106**2, q23], [q13, q23, 2 * 103**2]]
    expected = laplace_det(m)
    assert expected == 44038449100800
    assert sym3_det(2 * 271**2, 2 * 106**2, 2 * 103**2, q12, q13, q23) == expected > 0


def test_sym3_det_matches_cofactor_expansion():
    rng = random.Random(2024)
    bound = 2 * (10**5) ** 2
    for _ in range(10**4):
        d = [rng.randint(-bound, bound) for _ in range(6)]
        m11, m22, m33, m12, m13, m23 = d
        m = [[m11, m12, m13], [m12, m22, m23], [m13, m23, m33]]
        assert sym3_det(*d) == laplace_det(m)


def test_sym3_det_overflow_is_loud():
    big = 2**50
    with pytest.raises(ArithmeticBudgetError):
        sym3_det(big, big, big, 0, 0, 0)


def test_sym3_det_rejects_floats():
    with pytest.raises(TypeError):
        sym3_det(1.0, 1, 1, 0, 0, 0)
