import io
import math

import pytest

import naive
from perfect_parallelepiped import PerfectParallelogram, enumerate_pair, enumerate_range
from perfect_parallelepiped.exact import ArithmeticBudgetError


def test_theorem_face_found():
    assert PerfectParallelogram(271, 106, 255, 323) in enumerate_pair(271, 106)


def test_unit_pair_empty():
    assert enumerate_pair(1, 1) == []


def test_rectangle_has_one_entry():
    found = enumerate_pair(4, 3)
    assert PerfectParallelogram(4, 3, 5, 5) in found
    assert [p.d_minor for p in found].count(5) == 1


def test_two_rectangle_face():
    assert PerfectParallelogram(1120, 1035, 1525, 1525) in enumerate_pair(1120, 1035)


def test_pair_requires_ordering():
    with pytest.raises(ValueError):
        enumerate_pair(3, 4)
    with pytest.raises(ValueError):
        enumerate_pair(3, 0)


def test_range_bound_five_matches_oracle():
    index = enumerate_range(5, 1)
    assert [tuple(r) for r in index.rows.tolist()] == naive.parallelograms(5)


def test_range_contains_theorem_face():
    index = enumerate_range(271)
    assert 255 in index[271, 106]
    assert index[106, 271] == index[271, 106]


@pytest.mark.parametrize("max_edge, min_edge", [(0, 1), (5, 0), (5, 6)])
def test_range_rejects_bad_bounds(max_edge, min_edge):
    with pytest.raises(ValueError):
        enumerate_range(max_edge, min_edge)


def test_range_budget():
    with pytest.raises(ArithmeticBudgetError):
        enumerate_range(10**5 + 1)


def test_pair_agrees_with_naive_scan_up_to_150():
    index = enumerate_range(150)
    for x1 in range(1, 151):
        for x2 in range(1, x1 + 1):
            expected = [
                d
                for d in range(x1 - x2 + 1, math.isqrt(x1 * x1 + x2 * x2) + 1)
                if naive.is_square(2 * x1 * x1 + 2 * x2 * x2 - d * d)
            ]
            assert index[x1, x2] == expected
            if x1 % 10 == 0:
                assert [p.d_minor for p in enumerate_pair(x1, x2)] == expected


def test_emitted_records_satisfy_invariants(index300):
    for p in index300.parallelograms():
        # constructor re-checks ordering, diagonal ranges and the major identity
        assert p.d_minor > p.x1 - p.x2
        s = p.x1**2 + p.x2**2
        if p.d_minor == math.isqrt(s):
            assert (p.d_minor**2 == s) == (p.d_major == p.d_minor)


def test_rectangle_boundary():
    index = enumerate_range(120)
    for x1 in range(1, 121):
        for x2 in range(1, x1 + 1):
            s = x1 * x1 + x2 * x2
            r = math.isqrt(s)
            assert (r in index[x1, x2]) == (r * r == s)


def test_worker_count_does_not_change_index():
    serial = enumerate_range(200, 1, workers=1)
    parallel = enumerate_range(200, 1, workers=3)
    assert (serial.rows == parallel.rows).all()
    assert (serial.offsets == parallel.offsets).all()


def test_min_edge_restricts_short_edge():
    index = enumerate_range(60, 20)
    assert all(x2 >= 20 for _, x2, _, _ in index.rows.tolist())
    assert [tuple(r) for r in index.rows.tolist()] == naive.parallelograms(60, 20)


def test_dump_format():
    buf = io.StringIO()
    enumerate_range(5).write(buf)
    lines = buf.getvalue().splitlines()
    assert lines == [" ".join(map(str, r)) for r in naive.parallelograms(5)]
    assert "4 3 5 5" in lines


def test_index_mapping_interface(index300):
    pairs = list(index300.pairs())
    assert len(pairs) == len(index300)
    assert pairs == sorted(pairs)
    for (a, b), ds in list(index300.items())[:200]:
        assert a >= b
        assert ds == sorted(set(ds))
        assert (a, b) in index300
    assert (1, 1) not in index300
