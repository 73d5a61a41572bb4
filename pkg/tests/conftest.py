import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from perfect_parallelepiped import CandidateTriple, build, enumerate_range  # noqa: E402

THEOREM_TRIPLE = CandidateTriple(271, 106, 103, 255, 266, 101)
TWO_RECT_TRIPLE = CandidateTriple(1120, 1035, 840, 1525, 1400, 969)
SMALLEST_FALSE_POSITIVE = CandidateTriple(115, 106, 83, 31, 58, 75)


@pytest.fixture(scope="session")
def theorem_cert():
    return build(THEOREM_TRIPLE)


@pytest.fixture(scope="session")
def two_rect_cert():
    return build(TWO_RECT_TRIPLE)


@pytest.fixture(scope="session")
def index300():
    return enumerate_range(300)
