import sys
from fractions import Fraction
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from wada_lab.families import FIVE_PIECE_V, FIVE_PIECE_X  # noqa: E402


@pytest.fixture
def five_piece_exact():
    return [Fraction(x) for x in FIVE_PIECE_X], [Fraction(v) for v in FIVE_PIECE_V]
