import os
import random
import sys

import pytest

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
if ROOT not in sys.path:
    sys.path.insert(0, ROOT)

from config import SolverConfig  # noqa: E402
from formats import parse_easp_not  # noqa: E402

EXAMPLE2 = "p :- $not$ q.\nq :- $not$ p."


@pytest.fixture
def example2():
    return parse_easp_not(EXAMPLE2)


@pytest.fixture
def cfg():
    return SolverConfig(oracle_backend="bruteforce")


@pytest.fixture
def rng():
    return random.Random(20240607)


@pytest.fixture
def samples_dir():
    return os.path.join(ROOT, "samples")


@pytest.fixture
def fixtures_dir():
    return os.path.join(ROOT, "tests", "fixtures")
