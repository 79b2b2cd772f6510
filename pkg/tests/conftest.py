import random

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from freederiv import field
from freederiv.ncpoly import NcPoly

settings.register_profile("ci", max_examples=40, deadline=None, derandomize=True,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("ci")

Z = np.array([[47, 84, 54], [42, 116, 99], [9, 33, 32]], dtype=float)
CBRT_Z = np.array([[3, 2, 0], [1, 4, 3], [0, 1, 2]], dtype=float)
X0_NC = np.array([[1, 0, 2], [0, 1, 0], [0, 0, 1]], dtype=float)


def random_poly(rng: random.Random, letters="xyz", max_degree=4, max_terms=4, coef=3) -> NcPoly:
    terms = {}
    for _ in range(rng.randint(1, max_terms)):
        d = rng.randint(0, max_degree)
        w = tuple(rng.choice(letters) for _ in range(d))
        terms[w] = terms.get(w, 0) + rng.choice([c for c in range(-coef, coef + 1) if c])
    return NcPoly(terms)


def random_rational_matrix(rng: random.Random, m: int, bound=5) -> np.ndarray:
    return field.exact_array([[rng.randint(-bound, bound) for _ in range(m)] for _ in range(m)])


@pytest.fixture
def rng():
    return random.Random(1234)


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
