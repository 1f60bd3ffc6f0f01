import numpy as np
import pytest

from breginterp.problem import HalfLine, Singleton, build_problem


def random_singleton(rng, n=20, d=50, p=2.0):
    X = rng.standard_normal((n, d))
    y = rng.standard_normal(n)
    return build_problem(X, [Singleton(float(v)) for v in y], p)


def random_halfline(rng, n=20, d=50, p=2.0):
    """Separable by construction: rows are folded so that a planted direction has margin > 0."""
    X = rng.standard_normal((n, d))
    w = rng.standard_normal(d)
    m = X @ w
    X = np.sign(m)[:, None] * X
    return build_problem(X, [HalfLine(1.0)] * n, p)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
