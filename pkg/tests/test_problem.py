import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from breginterp.errors import ProblemError
from breginterp.problem import HalfLine, Interval, Singleton, build_problem, project, support

L_EXAMPLE = 3.1748021039363987  # 2 * 2^(2/3), mpmath

reals = st.floats(-100, 100, allow_nan=False)


def sets_strategy():
    single = reals.map(Singleton)
    half = reals.map(HalfLine)
    inter = st.tuples(reals, reals).map(lambda t: Interval(min(t), max(t)))
    return st.one_of(single, half, inter)


def test_project_examples():
    assert project(Singleton(3.0), -7.0) == 3.0
    assert project(HalfLine(1.0), 0.5) == 1.0
    assert project(HalfLine(1.0), 2.0) == 2.0
    assert project(Interval(0.0, 1.0), 1.5) == 1.0
    assert Interval(0.0, 1.0).project(-3.0) == 0.0


def test_support_examples():
    assert support(Singleton(2.0), -3.0) == -6.0
    assert support(HalfLine(1.0), -0.5) == -0.5
    assert support(HalfLine(1.0), 0.1) == math.inf
    assert support(Interval(-1.0, 1.0), 0.7) == 0.7
    assert support(Interval(-1.0, 1.0), -0.7) == 0.7
    assert support(HalfLine(1.0), 0.0) == 0.0


def test_interval_rejects_reversed_bounds():
    with pytest.raises(ProblemError, match="lo <= hi"):
        Interval(1.0, 0.0)


def test_build_examples():
    p1 = build_problem(np.eye(2), [Singleton(1.0)] * 2, 2.0)
    np.testing.assert_array_equal(p1.L, [1.0, 1.0])
    p2 = build_problem([[3.0, 4.0]], [Singleton(1.0)], 2.0)
    np.testing.assert_array_equal(p2.L, [25.0])
    p3 = build_problem([[1.0, 1.0]], [HalfLine(1.0)], 1.5)
    assert p3.L[0] == pytest.approx(L_EXAMPLE, rel=1e-14)
    assert (p3.n, p3.d, p3.p) == (1, 2, 1.5)


def test_build_diagnostics_are_distinct():
    msgs = set()
    for X, sets, p in (
        ([[0.0, 0.0], [1.0, 0.0]], [Singleton(1.0)] * 2, 2.0),
        ([[1.0, 0.0]], [Singleton(1.0)], 2.5),
        ([[1.0, 0.0]], [Singleton(1.0)] * 2, 2.0),
        ([[np.nan, 1.0]], [Singleton(1.0)], 2.0),
        ([[1.0, 1.0]], [1.0], 2.0),
    ):
        with pytest.raises(ProblemError) as exc:
            build_problem(X, sets, p)
        msgs.add(str(exc.value).split()[0:3].__repr__())
    assert len(msgs) == 5


def test_zero_row_message_names_row():
    with pytest.raises(ProblemError, match=r"zero rows.*\[1\]"):
        build_problem([[1.0], [0.0]], [Singleton(1.0)] * 2, 2.0)


def test_problem_is_read_only():
    prob = build_problem([[1.0, 2.0]], [Singleton(1.0)], 2.0)
    with pytest.raises(ValueError):
        prob.X[0, 0] = 5.0
    with pytest.raises(ValueError):
        prob.L[0] = 5.0


def test_kind():
    X = np.eye(2)
    assert build_problem(X, [Singleton(0.0)] * 2, 2.0).kind() == "singleton"
    assert build_problem(X, [HalfLine(1.0)] * 2, 2.0).kind() == "halfline"
    assert build_problem(X, [HalfLine(1.0), Singleton(0.0)], 2.0).kind() == "mixed"


@settings(max_examples=200, deadline=None)
@given(cset=sets_strategy(), v=reals, data=st.data())
def test_projection_optimality(cset, v, data):
    pv = project(cset, v)
    assert cset.lo <= pv <= cset.hi
    assert project(cset, pv) == pv
    lo = max(cset.lo, -1e3)
    hi = min(cset.hi, 1e3)
    for y in np.linspace(lo, hi, 100):
        assert abs(v - pv) <= abs(v - y) + 1e-12


@settings(max_examples=200, deadline=None)
@given(cset=sets_strategy(), u=reals, v=reals)
def test_projection_nonexpansive(cset, u, v):
    assert abs(project(cset, u) - project(cset, v)) <= abs(u - v) + 1e-12


def test_support_matches_grid_sup(rng):
    for _ in range(50):
        lo, hi = np.sort(rng.uniform(-5, 5, 2))
        cset = Interval(float(lo), float(hi))
        grid = np.append(np.arange(lo, hi, 1e-3), hi)
        for a in rng.uniform(-3, 3, 5):
            assert support(cset, a) == pytest.approx(float(np.max(grid * a)), abs=1e-9)
    for y in rng.uniform(-3, 3, 10):
        assert support(Singleton(float(y)), 1.5) == pytest.approx(1.5 * y)


@settings(max_examples=200, deadline=None)
@given(cset=sets_strategy(), a=reals, b=reals, t=st.floats(0, 1))
def test_support_convex_and_homogeneous(cset, a, b, t):
    fa, fb = support(cset, a), support(cset, b)
    mid = support(cset, t * a + (1 - t) * b)
    if math.isfinite(fa) and math.isfinite(fb):
        assert mid <= t * fa + (1 - t) * fb + 1e-9 * (1 + abs(fa) + abs(fb))
    if math.isfinite(fa):
        assert support(cset, 2.5 * a) == pytest.approx(2.5 * fa, rel=1e-12, abs=1e-12)


def test_L_grows_as_p_shrinks(rng):
    X = rng.uniform(-1, 1, (30, 8))
    sets = [Singleton(0.0)] * 30
    L2 = build_problem(X, sets, 2.0).L
    L15 = build_problem(X, sets, 1.5).L
    assert np.all(L2 <= L15)
