import math

import numpy as np
import pytest

from breginterp.datagen import GenSpec, generate
from breginterp.duality import dual_objective
from breginterp.errors import ProblemError, SingularSystemError
from breginterp.oracles import reference_solve
from breginterp.perceptron import (
    LabeledData,
    active_set,
    build_perceptron,
    count_mistakes,
    l2_support_vector_solution,
    mistake_bound_dual,
    mistake_bound_primal,
    multipliers,
    perceptron_dual,
    primal_zero_mistake_steps,
    sparse_p,
    theta_from_multipliers,
)

SPARSE_P_100 = 1.2171472409516259  # 1 + 1/ln(100), mpmath


def unit_pp():
    return build_perceptron(LabeledData([[1.0, 0.0]], [1.0]), 2.0)


@pytest.fixture(scope="module")
def small_ref():
    spec = GenSpec(n_train=40, n_test=40, d=80, seed=2)
    train, test, _ = generate(spec)
    pp = build_perceptron(train, 2.0)
    return pp, reference_solve(pp.problem), test


def test_sparse_p():
    assert sparse_p(100) == pytest.approx(SPARSE_P_100, rel=1e-15)
    with pytest.raises(ProblemError):
        sparse_p(1)


def test_folding_and_constants():
    pp = build_perceptron(LabeledData([[1.0, 2.0]], [-1.0]), 2.0)
    np.testing.assert_array_equal(pp.problem.X, [[-1.0, -2.0]])
    pp = build_perceptron(LabeledData([[3.0, 4.0]], [1.0]), 2.0)
    assert pp.problem.L[0] == 25.0 and pp.R == 5.0


def test_data_validation():
    with pytest.raises(ProblemError, match="labels"):
        LabeledData([[1.0]], [0.5])
    with pytest.raises(ProblemError, match="mismatch"):
        LabeledData([[1.0], [2.0]], [1.0])
    with pytest.raises(ProblemError, match="zero rows"):
        build_perceptron(LabeledData([[0.0, 0.0]], [1.0]), 2.0)


def test_count_mistakes_examples(small_ref):
    pp, ref, _ = small_ref
    data = pp.data
    n = data.n
    assert count_mistakes(np.zeros(data.d), data, margin=1.0) == n
    assert count_mistakes(np.zeros(data.d), data, margin=0.0) == n
    # the reference optimum sits on the margin up to rounding; nudge it inward
    assert count_mistakes(ref.theta_star * (1 + 1e-9), data, margin=1.0) == 0


def test_mistake_bound_dual_examples():
    pp = unit_pp()
    assert pp.R == 1.0
    assert mistake_bound_dual(pp, 0.0, 0.0) == 0.0
    assert mistake_bound_dual(pp, 1.0, math.sqrt(2.0)) == pytest.approx(4.0, rel=1e-15)
    with pytest.raises(ValueError):
        mistake_bound_dual(pp, -1.0, 1.0)
    with pytest.raises(ValueError):
        mistake_bound_dual(pp, 1.0, -1.0)
    with pytest.raises(ValueError):
        mistake_bound_dual(pp, 1.0, 1.0, divisor="L")


def test_mistake_bound_primal_examples():
    pp = unit_pp()
    assert mistake_bound_primal(pp, 1.0, 100) == pytest.approx(0.1, rel=1e-15)
    assert mistake_bound_primal(pp, 3.0, 400) == pytest.approx(0.5 * mistake_bound_primal(pp, 3.0, 100))
    assert mistake_bound_primal(pp, 100.0, 1) == 1.0
    with pytest.raises(ValueError):
        mistake_bound_primal(pp, 1.0, 0)


def test_primal_crossover(small_ref):
    pp, ref, _ = small_ref
    norm = float(np.linalg.norm(ref.theta_star))
    t = primal_zero_mistake_steps(pp, norm)
    assert mistake_bound_primal(pp, norm, t) <= 1.0 / pp.n
    assert mistake_bound_primal(pp, norm, t - 1) > 1.0 / pp.n


def test_sign_convention_round_trip(rng):
    X = rng.standard_normal((12, 7))
    y = rng.choice([-1.0, 1.0], 12)
    for p in (1.5, 2.0):
        pp = build_perceptron(LabeledData(X, y), p)
        b = rng.uniform(0, 3, 12)
        assert perceptron_dual(pp, b) == dual_objective(pp.problem, multipliers(b))
        np.testing.assert_array_equal(
            theta_from_multipliers(pp, b),
            pp.problem.map.grad_psi_star(-(pp.problem.X.T @ multipliers(b)) / pp.n),
        )
    assert perceptron_dual(pp, -b) == -math.inf


def test_closed_form_examples():
    pp = build_perceptron(LabeledData([[2.0, 0.0]], [1.0]), 2.0)
    b, theta, nsq = l2_support_vector_solution(pp, [0])
    np.testing.assert_allclose(b, [0.25], rtol=1e-15)
    np.testing.assert_allclose(theta, [0.5, 0.0], rtol=1e-15)
    assert nsq == pytest.approx(0.25, rel=1e-15)
    ref = reference_solve(pp.problem)
    np.testing.assert_allclose(ref.theta_star, theta, atol=1e-12)
    assert ref.g_star == pytest.approx(0.125, rel=1e-12)

    pp = build_perceptron(LabeledData(np.eye(3), np.ones(3)), 2.0)
    b, theta, _ = l2_support_vector_solution(pp, [0, 1, 2])
    np.testing.assert_allclose(b, [3.0] * 3, rtol=1e-15)
    np.testing.assert_allclose(pp.problem.X @ theta, np.ones(3), rtol=1e-15)


def test_closed_form_diagnostics(rng):
    pp = build_perceptron(LabeledData(np.eye(3), np.ones(3)), 2.0)
    with pytest.raises(ProblemError, match="wrong support"):
        l2_support_vector_solution(pp, [0, 1])
    dup = build_perceptron(LabeledData([[1.0, 0.0], [1.0, 0.0]], [1.0, 1.0]), 2.0)
    with pytest.raises(SingularSystemError, match="support"):
        l2_support_vector_solution(dup, [0, 1])
    with pytest.raises(ProblemError, match="p = 2"):
        l2_support_vector_solution(build_perceptron(LabeledData(np.eye(2), np.ones(2)), 1.5), [0])
    with pytest.raises(ProblemError, match="empty"):
        l2_support_vector_solution(pp, [])


def test_active_set():
    np.testing.assert_array_equal(active_set(np.array([0.0, 1.0, 1e-9, 0.5])), [1, 3])
    assert active_set(np.zeros(3)).size == 0


def test_reference_kkt(small_ref):
    pp, ref, _ = small_ref
    b = multipliers(ref.alpha_star)
    margins = pp.problem.X @ ref.theta_star
    assert margins.min() >= 1 - 1e-6
    assert np.all(b >= 0)
    assert np.max(np.abs(b * (margins - 1.0))) <= 1e-5
    S = active_set(b)
    b_S, theta, nsq = l2_support_vector_solution(pp, S)
    np.testing.assert_allclose(b[S], b_S, rtol=1e-6)
    assert nsq == pytest.approx(float(ref.theta_star @ ref.theta_star), rel=1e-6)
