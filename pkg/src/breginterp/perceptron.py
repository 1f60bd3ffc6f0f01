"""l_p perceptrons as feasibility problems.

Given labeled data (x_i, y_i) the problem is min 1/2 ||theta||_p^2 subject to
y_i x_i^T theta >= 1.  Rows are folded (x~_i = y_i x_i) and every constraint
is the half-line [1, inf).  Multipliers here are nonnegative,
b = -alpha_raw, so that

    G(b) = (1/n) 1^T b - 1/2 ||(1/n) X~^T b||_q^2,
    theta(b) = grad psi*((1/n) X~^T b).
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import ProblemError, SingularSystemError
from .mirror_maps import lp_norm
from .oracles import solve_spd
from .problem import HalfLine, build_problem


@dataclass(frozen=True, eq=False)
class LabeledData:
    X_raw: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        X = np.asarray(self.X_raw, dtype=float)
        y = np.asarray(self.y, dtype=float)
        if X.ndim != 2 or X.shape[0] < 1 or X.shape[1] < 1:
            raise ProblemError(f"features must be a nonempty 2-d matrix, got shape {X.shape}")
        if y.shape != (X.shape[0],):
            raise ProblemError(f"dimension mismatch: {X.shape[0]} rows but {y.shape} labels")
        if not np.all(np.abs(y) == 1.0):
            bad = np.flatnonzero(np.abs(y) != 1.0)[:5].tolist()
            raise ProblemError(f"labels must be exactly -1 or +1 (offending rows {bad})")
        object.__setattr__(self, "X_raw", X)
        object.__setattr__(self, "y", y)

    @property
    def n(self):
        return self.X_raw.shape[0]

    @property
    def d(self):
        return self.X_raw.shape[1]

    def folded(self):
        """Rows y_i x_i."""
        return self.y[:, None] * self.X_raw


@dataclass(frozen=True, eq=False)
class PerceptronProblem:
    problem: object
    data: LabeledData
    R: float

    @property
    def n(self):
        return self.problem.n

    @property
    def p(self):
        return self.problem.p


def sparse_p(d):
    """p = 1 + 1/ln d, the exponent used as a proxy for the l_1 perceptron."""
    if d < 2:
        raise ProblemError("the sparse exponent needs d >= 2")
    return 1.0 + 1.0 / math.log(d)


def build_perceptron(data, p):
    """Fold labels into the rows and attach [1, inf) constraints."""
    Xf = data.folded()
    problem = build_problem(Xf, [HalfLine(1.0)] * data.n, p)
    R = max(lp_norm(row, problem.map.q) for row in problem.X)
    return PerceptronProblem(problem=problem, data=data, R=R)


def multipliers(alpha_raw):
    """Nonnegative multipliers from raw dual variables (b = -alpha)."""
    return -np.asarray(alpha_raw, dtype=float)


def perceptron_dual(pp, b):
    """G(b) = (1/n) 1^T b - 1/2 ||(1/n) X~^T b||_q^2 for b >= 0 (else -inf)."""
    b = np.asarray(b, dtype=float)
    if np.any(b < 0):
        return -math.inf
    n = pp.n
    return float(b.sum()) / n - pp.problem.map.psi_star(pp.problem.X.T @ b / n)


def theta_from_multipliers(pp, b):
    return pp.problem.map.grad_psi_star(pp.problem.X.T @ np.asarray(b, dtype=float) / pp.n)


def count_mistakes(theta, data, margin=0.0):
    """Number of rows with y_i x_i^T theta <= margin (ties are mistakes).

    margin = 0 counts sign errors; margin = 1 counts margin violations.
    """
    scores = data.y * (data.X_raw @ np.asarray(theta, dtype=float))
    return int(np.count_nonzero(scores <= margin))


def mistake_bound_dual(pp, g_star, alpha_star_norm, g0=0.0, divisor="R"):
    """Steps after which accelerated dual ascent makes no training mistakes
    on average:

        t > 2 sqrt(2) R^2 / sqrt(p - 1) * sqrt((G* - G(0)) / D + ||alpha*||^2 / 2)

    with D = R (``divisor='R'``, the form used for the mistake count) or
    D = max_i L_i (``divisor='maxL'``, the form of the accelerated rate).
    """
    if g_star < 0 or alpha_star_norm < 0:
        raise ValueError("g_star and alpha_star_norm must be nonnegative")
    if g_star - g0 < 0:
        raise ValueError("g_star must be at least G(0)")
    if divisor == "R":
        denom = pp.R
    elif divisor == "maxL":
        denom = pp.problem.max_L
    else:
        raise ValueError(f"divisor must be 'R' or 'maxL', got {divisor!r}")
    mu = pp.problem.map.mu
    inner = (g_star - g0) / denom + 0.5 * alpha_star_norm**2
    return 2.0 * math.sqrt(2.0) * pp.R**2 / math.sqrt(mu) * math.sqrt(inner)


def mistake_bound_primal(pp, theta_star_norm_p, t):
    """Training mistake proportion bound for mirror descent after t steps,
    sqrt(||theta*||_p^2 R^2 / ((p - 1) t)), clamped to [0, 1]."""
    if t < 1:
        raise ValueError("t must be >= 1")
    val = math.sqrt(theta_star_norm_p**2 * pp.R**2 / (pp.problem.map.mu * t))
    return min(max(val, 0.0), 1.0)


def primal_zero_mistake_steps(pp, theta_star_norm_p):
    """Smallest integer t with mistake_bound_primal <= 1/n."""
    n = pp.n
    t = math.ceil(theta_star_norm_p**2 * pp.R**2 * n**2 / pp.problem.map.mu)
    t = max(t, 1)
    # guard the ceiling against rounding in either direction
    while t > 1 and mistake_bound_primal(pp, theta_star_norm_p, t - 1) <= 1.0 / n:
        t -= 1
    while mistake_bound_primal(pp, theta_star_norm_p, t) > 1.0 / n:
        t += 1
    return t


def l2_support_vector_solution(pp, support):
    """Closed-form l_2 perceptron solution given its support set S.

    With the Gram matrix K = X~_S X~_S^T,
        b_S = n K^{-1} 1,   theta = (1/n) X~_S^T b_S,   ||theta||^2 = 1^T K^{-1} 1.

    Raises
    ------
    ProblemError
        If p != 2, or if some non-support row then violates its margin.
    SingularSystemError
        If K is singular.
    """
    if pp.p != 2.0:
        raise ProblemError("the support-vector closed form holds for p = 2 only")
    S = np.asarray(sorted(set(int(k) for k in support)), dtype=int)
    if S.size == 0:
        raise ProblemError("empty support set")
    n = pp.n
    XS = pp.problem.X[S]
    K = XS @ XS.T
    ones = np.ones(S.size)
    try:
        u = solve_spd(K, ones, what=f"support Gram matrix on rows {S[:10].tolist()}")
    except SingularSystemError as exc:
        raise SingularSystemError(f"{exc} (support set of size {S.size})") from None
    b_S = n * u
    theta = XS.T @ b_S / n
    margins = pp.problem.X @ theta
    if np.max(np.abs(margins[S] - 1.0)) > 1e-8:
        raise SingularSystemError(
            f"support margins deviate from 1 by {np.max(np.abs(margins[S] - 1.0)):.2e}"
        )
    rest = np.setdiff1d(np.arange(n), S)
    if rest.size and margins[rest].min() < 1.0 - 1e-8:
        bad = rest[margins[rest] < 1.0 - 1e-8][:10].tolist()
        raise ProblemError(f"wrong support set: non-support rows {bad} have margin < 1")
    return b_S, theta, float(ones @ u)


def active_set(b, rel=1e-6):
    """Indices with b_i > rel * max_j b_j."""
    b = np.asarray(b, dtype=float)
    top = float(b.max()) if b.size else 0.0
    if top <= 0:
        return np.array([], dtype=int)
    return np.flatnonzero(b > rel * top)
