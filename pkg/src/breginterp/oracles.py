"""Ground-truth computations for tests and certificates.

These are deliberately plain: dense factorizations, restarted runs with
doubling budgets, central differences.  They are meant for n, d <= 500.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy import linalg

from .duality import dual_objective, primal_from_aggregate, stationarity_residual
from .errors import NotConvergedError, SingularSystemError, UnboundedDualError
from .solvers import AccelState, accel_step, index_stream

STATIONARITY_TOL = 1e-10


@dataclass(frozen=True)
class Reference:
    """High-accuracy solution bundle.

    ``g_star`` is G(alpha_star) (a lower bound on the dual optimum) and
    ``achieved_gap_bound`` certifies ``max G - g_star <= achieved_gap_bound``:
    it is psi at a primal-feasible correction of theta_star minus g_star.
    """

    theta_star: np.ndarray
    g_star: float
    alpha_star: np.ndarray
    achieved_gap_bound: float
    residual: float
    steps: int
    converged: bool

    @property
    def g_upper(self):
        return self.g_star + self.achieved_gap_bound


def solve_spd(A, b, what="system"):
    """Solve A x = b for symmetric positive definite A.

    Cholesky solve with a relative residual check at 1e-10; one step of
    iterative refinement is tried before giving up.
    """
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    try:
        factor = linalg.cho_factor(A)
    except linalg.LinAlgError:
        raise SingularSystemError(f"{what}: matrix is singular or not positive definite") from None
    x = linalg.cho_solve(factor, b)

    def rel_res(x):
        scale = np.linalg.norm(A, np.inf) * np.linalg.norm(x, np.inf) + np.linalg.norm(b, np.inf)
        return np.linalg.norm(A @ x - b, np.inf) / max(scale, np.finfo(float).tiny)

    if rel_res(x) > 1e-10:
        x = x + linalg.cho_solve(factor, b - A @ x)
        if rel_res(x) > 1e-10:
            raise SingularSystemError(f"{what}: residual {rel_res(x):.2e} after refinement")
    return x


def min_norm_l2_singleton(X, y):
    """theta = X^T (X X^T)^{-1} y, the minimum-l2-norm interpolator.

    Raises
    ------
    SingularSystemError
        If X does not have full row rank.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    theta = X.T @ solve_spd(X @ X.T, y, what="Gram matrix X X^T")
    err = float(np.max(np.abs(X @ theta - y)))
    if err > 1e-8 * max(1.0, float(np.max(np.abs(y)))):
        raise SingularSystemError(f"min-norm interpolator misses the targets by {err:.2e}")
    return theta


def feasible_correction(problem, theta):
    """Smallest l2 shift of ``theta`` putting every x_i^T theta into Y_i.

    Returns None when X X^T is too ill-conditioned for the correction.
    """
    X = problem.X
    c = X @ theta
    r = np.clip(c, problem.lo, problem.hi) - c
    if not r.any():
        return theta.copy()
    try:
        return theta + X.T @ solve_spd(X @ X.T, r, what="feasibility correction")
    except SingularSystemError:
        return None


def _bundle(problem, alpha, s, steps, converged):
    theta = primal_from_aggregate(problem, s)
    g = dual_objective(problem, alpha, s=s)
    res = float(np.max(np.abs(stationarity_residual(problem, alpha, theta))))
    fixed = feasible_correction(problem, theta)
    bound = math.inf if fixed is None else max(problem.map.psi(fixed) - g, 0.0)
    return Reference(
        theta_star=theta,
        g_star=g,
        alpha_star=alpha.copy(),
        achieved_gap_bound=bound,
        residual=res,
        steps=steps,
        converged=converged,
    )


def reference_solve(problem, tol=1e-13, max_steps=10**7, seed=0, ceiling=1e12):
    """High-precision dual optimum by restarted accelerated coordinate ascent.

    Phase k runs ``n * 2**k`` accelerated steps warm-started at the previous
    phase's alpha (gamma reset to 1/n).  Stops once the relative improvement
    of G between phases is at most ``tol`` and the stationarity residual is at
    most 1e-10.

    Raises
    ------
    NotConvergedError
        When ``max_steps`` is exhausted; the best bundle is attached and
        flagged unconverged.
    UnboundedDualError
        When G exceeds ``ceiling`` at the end of a phase (infeasible primal).
    """
    n = problem.n
    if math.isinf(tol):
        return _bundle(problem, np.zeros(n), np.zeros(problem.d), 0, converged=False)
    alpha = np.zeros(n)
    g_prev = dual_objective(problem, alpha)
    used = 0
    phase = 0
    while True:
        budget = min(n * 2**phase, max_steps - used)
        state = AccelState.start(problem, alpha)
        for i in index_stream(seed + phase, n, budget):
            accel_step(problem, state, i)
        used += budget
        # exact aggregates for the stopping test
        state.refresh()
        alpha = state.alpha
        g = dual_objective(problem, alpha, s=state.s_alpha)
        theta = primal_from_aggregate(problem, state.s_alpha)
        res = float(np.max(np.abs(stationarity_residual(problem, alpha, theta))))
        if g > ceiling:
            raise UnboundedDualError(
                f"unbounded dual - likely infeasible primal: G = {g:.3e} > {ceiling:.1e} "
                f"after {used} steps"
            )
        small_step = g - g_prev <= tol * max(abs(g), 1.0)
        if small_step and res <= STATIONARITY_TOL:
            return _bundle(problem, alpha, state.s_alpha, used, converged=True)
        if used >= max_steps:
            ref = _bundle(problem, alpha, state.s_alpha, used, converged=False)
            raise NotConvergedError(
                f"reference solve did not converge in {used} steps "
                f"(residual {res:.2e}, last improvement {g - g_prev:.2e})",
                reference=ref,
            )
        g_prev = max(g, g_prev)
        phase += 1


def finite_diff_grad(f, x, h=1e-6):
    """Central-difference gradient of the scalar function ``f`` at ``x``."""
    x = np.asarray(x, dtype=float)
    g = np.empty_like(x)
    e = np.zeros_like(x)
    for j in range(x.size):
        e[j] = h
        g[j] = (f(x + e) - f(x - e)) / (2.0 * h)
        e[j] = 0.0
    return g
