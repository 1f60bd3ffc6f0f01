"""Dual objective, primal-from-dual map and the gap certificate.

Sign convention: the raw Fenchel dual

    G(alpha) = -(1/n) sum_i sigma_i(alpha_i) - psi*(-(1/n) X^T alpha),
    theta(alpha) = grad psi*(-(1/n) X^T alpha),

with alpha unconstrained and sigma_i allowed to be +inf.  For half-line sets
[lo, inf) this forces alpha_i <= 0; :mod:`breginterp.perceptron` exposes the
nonnegative multipliers -alpha.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidReferenceError
from .problem import support_vec

GAP_TOLERANCE = 1e-8


@dataclass(eq=False)
class DualState:
    """Mutable dual iterate with the cached aggregate ``s = X^T alpha``.

    ``theta`` is valid only while ``dirty`` is false; read it through
    :func:`theta_of`.  ``s`` is updated by rank-one increments and recomputed
    from scratch every ``n * ceil(log2(t + 2))`` updates.
    """

    problem: object
    alpha: np.ndarray
    s: np.ndarray
    theta: np.ndarray
    dirty: bool = False
    updates: int = 0
    since_refresh: int = field(default=0, repr=False)

    @classmethod
    def zeros(cls, problem):
        return cls.from_alpha(problem, np.zeros(problem.n))

    @classmethod
    def from_alpha(cls, problem, alpha):
        alpha = np.array(alpha, dtype=float, copy=True)
        s = problem.X.T @ alpha
        theta = problem.map.grad_psi_star(-s / problem.n)
        return cls(problem=problem, alpha=alpha, s=s, theta=theta)

    def copy(self):
        return DualState(
            problem=self.problem,
            alpha=self.alpha.copy(),
            s=self.s.copy(),
            theta=self.theta.copy(),
            dirty=self.dirty,
            updates=self.updates,
            since_refresh=self.since_refresh,
        )


def refresh_period(n, t):
    """Number of rank-one updates between exact recomputations of X^T alpha."""
    return n * math.ceil(math.log2(t + 2))


def primal_from_aggregate(problem, s):
    """theta = grad psi*(-s / n) for the aggregate s = X^T alpha."""
    return problem.map.grad_psi_star(-np.asarray(s, dtype=float) / problem.n)


def dual_objective(problem, alpha, s=None):
    """G(alpha); ``-inf`` where some support value is infinite.

    ``s`` may be passed to reuse a cached ``X^T alpha``.
    """
    alpha = np.asarray(alpha, dtype=float)
    if s is None:
        s = problem.X.T @ alpha
    sig = support_vec(problem.lo, problem.hi, alpha)
    if np.isinf(sig).any():
        return -math.inf
    n = problem.n
    # + 0.0 turns the -0.0 at alpha = 0 into 0.0
    return -float(sig.sum()) / n - problem.map.psi_star(np.asarray(s) / n) + 0.0


def dual_gradient(problem, alpha):
    """Gradient of G at points where every sigma_i is differentiable.

    The smooth part contributes (1/n) x_i^T theta(alpha); the support term
    contributes -(1/n) hi_i for alpha_i > 0 and -(1/n) lo_i for alpha_i < 0.
    At alpha_i = 0 with lo_i < hi_i the support term has a kink and the
    returned entry is NaN.
    """
    alpha = np.asarray(alpha, dtype=float)
    theta = primal_from_aggregate(problem, problem.X.T @ alpha)
    sub = np.where(alpha > 0, problem.hi, problem.lo)
    kink = (alpha == 0) & (problem.lo != problem.hi)
    grad = (problem.X @ theta - sub) / problem.n
    grad[kink] = np.nan
    return grad


def theta_of(state):
    """Primal iterate theta(alpha) of ``state``, refreshing the cache if stale."""
    if state.dirty:
        state.theta = primal_from_aggregate(state.problem, state.s)
        state.dirty = False
    return state.theta


def rank1_update(state, i, delta):
    """alpha_i += delta and s += delta * x_i, in O(d); marks theta stale."""
    state.dirty = True
    if delta == 0.0:
        return state
    state.alpha[i] += delta
    state.s += delta * state.problem.X[i]
    state.updates += 1
    state.since_refresh += 1
    if state.since_refresh >= refresh_period(state.problem.n, state.updates):
        state.s = state.problem.X.T @ state.alpha
        state.since_refresh = 0
    return state


def stationarity_residual(problem, alpha, theta=None):
    """Coordinatewise fixed-point residual of the proximal coordinate step.

    r_i = x_i^T theta - P_i(kappa_i alpha_i + x_i^T theta) with
    kappa_i = L_i / n; r = 0 exactly at a dual maximizer.
    """
    alpha = np.asarray(alpha, dtype=float)
    if theta is None:
        theta = primal_from_aggregate(problem, problem.X.T @ alpha)
    c = problem.X @ theta
    kappa = problem.L / problem.n
    return c - np.clip(kappa * alpha + c, problem.lo, problem.hi)


def gap_certificate(problem, alpha, g_star, s=None):
    """gap(alpha) = g_star - G(alpha).

    By weak duality and strong convexity of psi the returned value bounds
    ``bregman(theta_star, theta(alpha))`` from above, and therefore
    ``||theta(alpha) - theta_star||_p <= sqrt(2 gap / (p - 1))``.

    Raises
    ------
    InvalidReferenceError
        If the gap is below ``-GAP_TOLERANCE``: ``g_star`` cannot be the
        dual optimum.
    """
    g = dual_objective(problem, alpha, s=s)
    gap = g_star - g
    if gap < -GAP_TOLERANCE:
        raise InvalidReferenceError(
            f"negative gap {gap:.3e}: G(alpha) = {g!r} exceeds the supplied optimum {g_star!r}"
        )
    return gap


def norm_bound(problem, gap):
    """Upper bound on ||theta(alpha) - theta_star||_p implied by ``gap``."""
    return math.sqrt(2.0 * max(gap, 0.0) / problem.map.mu)
