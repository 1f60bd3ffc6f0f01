"""Iterative solvers for min psi(theta) s.t. x_i^T theta in Y_i.

Dual methods (randomized and accelerated proximal coordinate ascent) work on
the raw dual of :mod:`breginterp.duality`; primal baselines (stochastic mirror
descent on F(theta) = 1/(2n) sum_i d(x_i^T theta, Y_i)^2 and the perceptron)
work on theta directly.  All four draw coordinates from :func:`index_stream`,
so equal seeds give equal index sequences across solvers.
"""

import math
from dataclasses import dataclass

import numpy as np

from .duality import (
    DualState,
    dual_objective,
    primal_from_aggregate,
    rank1_update,
    refresh_period,
    theta_of,
)
from .errors import ProblemError, UnboundedDualError
from .trace import Recorder

_CHUNK = 1 << 16


@dataclass(frozen=True)
class SolverConfig:
    """Run parameters shared by all solvers.

    ``iters`` counts single coordinate (or single example) steps, not epochs.
    ``step_scale`` multiplies the default step 1/L_i and exists for ablations.
    ``ceiling`` is the dual-objective value above which a dual run is
    declared divergent.
    """

    iters: int
    seed: int = 0
    record_every: int = 1
    step_scale: float = 1.0
    ceiling: float = 1e12

    def __post_init__(self):
        if self.iters < 0:
            raise ValueError(f"iters must be >= 0, got {self.iters}")
        if self.record_every < 1:
            raise ValueError(f"record_every must be >= 1, got {self.record_every}")
        if not self.step_scale > 0:
            raise ValueError(f"step_scale must be > 0, got {self.step_scale}")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be an unsigned 64-bit integer")


def index_stream(seed, n, iters):
    """Uniform coordinate indices in [0, n), generated in fixed-size chunks."""
    rng = np.random.default_rng(seed)
    left = iters
    while left > 0:
        k = min(left, _CHUNK)
        yield from rng.integers(0, n, size=k).tolist()
        left -= k


def _prox_coordinate(lo, hi, a, c, kappa):
    """argmax_b -sigma(b) + c (b - a) - kappa/2 (b - a)^2 for Y = [lo, hi].

    Moreau's identity gives b = (v - P(v)) / kappa with v = kappa a + c; the
    form keeps the exact sign pattern of the normal cone (b = 0 whenever v is
    interior, b <= 0 at lo, b >= 0 at hi).
    """
    v = kappa * a + c
    if v < lo:
        return (v - lo) / kappa
    if v > hi:
        return (v - hi) / kappa
    return 0.0


def _is_recorded(t, iters, every):
    return t % every == 0 or t == iters


# -- randomized coordinate ascent -------------------------------------------


def rcd_step(problem, state, i, step_scale=1.0):
    """One proximal coordinate ascent step on coordinate ``i``.

    alpha_i <- alpha_i + (n/L_i)(x_i^T theta - P_i((L_i/n) alpha_i + x_i^T theta)),
    followed by the O(d) aggregate update.  For a singleton {y} this is
    alpha_i += (n/L_i)(x_i^T theta - y).
    """
    theta = theta_of(state)
    x = problem.X[i]
    c = float(x @ theta)
    kappa = problem.L[i] / (problem.n * step_scale)
    a = float(state.alpha[i])
    a_new = _prox_coordinate(problem.lo[i], problem.hi[i], a, c, kappa)
    rank1_update(state, i, a_new - a)
    theta_of(state)
    return state


def _check_ceiling(problem, alpha, s, ceiling, step):
    g = dual_objective(problem, alpha, s=s)
    if g > ceiling:
        raise UnboundedDualError(
            f"unbounded dual - likely infeasible primal: G = {g:.3e} > {ceiling:.1e} at step {step}"
        )
    return g


def run_rcd(problem, config, reference=None, test_X=None, alpha0=None, clock=True, on_record=None):
    """Randomized proximal coordinate ascent from alpha = 0.

    Returns
    -------
    state : DualState
        Final dual iterate (``theta_of(state)`` is the primal answer).
    trace : list of TraceRecord
        Records at step 0, every ``config.record_every`` steps, and the last step.
    """
    state = DualState.zeros(problem) if alpha0 is None else DualState.from_alpha(problem, alpha0)
    rec = Recorder(problem, reference=reference, test_X=test_X, clock=clock)

    def record(t):
        theta = theta_of(state)
        if on_record is not None:
            on_record(t, theta)
        return rec.record(t, theta, state.alpha, state.s)

    trace = [record(0)]
    n = problem.n
    for t, i in enumerate(index_stream(config.seed, n, config.iters), start=1):
        rcd_step(problem, state, i, config.step_scale)
        if _is_recorded(t, config.iters, config.record_every):
            trace.append(record(t))
            if trace[-1].dual_obj > config.ceiling:
                _check_ceiling(problem, state.alpha, state.s, config.ceiling, t)
        elif t % n == 0:
            _check_ceiling(problem, state.alpha, state.s, config.ceiling, t)
    return state, trace


# -- accelerated coordinate ascent ------------------------------------------


def next_gamma(gamma):
    """gamma' = (sqrt(gamma^4 + 4 gamma^2) - gamma^2) / 2.

    Written as 2 gamma / (gamma + sqrt(gamma^2 + 4)) to avoid cancellation;
    gamma'^2 = (1 - gamma') gamma^2.
    """
    return 2.0 * gamma / (gamma + math.sqrt(gamma * gamma + 4.0))


@dataclass(eq=False)
class AccelState:
    """Iterates of accelerated coordinate ascent with their cached aggregates.

    ``alpha`` is the proximal sequence, ``v`` the extrapolated sequence (the
    one the O(1/t^2) rate is about, and the reported answer) and ``z`` the
    point where coordinate gradients are evaluated; ``s_alpha``, ``s_v``,
    ``s_z`` cache X^T of each and ``theta_z`` the primal image of ``z``.
    """

    problem: object
    alpha: np.ndarray
    v: np.ndarray
    z: np.ndarray
    gamma: float
    s_alpha: np.ndarray
    s_v: np.ndarray
    s_z: np.ndarray
    theta_z: np.ndarray
    steps: int = 0
    since_refresh: int = 0

    @classmethod
    def start(cls, problem, alpha0=None):
        alpha = np.zeros(problem.n) if alpha0 is None else np.array(alpha0, dtype=float)
        s = problem.X.T @ alpha
        return cls(
            problem=problem,
            alpha=alpha,
            v=alpha.copy(),
            z=alpha.copy(),
            gamma=1.0 / problem.n,
            s_alpha=s,
            s_v=s.copy(),
            s_z=s.copy(),
            theta_z=primal_from_aggregate(problem, s),
        )

    def point(self, which="v"):
        """``(dual vector, cached X^T of it)`` for 'v' or 'alpha'."""
        if which == "v":
            return self.v, self.s_v
        if which == "alpha":
            return self.alpha, self.s_alpha
        raise ValueError(f"output must be 'v' or 'alpha', got {which!r}")

    def theta(self, which="v"):
        return primal_from_aggregate(self.problem, self.point(which)[1])

    def dual_state(self, which="v"):
        a, s = self.point(which)
        return DualState(
            problem=self.problem,
            alpha=a.copy(),
            s=s.copy(),
            theta=primal_from_aggregate(self.problem, s),
        )

    def refresh(self):
        X = self.problem.X
        self.s_alpha = X.T @ self.alpha
        self.s_v = X.T @ self.v
        self.s_z = X.T @ self.z
        self.theta_z = primal_from_aggregate(self.problem, self.s_z)
        self.since_refresh = 0


def accel_step(problem, state, i, step_scale=1.0):
    """One accelerated proximal coordinate ascent step on coordinate ``i``.

    The coordinate prox is the one of :func:`rcd_step` with curvature
    gamma_t L_i in place of L_i / n, evaluated at theta(z_t).  For half-lines
    [1, inf) and nonnegative multipliers b = -alpha this reads
    b_i <- max(0, b_i + r_t / (gamma_t L_i)) with r_t = 1 - x_i^T theta(z_t).
    Then

        gamma_{t+1} = (sqrt(gamma^4 + 4 gamma^2) - gamma^2) / 2
        v_{t+1} = z_t + n gamma_t (alpha_{t+1} - alpha_t)
        z_{t+1} = (1 - gamma_{t+1}) v_{t+1} + gamma_{t+1} alpha_{t+1}

    with the aggregates X^T alpha, X^T v, X^T z updated in O(d).
    """
    n = problem.n
    x = problem.X[i]
    lo, hi = problem.lo[i], problem.hi[i]
    gamma = state.gamma
    c = float(x @ state.theta_z)
    kappa = gamma * problem.L[i] / step_scale
    a = float(state.alpha[i])
    a_new = _prox_coordinate(lo, hi, a, c, kappa)
    delta = a_new - a
    g_next = next_gamma(gamma)

    state.alpha[i] = a_new
    np.copyto(state.v, state.z)
    if delta != 0.0:
        state.s_alpha += delta * x
        vi = state.z[i] + n * gamma * delta
        # v is a convex combination of past alphas; keep rounding from
        # pushing it out of the dual domain (sign-constrained for half-lines).
        if hi == math.inf and vi > 0.0:
            vi = 0.0
        elif lo == -math.inf and vi < 0.0:
            vi = 0.0
        state.v[i] = vi
        state.s_v = state.s_z + (vi - state.z[i]) * x
    else:
        state.s_v = state.s_z.copy()
    state.z = (1.0 - g_next) * state.v + g_next * state.alpha
    state.s_z = (1.0 - g_next) * state.s_v + g_next * state.s_alpha
    state.gamma = g_next
    state.steps += 1
    state.since_refresh += 1
    if state.since_refresh >= refresh_period(n, state.steps):
        state.refresh()
    else:
        state.theta_z = primal_from_aggregate(problem, state.s_z)
    return state


def run_accel(
    problem,
    config,
    reference=None,
    test_X=None,
    alpha0=None,
    output="v",
    clock=True,
    on_record=None,
):
    """Accelerated proximal coordinate ascent from alpha = 0 (gamma_0 = 1/n).

    ``output`` picks the reported dual sequence: 'v' (default; the sequence
    whose gap obeys the accelerated O(1/t^2) bound) or 'alpha' (the
    proximal sequence).  Returns ``(DualState, trace)`` like :func:`run_rcd`.
    """
    state = AccelState.start(problem, alpha0)
    state.point(output)
    rec = Recorder(problem, reference=reference, test_X=test_X, clock=clock)

    def record(t):
        a, s = state.point(output)
        theta = primal_from_aggregate(problem, s)
        if on_record is not None:
            on_record(t, theta)
        return rec.record(t, theta, a, s)

    trace = [record(0)]
    n = problem.n
    for t, i in enumerate(index_stream(config.seed, n, config.iters), start=1):
        accel_step(problem, state, i, config.step_scale)
        if _is_recorded(t, config.iters, config.record_every):
            trace.append(record(t))
            if trace[-1].dual_obj > config.ceiling:
                _check_ceiling(problem, *state.point(output), config.ceiling, t)
        elif t % n == 0:
            _check_ceiling(problem, *state.point(output), config.ceiling, t)
    return state.dual_state(output), trace


# -- primal baselines ---------------------------------------------------------


def primal_objective(problem, theta):
    """F(theta) = 1/(2n) sum_i d(x_i^T theta, Y_i)^2."""
    c = problem.X @ np.asarray(theta, dtype=float)
    r = c - np.clip(c, problem.lo, problem.hi)
    return 0.5 * float(r @ r) / problem.n


def _mirror_step(problem, w, theta, i, gamma):
    x = problem.X[i]
    c = float(x @ theta)
    r = c - min(max(c, problem.lo[i]), problem.hi[i])
    if r == 0.0:
        return w, theta
    w = w - (gamma * r) * x
    return w, problem.map.grad_psi_star(w)


def smd_step(problem, theta, i, gamma):
    """One stochastic mirror descent step on f_i = 1/2 d(x_i^T theta, Y_i)^2.

    grad psi(theta') = grad psi(theta) - gamma (x_i^T theta - P_i(x_i^T theta)) x_i.
    A feasible row leaves theta unchanged.
    """
    theta = np.asarray(theta, dtype=float)
    _, out = _mirror_step(problem, problem.map.grad_psi(theta), theta, i, gamma)
    return out.copy() if out is theta else out


def run_smd(
    problem,
    config,
    reference=None,
    test_X=None,
    report="last",
    per_coordinate=False,
    clock=True,
    on_record=None,
):
    """Stochastic mirror descent with constant step ``step_scale / max_i L_i``.

    ``per_coordinate=True`` uses 1/L_{i(t)} instead, which makes the
    iterates coincide with :func:`run_rcd` on singleton problems.  The
    running average is theta_bar_t = (1/t) sum_{s<t} theta_s, the object
    covered by the O(1/t) bound on F.  ``report`` selects which of the two
    sequences ('last' or 'avg') the trace describes.

    Returns
    -------
    theta_avg, theta_last : ndarray
    trace : list of TraceRecord
    """
    if report not in ("last", "avg"):
        raise ValueError(f"report must be 'last' or 'avg', got {report!r}")
    d = problem.d
    theta = np.zeros(d)
    w = np.zeros(d)
    acc = np.zeros(d)
    rec = Recorder(problem, reference=reference, test_X=test_X, clock=clock)
    gamma_max = config.step_scale / problem.max_L

    def record(t):
        th = theta if report == "last" else (acc / t if t else np.zeros(d))
        if on_record is not None:
            on_record(t, th)
        return rec.record(t, th)

    trace = [record(0)]
    for t, i in enumerate(index_stream(config.seed, problem.n, config.iters), start=1):
        acc += theta
        gamma = config.step_scale / problem.L[i] if per_coordinate else gamma_max
        w, theta = _mirror_step(problem, w, theta, i, gamma)
        if _is_recorded(t, config.iters, config.record_every):
            trace.append(record(t))
    theta_avg = acc / config.iters if config.iters else np.zeros(d)
    return theta_avg, theta.copy(), trace


def run_perceptron(problem, config, reference=None, test_X=None, clock=True, on_record=None):
    """Classic perceptron on margin violations, sampling rows from :func:`index_stream`.

    On x_i^T theta < lo_i the update is theta <- theta + x_i, whatever the
    problem's exponent p.  Stops at the first theta without margin violations.

    Raises
    ------
    ProblemError
        If the constraints are not all half-lines.
    """
    if problem.kind() != "halfline":
        raise ProblemError("the perceptron needs half-line constraints (perceptron problem variant)")
    theta = np.zeros(problem.d)
    rec = Recorder(problem, reference=reference, test_X=test_X, clock=clock)
    X, lo = problem.X, problem.lo

    def record(t):
        if on_record is not None:
            on_record(t, theta)
        return rec.record(t, theta)

    trace = [record(0)]
    for t, i in enumerate(index_stream(config.seed, problem.n, config.iters), start=1):
        x = X[i]
        separated = False
        if float(x @ theta) < lo[i]:
            theta += x
            separated = bool(np.all(X @ theta >= lo))
        if separated or _is_recorded(t, config.iters, config.record_every):
            trace.append(record(t))
        if separated:
            break
    return theta, trace
