"""Feasibility instances: min psi(theta) s.t. x_i^T theta in Y_i for every row.

Each Y_i is a closed interval of the real line (possibly degenerate or
unbounded).  The three supported shapes share one representation, the bounds
``lo <= hi`` with infinite values allowed, which makes projection a clamp and
the support function a sign switch.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ProblemError
from .mirror_maps import MirrorMap, lp_norm


class ConstraintSet:
    """Nonempty closed convex subset of R given by ``lo <= v <= hi``."""

    lo: float
    hi: float

    def project(self, v):
        return project(self, v)

    def support(self, a):
        return support(self, a)


@dataclass(frozen=True)
class Singleton(ConstraintSet):
    y: float

    @property
    def lo(self):
        return self.y

    @property
    def hi(self):
        return self.y


@dataclass(frozen=True)
class HalfLine(ConstraintSet):
    """The set [lo, +inf)."""

    lo: float
    hi: float = field(default=math.inf, init=False)


@dataclass(frozen=True)
class Interval(ConstraintSet):
    lo: float
    hi: float

    def __post_init__(self):
        if not self.lo <= self.hi:
            raise ProblemError(f"Interval requires lo <= hi, got [{self.lo}, {self.hi}]")


def project(cset, v):
    """Euclidean projection of the scalar ``v`` onto ``cset``."""
    return min(max(float(v), cset.lo), cset.hi)


def support(cset, a):
    """sup_{y in cset} y * a; returns ``math.inf`` for unbounded directions."""
    a = float(a)
    if a > 0.0:
        return math.inf if cset.hi == math.inf else cset.hi * a
    if a < 0.0:
        return math.inf if cset.lo == -math.inf else cset.lo * a
    return 0.0


def support_vec(lo, hi, a):
    """Vectorized :func:`support` over bound arrays."""
    a = np.asarray(a, dtype=float)
    out = np.zeros_like(a)
    pos = a > 0
    neg = a < 0
    with np.errstate(invalid="ignore"):
        out[pos] = hi[pos] * a[pos]
        out[neg] = lo[neg] * a[neg]
    # hi = +inf with a > 0 gives +inf; lo = -inf with a < 0 gives +inf as well.
    return out


@dataclass(frozen=True, eq=False)
class Problem:
    """Data matrix, per-row constraint sets, mirror map and coordinate constants.

    Build instances with :func:`build_problem`, which validates the data and
    computes ``L_i = ||x_i||_q^2 / (p - 1)``.
    """

    X: np.ndarray
    sets: tuple
    map: MirrorMap
    L: np.ndarray
    lo: np.ndarray
    hi: np.ndarray

    @property
    def n(self):
        return self.X.shape[0]

    @property
    def d(self):
        return self.X.shape[1]

    @property
    def p(self):
        return self.map.p

    @property
    def max_L(self):
        return float(self.L.max())

    def kind(self):
        """'singleton', 'halfline', or 'mixed' depending on the set types."""
        kinds = {type(s) for s in self.sets}
        if kinds == {Singleton}:
            return "singleton"
        if kinds == {HalfLine}:
            return "halfline"
        return "mixed"


def build_problem(X, sets, p):
    """Validate inputs and assemble a :class:`Problem`.

    Raises
    ------
    ProblemError
        On a bad exponent, mismatched dimensions, a non-finite entry, or an
        all-zero row (whose coordinate constant would vanish).
    """
    try:
        mmap = MirrorMap(p)
    except ValueError as exc:
        raise ProblemError(str(exc)) from None
    X = np.array(X, dtype=float, copy=True)
    if X.ndim != 2 or X.shape[0] < 1 or X.shape[1] < 1:
        raise ProblemError(f"X must be a nonempty 2-d matrix, got shape {X.shape}")
    sets = tuple(sets)
    if len(sets) != X.shape[0]:
        raise ProblemError(
            f"dimension mismatch: X has {X.shape[0]} rows but {len(sets)} constraint sets were given"
        )
    if not np.all(np.isfinite(X)):
        raise ProblemError("X contains non-finite entries")
    for k, s in enumerate(sets):
        if not isinstance(s, ConstraintSet):
            raise ProblemError(f"sets[{k}] is not a ConstraintSet: {s!r}")
    zero = np.flatnonzero(~np.any(X != 0.0, axis=1))
    if zero.size:
        raise ProblemError(f"zero rows are not allowed (row indices {zero[:10].tolist()})")
    L = np.array([lp_norm(row, mmap.q) ** 2 for row in X]) / mmap.mu
    lo = np.array([s.lo for s in sets], dtype=float)
    hi = np.array([s.hi for s in sets], dtype=float)
    X.setflags(write=False)
    L.setflags(write=False)
    return Problem(X=X, sets=sets, map=mmap, L=L, lo=lo, hi=hi)
