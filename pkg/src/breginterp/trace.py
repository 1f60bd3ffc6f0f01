"""Convergence telemetry: one :class:`TraceRecord` per recorded step, plus CSV I/O."""

import csv
import math
import time
from dataclasses import astuple, dataclass, fields

import numpy as np

from .duality import dual_objective, gap_certificate
from .mirror_maps import lp_norm

TRACE_HEADER = (
    "step",
    "epoch",
    "dual_obj",
    "gap_upper",
    "bregman_to_opt",
    "lp_dist_to_opt",
    "train_mistakes",
    "test_mistakes",
    "wall_ns",
)

NOT_APPLICABLE = -1


@dataclass(frozen=True)
class TraceRecord:
    """A row of telemetry.

    Quantities that need a reference optimum are NaN without one; primal
    methods have no dual objective and report NaN there too.  Mistake counts
    are sign errors (ties included) and are -1 for problems that are not
    all half-lines, or when no test rows were given.
    """

    step: int
    epoch: float
    dual_obj: float
    gap_upper: float
    bregman_to_opt: float
    lp_dist_to_opt: float
    train_mistakes: int
    test_mistakes: int
    wall_ns: int

    def key(self):
        """All fields but the wall clock; equal keys mean identical runs."""
        return astuple(self)[:-1]


class Recorder:
    """Turns solver iterates into :class:`TraceRecord` rows.

    Parameters
    ----------
    problem : Problem
    reference : Reference, optional
        Supplies ``theta_star`` and ``g_star`` for the distance columns.
    test_X : ndarray, optional
        Label-folded test rows ``y_i x_i``; a test mistake is a row with
        non-positive score.
    clock : bool
        If false, ``wall_ns`` is always 0 so that traces are byte-reproducible.
    """

    def __init__(self, problem, reference=None, test_X=None, clock=True):
        self.problem = problem
        self.reference = reference
        self.test_X = None if test_X is None else np.asarray(test_X, dtype=float)
        self.clock = clock
        self.count_mistakes = problem.kind() == "halfline"
        self._t0 = time.perf_counter_ns()

    def record(self, step, theta, alpha=None, s=None):
        problem = self.problem
        ref = self.reference
        dual = gap = breg = dist = math.nan
        if alpha is not None:
            dual = dual_objective(problem, alpha, s=s)
            if ref is not None:
                gap = gap_certificate(problem, alpha, ref.g_star, s=s)
        if ref is not None:
            breg = problem.map.bregman(ref.theta_star, theta)
            dist = lp_norm(theta - ref.theta_star, problem.p)
        train = test = NOT_APPLICABLE
        if self.count_mistakes:
            train = int(np.count_nonzero(problem.X @ theta <= 0.0))
            if self.test_X is not None:
                test = int(np.count_nonzero(self.test_X @ theta <= 0.0))
        wall = time.perf_counter_ns() - self._t0 if self.clock else 0
        return TraceRecord(
            step=int(step),
            epoch=step / problem.n,
            dual_obj=dual,
            gap_upper=gap,
            bregman_to_opt=breg,
            lp_dist_to_opt=dist,
            train_mistakes=train,
            test_mistakes=test,
            wall_ns=int(wall),
        )


def _fmt(v):
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return format(float(v), ".17g")


def write_trace_csv(path_or_file, records):
    """Write records with the fixed header row."""
    own = isinstance(path_or_file, (str, bytes)) or hasattr(path_or_file, "__fspath__")
    fh = open(path_or_file, "w", newline="") if own else path_or_file
    try:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(TRACE_HEADER)
        for r in records:
            w.writerow([_fmt(v) for v in astuple(r)])
    finally:
        if own:
            fh.close()


def read_trace_csv(path):
    types = [f.type for f in fields(TraceRecord)]
    out = []
    with open(path, newline="") as fh:
        rows = csv.reader(fh)
        header = tuple(next(rows))
        if header != TRACE_HEADER:
            raise ValueError(f"unexpected trace header {header!r}")
        for row in rows:
            vals = [int(v) if t is int else float(v) for v, t in zip(row, types)]
            out.append(TraceRecord(*vals))
    return out


def epochs_to_zero(records, column="train_mistakes"):
    """Epoch of the first record whose ``column`` is 0, or ``inf``."""
    for r in records:
        if getattr(r, column) == 0:
            return r.epoch
    return math.inf
