"""Minimum-Bregman-divergence interpolation by dual coordinate ascent.

Solves min psi(theta) subject to x_i^T theta in Y_i (i = 1..n) with
psi = 1/2 ||.||_p^2, through randomized and accelerated proximal coordinate
ascent on the Fenchel dual, with primal mirror-descent and perceptron
baselines.
"""

from .datagen import GenSpec, Spectrum, generate, preset
from .duality import (
    DualState,
    dual_objective,
    gap_certificate,
    norm_bound,
    rank1_update,
    stationarity_residual,
    theta_of,
)
from .errors import (
    BreginterpError,
    InvalidReferenceError,
    NotConvergedError,
    NumericalError,
    ProblemError,
    RejectionBudgetError,
    SingularSystemError,
    UnboundedDualError,
)
from .mirror_maps import MirrorMap, lp_norm
from .oracles import Reference, finite_diff_grad, min_norm_l2_singleton, reference_solve
from .perceptron import (
    LabeledData,
    PerceptronProblem,
    build_perceptron,
    count_mistakes,
    l2_support_vector_solution,
    mistake_bound_dual,
    mistake_bound_primal,
    sparse_p,
)
from .problem import HalfLine, Interval, Problem, Singleton, build_problem, project, support
from .solvers import (
    AccelState,
    SolverConfig,
    accel_step,
    rcd_step,
    run_accel,
    run_perceptron,
    run_rcd,
    run_smd,
    smd_step,
)
from .trace import TraceRecord, read_trace_csv, write_trace_csv

__version__ = "0.1.0"
