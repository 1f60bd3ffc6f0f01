"""Command-line driver: ``gen``, ``run``, ``bounds`` and ``sweep``.

Exit status is 0 on success, 1 on usage or input errors and 2 on numerical
diagnostics (divergent dual, singular systems, unconverged reference solve).
"""

import argparse
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from .datagen import generate, preset
from .errors import BreginterpError, NumericalError
from .mirror_maps import lp_norm
from .oracles import reference_solve
from .perceptron import (
    LabeledData,
    build_perceptron,
    mistake_bound_dual,
    primal_zero_mistake_steps,
    sparse_p,
)
from .problem import Singleton, build_problem
from .solvers import SolverConfig, run_accel, run_perceptron, run_rcd, run_smd
from .trace import epochs_to_zero, write_trace_csv

SOLVERS = ("rcd", "accel", "smd", "smd-avg", "perceptron")
PROBLEMS = ("perceptron", "least-squares")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad flags; 2 is reserved for numerical trouble
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


# -- dataset I/O --------------------------------------------------------------


def save_matrix(path, a):
    a = np.asarray(a, dtype=float)
    np.savetxt(path, a if a.ndim == 2 else a[:, None], fmt="%.17g", delimiter=",")


def load_matrix(path):
    """Dense CSV without header; every row must have the same number of fields."""
    try:
        with open(path) as fh:
            lines = [ln.strip() for ln in fh if ln.strip()]
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    if not lines:
        raise UsageError(f"{path}: empty file")
    rows = []
    width = None
    for k, ln in enumerate(lines, start=1):
        parts = ln.split(",")
        if width is None:
            width = len(parts)
        elif len(parts) != width:
            raise UsageError(f"{path}:{k}: expected {width} fields, found {len(parts)}")
        try:
            rows.append([float(v) for v in parts])
        except ValueError:
            raise UsageError(f"{path}:{k}: non-numeric field") from None
    a = np.array(rows)
    if not np.all(np.isfinite(a)):
        raise UsageError(f"{path}: non-finite values")
    return a


def split_last(a, path):
    if a.shape[1] < 2:
        raise UsageError(f"{path}: need at least one feature column and a label column")
    return a[:, :-1], a[:, -1]


def parse_p(text, d):
    if text == "sparse":
        return sparse_p(d)
    try:
        p = float(text)
    except ValueError:
        raise UsageError(f"--p must be a number in (1, 2] or 'sparse', got {text!r}") from None
    if not 1.0 < p <= 2.0:
        raise UsageError(f"--p must lie in (1, 2], got {p}")
    return p


# -- problem assembly ----------------------------------------------------------


def load_problem(kind, p_text, train_path, test_path=None):
    """Returns ``(problem, test_X)``; ``test_X`` holds label-folded test rows."""
    X, t = split_last(load_matrix(train_path), train_path)
    p = parse_p(p_text, X.shape[1])
    if kind == "perceptron":
        try:
            pp = build_perceptron(LabeledData(X, t), p)
        except BreginterpError as exc:
            raise UsageError(f"{train_path}: {exc}") from None
        test_X = None
        if test_path is not None:
            Xt, yt = split_last(load_matrix(test_path), test_path)
            if Xt.shape[1] != X.shape[1]:
                raise UsageError(
                    f"dimension mismatch: train has {X.shape[1]} features, test has {Xt.shape[1]}"
                )
            try:
                test_X = LabeledData(Xt, yt).folded()
            except BreginterpError as exc:
                raise UsageError(f"{test_path}: {exc}") from None
        return pp.problem, test_X
    if test_path is not None:
        raise UsageError("--test applies to the perceptron problem only")
    try:
        problem = build_problem(X, [Singleton(float(v)) for v in t], p)
    except BreginterpError as exc:
        raise UsageError(f"{train_path}: {exc}") from None
    return problem, None


def check_combo(solver, kind):
    if solver == "perceptron" and kind != "perceptron":
        raise UsageError("solver 'perceptron' needs --problem perceptron (half-line constraints)")


def solve(problem, solver, config, reference=None, test_X=None, clock=True, accel_output="v"):
    """Run one solver; returns its trace."""
    if solver == "rcd":
        return run_rcd(problem, config, reference, test_X, clock=clock)[1]
    if solver == "accel":
        return run_accel(problem, config, reference, test_X, output=accel_output, clock=clock)[1]
    if solver in ("smd", "smd-avg"):
        report = "avg" if solver == "smd-avg" else "last"
        return run_smd(problem, config, reference, test_X, report=report, clock=clock)[2]
    if solver == "perceptron":
        return run_perceptron(problem, config, reference, test_X, clock=clock)[1]
    raise UsageError(f"unknown solver {solver!r}")


# -- subcommands -----------------------------------------------------------------


def cmd_gen(args):
    spec, _ = preset(args.preset, seed=args.seed, paper_scale=args.paper_scale)
    train, test, theta = generate(spec)
    os.makedirs(args.out, exist_ok=True)
    save_matrix(os.path.join(args.out, "train.csv"), np.column_stack([train.X_raw, train.y]))
    save_matrix(os.path.join(args.out, "test.csv"), np.column_stack([test.X_raw, test.y]))
    save_matrix(os.path.join(args.out, "theta_planted.csv"), theta)
    print(f"wrote {train.n} train / {test.n} test rows with d = {spec.d} to {args.out}")
    return 0


def cmd_run(args):
    check_combo(args.solver, args.problem)
    problem, test_X = load_problem(args.problem, args.p, args.train, args.test)
    config = SolverConfig(
        iters=args.iters,
        seed=args.seed,
        record_every=args.record_every,
        step_scale=args.step_scale,
        ceiling=args.ceiling,
    )
    reference = reference_solve(problem, ceiling=args.ceiling) if args.ref == "auto" else None
    trace = solve(
        problem,
        args.solver,
        config,
        reference,
        test_X,
        clock=not args.no_wall_clock,
        accel_output=args.accel_output,
    )
    if args.out in (None, "-"):
        write_trace_csv(sys.stdout, trace)
    else:
        write_trace_csv(args.out, trace)
    return 0


def bound_report(pp, reference):
    """Perceptron bound diagnostics as ``(name, value)`` pairs."""
    problem = pp.problem
    g_star = reference.g_star
    a_norm = float(np.linalg.norm(reference.alpha_star))
    theta_norm = lp_norm(reference.theta_star, problem.p)
    lemma = mistake_bound_dual(pp, g_star, a_norm)
    lemma_maxl = mistake_bound_dual(pp, g_star, a_norm, divisor="maxL")
    return [
        ("n", problem.n),
        ("d", problem.d),
        ("p", problem.p),
        ("R", pp.R),
        ("max_L", problem.max_L),
        ("G_star", g_star),
        ("gap_bound", reference.achieved_gap_bound),
        ("alpha_star_norm", a_norm),
        ("theta_star_norm_p", theta_norm),
        ("dual_threshold_steps", math.ceil(lemma)),
        ("dual_threshold_steps_maxL", math.ceil(lemma_maxl)),
        ("primal_threshold_steps", primal_zero_mistake_steps(pp, theta_norm)),
    ]


def cmd_bounds(args):
    X, y = split_last(load_matrix(args.train), args.train)
    p = parse_p(args.p, X.shape[1])
    try:
        pp = build_perceptron(LabeledData(X, y), p)
    except BreginterpError as exc:
        raise UsageError(f"{args.train}: {exc}") from None
    if args.ref == "none":
        rows = [("n", pp.n), ("d", pp.problem.d), ("p", p), ("R", pp.R)]
    else:
        rows = bound_report(pp, reference_solve(pp.problem))
    for name, val in rows:
        print(f"{name}: {val:.10g}" if isinstance(val, float) else f"{name}: {val}")
    return 0


def _sweep_job(job):
    problem, test_X, solver, seed, iters, every, out, clock = job
    config = SolverConfig(iters=iters, seed=seed, record_every=every)
    trace = solve(problem, solver, config, test_X=test_X, clock=clock)
    write_trace_csv(out, trace)
    return solver, seed, epochs_to_zero(trace)


def parse_seeds(text):
    """'0-9' or '1,4,7' or a mix; ranges are inclusive."""
    seeds = []
    for part in text.split(","):
        part = part.strip()
        try:
            if "-" in part:
                a, b = (int(v) for v in part.split("-", 1))
                seeds.extend(range(a, b + 1))
            else:
                seeds.append(int(part))
        except ValueError:
            raise UsageError(f"bad --seeds entry {part!r}") from None
    if not seeds or min(seeds) < 0:
        raise UsageError("--seeds must list nonnegative integers")
    return seeds


def cmd_sweep(args):
    solvers = [s.strip() for s in args.solvers.split(",")]
    for s in solvers:
        if s not in SOLVERS:
            raise UsageError(f"unknown solver {s!r} (choose from {', '.join(SOLVERS)})")
        check_combo(s, args.problem)
    seeds = parse_seeds(args.seeds)
    problem, test_X = load_problem(args.problem, args.p, args.train, args.test)
    iters = args.epochs * problem.n
    every = args.record_every or problem.n
    os.makedirs(args.out, exist_ok=True)
    jobs = [
        (
            problem,
            test_X,
            s,
            seed,
            iters,
            every,
            os.path.join(args.out, f"{s}_seed{seed}.csv"),
            not args.no_wall_clock,
        )
        for s in solvers
        for seed in seeds
    ]
    if args.workers == 1:
        results = [_sweep_job(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=args.workers) as pool:
            results = list(pool.map(_sweep_job, jobs))
    summary = os.path.join(args.out, "summary.csv")
    with open(summary, "w") as fh:
        fh.write("solver,seed,epochs_to_zero\n")
        for s, seed, ep in results:
            fh.write(f"{s},{seed},{ep:.17g}\n")
    for s in solvers:
        eps = [ep for name, _, ep in results if name == s]
        print(f"{s}: median epochs to zero training mistakes = {float(np.median(eps)):.4g}")
    return 0


# -- entry point -------------------------------------------------------------------


def build_parser():
    parser = _Parser(prog="breginterp", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("gen", help="generate a synthetic separable dataset")
    g.add_argument("--preset", choices=("l2", "sparse"), default="l2")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--paper-scale", action="store_true", help="d = 2000, n = 1000 per split")
    g.add_argument("--out", required=True, help="output directory")
    g.set_defaults(func=cmd_gen)

    def data_flags(sp, test=True):
        sp.add_argument("--problem", choices=PROBLEMS, default="perceptron")
        sp.add_argument("--p", default="2", help="exponent in (1, 2] or 'sparse' (1 + 1/ln d)")
        sp.add_argument("--train", required=True, help="CSV: features then label/target")
        if test:
            sp.add_argument("--test", help="CSV of held-out labeled rows (perceptron only)")

    r = sub.add_parser("run", help="run one solver and write its trace")
    r.add_argument("--solver", choices=SOLVERS, required=True)
    data_flags(r)
    r.add_argument("--iters", type=int, required=True, help="coordinate steps")
    r.add_argument("--seed", type=int, default=0)
    r.add_argument("--record-every", type=int, default=100)
    r.add_argument("--step-scale", type=float, default=1.0)
    r.add_argument("--ceiling", type=float, default=1e12,
                   help="dual objective above which the run is declared divergent")
    r.add_argument("--ref", choices=("auto", "none"), default="none",
                   help="'auto' solves for the optimum first and fills the gap/distance columns")
    r.add_argument("--accel-output", choices=("v", "alpha"), default="v",
                   help="dual sequence reported by accel")
    r.add_argument("--no-wall-clock", action="store_true", help="write wall_ns = 0")
    r.add_argument("--out", help="trace CSV path (default: stdout)")
    r.set_defaults(func=cmd_run)

    b = sub.add_parser("bounds", help="mistake-bound diagnostics for a perceptron dataset")
    b.add_argument("--train", required=True)
    b.add_argument("--p", default="2")
    b.add_argument("--ref", choices=("auto", "none"), default="auto")
    b.set_defaults(func=cmd_bounds)

    w = sub.add_parser("sweep", help="many (solver, seed) runs in a worker pool")
    w.add_argument("--solvers", default="accel,rcd,smd,perceptron")
    data_flags(w)
    w.add_argument("--seeds", default="0-9", help="e.g. 0-9 or 1,3,5")
    w.add_argument("--epochs", type=int, default=100)
    w.add_argument("--record-every", type=int, default=0, help="steps (default: n)")
    w.add_argument("--workers", type=int, default=os.cpu_count() or 1)
    w.add_argument("--no-wall-clock", action="store_true")
    w.add_argument("--out", required=True, help="output directory")
    w.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except NumericalError as exc:
        print(f"breginterp: numerical error: {exc}", file=sys.stderr)
        return 2
    except (UsageError, BreginterpError, ValueError) as exc:
        print(f"breginterp: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
