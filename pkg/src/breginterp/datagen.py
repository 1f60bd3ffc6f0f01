"""Synthetic separable classification data.

Inputs are x ~ N(0, diag(lambda)) with a power-law spectrum, the planted
predictor is theta ~ N(0, I) (optionally restricted to a random support),
labels are sign(x^T theta + b), and draws with |x^T theta + b| <= margin_floor
are rejected and replaced so that the requested sizes are exact.

All randomness comes from one ``numpy.random.Generator`` over PCG64 seeded
with ``seed``; normal variates use numpy's ziggurat sampler.  Draw order:
planted theta, its support (if sparse), then candidate inputs in batches;
accepted inputs go to the training set first, then to the test set.
"""

import enum
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import RejectionBudgetError
from .perceptron import LabeledData, sparse_p


class Spectrum(enum.Enum):
    POWER_THREE_HALVES = 1.5
    POWER_ONE = 1.0

    def eigenvalues(self, d):
        return np.arange(1, d + 1, dtype=float) ** (-self.value)


@dataclass(frozen=True)
class GenSpec:
    n_train: int
    n_test: int
    d: int
    spectrum: Spectrum = Spectrum.POWER_THREE_HALVES
    sparsity: Optional[int] = None
    b: float = 0.005
    margin_floor: float = 0.1
    seed: int = 0
    budget_factor: int = 100

    def __post_init__(self):
        if min(self.n_train, self.n_test, self.d) < 1:
            raise ValueError("n_train, n_test and d must be positive")
        if self.sparsity is not None and not 1 <= self.sparsity <= self.d:
            raise ValueError(f"sparsity must lie in [1, d={self.d}], got {self.sparsity}")
        if self.margin_floor < 0:
            raise ValueError("margin_floor must be >= 0")


DESK_D, DESK_N = 200, 100
PAPER_D, PAPER_N = 2000, 1000


def preset(name, seed=0, paper_scale=False):
    """Named experiment settings: returns ``(GenSpec, p)``.

    'l2': spectrum i^{-3/2}, dense planted predictor, p = 2.
    'sparse': spectrum i^{-1}, 50 nonzero planted coordinates, p = 1 + 1/ln d.
    Both use b = 0.005 and margin floor 0.1; sizes are d = 200, n = 100 per
    split, or d = 2000, n = 1000 with ``paper_scale``.
    """
    d, n = (PAPER_D, PAPER_N) if paper_scale else (DESK_D, DESK_N)
    if name == "l2":
        return GenSpec(n_train=n, n_test=n, d=d, seed=seed), 2.0
    if name == "sparse":
        spec = GenSpec(
            n_train=n, n_test=n, d=d, spectrum=Spectrum.POWER_ONE, sparsity=50, seed=seed
        )
        return spec, sparse_p(d)
    raise ValueError(f"unknown preset {name!r} (expected 'l2' or 'sparse')")


def generate(spec):
    """Draw ``(train, test, planted_theta)`` according to ``spec``.

    Raises
    ------
    RejectionBudgetError
        If more than ``budget_factor`` times the requested number of inputs
        had to be drawn.
    """
    rng = np.random.default_rng(spec.seed)
    d = spec.d
    scale = np.sqrt(spec.spectrum.eigenvalues(d))
    theta = rng.standard_normal(d)
    if spec.sparsity is not None:
        keep = rng.choice(d, size=spec.sparsity, replace=False)
        mask = np.zeros(d, dtype=bool)
        mask[keep] = True
        theta[~mask] = 0.0

    target = spec.n_train + spec.n_test
    budget = spec.budget_factor * target
    kept_x, kept_m = [], []
    have = drawn = 0
    while have < target:
        if drawn >= budget:
            raise RejectionBudgetError(
                f"only {have} of {target} examples cleared |x^T theta + b| > "
                f"{spec.margin_floor} after {drawn} draws; try a smaller margin_floor"
            )
        k = min(max(target - have, 64), budget - drawn)
        x = rng.standard_normal((k, d)) * scale
        m = x @ theta + spec.b
        ok = np.abs(m) > spec.margin_floor
        kept_x.append(x[ok])
        kept_m.append(m[ok])
        have += int(ok.sum())
        drawn += k
    X = np.concatenate(kept_x)[:target]
    m = np.concatenate(kept_m)[:target]
    y = np.where(m >= 0, 1.0, -1.0)
    n1 = spec.n_train
    return LabeledData(X[:n1], y[:n1]), LabeledData(X[n1:], y[n1:]), theta
