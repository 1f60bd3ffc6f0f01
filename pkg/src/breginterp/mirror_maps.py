"""The l_p mirror map psi(theta) = 1/2 ||theta||_p^2 for 1 < p <= 2.

Its conjugate is psi*(s) = 1/2 ||s||_q^2 with 1/p + 1/q = 1, and the two
gradients are mutually inverse bijections of R^d.  psi is (p - 1)-strongly
convex with respect to ||.||_p.
"""

from dataclasses import dataclass, field

import numpy as np


def lp_norm(x, r):
    """l_r norm of ``x`` for r >= 1, rescaled to avoid overflow."""
    x = np.asarray(x, dtype=float)
    if r == 2:
        return float(np.sqrt(x @ x))
    m = float(np.max(np.abs(x))) if x.size else 0.0
    if m == 0.0:
        return 0.0
    return m * float(np.sum((np.abs(x) / m) ** r) ** (1.0 / r))


def _signed_power_map(v, r):
    """||v||_r^{2-r} |v|^{r-1} sign(v), with 0 mapped to 0.

    Evaluated as N * sign(v) * (|v| / N)^{r-1} with N = ||v||_r, which is the
    same expression without overflow for large r.
    """
    v = np.asarray(v, dtype=float)
    if r == 2:
        return v.copy()
    nrm = lp_norm(v, r)
    if nrm == 0.0:
        return np.zeros_like(v)
    return nrm * np.sign(v) * (np.abs(v) / nrm) ** (r - 1.0)


@dataclass(frozen=True)
class MirrorMap:
    """psi = 1/2 ||.||_p^2 with its conjugate, gradients and Bregman divergence.

    Parameters
    ----------
    p : float
        Exponent in (1, 2].  ``q`` (the dual exponent) and ``mu`` (the
        strong-convexity modulus, p - 1) are derived.
    """

    p: float
    q: float = field(init=False)
    mu: float = field(init=False)

    def __post_init__(self):
        p = float(self.p)
        if not (1.0 < p <= 2.0) or not np.isfinite(p):
            raise ValueError(f"mirror map exponent p must lie in (1, 2], got {self.p!r}")
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "q", 2.0 if p == 2.0 else p / (p - 1.0))
        object.__setattr__(self, "mu", p - 1.0)

    def norm(self, theta):
        return lp_norm(theta, self.p)

    def dual_norm(self, s):
        return lp_norm(s, self.q)

    def psi(self, theta):
        return 0.5 * self.norm(theta) ** 2

    def psi_star(self, s):
        return 0.5 * self.dual_norm(s) ** 2

    def grad_psi(self, theta):
        return _signed_power_map(theta, self.p)

    def grad_psi_star(self, s):
        return _signed_power_map(s, self.q)

    def bregman(self, theta, eta):
        """D(theta, eta) = psi(theta) - psi(eta) - <grad psi(eta), theta - eta>."""
        theta = np.asarray(theta, dtype=float)
        eta = np.asarray(eta, dtype=float)
        d = self.psi(theta) - self.psi(eta) - float(self.grad_psi(eta) @ (theta - eta))
        # Cancellation can leave a tiny negative residue.
        return max(d, 0.0)
