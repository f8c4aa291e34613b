"""Density evolution for the BEC, its fixed point, and the BP threshold.

Indexing follows the usual convention: ``P[k]`` is the erasure probability
of check-to-variable messages after ``k`` iterations (``P[0] = 1``) and
``Q[k] = eps * lambda(P[k-1])`` the variable-to-check erasure probability at
iteration ``k``.  ``Q[0]`` is undefined and stored as ``None``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from ._numeric import FloatContext
from .ensemble import Ensemble

DEFAULT_TOL = 1e-14
DEFAULT_MAX_ITER = 100_000
DELTA_ZERO = 1e-10

# after this many plain iterations the monotone tail is resolved by root bracketing
_BRACKET_AFTER = 2000


@dataclass(frozen=True)
class DensityTrajectory:
    epsilon: float
    horizon: int
    P: tuple
    Q: tuple
    Pb: tuple

    def as_rows(self):
        """Rows ``(t, P(t), Q(t), Pb(t))`` for ``t = 0..horizon`` (``Q(0)`` reported as empty)."""
        return [(t, self.P[t], self.Q[t], self.Pb[t]) for t in range(self.horizon + 1)]


@dataclass(frozen=True)
class FixedPoint:
    P_inf: float
    Q_inf: float
    converged: bool
    iterations_used: int


def evolve(e: Ensemble, epsilon, t: int, ctx=None) -> DensityTrajectory:
    """Run density evolution for ``t`` iterations (plus the extra ``Q[t+1]``)."""
    if t < 0:
        raise ValueError("t must be >= 0")
    ctx = ctx or FloatContext()
    ev = e.evaluator(ctx)
    eps = ctx.num(epsilon)
    if not 0 <= eps <= 1:
        raise ValueError(f"epsilon must lie in [0, 1], got {epsilon}")
    one = ev.one
    P = [one]
    Q = [None]
    for k in range(1, t + 2):
        Q.append(eps * ev.lam(P[k - 1]))
        P.append(ev.rho_comp(Q[k]))
    Pb = [eps * ev.L(P[k]) for k in range(t + 1)]
    return DensityTrajectory(epsilon, t, tuple(P[: t + 1]), tuple(Q), tuple(Pb))


def _check_complement(e: Ensemble):
    """``x -> 1 - rho(1 - x)`` without cancellation for small ``x``."""
    terms = [(j - 1, float(c)) for j, c in e.rho.coeffs.items() if c > 0]

    def comp(x):
        lx = np.log1p(-np.asarray(x, dtype=float))
        out = sum(-c * np.expm1(k * lx) for k, c in terms)
        return out if np.ndim(out) else float(out)

    return comp


def _de_map(e: Ensemble, epsilon: float):
    ev = e.evaluator()
    comp = _check_complement(e)

    def h(x):
        return epsilon * ev.lam(comp(x)) - x

    return ev, h


def _largest_root_below(h, top: float, floor: float = DELTA_ZERO * 1e-2) -> float:
    """Largest ``x <= top`` with ``h(x) >= 0``, given ``h(top) < 0``.

    ``h`` is negative on the whole interval between the monotone DE trajectory
    and its limit, so the limit is the first sign change found scanning down.
    """
    fine = np.linspace(top, 0.9 * top, 2001)[1:]
    decades = max(int(np.ceil(np.log10(0.9 * top / floor))), 1)
    coarse = 0.9 * top * np.logspace(0, -decades, 400 * decades + 1)[1:]
    grid = np.concatenate([fine, coarse])
    vals = h(grid)
    hit = np.flatnonzero(vals >= 0)
    if hit.size == 0:
        return 0.0
    i = hit[0]
    lo = grid[i]
    hi = grid[i - 1] if i > 0 else top
    if vals[i] == 0:
        return float(lo)
    return float(brentq(h, lo, hi, xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=500))


def fixed_point(e: Ensemble, epsilon: float, tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_MAX_ITER) -> FixedPoint:
    """Limit of density evolution started from ``P(0) = 1``.

    Plain iteration is used until ``|Q(t) - Q(t-1)| < tol``.  Close to a
    threshold the iteration slows down critically; after a few thousand steps
    the remaining monotone tail is replaced by bracketing the largest fixed
    point below the current iterate, which is exactly the limit of the
    monotone sequence.  Non-convergence is reported through ``converged``.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    epsilon = float(epsilon)
    ev, h = _de_map(e, epsilon)
    P = 1.0
    Q_prev = None
    for it in range(1, max_iter + 1):
        Q = epsilon * ev.lam(P)
        P = 1.0 - ev.rho(1.0 - Q)
        if Q_prev is not None and abs(Q - Q_prev) < tol:
            return FixedPoint(P, Q, True, it)
        Q_prev = Q
        if it == _BRACKET_AFTER and it < max_iter:
            if h(Q) >= 0:
                continue
            q_star = _largest_root_below(h, Q)
            p_star = 1.0 - ev.rho(1.0 - q_star)
            return FixedPoint(p_star, q_star, True, it)
    return FixedPoint(P, Q, False, max_iter)


def threshold(e: Ensemble, tol: float = 1e-8, delta_zero: float = DELTA_ZERO) -> float:
    """BP threshold by bisection on ``fixed_point(eps).Q_inf > delta_zero``."""
    if tol <= 0:
        raise ValueError("tol must be positive")

    def above(eps):
        return fixed_point(e, eps).Q_inf > delta_zero

    lo, hi = 0.0, 1.0
    if not above(hi):
        return 1.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if above(mid):
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)
