"""Single-cycle neighborhood contribution gamma(eps, t).

A depth-``t`` neighborhood with exactly one cycle falls into one of three
kinds, keyed by what sits at the cycle's shallowest point:

``V``  a variable node at depth ``s1`` (``1 <= s1 <= t-1``),
``C``  a check node at depth ``s1`` (``0 <= s1 <= t-1``),
``R``  the cycle passes through the root (parameter ``s``, ``1 <= s <= 2t``).

``s2`` is the total length of the two branches from the shallowest point
to the deepest point of the cycle.  Each term is the combinatorial weight of
the shape times the probability that the root stays erased, which is built
from the short recursions in :class:`CycleRecursionCache`.
"""
from __future__ import annotations

from dataclasses import dataclass

from ._numeric import context
from .density_evolution import DensityTrajectory, evolve
from .ensemble import Ensemble
from .tree import DEFAULT_BITS, _validate

KINDS = ("V", "C", "R")


@dataclass(frozen=True)
class CycleParams:
    kind: str
    s1: int
    s2: int

    def check(self, t: int):
        k, s1, s2 = self.kind, self.s1, self.s2
        if k == "V":
            ok = 1 <= s1 <= t - 1 and 2 * s1 + 1 <= s2 <= 2 * t
        elif k == "C":
            ok = 0 <= s1 <= t - 1 and 2 * s1 + 2 <= s2 <= 2 * t
        elif k == "R":
            ok = 1 <= s2 <= 2 * t
        else:
            raise ValueError(f"unknown cycle kind {k!r}")
        if not ok:
            raise ValueError(f"cycle parameters {self} out of range for t={t}")
        return self


class CycleRecursionCache:
    """Per-call memo tables for the erasure recursions along a cycle.

    ``A(k)`` and ``B(k)`` are the normalized derivatives
    ``rho'(1-Q(k))/rho'(1)`` and ``eps lambda'(P(k))/lambda'(1)``: the
    probability that a message is erased given that one specific incoming
    edge (a cycle edge) is known to be erased.
    """

    def __init__(self, e: Ensemble, traj: DensityTrajectory, ctx):
        ev = e.evaluator(ctx)
        self.ev = ev
        self.ctx = ctx
        self.traj = traj
        self.eps = ctx.num(traj.epsilon)
        P, Q = traj.P, traj.Q
        T = traj.horizon
        # with lambda'(1) = 0 or rho'(1) = 0 no cycle exists and every weight vanishes
        ra = 1 / ev.rho1 if ev.rho1 else ev.zero
        lb = 1 / ev.lam1 if ev.lam1 else ev.zero
        self.A = [None] + [ev.rho(ev.one - Q[k], 1) * ra for k in range(1, T + 1)]
        self.B = [self.eps * ev.lam(P[k], 1) * lb for k in range(T + 1)]
        self._G1, self._G2, self._G3 = {}, {}, {}

    def f(self, t: int, s: int, p):
        """Erasure probability of a variable-to-check message ``s`` steps along the path, boundary value ``p``."""
        if t == 0:
            return self.eps
        return self.B[t] * self.g(t, s - 1, p)

    def g(self, t: int, s: int, p):
        # unrolled f/g alternation; both indices only decrease
        if s == 0:
            return p
        return 1 - self.A[t] * (1 - self.f(t - 1, s, p))

    def G1(self, t: int, s: int):
        key = (t, s)
        if key not in self._G1:
            if s == 0:
                v = self.ev.one
            else:
                a = self.A[t]
                v = (1 - a) ** 2 + 2 * a * (1 - a) * self.f(t - 1, s, 1) + a**2 * self.G2(t - 1, s - 1)
            self._G1[key] = v
        return self._G1[key]

    def G2(self, t: int, s: int):
        key = (t, s)
        if key not in self._G2:
            b = self.B[t]
            self._G2[key] = b if s == 0 else b**2 * self.G1(t, s - 1)
        return self._G2[key]

    def G3(self, t: int, s: int):
        key = (t, s)
        if key not in self._G3:
            b = self.B[t]
            if s == 0:
                v = 1 - b
            else:
                v = 1 - 2 * self.f(t, s + 1, 1) + b**2 * self.G1(t, s - 1)
            self._G3[key] = v
        return self._G3[key]


def cycle_recursions(e: Ensemble, traj: DensityTrajectory, ctx=None) -> CycleRecursionCache:
    ctx = ctx or context(DEFAULT_BITS)
    return CycleRecursionCache(e, traj, ctx)


def F_v(cache: CycleRecursionCache, t: int, s1: int, s2: int):
    """Term for a cycle whose shallowest node is a variable node at depth ``s1``."""
    CycleParams("V", s1, s2).check(t)
    ev = cache.ev
    if ev.lam2 == 0:
        return ev.zero
    P, Q = cache.traj.P, cache.traj.Q
    X = ev.lam1 * ev.rho1
    weight = ev.lam2 * ev.rho1**2 * X ** (s2 - s1 - 2) / 2
    inner = cache.eps * ev.lam(P[t - s1], 2) / ev.lam2 * cache.G1(t - s1, s2 - 2 * s1 - 1)
    boundary = 1 - cache.A[t - s1 + 1] * (1 - inner)
    return weight * Q[t + 1] * cache.g(t, s1 - 1, boundary)


def F_c(cache: CycleRecursionCache, t: int, s1: int, s2: int):
    """Term for a cycle whose shallowest node is a check node at depth ``s1``."""
    CycleParams("C", s1, s2).check(t)
    ev = cache.ev
    if ev.rho2 == 0:
        return ev.zero
    Q = cache.traj.Q
    X = ev.lam1 * ev.rho1
    weight = ev.rho2 * ev.lam1 * X ** (s2 - s1 - 2) / 2
    boundary = 1 - ev.rho(1 - Q[t - s1], 2) / ev.rho2 * cache.G3(t - s1 - 1, s2 - 2 * s1 - 2)
    return weight * Q[t + 1] * cache.g(t, s1, boundary)


def F_r(cache: CycleRecursionCache, t: int, s: int):
    """Term for a cycle of length ``2s`` through the root."""
    CycleParams("R", 0, s).check(t)
    ev = cache.ev
    X = ev.lam1 * ev.rho1
    return X**s / 2 * cache.B[t] * cache.G1(t, s - 1)


def gamma_terms(e: Ensemble, epsilon, t: int, ctx=None, traj=None):
    """All ``(kind, s1, s2, value)`` terms; for kind ``R`` ``s1`` is 0 and ``s2`` is ``s``."""
    _validate(epsilon, t)
    ctx = ctx or context(DEFAULT_BITS)
    if traj is None:
        traj = evolve(e, epsilon, t, ctx)
    cache = CycleRecursionCache(e, traj, ctx)
    out = []
    for s1 in range(1, t):
        for s2 in range(2 * s1 + 1, 2 * t + 1):
            out.append(("V", s1, s2, F_v(cache, t, s1, s2)))
    for s1 in range(0, t):
        for s2 in range(2 * s1 + 2, 2 * t + 1):
            out.append(("C", s1, s2, F_c(cache, t, s1, s2)))
    for s in range(1, 2 * t + 1):
        out.append(("R", 0, s, F_r(cache, t, s)))
    return out


def gamma(e: Ensemble, epsilon, t: int, ctx=None, traj=None):
    """Single-cycle contribution ``gamma(eps, t)`` in the scalar type of ``ctx``."""
    ctx = ctx or context(DEFAULT_BITS)
    total = ctx.num(0)
    for *_, v in gamma_terms(e, epsilon, t, ctx, traj):
        total = total + v
    return total
