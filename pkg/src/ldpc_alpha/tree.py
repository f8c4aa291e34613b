"""Cycle-free neighborhood contribution beta(eps, t) to the 1/n coefficient.

The contribution is assembled from second factorial moments of three counts
on the depth-``t`` tree: the number of edges ``K`` and, per degree, the
numbers of variable nodes ``V_i`` and check nodes ``C_j``, each weighted by
the root's erasure probability.  Their generating functions obey a family of
augmented density-evolution recursions, run here alongside plain DE.

All recursions use only ``+ - * **`` so they run unchanged on floats or on
multiprecision scalars supplied by a context from :mod:`ldpc_alpha._numeric`.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from ._numeric import context
from .density_evolution import DensityTrajectory, evolve
from .ensemble import Ensemble

DEFAULT_BITS = 256

# names of the eight per-family recursion values, order matters for state tuples
FIELDS = ("f1", "g1", "F1", "G1", "f2", "g2", "F2", "G2")


def _zero_state(zero):
    return dict.fromkeys(FIELDS, zero)


@dataclass
class AugmentedState:
    """Recursion values after ``t`` iterations.

    ``scalar`` holds the edge-count family, ``var[i]`` and ``check[j]`` the
    degree-resolved families.  ``history`` is filled only on request and then
    holds one ``(scalar, var, check)`` snapshot per iteration ``0..t``.
    """

    epsilon: object
    t: int
    traj: DensityTrajectory
    scalar: dict
    var: dict
    check: dict
    ctx: object = None
    history: list | None = field(default=None, repr=False)


@dataclass(frozen=True)
class TreeExpectations:
    EK: object
    EV: dict
    EC: dict


def _validate(epsilon, t):
    if t < 0:
        raise ValueError("t must be >= 0")
    if not 0 <= float(epsilon) <= 1:
        raise ValueError(f"epsilon must lie in [0, 1], got {epsilon}")


def augmented_de(e: Ensemble, epsilon, t: int, ctx=None, traj=None, keep_history=False) -> AugmentedState:
    """Run the augmented recursions for ``t`` iterations.

    Only degrees with a nonzero edge fraction get a family.  Two rolling
    levels are kept unless ``keep_history`` is set.
    """
    _validate(epsilon, t)
    ctx = ctx or context(DEFAULT_BITS)
    ev = e.evaluator(ctx)
    eps = ctx.num(epsilon)
    if traj is None:
        traj = evolve(e, epsilon, t, ctx)
    P, Q = traj.P, traj.Q
    l1, l2, r1, r2 = ev.lam1, ev.lam2, ev.rho1, ev.rho2
    zero = ev.zero

    S = _zero_state(zero)
    V = {i: _zero_state(zero) for i in ev.lam_coef}
    C = {j: _zero_state(zero) for j in ev.rho_coef}
    history = [(dict(S), {i: dict(v) for i, v in V.items()}, {j: dict(c) for j, c in C.items()})] if keep_history else None

    for k in range(1, t + 1):
        Pp = P[k - 1]
        a = ev.one - Q[k]
        # derivatives of the message maps at the current DE point
        lam0 = eps * ev.lam(Pp)
        lamd = eps * ev.lam(Pp, 1)
        lamdd = eps * ev.lam(Pp, 2)
        rho0 = ev.rho(a)
        rhod = ev.rho(a, 1)
        rhodd = ev.rho(a, 2)

        f1, f2, F1, F2 = S["f1"], S["f2"], S["F1"], S["F2"]
        g1 = 1 + l1 * f1
        G1 = g1 - lam0 - lamd * F1
        g2 = 2 * l1 * f1 + l2 * f1**2 + l1 * f2
        G2 = g2 - 2 * lamd * F1 - lamdd * F1**2 - lamd * F2
        nf1 = 1 + r1 * g1
        nF1 = nf1 - rho0 - rhod * G1
        nf2 = 2 * r1 * g1 + r2 * g1**2 + r1 * g2
        nF2 = nf2 - 2 * rhod * G1 - rhodd * G1**2 - rhod * G2
        S = dict(f1=nf1, g1=g1, F1=nF1, G1=G1, f2=nf2, g2=g2, F2=nF2, G2=G2)

        for i, li in ev.lam_coef.items():
            v = V[i]
            vf1, vf2, vF1, vF2 = v["f1"], v["f2"], v["F1"], v["F2"]
            gv1 = l1 * vf1 + li
            Gv1 = gv1 - lamd * vF1 - eps * li * Pp ** (i - 1)
            gv2 = l2 * vf1**2 + l1 * vf2 + 2 * li * (i - 1) * vf1
            Gv2 = gv2 - lamdd * vF1**2 - lamd * vF2
            if i >= 2:
                Gv2 = Gv2 - 2 * eps * li * (i - 1) * Pp ** (i - 2) * vF1
            fv1 = r1 * gv1
            Fv1 = fv1 - rhod * Gv1
            fv2 = r2 * gv1**2 + r1 * gv2
            Fv2 = fv2 - rhodd * Gv1**2 - rhod * Gv2
            V[i] = dict(f1=fv1, g1=gv1, F1=Fv1, G1=Gv1, f2=fv2, g2=gv2, F2=Fv2, G2=Gv2)

        for j, rj in ev.rho_coef.items():
            c = C[j]
            cf1, cf2, cF1, cF2 = c["f1"], c["f2"], c["F1"], c["F2"]
            gc1 = l1 * cf1
            Gc1 = gc1 - lamd * cF1
            gc2 = l2 * cf1**2 + l1 * cf2
            Gc2 = gc2 - lamdd * cF1**2 - lamd * cF2
            fc1 = r1 * gc1 + rj
            Fc1 = fc1 - rhod * Gc1 - rj * a ** (j - 1)
            fc2 = r2 * gc1**2 + r1 * gc2 + 2 * rj * (j - 1) * gc1
            Fc2 = fc2 - rhodd * Gc1**2 - rhod * Gc2
            if j >= 2:
                Fc2 = Fc2 - 2 * rj * (j - 1) * a ** (j - 2) * Gc1
            C[j] = dict(f1=fc1, g1=gc1, F1=Fc1, G1=Gc1, f2=fc2, g2=gc2, F2=Fc2, G2=Gc2)

        if keep_history:
            history.append((dict(S), {i: dict(v) for i, v in V.items()}, {j: dict(c) for j, c in C.items()}))

    return AugmentedState(epsilon, t, traj, S, V, C, ctx, history)


def expectations(s: AugmentedState, e: Ensemble) -> TreeExpectations:
    """Erasure-weighted second factorial moments of ``K``, ``V_i`` and ``C_j``."""
    ev = e.evaluator(s.ctx)
    eps = ev.ctx.num(s.epsilon)
    Pt = s.traj.P[s.t]
    L1 = eps * ev.L(Pt, 1)
    L2 = eps * ev.L(Pt, 2)

    def moment(F1, F2):
        return L2 * F1**2 + L1 * F2

    EK = moment(s.scalar["F1"], s.scalar["F2"])
    EV = {}
    for i, Li in ev.L_coef.items():
        v = s.var[i]
        EV[i] = moment(v["F1"], v["F2"]) + 2 * eps * Li * i * Pt ** (i - 1) * v["F1"]
    EC = {j: moment(c["F1"], c["F2"]) for j, c in s.check.items()}
    return TreeExpectations(EK, EV, EC)


def beta_from_expectations(x: TreeExpectations, e: Ensemble, ctx):
    ev = e.evaluator(ctx)
    total = x.EK
    for i, Ev in x.EV.items():
        total = total - ctx.num(i) / ev.lam_coef[i] * Ev
    for j, Ec in x.EC.items():
        total = total - ctx.num(j) / ev.rho_coef[j] * Ec
    return total / (2 * ev.Ld1)


def beta(e: Ensemble, epsilon, t: int, ctx=None, traj=None):
    """Cycle-free contribution ``beta(eps, t)`` in the scalar type of ``ctx``.

    Defaults to 256-bit arithmetic; pass ``context(53)`` for floats.
    """
    ctx = ctx or context(DEFAULT_BITS)
    s = augmented_de(e, epsilon, t, ctx, traj)
    return beta_from_expectations(expectations(s, e), e, ctx)


def beta_regular_closed_form(l: int, r: int, epsilon, t: int, ctx=None):
    """``beta`` for an ``(l, r)``-regular ensemble, where the tree is unique.

    ``-(1/2) l (r-1) (1 - X^t)/(1 - X) X^t eps P(t)^l`` with
    ``X = (l-1)(r-1)``; the ratio becomes ``t`` when ``X = 1``.
    """
    _validate(epsilon, t)
    ctx = ctx or context(DEFAULT_BITS)
    e = Ensemble.regular(l, r)
    traj = evolve(e, epsilon, t, ctx)
    X = (l - 1) * (r - 1)
    geom = t if X == 1 else (1 - X**t) // (1 - X)
    eps = ctx.num(epsilon)
    return -ctx.num(l * (r - 1) * geom * X**t) / 2 * eps * traj.P[t] ** l
