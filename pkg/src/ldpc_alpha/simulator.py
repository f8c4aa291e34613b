"""Monte Carlo estimation of finite-length BP erasure rates.

Each trial draws a fresh Tanner graph from the configuration model and a
fresh erasure pattern, then runs flooding BP for a fixed number of
iterations.  Trial ``k`` draws from its own counter-based stream
``Philox(key = seed + k * 2**64)``, in a fixed order: first the socket
permutation, then ``n`` uniforms.  A variable is erased iff its uniform is
below ``eps``, so one trial serves every ``eps`` of a grid and every
``t <= t_max`` at once, and the results are bit-identical to running each
grid point on its own.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import kernels
from .density_evolution import evolve
from .ensemble import Ensemble

INTEGER_TOL = 1e-9
Z95 = 1.959963984540054
_MASK64 = (1 << 64) - 1


class InfeasibleBlocklength(ValueError):
    """No degree histogram with the requested blocklength realizes the ensemble."""


@dataclass(frozen=True)
class DegreeCounts:
    var: dict
    check: dict
    n: int
    m: int
    E: int
    repair: str = ""


@dataclass(frozen=True)
class TannerGraph:
    n: int
    m: int
    var_degrees: np.ndarray
    check_degrees: np.ndarray
    edge_var: np.ndarray
    edge_check: np.ndarray

    @property
    def E(self) -> int:
        return int(self.edge_var.shape[0])


@dataclass(frozen=True)
class SimResult:
    n: int
    epsilon: float
    t: int
    trials: int
    pb_hat: float
    ci_halfwidth: float
    seed: int
    scaled: float
    repair: str = ""


def degree_counts(e: Ensemble, n: int) -> DegreeCounts:
    """Integer node-degree histograms for blocklength ``n``.

    Variable counts ``n L_i`` must be integers (to 1e-9).  Check counts are
    rounded from ``E rho_j / j``; if the socket totals then disagree by
    ``d``, the most frequent check degree ``j`` absorbs it, either by adding
    ``d / j`` checks when ``j`` divides ``d`` or by turning one degree-``j``
    check into a degree-``j + d`` check.
    """
    if n < 1:
        raise InfeasibleBlocklength("n must be >= 1")
    var = {}
    for i, Li in e.L.coeffs.items():
        if Li == 0:
            continue
        x = n * Li
        k = round(x)
        if abs(float(x - k)) > INTEGER_TOL:
            raise InfeasibleBlocklength(f"n*L_{i} = {float(x):.6g} is not an integer for n={n}")
        if k:
            var[i] = int(k)
    E = sum(i * k for i, k in var.items())
    check = {}
    for j, rj in e.rho.coeffs.items():
        if rj == 0:
            continue
        k = round(Fraction(E) * rj / j)
        if k:
            check[j] = int(k)
    repair = ""
    d = E - sum(j * k for j, k in check.items())
    if d:
        if not check:
            raise InfeasibleBlocklength(f"no check nodes for n={n}")
        jstar = max(check, key=lambda j: (check[j], -j))
        if d % jstar == 0 and check[jstar] + d // jstar >= 0:
            check[jstar] += d // jstar
            repair = f"check degree {jstar} count {d // jstar:+d}"
        elif jstar + d >= 1:
            check[jstar] -= 1
            check[jstar + d] = check.get(jstar + d, 0) + 1
            repair = f"one check of degree {jstar} -> degree {jstar + d}"
        else:
            raise InfeasibleBlocklength(f"cannot balance {d} sockets for n={n}")
        check = {j: k for j, k in sorted(check.items()) if k > 0}
    m = sum(check.values())
    return DegreeCounts(var, check, n, m, E, repair)


def _sockets(counts: dict) -> tuple[np.ndarray, np.ndarray]:
    degs = np.concatenate([np.full(k, d, dtype=np.intc) for d, k in sorted(counts.items())]) if counts else np.zeros(0, np.intc)
    return degs, np.repeat(np.arange(len(degs), dtype=np.intc), degs)


class _Layout:
    """Degree sequences and socket owners, shared by all trials of one run."""

    def __init__(self, e: Ensemble, n: int):
        self.counts = degree_counts(e, n)
        self.var_degrees, self.var_sockets = _sockets(self.counts.var)
        self.check_degrees, self.check_sockets = _sockets(self.counts.check)
        self.n = n
        self.m = self.counts.m
        self.E = self.counts.E

    def graph(self, perm: np.ndarray) -> TannerGraph:
        return TannerGraph(self.n, self.m, self.var_degrees, self.check_degrees, self.var_sockets, self.check_sockets[perm])


def trial_rng(seed: int, k: int) -> np.random.Generator:
    """Independent stream for trial ``k``."""
    return np.random.Generator(np.random.Philox(key=(int(seed) & _MASK64) | (int(k) << 64)))


def sample_graph(e: Ensemble, n: int, rng: np.random.Generator) -> TannerGraph:
    """Uniform socket matching with the histograms from :func:`degree_counts`."""
    lay = _Layout(e, n)
    return lay.graph(rng.permutation(lay.E))


def bp_decode(g: TannerGraph, erased, t: int) -> np.ndarray:
    """Still-erased flags after ``t`` flooding iterations."""
    if t < 0:
        raise ValueError("t must be >= 0")
    erased = np.asarray(erased, dtype=bool)
    _, final = kernels.bp_flood(g.edge_var, g.edge_check, erased, g.n, g.m, t)
    return np.asarray(final, dtype=bool)


def peel_decode(g: TannerGraph, erased, t: int) -> np.ndarray:
    """Round-synchronous peeling: every check with one erased socket resolves it.

    Multi-edges count once per socket, so a check tied to an erased variable
    by two edges never resolves it.
    """
    if t < 0:
        raise ValueError("t must be >= 0")
    er = np.array(erased, dtype=bool)
    for _ in range(t):
        live = er[g.edge_var]
        deg = np.bincount(g.edge_check, weights=live, minlength=g.m)
        hit = live & (deg[g.edge_check] == 1)
        if not hit.any():
            break
        er[g.edge_var[hit]] = False
    return er


def _run_chunk(lay: _Layout, seed: int, ks: range, eps: np.ndarray, tmax: int):
    s1 = np.zeros((len(eps), tmax + 1), dtype=np.int64)
    s2 = np.zeros_like(s1)
    for k in ks:
        rng = trial_rng(seed, k)
        perm = rng.permutation(lay.E)
        u = rng.random(lay.n)
        c = kernels.bp_grid(lay.var_sockets, lay.check_sockets[perm], u, eps, lay.n, lay.m, tmax)
        s1 += c
        s2 += c * c
    return s1, s2


def _chunks(trials: int, workers: int):
    size = max(1, min(2048, math.ceil(trials / max(1, 4 * workers))))
    return [range(a, min(a + size, trials)) for a in range(0, trials, size)]


def simulate_grid(e: Ensemble, n: int, eps_grid, t_values, trials: int, seed: int = 0, threads: int | None = None) -> list[SimResult]:
    """Estimate ``P_b(n, eps, t)`` on the product of ``eps_grid`` and ``t_values``.

    Per-trial erased counts are summed as integers, so the result does not
    depend on ``threads`` or on scheduling.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    eps = np.asarray([float(x) for x in eps_grid], dtype=np.float64)
    if eps.size == 0 or np.any((eps < 0) | (eps > 1)):
        raise ValueError("eps grid must be non-empty with values in [0, 1]")
    ts = sorted({int(t) for t in t_values})
    if not ts or ts[0] < 0:
        raise ValueError("t values must be non-empty and >= 0")
    tmax = ts[-1]
    lay = _Layout(e, n)
    workers = threads or os.cpu_count() or 1
    chunks = _chunks(trials, workers)
    S1 = np.zeros((eps.size, tmax + 1), dtype=np.int64)
    S2 = np.zeros_like(S1)
    if workers == 1 or len(chunks) == 1:
        parts = (_run_chunk(lay, seed, ks, eps, tmax) for ks in chunks)
        for a, b in parts:
            S1 += a
            S2 += b
    else:
        with ThreadPoolExecutor(workers) as pool:
            for a, b in pool.map(lambda ks: _run_chunk(lay, seed, ks, eps, tmax), chunks):
                S1 += a
                S2 += b

    out = []
    for i, x in enumerate(eps):
        traj = evolve(e, float(x), tmax)
        for t in ts:
            out.append(_result(n, float(x), t, trials, int(S1[i, t]), int(S2[i, t]), seed, traj.Pb[t], lay.counts.repair))
    return out


def _result(n, eps, t, trials, s1, s2, seed, pb_inf, repair) -> SimResult:
    pb = s1 / (trials * n)
    if trials > 1:
        # exact integer numerator avoids cancellation in the variance
        var = (trials * s2 - s1 * s1) / (trials * (trials - 1) * n * n)
        ci = Z95 * math.sqrt(max(var, 0.0) / trials)
    else:
        ci = 0.0
    return SimResult(n, eps, t, trials, pb, ci, seed, n * (pb - float(pb_inf)), repair)


def estimate_pb(e: Ensemble, n: int, epsilon: float, t: int, trials: int, seed: int = 0, threads: int | None = None) -> SimResult:
    """Single-point estimate; identical to the matching point of :func:`simulate_grid`."""
    return simulate_grid(e, n, [epsilon], [t], trials, seed, threads)[0]
