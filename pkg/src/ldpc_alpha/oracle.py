"""Exact finite-length erasure rates for tiny instances.

For a fixed graph the bit-erasure rate after ``t`` iterations is a
polynomial in ``eps``: every erasure pattern with ``k`` erased bits has
probability ``eps^k (1-eps)^(n-k)``.  All ``2^n`` patterns are decoded at
once, one column per pattern, and the erased counts are collected per ``k``.
Averaging over every socket matching (``full``) gives the ensemble value
exactly; averaging over sampled matchings (``sampled``) leaves only the
graph randomness.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .ensemble import Ensemble
from .simulator import Z95, TannerGraph, _Layout, trial_rng

MAX_FULL_EDGES = 8
MAX_SAMPLED_N = 24
_BLOCK = 1 << 15


class OracleTooLarge(ValueError):
    pass


@dataclass(frozen=True)
class ExactResult:
    """``pb_poly[k]`` is the coefficient of ``eps^k``.

    ``by_weight[g][k]`` is the total number of erased bits, over all erasure
    patterns of weight ``k``, for graph ``g`` (one row per sampled graph,
    a single summed row for full enumeration).
    """

    n: int
    t: int
    method: str
    pb_poly: tuple
    graphs: int
    by_weight: np.ndarray = field(repr=False)
    seed: int | None = None

    def pb_at(self, eps):
        """Exact value at a rational ``eps`` (floats are converted exactly)."""
        x = Fraction(eps)
        return sum((c * x**k for k, c in enumerate(self.pb_poly)), Fraction(0))

    def per_graph_at(self, eps: float) -> np.ndarray:
        k = np.arange(self.n + 1)
        w = float(eps) ** k * (1 - float(eps)) ** (self.n - k)
        return self.by_weight.astype(float) @ w / self.n

    def ci_halfwidth(self, eps: float) -> float:
        """95% half-width over graph sampling; 0 for full enumeration."""
        if self.method == "full" or self.graphs < 2:
            return 0.0
        v = self.per_graph_at(eps)
        return Z95 * float(np.std(v, ddof=1)) / math.sqrt(self.graphs)


def _bernstein_to_power(counts, n: int, norm: int) -> tuple:
    """``sum_k counts[k] eps^k (1-eps)^(n-k) / norm`` in the power basis."""
    out = [Fraction(0)] * (n + 1)
    for k, a in enumerate(counts):
        a = int(a)
        if not a:
            continue
        for j in range(n - k + 1):
            out[k + j] += Fraction(a * math.comb(n - k, j) * (-1) ** j, norm)
    return tuple(out)


def _patterns(n: int, lo: int, hi: int) -> np.ndarray:
    """Erasure flags, shape ``(n, hi-lo)``: bit ``v`` of the pattern index."""
    idx = np.arange(lo, hi, dtype=np.int64)
    return ((idx[None, :] >> np.arange(n, dtype=np.int64)[:, None]) & 1).astype(bool)


def _decode_columns(ev, ec, n, m, chan, t):
    """Flooding BP applied column-wise to a matrix of erasure patterns."""
    if t == 0:
        return chan
    E = len(ev)
    # incidence matrices turn the per-node tallies into small matrix products
    Hv = np.zeros((n, E), dtype=np.float32)
    Hc = np.zeros((m, E), dtype=np.float32)
    Hv[ev, np.arange(E)] = 1
    Hc[ec, np.arange(E)] = 1
    chan_e = chan[ev]
    v2c = chan_e.astype(np.float32)
    known = np.zeros(chan.shape, dtype=np.float32)
    for _ in range(t):
        c2v = ((Hc @ v2c)[ec] == v2c).astype(np.float32)
        known = Hv @ c2v
        new = (chan_e & (known[ev] == c2v)).astype(np.float32)
        if np.array_equal(new, v2c):
            break
        v2c = new
    return chan & (known == 0)


def weight_counts(g: TannerGraph, t: int) -> np.ndarray:
    """Erased-bit totals after ``t`` iterations, grouped by pattern weight."""
    n = g.n
    out = np.zeros(n + 1, dtype=np.int64)
    ev = np.asarray(g.edge_var, dtype=np.intp)
    ec = np.asarray(g.edge_check, dtype=np.intp)
    total = 1 << n
    for lo in range(0, total, _BLOCK):
        hi = min(lo + _BLOCK, total)
        chan = _patterns(n, lo, hi)
        weight = chan.sum(axis=0)
        erased = _decode_columns(ev, ec, n, g.m, chan, t).sum(axis=0)
        out += np.bincount(weight, weights=erased, minlength=n + 1).astype(np.int64)
    return out


def exact_pb_full(e: Ensemble, n: int, t: int) -> ExactResult:
    """Average over all ``E!`` socket matchings and all erasure patterns."""
    if t < 0:
        raise ValueError("t must be >= 0")
    lay = _Layout(e, n)
    if lay.E > MAX_FULL_EDGES:
        raise OracleTooLarge(f"E = {lay.E} edges exceeds {MAX_FULL_EDGES} for full enumeration")
    counts = np.zeros(n + 1, dtype=np.int64)
    seen = {}
    nperm = 0
    for perm in itertools.permutations(range(lay.E)):
        nperm += 1
        g = lay.graph(np.asarray(perm, dtype=np.intp))
        # matchings giving the same labelled multigraph decode identically
        key = tuple(sorted(zip(g.edge_var.tolist(), g.edge_check.tolist())))
        if key not in seen:
            seen[key] = weight_counts(g, t)
        counts += seen[key]
    poly = _bernstein_to_power(counts, n, n * nperm)
    return ExactResult(n, t, "full", poly, nperm, counts[None, :].copy())


def exact_pb_sampled(e: Ensemble, n: int, t: int, graphs: int, seed: int = 0) -> ExactResult:
    """Exact over erasures, Monte Carlo over ``graphs`` sampled matchings (graph ``k`` uses trial stream ``k``)."""
    if t < 0:
        raise ValueError("t must be >= 0")
    if n > MAX_SAMPLED_N:
        raise OracleTooLarge(f"n = {n} exceeds {MAX_SAMPLED_N} for erasure enumeration")
    if graphs < 1:
        raise ValueError("graphs must be >= 1")
    lay = _Layout(e, n)
    rows = np.zeros((graphs, n + 1), dtype=np.int64)
    for k in range(graphs):
        rows[k] = weight_counts(lay.graph(trial_rng(seed, k).permutation(lay.E)), t)
    poly = _bernstein_to_power(rows.sum(axis=0), n, n * graphs)
    return ExactResult(n, t, "sampled", poly, graphs, rows, seed)
