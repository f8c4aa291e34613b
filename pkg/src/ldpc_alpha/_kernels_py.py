"""Pure numpy version of the flooding BP kernels, same signatures and results."""
from __future__ import annotations

import numpy as np


def _flood(ev, ec, chan, n, m, tmax, counts):
    chan = chan.astype(bool)
    v2c = chan[ev]
    counts[0] = int(chan.sum())
    known_in = np.zeros(n, dtype=np.int64)
    for k in range(1, tmax + 1):
        erased_in = np.bincount(ec, weights=v2c, minlength=m)
        c2v = erased_in[ec] - v2c == 0
        known_in = np.bincount(ev, weights=c2v, minlength=n)
        new = chan[ev] & (known_in[ev] - c2v == 0)
        cnt = int(np.count_nonzero(chan & (known_in == 0)))
        counts[k] = cnt
        if np.array_equal(new, v2c):
            counts[k + 1 :] = cnt
            break
        v2c = new
    return known_in


def bp_flood(ev, ec, chan, n, m, tmax):
    """Erased-variable counts after ``0..tmax`` iterations and the final erased mask."""
    ev = np.asarray(ev, dtype=np.intp)
    ec = np.asarray(ec, dtype=np.intp)
    chan = np.asarray(chan, dtype=bool)
    counts = np.zeros(tmax + 1, dtype=np.int64)
    known_in = _flood(ev, ec, chan, n, m, tmax, counts)
    final = chan & (known_in == 0) if tmax > 0 else chan.copy()
    return counts, final


def bp_grid(ev, ec, u, eps, n, m, tmax):
    """Counts for every channel level ``eps[i]`` with erasures ``u < eps[i]``; shape ``(len(eps), tmax+1)``."""
    ev = np.asarray(ev, dtype=np.intp)
    ec = np.asarray(ec, dtype=np.intp)
    u = np.asarray(u, dtype=np.float64)
    out = np.zeros((len(eps), tmax + 1), dtype=np.int64)
    for i, x in enumerate(eps):
        _flood(ev, ec, u < x, n, m, tmax, out[i])
    return out
