# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled flooding BP decoder for the erasure channel.

Messages are known/erased flags.  Each pass tallies per-check counts of
erased incoming messages, so a check-to-variable message is known iff its
check has no *other* erased incoming message, and a variable-to-check
message is erased iff its variable is channel-erased and has no *other*
known incoming message.
"""
import numpy as np

cimport numpy as cnp
from libc.string cimport memset

cnp.import_array()


cdef Py_ssize_t _flood(const int[::1] off, const int[::1] ec, const unsigned char[::1] chan,
                       Py_ssize_t n, Py_ssize_t m, Py_ssize_t tmax, long long[::1] counts,
                       unsigned char[::1] v2c, unsigned char[::1] c2v, int[::1] erased_in,
                       int[::1] active, unsigned char[::1] recovered) noexcept nogil:
    # edges of variable v are off[v]..off[v+1]-1; only channel-erased
    # variables can send erased messages, so only they are visited
    cdef Py_ssize_t na = 0, keep, a, v, e, k, j
    cdef long long cnt
    cdef int known
    cdef unsigned char new
    cdef bint changed

    for v in range(n):
        recovered[v] = 0
        if chan[v]:
            active[na] = <int>v
            na += 1
            for e in range(off[v], off[v + 1]):
                v2c[e] = 1
    counts[0] = na
    cnt = na
    for k in range(1, tmax + 1):
        memset(&erased_in[0], 0, m * sizeof(int))
        for a in range(na):
            v = active[a]
            for e in range(off[v], off[v + 1]):
                erased_in[ec[e]] += v2c[e]
        changed = False
        keep = 0
        for a in range(na):
            v = active[a]
            known = 0
            for e in range(off[v], off[v + 1]):
                c2v[e] = 1 if erased_in[ec[e]] == v2c[e] else 0
                known += c2v[e]
            if known:
                if not recovered[v]:
                    recovered[v] = 1
                    cnt -= 1
            for e in range(off[v], off[v + 1]):
                new = 1 if known == c2v[e] else 0
                if new != v2c[e]:
                    changed = True
                    v2c[e] = new
            # two known inputs make every outgoing message known for good
            if known < 2:
                active[keep] = <int>v
                keep += 1
        na = keep
        counts[k] = cnt
        if not changed:
            # later iterations repeat this one exactly
            for j in range(k + 1, tmax + 1):
                counts[j] = cnt
            return k
    return tmax


def _by_variable(ev, ec, n):
    ev = np.asarray(ev, dtype=np.intp)
    ec = np.asarray(ec)
    if ev.size and np.any(ev[1:] < ev[:-1]):
        order = np.argsort(ev, kind="stable")
        ev, ec = ev[order], ec[order]
    off = np.zeros(n + 1, dtype=np.intc)
    np.cumsum(np.bincount(ev, minlength=n), out=off[1:])
    return off, np.ascontiguousarray(ec, dtype=np.intc)


def bp_flood(ev, ec, chan, Py_ssize_t n, Py_ssize_t m, Py_ssize_t tmax):
    """Erased-variable counts after ``0..tmax`` iterations and the final erased mask."""
    off_a, ec_a = _by_variable(ev, ec, n)
    cdef const int[::1] off = off_a
    cdef const int[::1] ec_v = ec_a
    chan_a = np.ascontiguousarray(chan, dtype=np.uint8)
    cdef const unsigned char[::1] ch_v = chan_a
    E = ec_a.shape[0]
    counts = np.zeros(tmax + 1, dtype=np.int64)
    recovered = np.zeros(max(n, 1), dtype=np.uint8)
    cdef long long[::1] cv = counts
    cdef unsigned char[::1] v2c = np.empty(max(E, 1), dtype=np.uint8)
    cdef unsigned char[::1] c2v = np.empty(max(E, 1), dtype=np.uint8)
    cdef int[::1] ei = np.empty(max(m, 1), dtype=np.intc)
    cdef int[::1] act = np.empty(max(n, 1), dtype=np.intc)
    cdef unsigned char[::1] rec = recovered
    with nogil:
        _flood(off, ec_v, ch_v, n, m, tmax, cv, v2c, c2v, ei, act, rec)
    final = chan_a.astype(bool) & (recovered[:n] == 0)
    return counts, final


def bp_grid(ev, ec, u, eps, Py_ssize_t n, Py_ssize_t m, Py_ssize_t tmax):
    """Counts for every channel level ``eps[i]`` with erasures ``u < eps[i]``; shape ``(len(eps), tmax+1)``."""
    off_a, ec_a = _by_variable(ev, ec, n)
    cdef const int[::1] off = off_a
    cdef const int[::1] ec_v = ec_a
    cdef const double[::1] u_v = np.ascontiguousarray(u, dtype=np.float64)
    cdef const double[::1] eps_v = np.ascontiguousarray(eps, dtype=np.float64)
    cdef Py_ssize_t ne = eps_v.shape[0]
    E = ec_a.shape[0]
    out = np.zeros((ne, tmax + 1), dtype=np.int64)
    cdef long long[:, ::1] ov = out
    cdef unsigned char[::1] ch = np.empty(max(n, 1), dtype=np.uint8)
    cdef unsigned char[::1] v2c = np.empty(max(E, 1), dtype=np.uint8)
    cdef unsigned char[::1] c2v = np.empty(max(E, 1), dtype=np.uint8)
    cdef int[::1] ei = np.empty(max(m, 1), dtype=np.intc)
    cdef int[::1] act = np.empty(max(n, 1), dtype=np.intc)
    cdef unsigned char[::1] rec = np.empty(max(n, 1), dtype=np.uint8)
    cdef Py_ssize_t i, v
    cdef double x
    with nogil:
        for i in range(ne):
            x = eps_v[i]
            for v in range(n):
                ch[v] = u_v[v] < x
            _flood(off, ec_v, ch, n, m, tmax, ov[i], v2c, c2v, ei, act, rec)
    return out
