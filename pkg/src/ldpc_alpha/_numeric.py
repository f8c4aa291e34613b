"""Scalar backends shared by the analytic recursions.

Every recursion in :mod:`ldpc_alpha.tree`, :mod:`ldpc_alpha.cycle` and
:mod:`ldpc_alpha.alpha` is written against plain arithmetic operators, so the
same code runs on Python floats or on mpmath numbers of any precision.  The
context object only knows how to turn exact inputs into its scalar type.
"""
from __future__ import annotations

import math
from fractions import Fraction

import mpmath

DOUBLE_BITS = 53


class FloatContext:
    prec = DOUBLE_BITS

    def num(self, x):
        return float(x)

    def log10(self, x):
        return math.log10(x)

    def __repr__(self):
        return "FloatContext()"


class MPContext:
    """Private mpmath context; never touches the global ``mpmath.mp``."""

    def __init__(self, bits: int):
        self._ctx = mpmath.MPContext()
        self._ctx.prec = int(bits)
        self.prec = int(bits)

    def num(self, x):
        if isinstance(x, Fraction):
            return self._ctx.mpf(x.numerator) / x.denominator
        return self._ctx.mpf(x)

    def log10(self, x):
        return self._ctx.log10(x)

    def __repr__(self):
        return f"MPContext(bits={self.prec})"


def context(bits: int | None):
    """Return the scalar context for ``bits`` of precision (53 means float)."""
    if bits is None or bits == DOUBLE_BITS:
        return FloatContext()
    if bits < DOUBLE_BITS:
        raise ValueError(f"precision must be at least {DOUBLE_BITS} bits, got {bits}")
    return MPContext(bits)
