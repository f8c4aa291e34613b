"""Degree distributions and irregular LDPC ensembles.

Coefficients are held as :class:`fractions.Fraction` so that derived
quantities such as ``lambda'(1)`` are exact and can be lifted into any scalar
precision later.  Edge-perspective polynomials use the power ``x^(d-1)`` for
degree ``d``; node-perspective ones use ``x^d``.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational
from typing import Mapping

from ._numeric import FloatContext

NODE = "node"
EDGE = "edge"
VARIABLE = "variable"
CHECK = "check"

SUM_TOL = 1e-12


class DistributionError(ValueError):
    pass


def _as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    if isinstance(x, float):
        # shortest round-trip decimal, so 0.153 means 153/1000
        return Fraction(repr(x))
    if isinstance(x, str):
        return Fraction(x.strip())
    return Fraction(str(x))


@dataclass(frozen=True, eq=True)
class DegreeDistribution:
    """Polynomial coefficient map ``degree -> fraction`` for one side of the graph."""

    coeffs: Mapping[int, Fraction]
    perspective: str = EDGE
    side: str = VARIABLE

    def __post_init__(self):
        if self.perspective not in (NODE, EDGE):
            raise DistributionError(f"unknown perspective {self.perspective!r}")
        if self.side not in (VARIABLE, CHECK):
            raise DistributionError(f"unknown side {self.side!r}")
        if not self.coeffs:
            raise DistributionError("empty degree distribution")
        clean = {}
        for d, c in self.coeffs.items():
            if int(d) != d or d < 1:
                raise DistributionError(f"degree must be an integer >= 1, got {d!r}")
            c = _as_fraction(c)
            if c < 0:
                raise DistributionError(f"negative coefficient {c} for degree {d}")
            clean[int(d)] = c
        total = sum(clean.values())
        if abs(float(total) - 1.0) > SUM_TOL:
            raise DistributionError(f"coefficients sum to {float(total)!r}, not 1")
        object.__setattr__(self, "coeffs", dict(sorted(clean.items())))

    @property
    def support(self) -> list[int]:
        return [d for d, c in self.coeffs.items() if c > 0]

    @property
    def max_degree(self) -> int:
        return max(self.coeffs)

    def exponent(self, degree: int) -> int:
        return degree - 1 if self.perspective == EDGE else degree

    def __call__(self, x, order: int = 0):
        return eval_deriv(self, x, order)

    def __str__(self):
        terms = []
        for d in self.support:
            p = self.exponent(d)
            c = self.coeffs[d]
            terms.append(f"{_fmt_coef(c)}*x^{p}")
        return "+".join(terms)


def _fmt_coef(c: Fraction) -> str:
    if c.denominator == 1:
        return str(c.numerator)
    f = float(c)
    if Fraction(repr(f)) == c:
        return repr(f)
    return f"{c.numerator}/{c.denominator}"


def node_to_edge(d: DegreeDistribution) -> DegreeDistribution:
    """``lambda_i = i L_i / sum_k k L_k``."""
    if d.perspective != NODE:
        raise DistributionError("node_to_edge expects a node-perspective distribution")
    mean = sum(k * c for k, c in d.coeffs.items())
    if mean == 0:
        raise DistributionError("zero mean degree")
    return DegreeDistribution({k: k * c / mean for k, c in d.coeffs.items()}, EDGE, d.side)


def edge_to_node(d: DegreeDistribution) -> DegreeDistribution:
    """``L_i = (lambda_i / i) / sum_k (lambda_k / k)``."""
    if d.perspective != EDGE:
        raise DistributionError("edge_to_node expects an edge-perspective distribution")
    norm = sum(c / k for k, c in d.coeffs.items())
    if norm == 0:
        raise DistributionError("zero mean degree")
    return DegreeDistribution({k: (c / k) / norm for k, c in d.coeffs.items()}, NODE, d.side)


def _falling(p: int, k: int) -> int:
    out = 1
    for j in range(k):
        out *= p - j
    return out


def _dense(d: DegreeDistribution, order: int, num) -> list:
    """Coefficients of the ``order``-th derivative, lowest power first."""
    top = max(d.exponent(k) for k in d.coeffs)
    dense = [0] * max(top - order + 1, 1)
    for k, c in d.coeffs.items():
        p = d.exponent(k)
        if p >= order and c:
            dense[p - order] += c * _falling(p, order)
    return [num(c) for c in dense]


def _complement_table(d: DegreeDistribution, order: int, num) -> list:
    """Coefficients ``b`` with ``f(1) - f(1-x) = x * sum_i b_i (1-x)^i`` for ``f`` the ``order``-th derivative.

    Uses ``1 - y^m = (1-y)(1 + y + ... + y^(m-1))``; every ``b_i`` is a
    nonnegative tail sum, so nothing cancels when ``x`` is tiny.
    """
    a = _dense(d, order, lambda c: c)
    tail = [sum(a[i + 1:], 0) for i in range(len(a) - 1)] or [0]
    return [num(c) for c in tail]


def _horner(coefs: list, x):
    acc = coefs[-1]
    for c in reversed(coefs[:-1]):
        acc = acc * x + c
    return acc


def eval_deriv(d: DegreeDistribution, x, order: int = 0):
    """Evaluate the polynomial of ``d`` (or its first/second derivative) at ``x``."""
    if order not in (0, 1, 2):
        raise ValueError(f"order must be 0, 1 or 2, got {order}")
    return _horner(_dense(d, order, float), float(x))


class PolyEvaluator:
    """Per-precision view of an ensemble: lambda, rho, L with derivatives.

    The dense Horner tables are converted once into the context's scalar
    type, so the recursions never mix floats into multiprecision values.
    """

    def __init__(self, ensemble: "Ensemble", ctx=None):
        self.ctx = ctx or FloatContext()
        num = self.ctx.num
        self._tables = {}
        for name, dist in (("lam", ensemble.lam), ("rho", ensemble.rho), ("L", ensemble.L)):
            self._tables[name] = [_dense(dist, k, num) for k in range(3)]
        self._rho_comp = [_complement_table(ensemble.rho, k, num) for k in range(3)]
        e = ensemble
        self.one = num(1)
        self.zero = num(0)
        self.lam1 = num(e.lam_d1)
        self.lam2 = num(e.lam_d2)
        self.rho1 = num(e.rho_d1)
        self.rho2 = num(e.rho_d2)
        self.Ld1 = num(e.L_d1)
        self.lam_coef = {i: num(c) for i, c in e.lam.coeffs.items() if c > 0}
        self.rho_coef = {j: num(c) for j, c in e.rho.coeffs.items() if c > 0}
        self.L_coef = {i: num(c) for i, c in e.L.coeffs.items() if c > 0}

    def lam(self, x, k=0):
        return _horner(self._tables["lam"][k], x)

    def rho(self, x, k=0):
        return _horner(self._tables["rho"][k], x)

    def L(self, x, k=0):
        return _horner(self._tables["L"][k], x)

    def rho_comp(self, x, k=0):
        """``rho^(k)(1) - rho^(k)(1 - x)``, accurate for small ``x``."""
        return x * _horner(self._rho_comp[k], self.one - x)


@dataclass(frozen=True, eq=False)
class Ensemble:
    """A ``(lambda, rho)`` irregular LDPC ensemble with exact cached moments."""

    lam: DegreeDistribution
    rho: DegreeDistribution
    name: str = ""
    L: DegreeDistribution = field(init=False, repr=False)
    R: DegreeDistribution = field(init=False, repr=False)

    def __post_init__(self):
        if self.lam.perspective != EDGE or self.lam.side != VARIABLE:
            raise DistributionError("lambda must be an edge-perspective variable-side distribution")
        if self.rho.perspective != EDGE or self.rho.side != CHECK:
            raise DistributionError("rho must be an edge-perspective check-side distribution")
        object.__setattr__(self, "L", edge_to_node(self.lam))
        object.__setattr__(self, "R", edge_to_node(self.rho))
        self._check_node_consistency()

    def _check_node_consistency(self):
        ld1 = self.L_d1
        for x in (0.0, 0.25, 0.5, 0.75, 1.0):
            lhs = eval_deriv(self.L, x, 1) / float(ld1)
            if abs(lhs - eval_deriv(self.lam, x)) > 1e-12:
                raise DistributionError("L'(x)/L'(1) does not reproduce lambda(x)")

    @classmethod
    def regular(cls, l: int, r: int) -> "Ensemble":
        if l < 1 or r < 1:
            raise DistributionError("regular degrees must be >= 1")
        return cls(
            DegreeDistribution({l: 1}, EDGE, VARIABLE),
            DegreeDistribution({r: 1}, EDGE, CHECK),
            name=f"({l},{r})",
        )

    @classmethod
    def from_node(cls, L: DegreeDistribution, R: DegreeDistribution, name: str = "") -> "Ensemble":
        return cls(node_to_edge(L), node_to_edge(R), name=name)

    @property
    def is_regular(self) -> bool:
        return len(self.lam.support) == 1 and len(self.rho.support) == 1

    @property
    def regular_degrees(self) -> tuple[int, int] | None:
        if not self.is_regular:
            return None
        return self.lam.support[0], self.rho.support[0]

    # exact moments, as Fractions
    @property
    def lam_d0(self) -> Fraction:
        """lambda'(0), the fraction of edges on degree-2 variable nodes."""
        return self.lam.coeffs.get(2, Fraction(0))

    @property
    def lam_d1(self) -> Fraction:
        return sum((c * (i - 1) for i, c in self.lam.coeffs.items()), Fraction(0))

    @property
    def lam_d2(self) -> Fraction:
        return sum((c * (i - 1) * (i - 2) for i, c in self.lam.coeffs.items()), Fraction(0))

    @property
    def rho_d1(self) -> Fraction:
        return sum((c * (j - 1) for j, c in self.rho.coeffs.items()), Fraction(0))

    @property
    def rho_d2(self) -> Fraction:
        return sum((c * (j - 1) * (j - 2) for j, c in self.rho.coeffs.items()), Fraction(0))

    @property
    def L_d1(self) -> Fraction:
        """Average variable degree L'(1)."""
        return 1 / sum(c / i for i, c in self.lam.coeffs.items())

    @property
    def R_d1(self) -> Fraction:
        return 1 / sum(c / j for j, c in self.rho.coeffs.items())

    @property
    def design_rate(self) -> Fraction:
        return 1 - self.L_d1 / self.R_d1

    def n_edges(self, n: int) -> Fraction:
        return n * self.L_d1

    def n_checks(self, n: int) -> Fraction:
        return n * self.L_d1 / self.R_d1

    def evaluator(self, ctx=None) -> PolyEvaluator:
        return PolyEvaluator(self, ctx)

    def __str__(self):
        return self.name or f"lambda={self.lam}, rho={self.rho}"


_TERM = re.compile(
    r"^\s*(?:(?P<coef>[0-9.eE+\-/]+)\s*\*?\s*)?x(?:\s*\^\s*(?P<pow>\d+))?\s*$|^\s*(?P<const>[0-9.eE+\-/]+)\s*$"
)


def parse_distribution(text: str, perspective: str = EDGE, side: str = VARIABLE) -> DegreeDistribution:
    """Parse ``"0.5*x^1+0.153*x^2"``; powers follow the perspective convention."""
    if not text or not text.strip():
        raise DistributionError("empty polynomial")
    coeffs: dict[int, Fraction] = {}
    # split on '+' that are not part of an exponent like 1e+3
    parts = re.split(r"(?<![eE])\+", text.replace(" ", ""))
    for part in parts:
        if not part:
            continue
        m = _TERM.match(part)
        if not m:
            raise DistributionError(f"cannot parse term {part!r}")
        if m.group("const") is not None:
            coef, power = _as_fraction(m.group("const")), 0
        else:
            coef = _as_fraction(m.group("coef")) if m.group("coef") else Fraction(1)
            power = int(m.group("pow")) if m.group("pow") else 1
        degree = power + 1 if perspective == EDGE else power
        if degree < 1:
            raise DistributionError(f"term {part!r} implies degree {degree}")
        coeffs[degree] = coeffs.get(degree, Fraction(0)) + coef
    return DegreeDistribution(coeffs, perspective, side)


IRREGULAR_LAMBDA = "0.500*x^1+0.153*x^2+0.112*x^3+0.055*x^4+0.180*x^8"
IRREGULAR_RHO = "0.492*x^2+0.508*x^3"


def irregular_example() -> Ensemble:
    """The irregular ensemble with degree-2 variables used as the running irregular example."""
    return Ensemble(
        parse_distribution(IRREGULAR_LAMBDA, EDGE, VARIABLE),
        parse_distribution(IRREGULAR_RHO, EDGE, CHECK),
        name="irregular-0.8",
    )
