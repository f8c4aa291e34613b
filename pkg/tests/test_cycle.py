import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ldpc_alpha.alpha import xi_exact
from ldpc_alpha.cycle import CycleParams, F_c, F_r, F_v, cycle_recursions, gamma, gamma_terms
from ldpc_alpha.density_evolution import evolve
from ldpc_alpha._numeric import context
from ldpc_alpha.ensemble import Ensemble

from conftest import all_ensembles


def cache_for(e, eps, t):
    ctx = context(256)
    return cycle_recursions(e, evolve(e, eps, t, ctx), ctx)


def test_recursion_base_cases(irr):
    c = cache_for(irr, 0.4, 4)
    assert c.f(0, 3, 0.7) == c.eps
    assert c.g(2, 0, 0.7) == 0.7
    ev = irr.evaluator(c.ctx)
    P = c.traj.P
    assert abs(c.G2(2, 0) - c.eps * ev.lam(P[2], 1) / ev.lam1) < 1e-70


def test_cache_values_are_probabilities(irr):
    c = cache_for(irr, 0.55, 5)
    for s in range(0, 8):
        for tt in range(1, 6):
            if s <= 2 * tt:
                try:
                    assert -1e-60 <= c.G1(tt, s) <= 1 + 1e-60
                except (IndexError, TypeError):
                    pass


def test_Fv_zero_without_degree3_variables(reg23):
    c = cache_for(reg23, 0.4, 4)
    for s1 in range(1, 4):
        for s2 in range(2 * s1 + 1, 9):
            assert F_v(c, 4, s1, s2) == 0


def test_Fc_zero_without_degree3_checks():
    e = Ensemble.regular(3, 2)
    c = cache_for(e, 0.4, 3)
    assert F_c(c, 3, 0, 2) == 0


def test_eps_zero_terms(irr):
    c = cache_for(irr, 0, 3)
    assert F_v(c, 3, 1, 4) == 0 and F_c(c, 3, 0, 3) == 0 and F_r(c, 3, 2) == 0


@pytest.mark.parametrize(
    "kind,s1,s2",
    [("V", 0, 3), ("V", 3, 7), ("V", 1, 2), ("C", 3, 8), ("C", 0, 1), ("R", 0, 0), ("R", 0, 7), ("X", 0, 1)],
)
def test_param_ranges(kind, s1, s2):
    with pytest.raises(ValueError):
        CycleParams(kind, s1, s2).check(3)


def test_F_rejects_out_of_range(reg36):
    c = cache_for(reg36, 0.3, 2)
    with pytest.raises(ValueError):
        F_v(c, 2, 2, 5)


def test_hand_value_23(reg23):
    terms = gamma_terms(reg23, 1, 1)
    assert sum(v for k, *_, v in terms if k == "V") == 0
    assert sum(v for k, *_, v in terms if k in "CR") == 4
    assert gamma(reg23, 1, 1) == 4


def test_gamma_zero_cases(irr):
    assert gamma(irr, 0.5, 0) == 0
    assert gamma(irr, 0, 4) == 0


@pytest.mark.parametrize("e", all_ensembles(), ids=str)
@pytest.mark.parametrize("t", range(1, 9))
def test_gamma_equals_xi(e, t):
    x = float(xi_exact(e, t))
    assert abs(float(gamma(e, 1, t)) - x) / x < 1e-10


@settings(max_examples=20, deadline=None)
@given(st.floats(0, 1), st.integers(0, 5))
def test_gamma_nonnegative(eps, t):
    from ldpc_alpha.ensemble import irregular_example

    for e in (Ensemble.regular(3, 6), irregular_example()):
        assert gamma(e, eps, t) >= -1e-60
