import time

import numpy as np
import pytest

from ldpc_alpha.density_evolution import evolve, fixed_point, threshold
from ldpc_alpha.ensemble import Ensemble


def test_t0_gives_eps(irr):
    tr = evolve(irr, 0.37, 0)
    assert tr.P == (1.0,)
    assert tr.Pb[0] == pytest.approx(0.37)
    assert len(tr.Q) == 2 and tr.Q[0] is None


def test_eps_zero(reg36):
    tr = evolve(reg36, 0.0, 4)
    assert all(p == 0 for p in tr.P[1:])
    assert all(pb == 0 for pb in tr.Pb)


def test_hand_value(reg36):
    tr = evolve(reg36, 0.4, 1)
    assert tr.Q[1] == pytest.approx(0.4)
    assert tr.P[1] == pytest.approx(1 - 0.6**5)
    assert tr.Pb[1] == pytest.approx(0.4 * 0.92224**3, rel=1e-12)
    assert tr.Pb[1] == pytest.approx(0.3137556, abs=5e-7)


def test_rows_and_extra_q(reg23):
    tr = evolve(reg23, 0.3, 3)
    rows = tr.as_rows()
    assert [r[0] for r in rows] == [0, 1, 2, 3]
    assert len(tr.Q) == 5  # includes Q(t+1)


def test_rejects_bad_input(reg23):
    with pytest.raises(ValueError):
        evolve(reg23, 1.5, 2)
    with pytest.raises(ValueError):
        evolve(reg23, 0.5, -1)


@pytest.mark.parametrize("make", [lambda: Ensemble.regular(2, 3), lambda: Ensemble.regular(3, 6)])
def test_monotone_grid(make):
    e = make()
    grid = np.linspace(0, 1, 21)
    pb = np.array([evolve(e, x, 12).Pb for x in grid])
    assert np.all(np.diff(pb, axis=1) <= 1e-15)  # non-increasing in t
    assert np.all(np.diff(pb, axis=0) >= -1e-15)  # non-decreasing in eps
    for x in grid:
        tr = evolve(e, x, 12)
        assert all(0 <= p <= 1 for p in tr.P)
        assert all(a >= b - 1e-15 for a, b in zip(tr.P, tr.P[1:]))


def test_fixed_point_below(reg36):
    fp = fixed_point(reg36, 0.3)
    assert fp.converged
    assert fp.P_inf < 1e-14 and fp.Q_inf < 1e-14


def test_fixed_point_eps_one(irr):
    fp = fixed_point(irr, 1.0)
    assert fp.P_inf == pytest.approx(1.0) and fp.Q_inf == pytest.approx(1.0)


def test_fixed_point_above_residual(reg36):
    fp = fixed_point(reg36, 0.45)
    ev = reg36.evaluator()
    assert fp.converged and fp.Q_inf > 0.1
    assert abs(fp.Q_inf - 0.45 * ev.lam(fp.P_inf)) < 1e-13
    assert abs(fp.P_inf - (1 - ev.rho(1 - fp.Q_inf))) < 1e-13
    assert abs(fp.Q_inf - 0.45 * ev.lam(1 - ev.rho(1 - fp.Q_inf))) < 1e-13


def test_fixed_point_nonconvergence_flag(reg36):
    fp = fixed_point(reg36, 0.43, max_iter=5)
    assert not fp.converged and fp.iterations_used == 5


def test_fixed_point_bad_tol(reg36):
    with pytest.raises(ValueError):
        fixed_point(reg36, 0.4, tol=0)


@pytest.mark.parametrize(
    "make,expected,tol",
    [
        (lambda: Ensemble.regular(2, 3), 0.5, 1e-6),
        (lambda: Ensemble.regular(3, 6), 0.42944, 1e-3),
        (lambda: __import__("ldpc_alpha").irregular_example(), 0.8, 5e-3),
    ],
)
def test_thresholds(make, expected, tol):
    t0 = time.perf_counter()
    th = threshold(make())
    assert time.perf_counter() - t0 < 1.0
    assert abs(th - expected) < tol


def test_threshold_stability_condition(irr):
    # with degree-2 variables the threshold cannot exceed 1/(lambda'(0) rho'(1))
    th = threshold(irr)
    assert th <= 1 / float(irr.lam_d0 * irr.rho_d1) + 1e-8


def test_threshold_tangency_regular():
    from ldpc_alpha.alpha import limit_inputs

    th = threshold(Ensemble.regular(3, 6), tol=1e-10)
    x = limit_inputs(3, 6, th + 1e-9)
    assert x.pq > 0.99 and x.pq <= 1 + 1e-9
