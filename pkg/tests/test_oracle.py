from fractions import Fraction

import numpy as np
import pytest

from ldpc_alpha.alpha import alpha_regular
from ldpc_alpha.density_evolution import evolve
from ldpc_alpha.ensemble import Ensemble
from ldpc_alpha.oracle import (
    MAX_SAMPLED_N,
    OracleTooLarge,
    exact_pb_full,
    exact_pb_sampled,
    weight_counts,
)
from ldpc_alpha.simulator import bp_decode, sample_graph, trial_rng

F = Fraction
REG23 = Ensemble.regular(2, 3)


def brute_counts(g, t):
    out = np.zeros(g.n + 1, dtype=np.int64)
    for p in range(1 << g.n):
        er = np.array([(p >> v) & 1 for v in range(g.n)], dtype=bool)
        out[er.sum()] += bp_decode(g, er, t).sum()
    return out


@pytest.mark.parametrize("e,n", [(Ensemble.regular(2, 3), 6), (Ensemble.regular(3, 6), 4), (Ensemble.regular(3, 4), 8)], ids=str)
def test_weight_counts_match_single_pattern_decoder(e, n):
    for k in range(10):
        g = sample_graph(e, n, trial_rng(7, k))
        for t in range(5):
            assert np.array_equal(weight_counts(g, t), brute_counts(g, t))


def test_t0_is_channel():
    r = exact_pb_full(REG23, 3, 0)
    assert r.pb_poly == (0, 1, 0, 0)


def test_frozen_polynomials():
    for t in (1, 2, 5):
        r = exact_pb_full(REG23, 3, t)
        assert r.pb_poly == (0, F(2, 5), F(4, 5), F(-1, 5))
        assert r.pb_at(F(1, 2)) == F(3, 8)


def test_endpoints():
    for t in (0, 1, 3):
        r = exact_pb_full(REG23, 3, t)
        assert r.pb_at(0) == 0 and r.pb_at(1) == 1


def test_constant_beyond_blocklength():
    # each productive iteration recovers at least one of n bits
    polys = {exact_pb_full(REG23, 3, t).pb_poly for t in range(3, 7)}
    assert len(polys) == 1


def test_sampled_reproducible_and_seeded():
    a = exact_pb_sampled(REG23, 6, 2, 40, seed=1)
    b = exact_pb_sampled(REG23, 6, 2, 40, seed=1)
    c = exact_pb_sampled(REG23, 6, 2, 40, seed=2)
    assert a.pb_poly == b.pb_poly and np.array_equal(a.by_weight, b.by_weight)
    assert a.pb_poly != c.pb_poly


def test_sampled_matches_full_within_ci():
    full = exact_pb_full(REG23, 3, 2)
    s = exact_pb_sampled(REG23, 3, 2, 2000, seed=0)
    for x in (0.2, 0.5, 0.8):
        assert abs(float(s.pb_at(x)) - float(full.pb_at(x))) < 2 * s.ci_halfwidth(x) + 1e-12
    assert full.ci_halfwidth(0.5) == 0.0


def test_per_graph_mean_equals_poly():
    s = exact_pb_sampled(REG23, 6, 3, 30, seed=3)
    assert s.per_graph_at(0.4).mean() == pytest.approx(float(s.pb_at(0.4)), rel=1e-12)


def test_size_guards():
    with pytest.raises(OracleTooLarge):
        exact_pb_full(Ensemble.regular(3, 6), 6, 1)
    with pytest.raises(OracleTooLarge):
        exact_pb_sampled(REG23, MAX_SAMPLED_N + 3, 1, 1)
    with pytest.raises(ValueError):
        exact_pb_sampled(REG23, 6, 1, 0)
    with pytest.raises(ValueError):
        exact_pb_full(REG23, 3, -1)


@pytest.mark.slow
def test_scaled_gap_approaches_alpha():
    # n (P_b(n) - P_b(inf)) should move toward alpha as n grows
    eps = 0.3
    pinf = evolve(REG23, eps, 1).Pb[1]
    target = float(alpha_regular(2, 3, eps, 1))
    gaps = [abs(3 * (float(exact_pb_full(REG23, 3, 1).pb_at(eps)) - pinf) - target)]
    for n in (6, 12):
        r = exact_pb_sampled(REG23, n, 1, 1500, seed=n)
        y = n * (float(r.pb_at(eps)) - pinf)
        noise = 2 * n * r.ci_halfwidth(eps)
        gaps.append(abs(y - target) + noise)
    assert gaps[2] < gaps[0]
    assert gaps[2] < 0.05
