import math

import numpy as np
import pytest

from contagion.bounds import (
    BoundParameters,
    maximal_load_offspring_mc,
    offspring_bound,
    p_part_star,
    p_site_star,
    subcritical_lambda,
)
from contagion.seeds import stream


def test_closed_form_point():
    # d=1, k=1, m_bar=1: reachable-ball size 3, n=3, mu=9, reinforcement 6
    p = BoundParameters(d=1, k=1, m_bar=1.0, lam=9.0, gamma=6.0)
    assert p.v_k == 3
    assert p.n == pytest.approx(3.0)
    assert p.mu == pytest.approx(9.0)
    assert p_part_star(p) == pytest.approx(0.125)
    assert p_site_star(p) == pytest.approx(0.5)
    r = offspring_bound(p)
    assert r.offspring_bound == pytest.approx(7.0)
    assert not r.subcritical


def test_p_part_second_point():
    # (lam/(lam+mu))^n with lam=3, mu=9, n=3 -> (1/4)^3
    p = BoundParameters(d=1, k=1, m_bar=1.0, lam=3.0, gamma=6.0)
    assert p_part_star(p) == pytest.approx(0.03125 * 0.5)  # (0.25)^3 = 0.015625


def test_gamma_infinite_degenerates():
    p = BoundParameters(d=1, k=1, m_bar=1.0, lam=9.0, gamma=math.inf)
    assert p_site_star(p) == 1.0
    r = offspring_bound(p)
    # site factor vanishes: bound == 0, always subcritical
    assert r.offspring_bound == pytest.approx(0.0)
    assert r.subcritical


def test_p_part_star_mc_oracle():
    # p_part* == P(Gamma(n, scale=1/lam) < Exp(mu)); check by direct simulation
    rng = stream(404, 1)
    for lam, mu_scale in [(9.0, 1.0), (3.0, 1.0), (20.0, 1.0)]:
        p = BoundParameters(d=1, k=1, m_bar=1.0, lam=lam, gamma=6.0)
        n_tr = 200_000
        g = rng.gamma(shape=p.n, scale=1.0 / lam, size=n_tr)
        e = rng.exponential(1.0 / p.mu, size=n_tr)
        phat = float(np.mean(g < e))
        se = math.sqrt(phat * (1 - phat) / n_tr)
        assert abs(p_part_star(p) - phat) <= 3 * se


def test_monotonicity_in_lambda_and_gamma():
    # faster recovery (larger lam) and faster clearance (larger gamma) both
    # shrink the offspring bound
    lams = [0.1, 0.5, 1.0, 2.0, 5.0, 10.0]
    vals = [offspring_bound(BoundParameters(2, 1, 1.0, lam, 1.0)).offspring_bound for lam in lams]
    assert all(a > b for a, b in zip(vals, vals[1:]))
    gammas = [0.1, 0.5, 1.0, 2.0, 5.0]
    vals = [offspring_bound(BoundParameters(2, 1, 1.0, 1.0, g)).offspring_bound for g in gammas]
    assert all(a > b for a, b in zip(vals, vals[1:]))


def test_subcritical_lambda_brackets():
    for d, k, m_bar, gamma in [(1, 1, 1.0, 1.0), (2, 1, 1.0, 2.0), (2, 2, 1.5, 0.5), (3, 1, 2.0, math.inf)]:
        res = subcritical_lambda(d=d, k=k, m_bar=m_bar, gamma=gamma, tol=1e-9)
        if res.degenerate:
            continue
        lo = BoundParameters(d, k, m_bar, res.value * (1 - 1e-6), gamma)
        hi = BoundParameters(d, k, m_bar, res.value * (1 + 1e-6), gamma)
        assert offspring_bound(hi).offspring_bound < 1.0 < offspring_bound(lo).offspring_bound


def test_subcritical_lambda_grid_scan_cross_check():
    res = subcritical_lambda(d=2, k=1, m_bar=1.0, gamma=1.0, tol=1e-10)
    grid = np.linspace(res.value / 4, res.value * 4, 4001)
    below = [
        lam
        for lam in grid
        if offspring_bound(BoundParameters(2, 1, 1.0, lam, 1.0)).offspring_bound < 1.0
    ]
    assert min(below) >= res.value * (1 - 1e-3)
    assert grid[-1] in below


def test_maximal_load_mc_below_bound():
    # the analytic offspring bound should dominate the simulated local process mean
    for lam, gamma in [(20.0, 6.0), (40.0, 2.0)]:
        p = BoundParameters(d=1, k=1, m_bar=1.0, lam=lam, gamma=gamma)
        est = maximal_load_offspring_mc(p, trials=50_000, rng=stream(77, 5))
        assert est.mean <= offspring_bound(p).offspring_bound + 3 * est.se


def test_mc_reproducible():
    p = BoundParameters(d=1, k=1, m_bar=1.0, lam=10.0, gamma=1.0)
    a = maximal_load_offspring_mc(p, trials=10_000, rng=stream(3, 1))
    b = maximal_load_offspring_mc(p, trials=10_000, rng=stream(3, 1))
    assert a.mean == b.mean and a.se == b.se


def test_parameter_validation():
    with pytest.raises(ValueError):
        BoundParameters(d=0, k=1, m_bar=1.0, lam=1.0, gamma=1.0)
    with pytest.raises(ValueError):
        BoundParameters(d=1, k=0, m_bar=1.0, lam=1.0, gamma=1.0)
    with pytest.raises(ValueError):
        BoundParameters(d=1, k=1, m_bar=-1.0, lam=1.0, gamma=1.0)
    with pytest.raises(ValueError):
        BoundParameters(d=1, k=1, m_bar=1.0, lam=-1.0, gamma=1.0)
