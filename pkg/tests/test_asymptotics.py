import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from rmtminors import asymptotics as asy
from rmtminors.errors import DomainError, InputError
from rmtminors.rng import RngStream, standard_normals


def test_rate_I():
    assert asy.rate_I(1.0) == 0.0
    assert asy.rate_I(2.0) == pytest.approx((1 - math.log(2)) / 2, abs=1e-15)
    assert asy.rate_I(-1.0) == math.inf and asy.rate_I(0.0) == math.inf
    h = 1e-5
    assert abs(asy.rate_I(1 + h) - asy.rate_I(1 - h)) / (2 * h) < 1e-8


@settings(max_examples=200, deadline=None)
@given(st.floats(0.01, 50), st.floats(0.01, 50), st.floats(0, 1))
def test_rate_I_convex(a, b, lam):
    mid = lam * a + (1 - lam) * b
    assert asy.rate_I(mid) <= lam * asy.rate_I(a) + (1 - lam) * asy.rate_I(b) + 1e-12


def test_b_star():
    assert asy.b_star(1) == pytest.approx(1 / 3, abs=1e-15)
    t = 4 / 3
    assert abs(t / (4 - t) - math.sqrt((t - 1) / t)) < 1e-14
    assert asy.b_star(t) == pytest.approx(0.5, abs=1e-14)
    assert asy.b_star(2) == pytest.approx(math.sqrt(0.5), abs=1e-15)
    ts = np.linspace(1e-3, 4, 4001)
    vals = [asy.b_star(x) for x in ts]
    assert all(b >= a for a, b in zip(vals, vals[1:]))
    for bad in (0, -1):
        with pytest.raises(InputError):
            asy.b_star(bad)


def test_predict_extreme():
    assert asy.predict_extreme("wigner", "max", 2, 100) == pytest.approx(6.0697, abs=1e-4)
    for m in (1, 2, 5):
        assert asy.predict_extreme("wigner", "max", m, 50) == pytest.approx(
            2 * math.sqrt(m * math.log(50)), rel=1e-15)
        assert asy.predict_extreme("wigner", "min", m, 50) == -asy.predict_extreme(
            "wigner", "max", m, 50)
    v = asy.predict_extreme("wishart", "max", 2, 100, n=5000)
    assert v - 5000 == pytest.approx(429.19, abs=0.01)
    assert asy.predict_extreme("wishart", "min", 2, 100, n=5000) == pytest.approx(5000 - 429.19, abs=0.01)
    assert asy.predict_extreme("wigner", "max", 2, 1024, eta=0.0) == pytest.approx(
        math.sqrt(4 * math.log(1024)), rel=1e-15)
    for kw in ({"p": 1}, {"eta": 2.5}, {"side": "mid"}):
        args = {"kind": "wigner", "side": "max", "m": 2, "p": 10, **kw}
        with pytest.raises(InputError):
            asy.predict_extreme(**args)
    with pytest.raises(InputError):
        asy.predict_extreme("wishart", "max", 2, 10)


def test_epsilon_tau():
    e, t = asy.epsilon_tau(3, 50, 0)
    assert e == 0 and t == pytest.approx(math.sqrt(4 * math.log(50) / 3), rel=1e-15)
    e, t = asy.epsilon_tau(2, 100, 1)
    assert e == pytest.approx(0.164753, abs=1e-6) and t == pytest.approx(2.534854, abs=1e-6)
    for m, p, tt in itertools.product((1, 2, 5, 10), (3, 100, 1e6), (0, 0.5, 3)):
        e, tau = asy.epsilon_tau(m, p, tt)
        assert abs(tau - (math.sqrt(4 * math.log(p) / m) - tt / m)) < 1e-12


def test_wigner_tail_bound():
    v = asy.wigner_lambda1_tail_bound(10, 2, 3)
    assert v == pytest.approx(-11.18449, abs=1e-5)
    assert math.exp(v) == pytest.approx(1.389e-5, rel=1e-3)
    assert math.isfinite(asy.wigner_lambda1_tail_bound(8.001, 2))
    xs = np.linspace(12.01, 60, 200)
    vals = [asy.wigner_lambda1_tail_bound(x, 2, 3) for x in xs]
    assert all(b < a for a, b in zip(vals, vals[1:]))
    with pytest.raises(DomainError):
        asy.wigner_lambda1_tail_bound(4 * math.sqrt(2), 2)
    with pytest.raises(DomainError):
        asy.wigner_lambda1_tail_bound(10, 1)


def test_mdp_bound():
    assert asy.mdp_eta_tail_bound(5, 2, 0, 8, 0.1) == pytest.approx(0.6061, abs=1e-3)
    # eta = 2 collapses the denominator to 4
    direct = (2 ** 1.5 * math.log(2) / 0.1 ** 2) * math.exp(-(5 - 1.6) ** 2 / 4) + 2 * math.exp(-8)
    assert asy.mdp_eta_tail_bound(5, 2, 2.0, 8, 0.1) == pytest.approx(direct, rel=1e-13)
    # strictly decreasing until the first term drops below the 2 exp(-r^2/8) floor
    vals = [asy.mdp_eta_tail_bound(x, 3, 1.0, 12, 0.05) for x in np.linspace(2.3, 20, 100)]
    assert all(b <= a for a, b in zip(vals, vals[1:]))
    assert all(b < a for a, b in zip(vals[:40], vals[1:40]))
    for args in ((5, 1, 0, 8, .1), (5, 2, 0, 7, .1), (5, 2, 0, 8, 1.0), (2.5, 2, 0, 8, .1), (5, 2, 3, 8, .1)):
        with pytest.raises(DomainError):
            asy.mdp_eta_tail_bound(*args)
    r, d, b = asy.optimize_mdp_bound(10, 2, 0.0)
    assert r >= 8 and 0 < d < 1 and 10 > 2 * r * d + 1
    assert b <= asy.mdp_eta_tail_bound(10, 2, 0.0, 8, 0.1)
    with pytest.raises(DomainError):
        asy.optimize_mdp_bound(1.0, 2, 0.0)


def test_moderate_bound():
    v = asy.wishart_moderate_bound(0.5, 10**4, 2, 2, 0.01, 3)
    assert v == pytest.approx(-318.40, abs=0.01)
    assert asy.rate_I(1.42) == pytest.approx(0.034672, abs=1e-6)
    with pytest.raises(DomainError):
        asy.wishart_moderate_bound(0.04, 100, 2, 1, 0.01)
    n, m, r = 50, 2, 2.0
    v = asy.wishart_moderate_bound(1.5, n, m, r, 0.01, side="lower")
    assert v == pytest.approx(math.log(2) - m * n * asy.rate_I(r), rel=1e-14)
    ys = np.linspace(0.1, 0.9, 50)
    vals = [asy.wishart_moderate_bound(y, 200, 2, 1.5, 0.01) for y in ys]
    assert all(b <= a + 1e-12 for a, b in zip(vals, vals[1:]))
    assert asy.optimize_moderate_bound(0.5, 10**4, 2)[2] <= v + 1e9


def test_chi2_lower_tail_bound():
    assert asy.chi2_lower_tail_bound(1e-12) == pytest.approx(1.0)
    assert asy.chi2_lower_tail_bound(16) == pytest.approx(1.125e-7, rel=1e-3)
    with pytest.raises(DomainError):
        asy.chi2_lower_tail_bound(0)


def test_chi2_lower_tail_bound_empirically():
    n, x = 100, 2.0
    z = standard_normals(RngStream(31), 10**5 * n).reshape(10**5, n)
    chi = np.einsum("ij,ij->i", z, z)
    freq = np.mean(chi - n <= -2 * math.sqrt(n * x))
    assert freq <= asy.chi2_lower_tail_bound(x)


def test_log_binomial():
    e, lo, hi = asy.log_binomial_with_bounds(5, 2)
    assert e == pytest.approx(math.log(10), abs=1e-15)
    assert lo == pytest.approx(1.832581, abs=1e-6) and hi == pytest.approx(3.832582, abs=1e-6)
    assert asy.log_binomial_with_bounds(9, 9)[0] == 0
    e, lo, hi = asy.log_binomial_with_bounds(17, 1)
    assert e == lo == math.log(17) and hi == math.log(17) + 1
    with pytest.raises(InputError):
        asy.log_binomial_with_bounds(3, 4)
    big = asy.log_binomial_with_bounds(10**6, 3)
    assert big[1] <= big[0] <= big[2]


def test_overlap_ratio():
    assert asy.overlap_ratio_log(5, 2) == pytest.approx(math.log(0.3), abs=1e-15)
    assert asy.overlap_ratio_log(3, 1) == pytest.approx(math.log(4 / 6), abs=1e-15)
    ref = (2 * math.lgamma(41) - math.lgamma(51) - math.lgamma(31))
    assert asy.overlap_ratio_log(50, 10) == pytest.approx(ref, rel=1e-12)
    with pytest.raises(DomainError):
        asy.overlap_ratio_log(4, 2)


def test_max_l():
    assert asy.max_l_value(3, 0.5) == (1, pytest.approx(3.583333, abs=1e-6))
    assert asy.max_l_brute(3, 0.5)[1] == pytest.approx(3.583333, abs=1e-6)
    eps = 0.3
    assert asy.max_l_value(2, eps)[1] == pytest.approx(3 - 3.5 * (1 - eps) ** 2, abs=1e-14)
    assert asy.max_l_value(4, 1 - 1e-9)[1] == pytest.approx(7, abs=1e-7)
    for bad in ((1, .5), (3, 0.0), (3, 1.0)):
        with pytest.raises(InputError):
            asy.max_l_value(*bad)


def test_assumption_diagnostics():
    r1, r2, xi, om = asy.assumption_diagnostics(1e6, 1e4, 2)
    assert r1 == pytest.approx(2.1186, abs=5e-4) and r2 == pytest.approx(9.856, abs=1e-3)
    lp = math.log(1e4)
    assert xi == pytest.approx(math.log(math.log(lp)), rel=1e-14)
    assert om == pytest.approx(math.sqrt(2 / lp) * xi * math.log(1e6), rel=1e-14)
    r1, *_ = asy.assumption_diagnostics(100, math.exp(math.e), 1)
    assert r1 == pytest.approx(0.71653, abs=1e-5)
    xi = asy.assumption_diagnostics(100, math.exp(math.e) * (1 + 1e-9), 2)[2]
    assert abs(xi) < 1e-8
    with pytest.raises(DomainError):
        asy.assumption_diagnostics(100, 10.0, 2)
    with pytest.raises(DomainError):
        asy.assumption_diagnostics(2, 1e4, 2)


def test_block_exceed_prob_and_second_moment():
    v = asy.log_block_exceed_prob(2, 100, 1.0)
    _, tau = asy.epsilon_tau(2, 100, 1.0)
    from rmtminors.special import log_phi_bar_exact
    assert v == pytest.approx(2 * log_phi_bar_exact(tau / math.sqrt(2)) + log_phi_bar_exact(tau))
    assert asy.second_moment_bound(2.0, 1.0) == 0.25
    # Chebyshev-type check on a Poisson count: P(Y = 0) <= Var/mean^2
    lam = 3.0
    assert math.exp(-lam) <= asy.second_moment_bound(lam, lam)
    with pytest.raises(DomainError):
        asy.second_moment_bound(0.0, 1.0)


def test_logsumexp_and_clamp():
    assert asy.logsumexp(-math.inf, -math.inf) == -math.inf
    assert asy.logsumexp(0.0, 0.0) == pytest.approx(math.log(2))
    assert asy.clamp_exp(3.0) == 1.0 and asy.clamp_exp(-1.0) == math.exp(-1)
