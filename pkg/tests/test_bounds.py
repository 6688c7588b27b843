import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cliquescale.bounds import (
    ER_LOWER_PREFACTOR,
    GIRG_VARIANTS,
    BoundQuery,
    Formula,
    er_expected_maximal_k,
    er_expected_maximal_k_exact,
    er_expected_total,
    er_lower_bound_exponent,
    er_lower_bound_log,
    er_lower_bound_log_via_k,
    er_sparse_exponent,
    evaluate,
    expected_window_count,
    figure_rows,
    girg_exponent,
    girg_log_lower_bounds,
    irg_exponent,
    irg_log_lower_bound,
    kclique_exponent,
    localization_exponent,
    maximality_prob_bounds,
    sweep,
)
from cliquescale.errors import ParameterError
from cliquescale.mce import brute_force_maximal_cliques
from cliquescale.models import ModelParams, powerlaw_quantile, rng_for, sample_graph
from oracles import expected_nk_by_enumeration, mean_se, within_se


def test_er_expected_examples():
    for k in (1, 3, 7):
        assert er_expected_maximal_k(k, 1.0, k) == 1.0
    assert er_expected_maximal_k(4, 1.0, 2) == 0.0
    assert er_expected_maximal_k(3, 0.5, 2) == pytest.approx(1.125, rel=1e-15)
    assert er_expected_maximal_k_exact(3, Fraction(1, 2), 2) == Fraction(9, 8)
    assert er_expected_maximal_k(5, 0.0, 1) == pytest.approx(5.0)  # five isolated vertices
    assert er_expected_maximal_k(1, 0.0, 1) == 1.0
    assert er_expected_maximal_k(5, 0.0, 2) == 0.0


def test_er_expected_matches_enumeration_oracle():
    assert expected_nk_by_enumeration(3, 0.5, 2) == pytest.approx(1.125)
    for n, p in ((3, 0.3), (4, 0.5), (5, 0.7)):
        for k in range(1, n + 1):
            assert er_expected_maximal_k(n, p, k) == pytest.approx(expected_nk_by_enumeration(n, p, k), rel=1e-12, abs=1e-15)


def test_er_expected_exact_path_agrees():
    for n in (5, 20, 64):
        for p in (Fraction(1, 10), Fraction(1, 2), Fraction(9, 10)):
            for k in range(1, n + 1, max(1, n // 8)):
                exact = er_expected_maximal_k_exact(n, p, k)
                assert er_expected_maximal_k(n, float(p), k) == pytest.approx(float(exact), rel=1e-10, abs=1e-300)


def test_er_expected_log_space_vs_high_precision():
    n, p, k = 1000, 0.5, 20
    got = er_expected_maximal_k(n, p, k)
    assert math.isfinite(got) and got > 0
    with mpmath.workdps(200):
        pk = mpmath.mpf(1) / 2**k
        ref = mpmath.binomial(n, k) * mpmath.mpf(p) ** (k * (k - 1) // 2) * (1 - pk) ** (n - k)
        assert abs(got - float(ref)) <= 1e-9 * float(ref)
    exact = er_expected_maximal_k_exact(n, Fraction(1, 2), k)
    assert got == pytest.approx(float(exact), rel=1e-9)


def test_er_expected_domain():
    with pytest.raises(ParameterError):
        er_expected_maximal_k(5, 1.5, 2)
    with pytest.raises(ParameterError):
        er_expected_maximal_k(5, 0.5, 6)
    with pytest.raises(ParameterError):
        er_expected_maximal_k(5, 0.5, 0)


@pytest.mark.parametrize("n,p", [(8, 0.3), (10, 0.5), (12, 0.8)])
def test_er_total_matches_brute_force_mean(n, p):
    totals = [brute_force_maximal_cliques(sample_graph(ModelParams("GNP", n, p=p, seed=s))[0]).total for s in range(10000)]
    mean, se = mean_se(totals)
    assert within_se(mean, er_expected_total(n, p), se)


def test_er_lower_bound_examples():
    n, p = math.e**math.e, 1 / math.e
    assert er_lower_bound_exponent(n, p) == pytest.approx(math.e / 2 - 1, rel=1e-12)
    assert er_lower_bound_log(n, p) == pytest.approx((math.e / 2 - 1) * math.e, rel=1e-12)
    n, p = 1e6, 0.5
    assert er_lower_bound_log(n, p) == pytest.approx(er_lower_bound_log_via_k(n, p), rel=1e-12)
    ps = np.linspace(0.01, 0.99, 99)
    vals = [er_lower_bound_log(1e9, float(q)) for q in ps]
    assert np.all(np.diff(vals) > 0)
    assert ER_LOWER_PREFACTOR == pytest.approx(1 / math.e)
    for bad in (0.0, 1.0):
        with pytest.raises(ParameterError):
            er_lower_bound_log(100, bad)
    with pytest.raises(ParameterError):
        er_lower_bound_log(2, 0.5)


def test_er_sparse_exponent_examples():
    assert er_sparse_exponent(1.0) == (1.0, 1)
    x, k = er_sparse_exponent(0.5)
    assert (x, k) == (1.5, 2)
    x, k = er_sparse_exponent(1 / 3)
    assert k == 3 and x == pytest.approx(2.0, rel=1e-12)
    for bad in (0.0, 1.5):
        with pytest.raises(ParameterError):
            er_sparse_exponent(bad)


@settings(max_examples=200)
@given(st.floats(0.01, 1.0))
def test_er_sparse_exponent_maximizes_over_k(a):
    x, k = er_sparse_exponent(a)
    best = max(j - a * j * (j - 1) / 2 for j in range(1, 200))
    assert x == pytest.approx(best, rel=1e-9, abs=1e-12)


def test_girg_exponent_examples():
    assert girg_exponent(2.5, 0.0, "torus") == pytest.approx(0.125, rel=1e-12)
    assert girg_exponent(2.2, 0.0, "square") == pytest.approx(0.08, rel=1e-12)
    for v in GIRG_VARIANTS:
        assert abs(girg_exponent(3 - 1e-12, 0.0, v)) < 1e-11
    with pytest.raises(ParameterError):
        girg_exponent(2.5, 0.0, "sphere")


def test_girg_log_bounds():
    tau, eps, b, n = 2.5, 0.01, 2.0, 1e8
    torus = girg_log_lower_bounds(tau, eps, b, n, "torus")
    assert torus.log_value == pytest.approx(n ** (0.125 - eps) * math.log(2), rel=1e-12)
    sq = girg_log_lower_bounds(tau, eps, b, n, "square", C=3.0)
    assert sq.log_value == pytest.approx(math.log(3.0) + n ** (0.05 - eps) * math.log(2), rel=1e-12)
    hot = girg_log_lower_bounds(tau, eps, b, n, "torus_temp")
    assert hot.log_value == pytest.approx(n**0.1 * (eps * math.log(n)) ** -0.5 * math.log(2), rel=1e-12)
    sqt = girg_log_lower_bounds(tau, eps, b, n, "square_temp")
    assert sqt.log_value == pytest.approx(n ** (0.5 / 12 - eps) * math.log(n) ** (1 - eps) * math.log(2), rel=1e-12)
    table = girg_log_lower_bounds(tau, eps, b, n, "square_temp_table")
    assert table.n_exponent == sq.n_exponent and "disagrees" in table.label
    with pytest.raises(ParameterError):
        girg_log_lower_bounds(tau, 0.2, b, n, "torus")
    with pytest.raises(ParameterError):
        girg_log_lower_bounds(tau, 0.0, b, n, "torus_temp")
    with pytest.raises(ParameterError):
        girg_log_lower_bounds(tau, eps, 1.0, n, "torus")


def test_irg_bound_examples():
    tau, eps, b = 2.5, 0.05, 2.0
    n = math.e
    direct = n ** ((3 - tau) / 4 - eps) * 1.0 * math.log(b)
    assert irg_log_lower_bound(tau, eps, b, n) == pytest.approx(direct, rel=1e-12)
    assert evaluate(BoundQuery("IRG_LOG_LB", dict(tau=tau, eps=eps, b=b, n=n))) == pytest.approx(direct, rel=1e-12)
    for n in (1e3, 1e6, 1e9):
        ratio = irg_log_lower_bound(tau, eps, b, n) / girg_log_lower_bounds(tau, eps, b, n, "torus").log_value
        assert ratio == pytest.approx(math.log(n), rel=1e-12)
    assert irg_exponent(2.9, 0.01) == pytest.approx(0.025 - 0.01, rel=1e-12)
    for bad in (0.0, 0.125, 0.2):
        with pytest.raises(ParameterError):
            irg_log_lower_bound(tau, bad, b, 1e6)


def test_localization_and_kclique_examples():
    assert localization_exponent(2.5) == pytest.approx(2 / 3, rel=1e-12)
    assert kclique_exponent(2.5, 3) == pytest.approx(0.75, rel=1e-12)
    taus = np.linspace(2.0001, 2.9999, 10000)
    assert max(localization_exponent(float(t)) for t in taus) < 1
    with pytest.raises(ParameterError):
        kclique_exponent(2.5, 2)
    with pytest.raises(ParameterError):
        localization_exponent(3.0)


def test_exponents_are_continuous():
    taus = np.arange(2.0001, 2.9999, 1e-4)
    fns = [localization_exponent, lambda t: kclique_exponent(t, 3), irg_exponent]
    fns += [lambda t, v=v: girg_exponent(t, 0.0, v) for v in GIRG_VARIANTS]
    for f in fns:
        vals = np.array([f(float(t)) for t in taus])
        assert np.all(np.isfinite(vals)) and np.max(np.abs(np.diff(vals))) < 1e-3
        # jumps are only the linear drift: second differences vanish up to rounding
        assert np.max(np.abs(np.diff(vals, 2))) < 1e-6


def test_window_count_examples():
    assert expected_window_count(100, 2.5, 1.0, 0.5, 0.5, 0.1, 0.1).exact == 0.0
    wc = expected_window_count(100, 2.5, 1.0, 0.5, 0.5, 0.1, 0.01)
    assert wc.lo == pytest.approx(6.3246, abs=1e-4) and wc.hi == pytest.approx(7.0, rel=1e-12)
    assert wc.exact == pytest.approx(100 * (6.3246**-1.5 - 7.0**-1.5), rel=1e-4)
    assert wc.exact == pytest.approx(0.887, abs=1e-3)


def test_window_count_leading_term_is_first_order():
    n, tau, mu, a, b = 1e8, 2.5, 1.0, 0.5, 0.5
    for g in (1e-3, 1e-4, 1e-5):
        wc = expected_window_count(n, tau, mu, a, b, g, 0.0)
        assert abs(wc.exact / wc.leading - 1) < 10 * g


@pytest.mark.parametrize("params", [(100, 2.5, 1.0, 0.5, 0.5, 0.1, 0.01), (10**4, 2.2, 2.0, 0.5, 1.0, 0.2, 0.05)])
def test_window_count_vs_monte_carlo(params):
    wc = expected_window_count(*params)
    n, tau = params[0], params[1]
    w = powerlaw_quantile(1.0 - rng_for(9).random(10**6), tau)
    hits = ((w >= wc.lo) & (w < wc.hi)).astype(float) * n
    mean, se = mean_se(hits)
    assert within_se(mean, wc.exact, se)


def test_maximality_prob_bounds():
    n, tau, mu = 1000, 2.5, 1.0
    lo, hi = maximality_prob_bounds(n, tau, mu, 1, 1)
    assert lo == hi == pytest.approx(math.exp(-(n ** (2 - tau)) * mu ** (1 - tau)))
    lo, hi = maximality_prob_bounds(n, tau, mu, 2, 3, C1=2.0, C2=0.5)
    assert lo <= hi
    xs = [maximality_prob_bounds(n, tau, mu, x, 50)[0] for x in (1, 5, 10, 40)]
    assert all(a > b for a, b in zip(xs, xs[1:]))
    assert maximality_prob_bounds(1e30, tau, mu, 3, 7)[0] == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(ParameterError):
        maximality_prob_bounds(n, tau, mu, 5, 2)
    with pytest.raises(ParameterError):
        maximality_prob_bounds(n, tau, mu, 1, 2, C1=0.5, C2=1.0)


def test_evaluate_dispatch_and_sweep():
    assert evaluate(BoundQuery("ER_EXPECT_NK", dict(n=3, p=0.5, k=2))) == pytest.approx(1.125)
    assert evaluate(BoundQuery(Formula.ER_SPARSE_EXPONENT, dict(a=0.5))) == 1.5
    assert evaluate(BoundQuery("LOCALIZATION_EXPONENT", dict(tau=2.5))) == pytest.approx(2 / 3)
    assert evaluate(BoundQuery("KCLIQUE_EXPONENT", dict(tau=2.5, k=3))) == pytest.approx(0.75)
    assert evaluate(BoundQuery("WINDOW_COUNT", dict(n=100, tau=2.5, a_geom=0.5, b_geom=0.5, g=0.1, h=0.01))) == pytest.approx(0.887, abs=1e-3)
    assert evaluate(BoundQuery("GIRG_TORUS_LOG_LB", dict(tau=2.5, eps=0.01, n=1e6))) == pytest.approx(girg_log_lower_bounds(2.5, 0.01, 2.0, 1e6, "torus").log_value)
    with pytest.raises(ParameterError):
        evaluate(BoundQuery("ER_LOWER", dict(n=100)))
    with pytest.raises(ValueError):
        BoundQuery("NOT_A_FORMULA")
    taus = [2.1, 2.5, 2.9]
    rows = sweep(BoundQuery("LOCALIZATION_EXPONENT"), "tau", taus)
    assert [r[0] for r in rows] == taus
    assert [r[1] for r in rows] == [localization_exponent(t) for t in taus]


@pytest.mark.parametrize("figure", ["bounds", "localization"])
def test_figure_rows_match_evaluators(figure):
    taus = np.round(np.arange(2.01, 2.99 + 1e-9, 0.01), 12)
    rows = figure_rows(figure, taus)
    assert len(rows) == 99
    for row in rows:
        t = row["tau"]
        assert all(math.isfinite(v) for v in row.values())
        if figure == "bounds":
            assert row["irg"] == irg_exponent(t)
            for v in GIRG_VARIANTS:
                assert row[v] == girg_exponent(t, 0.0, v)
        else:
            assert row["maximal"] == localization_exponent(t)
            assert row["kclique_3"] == kclique_exponent(t, 3)
    with pytest.raises(ParameterError):
        figure_rows("nope", taus)
