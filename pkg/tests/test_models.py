import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cliquescale.errors import CalibrationError, ParameterError
from cliquescale.graph import complete_graph, empty_graph
from cliquescale.models import (
    Family,
    ModelParams,
    WeightedPointSet,
    WeightMode,
    WeightWindow,
    calibrate_mu_girg,
    connection_prob_girg,
    connection_prob_irg,
    deterministic_weights,
    euclidean_distance,
    expected_pair_prob_girg,
    expected_pair_prob_quadrature,
    expected_window_degree,
    powerlaw_cdf,
    powerlaw_quantile,
    rng_for,
    sample_edges,
    sample_graph,
    sample_weight_powerlaw,
    sample_window_points,
    sample_window_subgraph,
    square_distance_cdf,
    torus_distance,
)
from oracles import mean_se, powerlaw_tail, within_se


def test_params_validation():
    ModelParams(Family.GNP, 5, p=0.5)
    bad = [
        dict(family="GNP", n=5, p=1.5),
        dict(family="GNP_SUPERDENSE", n=5, c=6.0),
        dict(family="GNP_SUPERDENSE", n=5, c=0.0),
        dict(family="IRG", n=5, tau=3.0),
        dict(family="IRG", n=5, tau=2.0),
        dict(family="IRG", n=5, tau=2.5, mu=0.0),
        dict(family="GIRG_TORUS", n=5, tau=2.5, T=1.0),
        dict(family="GIRG_TORUS", n=5, tau=2.5, T=-0.1),
        dict(family="GIRG_SQUARE", n=5, tau=2.5, d=3),
        dict(family="GIRG_TORUS", n=5, tau=2.5, d=0),
        dict(family="GNP", n=5, p=0.5, seed=2**64),
    ]
    for kw in bad:
        with pytest.raises(ParameterError):
            ModelParams(**kw)
    assert ModelParams("GIRG_SQUARE", 5, tau=2.5).d == 2
    assert ModelParams("GNP_SUPERDENSE", 10, c=1.0).edge_prob == pytest.approx(0.9)


def test_weight_sampler_examples():
    assert powerlaw_quantile(1.0, 2.5) == 1.0
    assert powerlaw_quantile(0.25, 2.5) == pytest.approx(0.25 ** (-2 / 3), rel=1e-15)
    assert powerlaw_quantile(0.25, 2.5) == pytest.approx(2.5198, abs=1e-4)
    with pytest.raises(ParameterError):
        sample_weight_powerlaw(3.5, rng_for(0))
    rng = rng_for(1)
    assert min(sample_weight_powerlaw(2.3, rng) for _ in range(1000)) >= 1.0


@pytest.mark.parametrize("tau", [2.1, 2.5, 2.9])
def test_empirical_tail_matches_powerlaw(tau):
    rng = rng_for(11, int(tau * 10))
    w = np.array([sample_weight_powerlaw(tau, rng) for _ in range(20000)])
    for x in (1.5, 3.0, 10.0):
        hits = (w > x).astype(float)
        mean, se = mean_se(hits)
        assert within_se(mean, powerlaw_tail(x, tau), se)


def test_deterministic_weights_examples():
    w = deterministic_weights(4, 3.0)
    assert w[-1] == 1.0 and w[0] == pytest.approx(2.0)
    assert np.all(np.diff(w) < 0)
    assert deterministic_weights(4, 2.5)[-1] == 1.0
    assert deterministic_weights(100, 2.5)[0] == pytest.approx(100 ** (2 / 3), rel=1e-15)
    assert deterministic_weights(100, 2.5)[0] == pytest.approx(21.544, abs=1e-3)


def test_connection_prob_irg_examples():
    n, mu = 100, 1.0
    s = math.sqrt(mu * n)
    assert connection_prob_irg(s, s, mu, n) == 1.0
    assert connection_prob_irg(2, 3, 1, 100) == pytest.approx(0.06)
    assert connection_prob_irg(3, 2, 1, 100) == connection_prob_irg(2, 3, 1, 100)
    assert connection_prob_irg(1, 1, 1, 100) == pytest.approx(0.01)


def test_connection_prob_girg_examples():
    n, mu = 100, 1.0
    torus = ModelParams("GIRG_TORUS", n, tau=2.5, mu=mu)
    assert connection_prob_girg(1.0, 1.0, [0.3], [0.3], torus) == 1.0
    s = math.sqrt(mu * n)
    assert connection_prob_girg(s, s, [0.0], [0.5], torus) == 1.0
    # exact threshold tie connects
    assert connection_prob_girg(5.0, 2.0, [0.0], [0.1], torus) == 1.0
    assert connection_prob_girg(5.0, 2.0, [0.0], [0.1000001], torus) == 0.0
    hot = ModelParams("GIRG_TORUS", n, tau=2.5, mu=mu, T=0.5)
    # ratio w_u w_v / (n mu dist) = 0.25
    assert connection_prob_girg(5.0, 2.0, [0.0], [0.4], hot) == pytest.approx(0.0625)
    with pytest.raises(ParameterError):
        connection_prob_girg(1, 1, [0], [0], ModelParams("IRG", n, tau=2.5))


def test_norms():
    assert torus_distance([0.05, 0.5], [0.95, 0.4]) == pytest.approx(0.1)
    assert torus_distance([0.0], [0.7]) == pytest.approx(0.3)
    assert euclidean_distance([0.0, 0.0], [0.3, 0.4]) == pytest.approx(0.5)
    _, pts = sample_graph(ModelParams("GIRG_TORUS", 10, tau=2.5, d=2))
    assert pts.norm == "MAX_NORM_TORUS" and pts.positions.shape == (10, 2)
    _, pts = sample_graph(ModelParams("GIRG_SQUARE", 10, tau=2.5))
    assert pts.norm == "EUCLIDEAN_SQUARE"
    assert np.all((pts.positions >= 0) & (pts.positions <= 1))


def test_sample_graph_examples():
    assert sample_graph(ModelParams("GNP", 5, p=0.0))[0] == empty_graph(5)
    g, pts = sample_graph(ModelParams("GNP", 5, p=1.0))
    assert g == complete_graph(5) and pts is None
    for fam in ("GNP", "IRG", "GIRG_TORUS", "GIRG_SQUARE"):
        params = ModelParams(fam, 300, p=0.3, tau=2.5, T=0.3 if fam != "GNP" else 0.0, seed=42)
        a, pa = sample_graph(params)
        b, pb = sample_graph(params)
        assert a.edge_list() == b.edge_list()
        if pa is not None:
            assert np.array_equal(pa.weights, pb.weights)
        assert a != sample_graph(params.with_seed(43))[0]
    _, pts = sample_graph(ModelParams("IRG", 50, tau=2.5))
    assert pts.positions is None and pts.weights.min() >= 1.0


def test_gnp_edge_density():
    vals = [sample_graph(ModelParams("GNP", 50, p=0.3, seed=s))[0].m / 1225 for s in range(1000)]
    mean, se = mean_se(vals)
    assert within_se(mean, 0.3, se)


def test_superdense_edge_density():
    vals = [sample_graph(ModelParams("GNP_SUPERDENSE", 40, c=2.0, seed=s))[0].m / 780 for s in range(1000)]
    mean, se = mean_se(vals)
    assert within_se(mean, 1 - 2.0 / 40, se)


@pytest.mark.parametrize("w", [3.0, 8.0, 20.0])
def test_irg_fixed_weight_density(w):
    n, mu = 200, 1.5
    params = ModelParams("IRG", n, tau=2.5, mu=mu)
    pts = WeightedPointSet(np.full(n, w))
    vals = [len(sample_edges(pts, params, seed=s)) / (n * (n - 1) / 2) for s in range(1000)]
    mean, se = mean_se(vals)
    expected = min(1.0, w * w / (mu * n))
    if expected == 1.0:
        assert mean == 1.0
    else:
        assert within_se(mean, expected, se)


def test_skip_sampler_matches_pair_loop_in_distribution():
    n = 3000
    params = ModelParams("IRG", n, tau=2.3)
    w = deterministic_weights(n, 2.3)
    pts = WeightedPointSet(w)
    pair = [len(sample_edges(pts, params, seed=s, method="pair")) for s in range(60)]
    skip = [len(sample_edges(pts, params, seed=s, method="skip")) for s in range(200)]
    expected = float(np.triu(np.minimum(np.outer(w, w) / n, 1.0), 1).sum())
    for vals in (pair, skip):
        mean, se = mean_se(vals)
        assert within_se(mean, expected, se)
    # degree of the heaviest vertex
    deg = []
    for s in range(200):
        e = sample_edges(pts, params, seed=s, method="skip")
        deg.append(int(np.sum(e == 0)))
        assert np.all(e[:, 0] < e[:, 1]) and len(np.unique(e, axis=0)) == len(e)
    mean, se = mean_se(deg)
    assert within_se(mean, float(np.minimum(w[0] * w[1:] / n, 1.0).sum()), se)


def test_girg_threshold_is_deterministic_in_points():
    params = ModelParams("GIRG_TORUS", 400, tau=2.5, d=2)
    g, pts = sample_graph(params)
    for s in (1, 2, 3):
        assert np.array_equal(sample_edges(pts, params, seed=s), g.edges)


def test_deterministic_window_example():
    n, tau = 10**6, 2.5
    window = WeightWindow(0.5 * math.sqrt(n), math.sqrt(n), hi_closed=True)
    pts = sample_window_points(ModelParams("IRG", n, tau=tau, weight_mode="DETERMINISTIC"), window)
    v = pts.ids + 1
    lo_v, hi_v = n ** ((3 - tau) / 2), 2 ** (tau - 1) * n ** ((3 - tau) / 2)
    assert v.min() >= lo_v and v.max() <= hi_v
    assert v.min() == math.ceil(lo_v) and v.max() == math.floor(hi_v)
    assert len(pts) == 58
    w = deterministic_weights(n, tau)
    assert np.array_equal(np.flatnonzero(window.contains(w)), pts.ids)


def test_random_window_vertex_count():
    n, tau = 5000, 2.5
    window = WeightWindow(3.0, 20.0)
    params = ModelParams("IRG", n, tau=tau)
    counts = [len(sample_window_points(params.with_seed(s), window)) for s in range(1000)]
    mean, se = mean_se(counts)
    assert within_se(mean, n * (3.0 ** (1 - tau) - 20.0 ** (1 - tau)), se)
    pts = sample_window_points(params, window)
    assert np.all(window.contains(pts.weights))


def test_window_subgraph_above_clamp_is_complete():
    n, mu = 10000, 1.0
    params = ModelParams("IRG", n, tau=2.2, mu=mu, seed=5)
    g, pts = sample_window_subgraph(params, WeightWindow(math.sqrt(mu * n)))
    assert len(pts) > 2 and g == complete_graph(len(pts))


def test_empty_window_gives_empty_graph():
    params = ModelParams("IRG", 100, tau=2.5)
    g, pts = sample_window_subgraph(params, WeightWindow(5.0, 5.0))
    assert g.n == 0 and len(pts) == 0
    det = ModelParams("IRG", 100, tau=2.5, weight_mode="DETERMINISTIC")
    g, _ = sample_window_subgraph(det, WeightWindow(5.0, 5.0))
    assert g.n == 0


def _triangles(g):
    a = g.packed_adjacency
    adj = np.unpackbits(a.view(np.uint8), axis=1, bitorder="little")[:, : g.n].astype(np.int64)
    return int(np.trace(adj @ adj @ adj)) // 6


@pytest.mark.parametrize("family", ["IRG", "GIRG_TORUS"])
def test_full_window_matches_full_model(family):
    n = 200
    full_deg, full_tri, win_deg, win_tri = [], [], [], []
    for s in range(500):
        params = ModelParams(family, n, tau=2.5, mu=0.5, T=0.4 if family != "IRG" else 0.0, seed=s)
        g, _ = sample_graph(params)
        h, _ = sample_window_subgraph(params.with_seed(10**6 + s), WeightWindow(1.0))
        full_deg.append(2 * g.m / n)
        win_deg.append(2 * h.m / n)
        full_tri.append(_triangles(g))
        win_tri.append(_triangles(h))
    for a, b in ((full_deg, win_deg), (full_tri, win_tri)):
        ma, sa = mean_se(a)
        mb, sb = mean_se(b)
        assert abs(ma - mb) <= 3 * math.hypot(sa, sb)


def test_window_induces_full_model_deterministic():
    n, tau = 3000, 2.5
    window = WeightWindow(4.0, 30.0)
    params = ModelParams("GIRG_TORUS", n, tau=tau, weight_mode="DETERMINISTIC")
    pts = sample_window_points(params, window)
    w = deterministic_weights(n, tau)
    assert np.array_equal(pts.weights, w[pts.ids])


def test_torus_expected_prob_closed_form_vs_quadrature():
    for d in (1, 2, 3):
        for T in (0.0, 0.3, 0.7):
            for r in (1e-4, 0.01, 0.1, 0.2, 0.6):
                a = float(expected_pair_prob_girg(r, T, d, "torus"))
                b = expected_pair_prob_quadrature(r, T, d, "torus")
                assert a == pytest.approx(b, rel=1e-7, abs=1e-12)


def test_d1_threshold_closed_form_vs_monte_carlo():
    rng = rng_for(3)
    x = rng.random((100000, 2, 1))
    dist = torus_distance(x[:, 0], x[:, 1])
    for r in (0.05, 0.2, 0.45, 0.7):
        hits = (r >= dist).astype(float)
        mean, se = mean_se(hits)
        closed = float(expected_pair_prob_girg(r, 0.0, 1, "torus"))
        assert closed == pytest.approx(min(1.0, 2 * min(0.5, r)))
        assert within_se(mean, closed, se)


def test_square_distance_cdf_vs_monte_carlo():
    rng = rng_for(4)
    p = rng.random((200000, 2))
    q = rng.random((200000, 2))
    dist = euclidean_distance(p, q)
    for l in (0.1, 0.5, 0.9, 1.0, 1.2, 1.3):
        mean, se = mean_se((dist <= l).astype(float))
        assert within_se(mean, float(square_distance_cdf(l)), se)
    assert square_distance_cdf(0.0) == 0.0 and square_distance_cdf(math.sqrt(2)) == 1.0


def test_square_temperature_prob_vs_monte_carlo():
    rng = rng_for(5)
    dist = euclidean_distance(rng.random((200000, 2)), rng.random((200000, 2)))
    for T, r in ((0.3, 0.05), (0.6, 0.2)):
        vals = np.minimum((r / dist**2) ** (1 / T), 1.0)
        mean, se = mean_se(vals)
        assert within_se(mean, float(expected_pair_prob_girg(r, T, 2, "square")), se)


def _window_case(weight_mode):
    n = 10**5
    return n, WeightWindow(0.5 * math.sqrt(n), math.sqrt(n), hi_closed=True), weight_mode


@pytest.mark.parametrize("weight_mode", ["DETERMINISTIC", "RANDOM"])
@pytest.mark.parametrize("family,T,d", [("GIRG_TORUS", 0.0, 1), ("GIRG_TORUS", 0.5, 2), ("GIRG_SQUARE", 0.0, 2), ("GIRG_SQUARE", 0.4, 2)])
def test_calibration_self_consistent(weight_mode, family, T, d):
    n, window, mode = _window_case(weight_mode)
    irg = ModelParams("IRG", n, tau=2.5, weight_mode=mode)
    girg = ModelParams(family, n, tau=2.5, T=T, d=d, weight_mode=mode)
    mu = calibrate_mu_girg(irg, girg, window)
    target = expected_window_degree(irg, window)
    got = expected_window_degree(ModelParams(family, n, tau=2.5, T=T, d=d, mu=mu, weight_mode=mode), window)
    assert got == pytest.approx(target, rel=0.01)


def test_calibration_against_sampled_girgs():
    n = 20000
    window = WeightWindow(0.5 * math.sqrt(n), math.sqrt(n), hi_closed=True)
    irg = ModelParams("IRG", n, tau=2.5, weight_mode="DETERMINISTIC")
    girg = ModelParams("GIRG_TORUS", n, tau=2.5, weight_mode="DETERMINISTIC")
    mu = calibrate_mu_girg(irg, girg, window)
    target = expected_window_degree(irg, window)
    degs = []
    for s in range(300):
        g, _ = sample_window_subgraph(ModelParams("GIRG_TORUS", n, tau=2.5, mu=mu, weight_mode="DETERMINISTIC", seed=s), window)
        degs.append(2 * g.m / g.n)
    mean, se = mean_se(degs)
    assert within_se(mean, target, se)


def test_calibration_saturated_window():
    n = 10000
    window = WeightWindow(math.sqrt(n), 3 * math.sqrt(n))
    irg = ModelParams("IRG", n, tau=2.5, weight_mode="DETERMINISTIC")
    girg = ModelParams("GIRG_TORUS", n, tau=2.5, weight_mode="DETERMINISTIC")
    mu = calibrate_mu_girg(irg, girg, window)
    g, pts = sample_window_subgraph(ModelParams("GIRG_TORUS", n, tau=2.5, mu=mu, weight_mode="DETERMINISTIC"), window)
    assert g == complete_graph(len(pts))
    # every pair's threshold distance reaches 1/2
    w = np.sort(pts.weights)
    assert w[0] * w[1] / (n * mu) >= 0.5 * (1 - 1e-12)


def test_calibration_errors():
    n = 1000
    irg = ModelParams("IRG", n, tau=2.5, weight_mode="DETERMINISTIC")
    girg = ModelParams("GIRG_TORUS", n, tau=2.5, weight_mode="DETERMINISTIC")
    with pytest.raises(CalibrationError):
        calibrate_mu_girg(irg, girg, WeightWindow(5000.0, 6000.0))
    with pytest.raises(ParameterError):
        calibrate_mu_girg(girg, irg, WeightWindow(1.0))
    with pytest.raises(ParameterError):
        calibrate_mu_girg(irg, ModelParams("GIRG_TORUS", n + 1, tau=2.5), WeightWindow(1.0))


@settings(max_examples=200)
@given(st.floats(1.0, 1e3), st.floats(2.01, 2.99))
def test_quantile_inverts_cdf(w, tau):
    u = 1.0 - float(powerlaw_cdf(w, tau))
    assert float(powerlaw_quantile(u, tau)) == pytest.approx(w, rel=1e-9)


@settings(max_examples=100)
@given(st.floats(1.0, 50.0), st.floats(1.0, 50.0), st.floats(0.1, 10.0), st.integers(1, 10**6))
def test_irg_prob_symmetric_and_bounded(a, b, mu, n):
    p = float(connection_prob_irg(a, b, mu, n))
    assert 0.0 <= p <= 1.0 and p == float(connection_prob_irg(b, a, mu, n))


def test_window_parse_and_membership():
    w = WeightWindow.parse("2:5")
    assert (w.lo, w.hi) == (2.0, 5.0)
    assert w.contains(2.0) and not w.contains(5.0)
    assert WeightWindow.parse("2:inf").hi == math.inf
    assert WeightWindow(5.0, 5.0).is_empty and not WeightWindow(5.0, 5.0, hi_closed=True).is_empty
    with pytest.raises(ParameterError):
        WeightWindow(3.0, 2.0)
    assert WeightMode("RANDOM") is WeightMode.RANDOM
