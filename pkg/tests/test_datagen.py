import math

import numpy as np
import pytest

from mugl.datagen import (
    GRAPH_STREAM,
    RANK_TOL,
    SIGNAL_STREAM,
    GraphSpec,
    SignalSpec,
    gen_er_graph,
    gen_gaussian_graph,
    gen_graph,
    gen_pa_graph,
    gen_signals,
    rbf_weights,
    stream_rng,
)
from mugl.laplacian import expand, is_laplacian, pair_indices
from oracles import path_weights

# distance below which the default RBF weight reaches the 0.75 cutoff
GAUSSIAN_CUTOFF = math.sqrt(-2.0 * 0.5**2 * math.log(0.75))


class ZeroRng:
    """Stub generator whose normal draws are all zero."""

    def standard_normal(self, shape):
        return np.zeros(shape)


def test_graph_spec_validation():
    bad = [
        dict(family="ba", m=5, seed=0),
        dict(family="er", m=1, seed=0),
        dict(family="er", m=5, seed=-1),
        dict(family="er", m=5, seed=0, p=1.5),
        dict(family="gaussian", m=5, seed=0, sigma=0.0),
        dict(family="gaussian", m=5, seed=0, threshold=0.0),
        dict(family="gaussian", m=5, seed=0, threshold=1.1),
        dict(family="pa", m=5, seed=0, theta0=1),
        dict(family="pa", m=5, seed=0, theta0=6),
        dict(family="pa", m=5, seed=0, theta0=3, theta=4),
    ]
    for kwargs in bad:
        with pytest.raises(ValueError):
            GraphSpec(**kwargs)


def test_signal_spec_validation():
    for kwargs in [dict(n=0, epsilon=0.1, seed=0), dict(n=5, epsilon=-0.1, seed=0),
                   dict(n=5, epsilon=0.1, seed=-2)]:
        with pytest.raises(ValueError):
            SignalSpec(**kwargs)


def test_stream_rngs_are_distinct_and_stable():
    a = stream_rng(42, GRAPH_STREAM).random(5)
    b = stream_rng(42, SIGNAL_STREAM).random(5)
    assert not np.array_equal(a, b)
    assert np.array_equal(a, stream_rng(42, GRAPH_STREAM).random(5))


def test_rbf_weight_one_at_identical_coords():
    coords = np.array([[0.3, 0.7], [0.3, 0.7], [0.9, 0.1]])
    w = rbf_weights(coords, sigma=0.5)
    assert w[0] == pytest.approx(1.0)  # pair (2,1) coincides
    assert w[1] < 1.0 and w[2] < 1.0


def test_gaussian_graph_edges_match_distance_cutoff():
    for seed in range(20):
        graph = gen_gaussian_graph(GraphSpec("gaussian", 12, seed=seed))
        rows, cols = pair_indices(12)
        diff = graph.coords[rows] - graph.coords[cols]
        dist = np.sqrt(np.sum(diff * diff, axis=1))
        present = graph.weights > 0
        assert np.all(dist[present] <= GAUSSIAN_CUTOFF + 1e-12)
        assert np.all(dist[~present] > GAUSSIAN_CUTOFF - 1e-12)
        # kept edges carry the raw kernel value
        want = np.exp(-dist[present] ** 2 / (2 * 0.5**2))
        assert np.allclose(graph.weights[present], want, atol=1e-12)
        assert graph.weights[present].min() >= 0.75
        assert is_laplacian(graph.laplacian)


def test_gaussian_graph_threshold_one_is_empty():
    graph = gen_gaussian_graph(GraphSpec("gaussian", 15, seed=3, threshold=1.0))
    assert graph.n_edges == 0


def test_er_degenerate_probabilities():
    empty = gen_er_graph(GraphSpec("er", 6, seed=0, p=0.0))
    assert empty.n_edges == 0
    assert not empty.connected
    full = gen_er_graph(GraphSpec("er", 6, seed=0, p=1.0))
    assert full.n_edges == 15
    assert np.allclose(np.diag(full.laplacian), 5.0)
    assert full.connected


def test_er_edge_count_matches_binomial_mean():
    counts = [gen_er_graph(GraphSpec("er", 20, seed=s)).n_edges for s in range(10_000)]
    se = math.sqrt(190 * 0.2 * 0.8 / 10_000)
    assert abs(np.mean(counts) - 38.0) <= 3 * se


def test_pa_tree_shape():
    for m in (3, 10, 40):
        graph = gen_pa_graph(GraphSpec("pa", m, seed=m))
        assert graph.n_edges == m - 1
        assert graph.connected
        assert np.trace(graph.laplacian) == pytest.approx(2.0 * (m - 1))


def test_pa_three_nodes_degree_sum():
    graph = gen_pa_graph(GraphSpec("pa", 3, seed=5))
    assert np.diag(graph.laplacian).sum() == pytest.approx(4.0)


def test_pa_general_theta_edge_count():
    graph = gen_pa_graph(GraphSpec("pa", 8, seed=2, theta0=3, theta=2))
    # path seed contributes theta0 - 1 edges, each arrival theta more
    assert graph.n_edges == 2 + 5 * 2
    assert graph.connected


def test_pa_initial_nodes_attract_attachments():
    combined = []
    for seed in range(5000):
        L = gen_pa_graph(GraphSpec("pa", 50, seed=seed)).laplacian
        combined.append(L[0, 0] + L[1, 1])
    # under uniform (degree-blind) attachment the two seed nodes would
    # collect 2 * H_49 expected degree; degree-proportional must beat that
    uniform_baseline = 2.0 * sum(1.0 / k for k in range(1, 50))
    assert np.mean(combined) > uniform_baseline + 1.0


def test_generators_are_deterministic():
    for family, kwargs in [("gaussian", {}), ("er", {}), ("pa", {})]:
        spec = GraphSpec(family, 12, seed=99, **kwargs)
        a, b = gen_graph(spec), gen_graph(spec)
        assert np.array_equal(a.weights, b.weights)
    spec = SignalSpec(n=7, epsilon=0.2, seed=31)
    L = expand(path_weights(6))
    assert np.array_equal(gen_signals(L, spec), gen_signals(L, spec))


def test_signals_zero_draws_return_mu_star():
    L = expand(path_weights(4))
    mu = np.array([1.0, -2.0, 0.5, 3.0])
    X = gen_signals(L, SignalSpec(n=3, epsilon=0.0, seed=0, mu_star=mu), rng=ZeroRng())
    assert np.array_equal(X, np.column_stack([mu] * 3))


def test_signals_mu_star_size_checked():
    L = expand(path_weights(4))
    with pytest.raises(ValueError, match="mu_star"):
        gen_signals(L, SignalSpec(n=3, epsilon=0.0, seed=0, mu_star=np.ones(3)))


def test_signals_have_no_kernel_direction_variance():
    # the all-ones eigenvector of a connected Laplacian gets zero latent
    # variance, so noiseless signals are flat along it
    L = expand(path_weights(5))
    X = gen_signals(L, SignalSpec(n=2000, epsilon=0.0, seed=8))
    kernel_component = X.sum(axis=0) / math.sqrt(5)
    assert kernel_component.var() <= 1e-20


def test_signal_covariance_matches_model():
    L = expand(path_weights(5))
    eps = 0.3
    X = gen_signals(L, SignalSpec(n=10_000, epsilon=eps, seed=4))
    lam, U = np.linalg.eigh(L)
    keep = lam > RANK_TOL * lam[-1]
    target = (U[:, keep] / lam[keep]) @ U[:, keep].T + eps**2 * np.eye(5)
    emp = np.cov(X, bias=True)
    rel = np.linalg.norm(emp - target) / np.linalg.norm(target)
    assert rel <= 0.1


def test_generated_signals_are_smoother_than_iid():
    gen_total = iid_total = 0.0
    for seed in range(50):
        graph = gen_graph(GraphSpec("gaussian", 20, seed=seed))
        L = graph.laplacian
        lam = np.linalg.eigvalsh(L)
        keep = lam > RANK_TOL * max(lam[-1], 0.0)
        total_var = float(np.sum(1.0 / lam[keep])) + 0.1**2 * 20
        X = gen_signals(L, SignalSpec(n=40, epsilon=0.1, seed=1000 + seed))
        rng = np.random.default_rng(2000 + seed)
        X_iid = math.sqrt(total_var / 20) * rng.standard_normal((20, 40))
        gen_total += np.trace(X.T @ L @ X) / 40
        iid_total += np.trace(X_iid.T @ L @ X_iid) / 40
    assert gen_total / 50 < iid_total / 50


def test_connected_flag():
    assert gen_pa_graph(GraphSpec("pa", 12, seed=0)).connected
    two_components = gen_er_graph(GraphSpec("er", 4, seed=0, p=0.0))
    assert not two_components.connected
