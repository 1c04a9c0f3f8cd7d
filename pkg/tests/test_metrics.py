from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ctqwva import graphs as g
from ctqwva import metrics as mt
from ctqwva import walks as w


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 3), st.integers(2, 5), st.floats(0.0, 7.0))
def test_hamming_coefficient_matches_walk_column(n, m, t):
    spec = g.Hamming(n, m)
    col = w.dense_walk_oracle(g.build_adjacency(spec), t)[:, 0]
    dist = g.bfs_distances(spec, 0)
    for v in range(col.size):
        assert abs(col[v] - mt.hamming_coefficient(n, m, int(dist[v]), t)) < 1e-10


def test_subshell_coefficients_are_constant_and_normalised():
    spec = g.ConstrainedPermutation((1, 3, 2))
    sc = mt.subshell_coefficients(spec, 0, 0.9)
    assert np.isclose(sc.column_norm(), 1.0)


def test_graph_model_agrees_with_closed_form_on_hamming():
    model = mt.graph_model(g.Hamming(3, 4))
    closed = mt.hamming_model(3, 4)
    t = np.linspace(0.1, 3.0, 9)
    np.testing.assert_allclose(model(t), closed(t), atol=1e-12)


def test_convergence_potential_is_single_layer_probability():
    spec = g.ConstrainedPermutation((1, 5, 2))
    part = g.subshell_partition(spec)
    model = mt.graph_model(spec, 0, part)
    t_star = mt.optimal_walk_time(model)
    q = mt.phase_optimal_costs(model, t_star)[part.labels(g.vertex_count(spec))]
    N = q.size
    psi = np.exp(-1j * q) / np.sqrt(N)
    U = w.dense_walk_oracle(g.build_adjacency(spec), t_star)
    prob = abs((U @ psi)[0]) ** 2
    assert np.isclose(prob, mt.convergence_potential(model), atol=1e-9)


def test_small_alphabet_hamming_reaches_certainty():
    for m in (2, 3, 4):
        assert np.isclose(mt.hamming_convergence_potential(3, m), 1.0, atol=1e-9)


def test_complete_graph_potential_approximation():
    for m in (16, 64):
        amp = mt.amplification(1, m)
        assert abs(amp["prob"] - amp["approx"] / m) < 1e-3


def test_circular_distance():
    assert np.isclose(mt.circular_distance(0.1, 2 * np.pi - 0.1), 0.2)
    assert np.isclose(mt.circular_distance(np.pi, -np.pi), 0.0)


def test_noise_free_sweep_recovers_potential():
    model = mt.graph_model(g.Complete(32))
    res = mt.variance_adjusted_convergence(model, 0.0, seed=0, starts=4)
    assert np.isclose(res.probability, mt.convergence_potential(model), atol=1e-8)
    assert res.discrepancy < 1e-6
    with pytest.raises(ValueError):
        mt.variance_adjusted_convergence(model, -1.0, seed=0)


def test_msv_exact_matches_bfs_oracle():
    rng = np.random.default_rng(0)
    costs = rng.uniform(0, 3, 4**3)
    fast = mt.msv_hamming(costs, 3, 4)
    slow = mt.msv_graph(g.Hamming(3, 4), costs)
    np.testing.assert_allclose(fast.per_shell, slow.per_shell, atol=1e-10)


def test_msv_sampled_with_all_references_equals_exact_in_expectation():
    rng = np.random.default_rng(1)
    costs = rng.uniform(0, 1, 3**4)
    exact = mt.msv_hamming(costs, 4, 3).msv
    sampled = mt.msv_hamming(costs, 4, 3, mode="sampled", k=4000, seed=2)
    assert sampled.seed == 2
    assert abs(sampled.msv - exact) < 0.05 * exact


def test_constant_costs_have_zero_msv():
    assert mt.msv_hamming(np.full(27, 4.2), 3, 3).msv == 0.0
