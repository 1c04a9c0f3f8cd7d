from __future__ import annotations

import numpy as np
import pytest

from ctqwva import graphs as g


def test_hamming_adjacency_is_distance_one():
    spec = g.Hamming(3, 3)
    A = g.build_adjacency(spec)
    labels = g.vertex_labels(spec)
    for i, a in enumerate(labels):
        for j, b in enumerate(labels):
            assert A[i, j] == (sum(x != y for x, y in zip(a, b)) == 1)


@pytest.mark.parametrize(
    "spec",
    [
        g.Hamming(4, 3),
        g.Complete(9),
        g.ConstrainedPermutation((2, 2, 1)),
        g.KPartite((2, 2, 2)),
        g.MoveClosure((1, 1, 0, 0, 0), g.all_pair_moves(range(5)), "swap"),
    ],
)
def test_closed_form_degree_and_diameter_match_bfs(spec):
    assert g.degree(spec) == g.degree_bfs(spec)
    assert g.diameter(spec) == g.diameter_bfs(spec)


def test_constrained_permutation_size_and_degree_bound():
    spec = g.ConstrainedPermutation((1, 5, 2))
    assert g.vertex_count(spec) == 168
    assert g.degree_bfs(spec) <= g.degree_upper_bound(spec)


def test_shell_sizes_of_hamming():
    assert g.shell_sizes(g.Hamming(3, 5)) == [g.hamming_shell_size(3, 5, d) for d in range(4)]


def test_subshells_of_distance_transitive_graph_are_shells():
    part = g.subshell_partition(g.Hamming(4, 3))
    assert [len(m) for _, _, m in part.subshells] == [1, 8, 24, 32, 16]


def test_walk_columns_against_dense_expm():
    spec = g.ConstrainedPermutation((1, 2, 2))
    A = g.build_adjacency(spec)
    lam, V = np.linalg.eigh(A)
    t = 0.37
    U = (V * np.exp(-1j * t * lam)) @ V.T
    np.testing.assert_allclose(g.walk_columns(spec, 3, [t])[:, 0], U[:, 3], atol=1e-12)


def test_edge_list_export(tmp_path):
    spec = g.Complete(5)
    assert g.export_edge_list(spec, tmp_path / "k5.csv") == 10
    assert len((tmp_path / "k5.csv").read_text().splitlines()) == 10


def test_irregular_graph_has_no_single_degree():
    with pytest.raises(ValueError):
        g.degree(g.KPartite((2, 3, 1)))
    assert g.diameter(g.KPartite((2, 3, 1))) == g.diameter_bfs(g.KPartite((2, 3, 1))) == 2


def test_invalid_specs_rejected():
    with pytest.raises(ValueError):
        g.KPartite(())
    with pytest.raises(ValueError):
        g.MoveClosure((0, 1), ((0, 0),))
