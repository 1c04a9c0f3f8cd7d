"""Print the degree, diameter, subshell count and convergence potential of the six benchmark mixer graphs."""
from __future__ import annotations

from ctqwva import graphs, metrics


def main() -> None:
    print(f"{'graph':<26}{'|V|':>5}{'deg':>5}{'diam':>5}{'subshells':>10}{'Prob*':>9}{'t*':>9}")
    for name, spec in graphs.table_graphs().items():
        part = graphs.subshell_partition(spec)
        model = metrics.graph_model(spec, 0, part)
        t_star = metrics.optimal_walk_time(model)
        prob = metrics.convergence_potential(model)
        print(
            f"{name:<26}{graphs.vertex_count(spec):>5}{graphs.degree_bfs(spec):>5}"
            f"{graphs.diameter_bfs(spec):>5}{len(part.subshells):>10}{prob:>9.4f}{t_star:>9.4f}"
        )

    # the constrained permutation graph is not distance-transitive, so its shells split
    spec = graphs.table_graphs()["constrained_permutation"]
    part = graphs.subshell_partition(spec)
    print("\nconstrained permutation (d, k, |N_dk|):", part.signature)


if __name__ == "__main__":
    main()
