"""Mixer graphs: construction, structural quantities and subshell partitions."""
from __future__ import annotations

import csv
from collections import deque
from collections.abc import Sequence
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations, product
from pathlib import Path

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import shortest_path

from . import combinatorics as cb

DENSE_LIMIT = 4096


@dataclass(frozen=True)
class Hamming:
    n: int
    m: int

    def __post_init__(self) -> None:
        if self.n < 1 or self.m < 1:
            raise ValueError("Hamming graph needs n, m >= 1")


@dataclass(frozen=True)
class Complete:
    N: int

    def __post_init__(self) -> None:
        if self.N < 1:
            raise ValueError("complete graph needs N >= 1")


@dataclass(frozen=True)
class ConstrainedPermutation:
    """Permutations of one multiset, adjacent when they differ by a transposition."""

    counts: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "counts", tuple(int(c) for c in self.counts))

    @property
    def n(self) -> int:
        return sum(self.counts)


@dataclass(frozen=True)
class KPartite:
    sizes: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "sizes", tuple(int(c) for c in self.sizes))
        if not self.sizes or any(s < 1 for s in self.sizes):
            raise ValueError("K-partite part sizes must all be >= 1")


@dataclass(frozen=True)
class MoveClosure:
    """Bitstrings reachable from ``seed`` by repeated two-qubit moves.

    ``kind="swap"`` exchanges the two bits (an XY hopping term) and
    ``kind="flip"`` inverts both (an XX-type pair flip).
    """

    seed: tuple[int, ...]
    moves: tuple[tuple[int, int], ...]
    kind: str = "swap"

    def __post_init__(self) -> None:
        object.__setattr__(self, "seed", tuple(int(b) for b in self.seed))
        moves = tuple(tuple(sorted((int(a), int(b)))) for a, b in self.moves)
        if len(set(moves)) != len(moves) or any(a == b for a, b in moves):
            raise ValueError("moves must be distinct unordered pairs of different qubits")
        object.__setattr__(self, "moves", moves)
        if self.kind not in ("swap", "flip"):
            raise ValueError(f"unknown move kind {self.kind!r}")


GraphSpec = Hamming | Complete | ConstrainedPermutation | KPartite | MoveClosure


def ring_moves(qubits: Sequence[int]) -> tuple[tuple[int, int], ...]:
    q = list(qubits)
    if len(q) < 2:
        return ()
    if len(q) == 2:
        return ((q[0], q[1]),)
    return tuple((q[i], q[(i + 1) % len(q)]) for i in range(len(q)))


def all_pair_moves(qubits: Sequence[int]) -> tuple[tuple[int, int], ...]:
    return tuple(combinations(qubits, 2))


def apply_move(bits: Sequence[int], move: tuple[int, int], kind: str) -> tuple[int, ...] | None:
    """Result of one move, or ``None`` when the move leaves the state unchanged."""
    a, b = move
    out = list(bits)
    if kind == "swap":
        if out[a] == out[b]:
            return None
        out[a], out[b] = out[b], out[a]
    else:
        out[a] ^= 1
        out[b] ^= 1
    return tuple(out)


def _closure(spec: MoveClosure) -> list[tuple[int, ...]]:
    seen = {spec.seed}
    queue = deque([spec.seed])
    while queue:
        v = queue.popleft()
        for mv in spec.moves:
            u = apply_move(v, mv, spec.kind)
            if u is not None and u not in seen:
                seen.add(u)
                queue.append(u)
    return sorted(seen)


@lru_cache(maxsize=64)
def vertex_labels(spec: GraphSpec) -> tuple:
    if isinstance(spec, Hamming):
        return tuple(product(range(spec.m), repeat=spec.n))
    if isinstance(spec, Complete):
        return tuple(range(spec.N))
    if isinstance(spec, KPartite):
        return tuple(range(sum(spec.sizes)))
    if isinstance(spec, ConstrainedPermutation):
        size = cb.multinomial(spec.n, spec.counts)
        return tuple(cb.unrank_in_multiset(i, spec.counts) for i in range(size))
    if isinstance(spec, MoveClosure):
        return tuple(_closure(spec))
    raise TypeError(f"unsupported graph spec {spec!r}")


def vertex_count(spec: GraphSpec) -> int:
    if isinstance(spec, Hamming):
        return spec.m**spec.n
    if isinstance(spec, Complete):
        return spec.N
    if isinstance(spec, KPartite):
        return sum(spec.sizes)
    if isinstance(spec, ConstrainedPermutation):
        return cb.multinomial(spec.n, spec.counts)
    return len(vertex_labels(spec))


@lru_cache(maxsize=64)
def neighbor_lists(spec: GraphSpec) -> tuple[tuple[int, ...], ...]:
    """Sorted neighbour indices for every vertex, in vertex-label order."""
    N = vertex_count(spec)
    if isinstance(spec, Complete):
        return tuple(tuple(u for u in range(N) if u != v) for v in range(N))
    if isinstance(spec, KPartite):
        part = np.repeat(np.arange(len(spec.sizes)), spec.sizes)
        return tuple(tuple(np.flatnonzero(part != part[v]).tolist()) for v in range(N))
    if isinstance(spec, Hamming):
        n, m = spec.n, spec.m
        strides = [m ** (n - 1 - i) for i in range(n)]
        out = []
        for v in range(N):
            nbrs = []
            for i, stride in enumerate(strides):
                digit = (v // stride) % m
                base = v - digit * stride
                nbrs.extend(base + x * stride for x in range(m) if x != digit)
            out.append(tuple(sorted(nbrs)))
        return tuple(out)
    labels = vertex_labels(spec)
    if isinstance(spec, ConstrainedPermutation):
        m = len(spec.counts)
        return tuple(
            tuple(sorted(cb.rank_in_multiset(u, m) for u in cb.transposition_neighbors(s, m)))
            for s in labels
        )
    if isinstance(spec, MoveClosure):
        index = {s: i for i, s in enumerate(labels)}
        out = []
        for s in labels:
            nbrs = {index[u] for mv in spec.moves if (u := apply_move(s, mv, spec.kind)) is not None}
            out.append(tuple(sorted(nbrs)))
        return tuple(out)
    raise TypeError(f"unsupported graph spec {spec!r}")


def sparse_adjacency(spec: GraphSpec) -> sp.csr_matrix:
    nbrs = neighbor_lists(spec)
    indptr = np.zeros(len(nbrs) + 1, dtype=np.int64)
    indptr[1:] = np.cumsum([len(x) for x in nbrs])
    indices = np.fromiter((u for x in nbrs for u in x), dtype=np.int64, count=int(indptr[-1]))
    data = np.ones(len(indices))
    return sp.csr_matrix((data, indices, indptr), shape=(len(nbrs), len(nbrs)))


def build_adjacency(spec: GraphSpec, dense_limit: int = DENSE_LIMIT) -> np.ndarray:
    N = vertex_count(spec)
    if N > dense_limit:
        raise ValueError(f"{N} vertices exceeds the dense limit of {dense_limit}")
    return sparse_adjacency(spec).toarray()


def laplacian(spec: GraphSpec, dense_limit: int = DENSE_LIMIT) -> np.ndarray:
    A = build_adjacency(spec, dense_limit)
    return np.diag(A.sum(axis=1)) - A


def degree(spec: GraphSpec) -> int:
    """Closed-form degree of a regular graph family."""
    if isinstance(spec, Hamming):
        return spec.n * (spec.m - 1)
    if isinstance(spec, Complete):
        return spec.N - 1
    if isinstance(spec, ConstrainedPermutation):
        c = spec.counts
        return sum(c[i] * c[j] for i in range(len(c)) for j in range(i))
    if isinstance(spec, KPartite):
        if len(set(spec.sizes)) != 1:
            raise ValueError("K-partite graph with unequal parts is not regular")
        return sum(spec.sizes) - spec.sizes[0]
    return degree_bfs(spec)


def degree_bfs(spec: GraphSpec) -> int:
    degs = {len(x) for x in neighbor_lists(spec)}
    if len(degs) != 1:
        raise ValueError(f"graph is not regular, degrees {sorted(degs)}")
    return degs.pop()


def degree_upper_bound(spec: ConstrainedPermutation) -> int:
    """``floor(n^2 / M)`` with ``M = m(m-1)/2`` for constrained permutation graphs."""
    m = len(spec.counts)
    if m < 2:
        return 0
    return spec.n**2 // (m * (m - 1) // 2)


def diameter(spec: GraphSpec) -> int:
    if isinstance(spec, Hamming):
        return spec.n if spec.m > 1 else 0
    if isinstance(spec, Complete):
        return 1 if spec.N > 1 else 0
    if isinstance(spec, ConstrainedPermutation):
        return min(spec.n - c for c in spec.counts if c > 0)
    if isinstance(spec, KPartite):
        if len(spec.sizes) == 1:
            if spec.sizes[0] > 1:
                raise ValueError("single-part K-partite graph is disconnected")
            return 0
        return 2 if max(spec.sizes) > 1 else 1
    return diameter_bfs(spec)


def diameter_bfs(spec: GraphSpec) -> int:
    D = shortest_path(sparse_adjacency(spec), unweighted=True, directed=False)
    if np.isinf(D).any():
        raise ValueError("graph is disconnected")
    return int(D.max())


def bfs_distances(spec: GraphSpec, reference: int) -> np.ndarray:
    nbrs = neighbor_lists(spec)
    dist = np.full(len(nbrs), -1, dtype=np.int64)
    dist[reference] = 0
    queue = deque([reference])
    while queue:
        v = queue.popleft()
        for u in nbrs[v]:
            if dist[u] < 0:
                dist[u] = dist[v] + 1
                queue.append(u)
    return dist


def shell_sizes(spec: GraphSpec, reference: int = 0) -> list[int]:
    dist = bfs_distances(spec, reference)
    if (dist < 0).any():
        raise ValueError("graph is disconnected")
    return np.bincount(dist).tolist()


def hamming_shell_size(n: int, m: int, d: int) -> int:
    from math import comb

    return comb(n, d) * (m - 1) ** d


@lru_cache(maxsize=32)
def adjacency_eigh(spec: GraphSpec) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues and orthonormal eigenvectors of the adjacency matrix."""
    return np.linalg.eigh(build_adjacency(spec))


def walk_columns(spec: GraphSpec, reference: int, times: Sequence[float]) -> np.ndarray:
    """``<v| exp(-i t A) |reference>`` for every vertex ``v`` (rows) and time (columns)."""
    lam, V = adjacency_eigh(spec)
    phases = np.exp(-1j * np.outer(lam, np.asarray(times, dtype=float)))
    return V @ (V[reference][:, None] * phases)


@dataclass
class ShellPartition:
    reference: int
    shells: list[list[int]]
    subshells: list[tuple[int, int, list[int]]] = field(default_factory=list)

    @property
    def signature(self) -> list[tuple[int, int, int]]:
        return sorted((d, k, len(v)) for d, k, v in self.subshells)

    def labels(self, N: int) -> np.ndarray:
        """Subshell number of every vertex, in the order of ``self.subshells``."""
        out = np.full(N, -1, dtype=np.int64)
        for i, (_, _, members) in enumerate(self.subshells):
            out[members] = i
        return out


def subshell_partition(
    spec: GraphSpec,
    reference: int = 0,
    t_samples: int = 7,
    tol: float = 1e-9,
    seed: int = 0,
) -> ShellPartition:
    """Group vertices whose walk amplitude from ``reference`` agrees at random times.

    Vertices in one automorphism orbit always share an amplitude, so equal
    fingerprints over several random ``t`` identify the subshells.
    """
    dist = bfs_distances(spec, reference)
    if (dist < 0).any():
        raise ValueError("graph is disconnected")
    times = np.random.default_rng(seed).uniform(0.0, np.pi, t_samples)
    times[times == 0.0] = np.pi
    cols = walk_columns(spec, reference, times)
    shells = [np.flatnonzero(dist == d).tolist() for d in range(dist.max() + 1)]
    subshells: list[tuple[int, int, list[int]]] = []
    for d, shell in enumerate(shells):
        reps: list[np.ndarray] = []
        groups: list[list[int]] = []
        for v in shell:
            for rep, group in zip(reps, groups):
                if np.max(np.abs(cols[v] - rep)) < tol:
                    group.append(v)
                    break
            else:
                reps.append(cols[v])
                groups.append([v])
        subshells.extend((d, k, g) for k, g in enumerate(groups))
    return ShellPartition(reference, shells, subshells)


def export_edge_list(spec: GraphSpec, path: str | Path) -> int:
    """Write one ``u,v`` line per undirected edge; returns the edge count."""
    edges = 0
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        for v, nbrs in enumerate(neighbor_lists(spec)):
            for u in nbrs:
                if v < u:
                    writer.writerow((v, u))
                    edges += 1
    return edges


def table_graphs() -> dict[str, GraphSpec]:
    """The six benchmark mixer graphs, keyed by short name."""
    return {
        "hamming_7_2": Hamming(7, 2),
        "hamming_3_5": Hamming(3, 5),
        "constrained_permutation": ConstrainedPermutation((1, 5, 2)),
        "parity": MoveClosure((1, 1, 1, 1, 0, 0, 0, 0, 0), all_pair_moves(range(9)), "swap"),
        "permutation": MoveClosure((0,) * 8, all_pair_moves(range(8)), "flip"),
        "complete_128": Complete(128),
    }
