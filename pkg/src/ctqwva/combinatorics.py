"""Exact counting, multiset enumeration and ranking of multiset permutations.

Solutions are tuples of alphabet indices ``0..m-1``. All counts are Python
integers so nothing overflows for large ``n``.
"""
from __future__ import annotations

from bisect import bisect_right
from collections.abc import Iterator, Sequence
from dataclasses import dataclass
from math import comb, factorial

Solution = tuple[int, ...]


def hamming_distance(a: Sequence[int], b: Sequence[int]) -> int:
    if len(a) != len(b):
        raise ValueError(f"length mismatch: {len(a)} != {len(b)}")
    return sum(1 for x, y in zip(a, b) if x != y)


def multinomial(n: int, counts: Sequence[int]) -> int:
    """Number of distinct permutations of a multiset with the given counts."""
    if any(c < 0 for c in counts):
        raise ValueError("counts must be non-negative")
    if sum(counts) != n:
        raise ValueError(f"counts sum to {sum(counts)}, expected {n}")
    out = factorial(n)
    for c in counts:
        out //= factorial(c)
    return out


def weak_composition_count(n: int, m: int) -> int:
    """Number of ways to write ``n`` as an ordered sum of ``m`` non-negative parts."""
    if n < 0 or m < 1:
        raise ValueError("need n >= 0 and m >= 1")
    return comb(n + m - 1, m - 1)


def weak_compositions(n: int, m: int) -> Iterator[tuple[int, ...]]:
    """All weak compositions of ``n`` into ``m`` parts, lexicographic on the counts."""
    if m == 1:
        yield (n,)
        return
    for first in range(n + 1):
        for rest in weak_compositions(n - first, m - 1):
            yield (first, *rest)


def counts_of(s: Sequence[int], m: int | None = None) -> tuple[int, ...]:
    """Multiplicity vector of ``s`` over the alphabet ``0..m-1``."""
    if m is None:
        m = max(s) + 1 if len(s) else 1
    out = [0] * m
    for x in s:
        if not 0 <= x < m:
            raise ValueError(f"symbol {x} outside alphabet of size {m}")
        out[x] += 1
    return tuple(out)


@dataclass(frozen=True)
class MultisetPartition:
    """Ordered multiplicity vectors whose permutation sets tile the valid space."""

    n: int
    m: int
    parts: tuple[tuple[int, ...], ...]
    sizes: tuple[int, ...]
    offsets: tuple[int, ...]

    @classmethod
    def from_parts(cls, n: int, m: int, parts: Sequence[Sequence[int]]) -> MultisetPartition:
        parts = tuple(tuple(int(c) for c in p) for p in parts)
        for p in parts:
            if len(p) != m:
                raise ValueError(f"part {p} does not have {m} entries")
        sizes = tuple(multinomial(n, p) for p in parts)
        offsets = [0]
        for size in sizes:
            offsets.append(offsets[-1] + size)
        return cls(n, m, parts, sizes, tuple(offsets[:-1]))

    @property
    def total(self) -> int:
        return sum(self.sizes)

    def part_index(self, counts: Sequence[int]) -> int:
        try:
            return self.parts.index(tuple(counts))
        except ValueError:
            raise ValueError(f"multiplicity vector {tuple(counts)} is not in the partition") from None

    def part_of_index(self, i: int) -> int:
        if not 0 <= i < self.total:
            raise IndexError(f"index {i} outside [0, {self.total})")
        return bisect_right(self.offsets, i) - 1


def enumerate_valid_multisets(n: int, z: Sequence[int], A: int) -> MultisetPartition:
    """Multiplicity vectors ``P`` with ``sum(P) == n`` and ``sum(P[j] * z[j]) == A``.

    ``z[j]`` is the constraint value of alphabet symbol ``j``; the result is in
    lexicographic order of the count vectors.
    """
    if len(set(z)) != len(z):
        raise ValueError("constraint map must be injective")
    m = len(z)
    parts = [p for p in weak_compositions(n, m) if sum(c * v for c, v in zip(p, z)) == A]
    return MultisetPartition.from_parts(n, m, parts)


def portfolio_multisets(n: int, A: int, long_sign: int = 1) -> list[tuple[int, int, int]]:
    """Closed-form (short, long, no) counts whose net position equals ``A``.

    The net position is ``long_sign * (long - short)``. Each step trades two
    no-positions for one long and one short.
    """
    if abs(A) > n:
        return []
    net = A * long_sign
    out = []
    for k in range((n - abs(A)) // 2 + 1):
        long_, short = (net + k, k) if net >= 0 else (k, -net + k)
        out.append((short, long_, n - abs(A) - 2 * k))
    return out


def rank_in_multiset(s: Sequence[int], m: int | None = None) -> int:
    """Lexicographic rank of ``s`` among the permutations of its own multiset."""
    counts = list(counts_of(s, m))
    remaining = len(s)
    n_perm = multinomial(remaining, counts)
    rank = 0
    for x in s:
        # permutations of the remaining multiset that start with a smaller symbol
        smaller = sum(counts[:x])
        rank += n_perm * smaller // remaining
        n_perm = n_perm * counts[x] // remaining
        counts[x] -= 1
        remaining -= 1
    return rank


def unrank_in_multiset(i: int, counts: Sequence[int]) -> Solution:
    counts = list(counts)
    remaining = sum(counts)
    n_perm = multinomial(remaining, counts)
    if not 0 <= i < n_perm:
        raise IndexError(f"rank {i} outside [0, {n_perm})")
    out = []
    while remaining:
        prefix = 0
        for x, c in enumerate(counts):
            if c == 0:
                continue
            block = n_perm * c // remaining
            if i < prefix + block:
                out.append(x)
                i -= prefix
                n_perm = block
                counts[x] -= 1
                remaining -= 1
                break
            prefix += block
    return tuple(out)


def global_rank(s: Sequence[int], partition: MultisetPartition) -> int:
    k = partition.part_index(counts_of(s, partition.m))
    return partition.offsets[k] + rank_in_multiset(s, partition.m)


def global_unrank(i: int, partition: MultisetPartition) -> Solution:
    k = partition.part_of_index(i)
    return unrank_in_multiset(i - partition.offsets[k], partition.parts[k])


def transposition_degree(s: Sequence[int], m: int | None = None) -> int:
    """Number of distinct solutions reachable by one value-changing transposition."""
    counts = counts_of(s, m)
    total = 0
    for j in range(len(counts)):
        for k in range(j + 1, len(counts)):
            total += counts[j] * counts[k]
    return total


def nth_transposition_neighbor(s: Sequence[int], l: int, m: int | None = None) -> Solution:
    """The ``l``-th neighbour of ``s`` under value-changing transpositions.

    Symbol pairs ``(j, k)`` with ``j < k`` are visited in lexicographic order.
    Within a pair the positions are taken row-major over the ascending index
    lists of ``j`` and ``k``.
    """
    if m is None:
        m = max(s) + 1 if len(s) else 1
    positions: list[list[int]] = [[] for _ in range(m)]
    for idx, x in enumerate(s):
        positions[x].append(idx)
    if l < 0:
        raise IndexError("neighbour index must be non-negative")
    for j in range(m):
        for k in range(j + 1, m):
            block = len(positions[j]) * len(positions[k])
            if l < block:
                a = positions[j][l // len(positions[k])]
                b = positions[k][l % len(positions[k])]
                out = list(s)
                out[a], out[b] = out[b], out[a]
                return tuple(out)
            l -= block
    raise IndexError("neighbour index exceeds the degree")


def transposition_neighbors(s: Sequence[int], m: int | None = None) -> list[Solution]:
    return [nth_transposition_neighbor(s, l, m) for l in range(transposition_degree(s, m))]
