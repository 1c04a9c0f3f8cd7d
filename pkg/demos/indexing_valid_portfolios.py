"""Index the valid portfolio space by generating multiset, then walk it with the neighbour oracle."""
from __future__ import annotations

from ctqwva import combinatorics as cb
from ctqwva import problems as pb

inst = pb.synthetic_portfolio(6, 2, seed=0)
part = pb.portfolio_partition(inst)
print("multiplicity vectors (short, long, no):", part.parts)
print("part sizes:", part.sizes, "total valid:", part.total)

for i in (0, 17, part.total - 1):
    s = cb.global_unrank(i, part)
    print(f"index {i:>3} -> {s} -> index {cb.global_rank(s, part)}")

s = cb.global_unrank(30, part)
print(f"\n{s} has {cb.transposition_degree(s, 3)} transposition neighbours:")
for t in cb.transposition_neighbors(s, 3)[:5]:
    print("  ", t, "rank", cb.global_rank(t, part))

# the four-asset, A=-1 space is small enough to list its Hilbert-space encodings
full = pb.expand_to_hilbert(pb.synthetic_portfolio(4, -1, seed=0))
print("\nn=4, A=-1:", len(full.degeneracy), "solutions encoded by", int(full.valid.sum()), "basis states")
