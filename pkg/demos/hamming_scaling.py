"""How single-layer convergence on Hamming graphs scales with string length n and alphabet size m."""
from __future__ import annotations

from ctqwva import metrics

print("  n   m      Prob*   amplification   (9-24/m+16/m^2)^n")
for m in (2, 3, 4, 5, 8, 16):
    for n in (1, 2, 4, 6):
        amp = metrics.amplification(n, m)
        print(f"{n:>3} {m:>3} {amp['prob']:>10.5f} {amp['amplification']:>15.3f} {amp['approx']:>19.3f}")

# Prob* factorises over the n copies of K_m
n, m = 5, 7
print("\nProb*(5,7) =", metrics.hamming_convergence_potential(n, m))
print("Prob*(1,7)^5 =", metrics.hamming_convergence_potential(1, m) ** n)
