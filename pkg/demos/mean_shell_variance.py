"""Shell-by-shell cost variance for the two scheduling encodings."""
from __future__ import annotations

from ctqwva import metrics, problems

for name, inst in problems.builtin_instances().items():
    compact = problems.pms_cost_table(inst)
    binary, _ = problems.pms_binary_cost_table(inst)
    qmoa = metrics.msv_hamming(compact / compact.mean(), inst.n, inst.m)
    qaoa = metrics.msv_hamming(binary / binary.mean(), inst.n * inst.bits, 2)
    print(f"{name}: QMOA MSV {qmoa.msv:.3f}  QAOA MSV {qaoa.msv:.3f}")
    print("  QMOA per shell:", [round(float(v), 3) for v in qmoa.per_shell])
    sampled = metrics.msv_hamming(compact / compact.mean(), inst.n, inst.m, mode="sampled", k=256, seed=0)
    print(f"  sampled (k=256): {sampled.msv:.3f}")
