"""QMOA against QAOA on a parallel machine scheduling instance.

Depth 3 with two repeats keeps this quick; the acceptance suite runs the
full depth-5 protocol.
"""
from __future__ import annotations

from ctqwva import optimize, problems, qva

inst = problems.builtin_instances()["ScheduleB"]
print(f"{inst.name}: {inst.n} jobs on {inst.m} machines")

for algorithm in ("qmoa", "qaoa"):
    ansatz = qva.build_ansatz(algorithm, inst, 3)
    ladder = optimize.depth_ladder(ansatz, repeats=2, seed=0, max_iter=300)
    for p, res in ladder.items():
        probs = [r.optimum_probability for r in res.runs]
        print(f"{algorithm} p={p}: best ratio {res.best_ratio:.4f}, best P(opt) {max(probs):.3f}")
    best = ladder[3].incumbent
    state = ansatz.evolve(best.theta)
    print("  most likely assignments:")
    for row in qva.measurement_report(state, ansatz.costs, k=3, decode=ansatz.decode):
        print(f"    {row['solution']}  p={row['probability']:.3f}  phase={row['phase']:+.3f}")
