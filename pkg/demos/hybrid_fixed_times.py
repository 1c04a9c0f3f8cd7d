"""Fix every walk time to a subshell-optimal value and optimise only the phase shifts."""
from __future__ import annotations

import numpy as np

from ctqwva import metrics, optimize, problems, qva

inst = problems.builtin_instances()["ScheduleB"]
model = metrics.hamming_model(inst.n, inst.m)
times = optimize.subshell_optimal_times(model)
for d, t in enumerate(times, start=1):
    print(f"d={d}: t={t:.5f}  |w_d(t)|={abs(metrics.hamming_coefficient(inst.n, inst.m, d, t)):.4f}")

# |w_d| repeats with period 2 pi / m, so shifted times are equally good
t = times[0] + 2 * np.pi / inst.m
print("shifted by 2pi/m:", abs(metrics.hamming_coefficient(inst.n, inst.m, 1, t)))

ansatz = qva.build_ansatz("qmoa", inst, 5)
res = optimize.hybrid_optimize(ansatz, times, repeats=2, seed=0, max_iter=400)
print(f"QMOA(gamma) p=5: ratio {res.best_ratio:.4f}, P(opt) {res.incumbent.optimum_probability:.3f}")
