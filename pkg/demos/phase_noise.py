"""Perturb phase-optimal costs with noise and watch the convergence potential degrade."""
from __future__ import annotations

import numpy as np

from ctqwva import graphs, metrics

model = metrics.graph_model(graphs.Complete(128))
t_star = metrics.optimal_walk_time(model)
print(f"K128: t* = {t_star:.5f} (pi/128 = {np.pi / 128:.5f})")
for sigma2 in (0.0, 0.01, 0.05, 0.1):
    runs = [metrics.variance_adjusted_convergence(model, sigma2, seed, 8, t_star) for seed in range(5)]
    prob = np.mean([r.probability for r in runs])
    phi = np.mean([r.discrepancy for r in runs])
    print(f"sigma^2={sigma2:<5} mean Prob {prob:.4f}  mean phase discrepancy {phi:.3f}")
