"""Compare the constrained portfolio mixers on one synthetic instance."""
from __future__ import annotations

import numpy as np

from ctqwva import optimize, problems, qva

inst = problems.synthetic_portfolio(6, 2, seed=3)
for algorithm in ("qwoa-cs", "qwoa-cs-disjoint", "qwoa", "qaoaz-complete", "qaoaz-parity"):
    ansatz = qva.build_ansatz(algorithm, inst, 2)
    res = optimize.multistart(ansatz, repeats=2, seed=0, max_iter=300)
    state = ansatz.evolve(res.incumbent.theta)
    leak = float(np.sum(np.abs(state[~ansatz.valid]) ** 2))
    print(f"{algorithm:<18} dim {ansatz.dim:>5}  ratio {res.best_ratio:.4f}  leakage {leak:.1e}")
