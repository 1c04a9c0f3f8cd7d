"""Parameter optimisation: adaptive Nelder-Mead, seeded multi-start and fixed-time hybrids."""
from __future__ import annotations

import multiprocessing
from collections.abc import Callable, Sequence
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from . import metrics
from .qva import Ansatz

TWO_PI = 2.0 * np.pi


@dataclass
class OptResult:
    x: np.ndarray
    fun: float
    nfev: int
    nit: int
    converged: bool
    trace: list[tuple[int, float]] = field(default_factory=list)


def nelder_mead(
    objective: Callable[[np.ndarray], float],
    x0: Sequence[float],
    max_iter: int = 1000,
    tol: float = 1e-9,
    max_fev: int | None = None,
) -> OptResult:
    """Downhill simplex with dimension-adaptive reflection/expansion/contraction/shrink.

    Coefficients follow Gao and Han: ``1``, ``1 + 2/n``, ``0.75 - 1/(2n)`` and
    ``1 - 1/n``. Stops when both the simplex extent and the spread of
    objective values fall below ``tol``, or after ``max_iter`` iterations.
    """
    x0 = np.asarray(x0, dtype=float).ravel()
    n = x0.size
    rho, chi = 1.0, 1.0 + 2.0 / n
    psi, sigma = 0.75 - 1.0 / (2.0 * n), 1.0 - 1.0 / n
    max_fev = max_fev if max_fev is not None else 200 * n * max_iter
    nfev = 0

    def f(x: np.ndarray) -> float:
        nonlocal nfev
        nfev += 1
        val = float(objective(x))
        if np.isnan(val):
            raise FloatingPointError(f"objective returned NaN at {x.tolist()}")
        return val

    sim = np.empty((n + 1, n))
    sim[0] = x0
    for i in range(n):
        y = x0.copy()
        y[i] = y[i] * 1.05 if y[i] != 0 else 0.00025
        sim[i + 1] = y
    fsim = np.array([f(x) for x in sim])
    trace: list[tuple[int, float]] = []
    it = 0
    converged = False
    while it < max_iter and nfev < max_fev:
        order = np.argsort(fsim, kind="stable")
        sim, fsim = sim[order], fsim[order]
        trace.append((it, float(fsim[0])))
        if np.max(np.abs(sim[1:] - sim[0])) <= tol and np.max(np.abs(fsim[0] - fsim[1:])) <= tol:
            converged = True
            break
        it += 1
        centroid = sim[:-1].mean(axis=0)
        xr = centroid + rho * (centroid - sim[-1])
        fr = f(xr)
        shrink = False
        if fr < fsim[0]:
            xe = centroid + rho * chi * (centroid - sim[-1])
            fe = f(xe)
            sim[-1], fsim[-1] = (xe, fe) if fe < fr else (xr, fr)
        elif fr < fsim[-2]:
            sim[-1], fsim[-1] = xr, fr
        elif fr < fsim[-1]:
            xc = centroid + psi * rho * (centroid - sim[-1])
            fc = f(xc)
            if fc <= fr:
                sim[-1], fsim[-1] = xc, fc
            else:
                shrink = True
        else:
            xcc = centroid - psi * (centroid - sim[-1])
            fcc = f(xcc)
            if fcc < fsim[-1]:
                sim[-1], fsim[-1] = xcc, fcc
            else:
                shrink = True
        if shrink:
            for j in range(1, n + 1):
                sim[j] = sim[0] + sigma * (sim[j] - sim[0])
                fsim[j] = f(sim[j])
    order = np.argsort(fsim, kind="stable")
    return OptResult(sim[order[0]].copy(), float(fsim[order[0]]), nfev, it, converged, trace)


@dataclass
class RunSummary:
    repeat: int
    seed: int
    theta: np.ndarray
    objective: float
    ratio: float
    optimum_probability: float
    result: OptResult


@dataclass
class MultistartResult:
    runs: list[RunSummary]

    @property
    def incumbent(self) -> RunSummary:
        return min(self.runs, key=lambda r: r.objective)

    @property
    def best_ratio(self) -> float:
        return max(r.ratio for r in self.runs)

    def ratio_stats(self) -> dict[str, float]:
        ratios = np.array([r.ratio for r in self.runs])
        return {"mean": float(ratios.mean()), "min": float(ratios.min()), "max": float(ratios.max())}


def repeat_seeds(seed: int, repeats: int) -> list[int]:
    """Independent per-repeat seeds derived from one root seed."""
    children = np.random.SeedSequence(seed).spawn(repeats)
    return [int(c.generate_state(1)[0]) for c in children]


def _run_full(ansatz: Ansatz, repeat: int, seed: int, max_iter: int, tol: float) -> RunSummary:
    theta0 = np.random.default_rng(seed).uniform(0.0, TWO_PI, ansatz.n_params)
    res = nelder_mead(ansatz.objective, theta0, max_iter, tol)
    state = ansatz.evolve(res.x)
    return RunSummary(
        repeat, seed, res.x, res.fun, ansatz.approximation_ratio(state), ansatz.optimum_probability(state), res
    )


def _run_hybrid(
    ansatz: Ansatz, repeat: int, seed: int, times: Sequence[float], max_iter: int, tol: float
) -> RunSummary:
    schedule = hybrid_schedule(ansatz, times)

    def full_theta(gammas: np.ndarray) -> np.ndarray:
        theta = schedule.copy()
        theta[:, 0] = gammas
        return theta.ravel()

    gamma0 = np.random.default_rng(seed).uniform(0.0, TWO_PI, ansatz.p)
    res = nelder_mead(lambda g: ansatz.objective(full_theta(g)), gamma0, max_iter, tol)
    theta = full_theta(res.x)
    state = ansatz.evolve(theta)
    return RunSummary(
        repeat, seed, theta, res.fun, ansatz.approximation_ratio(state), ansatz.optimum_probability(state), res
    )


# Ansatz objects hold closures and cannot be pickled; forked workers inherit them here.
_SHARED: dict[str, Ansatz] = {}


def _call_shared(fn: Callable, *args) -> RunSummary:
    return fn(_SHARED["ansatz"], *args)


def _dispatch(ansatz: Ansatz, tasks: list[tuple], workers: int) -> list:
    """Run ``fn(ansatz, *args)`` for every task; results keep task order."""
    if workers <= 1:
        return [fn(ansatz, *args) for fn, *args in tasks]
    _SHARED["ansatz"] = ansatz
    try:
        ctx = multiprocessing.get_context("fork")
        with ProcessPoolExecutor(max_workers=workers, mp_context=ctx) as pool:
            futures = [pool.submit(_call_shared, fn, *args) for fn, *args in tasks]
            return [fut.result() for fut in futures]
    finally:
        _SHARED.clear()


def multistart(
    ansatz: Ansatz,
    repeats: int = 5,
    seed: int = 0,
    max_iter: int = 1000,
    tol: float = 1e-9,
    workers: int = 1,
) -> MultistartResult:
    """Nelder-Mead from ``repeats`` starts drawn uniformly from ``[0, 2 pi)``."""
    if repeats < 1:
        raise ValueError("need at least one repeat")
    seeds = repeat_seeds(seed, repeats)
    tasks = [(_run_full, i, s, max_iter, tol) for i, s in enumerate(seeds)]
    return MultistartResult(_dispatch(ansatz, tasks, workers))


def _run_ladder(ansatz: Ansatz, repeat: int, seed: int, max_iter: int, tol: float) -> list[RunSummary]:
    rng = np.random.default_rng(seed)
    theta = np.zeros(0)
    out = []
    for p in range(1, ansatz.p + 1):
        layer = replace(ansatz, p=p)
        theta0 = np.concatenate([theta, rng.uniform(0.0, TWO_PI, ansatz.params_per_layer)])
        res = nelder_mead(layer.objective, theta0, max_iter, tol)
        theta = res.x
        state = layer.evolve(theta)
        out.append(
            RunSummary(
                repeat, seed, theta, res.fun, layer.approximation_ratio(state), layer.optimum_probability(state), res
            )
        )
    return out


def depth_ladder(
    ansatz: Ansatz,
    repeats: int = 5,
    seed: int = 0,
    max_iter: int = 1000,
    tol: float = 1e-9,
    workers: int = 1,
) -> dict[int, MultistartResult]:
    """Optimise depths ``1..p`` in turn, each warm-started from the previous optimum.

    The new layer's parameters are drawn uniformly from ``[0, 2 pi)``; every
    depth gets its own ``max_iter`` budget. Returns one result per depth.
    """
    if repeats < 1:
        raise ValueError("need at least one repeat")
    seeds = repeat_seeds(seed, repeats)
    tasks = [(_run_ladder, i, s, max_iter, tol) for i, s in enumerate(seeds)]
    per_repeat = _dispatch(ansatz, tasks, workers)
    return {p: MultistartResult([runs[p - 1] for runs in per_repeat]) for p in range(1, ansatz.p + 1)}


def subshell_optimal_times(model: metrics.CoefficientModel, n_grid: int = 1024) -> list[float]:
    """One walk time per subshell at distance ``d > 0`` maximising ``|w_{d,k}(t)|``."""
    out = []
    for i in np.flatnonzero(model.d > 0):
        t, _ = metrics.maximize_time(lambda t, i=i: np.abs(model.func(t)[i]), n_grid)
        out.append(float(t))
    return out


def hybrid_schedule(ansatz: Ansatz, times: Sequence[float]) -> np.ndarray:
    """Parameter matrix with layer ``i`` walking for ``times[i mod len(times)]``; gammas zero."""
    if not len(times):
        raise ValueError("need at least one fixed walk time")
    theta = np.zeros((ansatz.p, ansatz.params_per_layer))
    for i in range(ansatz.p):
        theta[i, 1:] = times[i % len(times)]
    return theta


def hybrid_optimize(
    ansatz: Ansatz,
    times: Sequence[float],
    repeats: int = 5,
    seed: int = 0,
    max_iter: int = 1000,
    tol: float = 1e-9,
    workers: int = 1,
) -> MultistartResult:
    """Optimise only the phase-shift parameters with walk times fixed cyclically."""
    seeds = repeat_seeds(seed, repeats)
    tasks = [(_run_hybrid, i, s, times, max_iter, tol) for i, s in enumerate(seeds)]
    return MultistartResult(_dispatch(ansatz, tasks, workers))
