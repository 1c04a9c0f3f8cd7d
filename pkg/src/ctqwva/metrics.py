"""Graph figures of merit: subshell coefficients, convergence potential and shell variance."""
from __future__ import annotations

from collections.abc import Callable, Sequence
from dataclasses import dataclass
from math import comb

import numpy as np

from . import graphs

TWO_PI = 2.0 * np.pi


@dataclass
class CoefficientModel:
    """Walk amplitudes ``w_{d,k}(t)`` from a reference vertex, one per subshell.

    ``func`` maps an array of times to a ``(subshells, times)`` complex array.
    """

    d: np.ndarray
    k: np.ndarray
    sizes: np.ndarray
    func: Callable[[np.ndarray], np.ndarray]

    def __call__(self, t: float | Sequence[float]) -> np.ndarray:
        t_arr = np.atleast_1d(np.asarray(t, dtype=float))
        out = self.func(t_arr)
        return out[:, 0] if np.ndim(t) == 0 else out

    @property
    def vertex_count(self) -> int:
        return int(self.sizes.sum())


@dataclass
class SubshellCoefficients:
    t: float
    entries: list[tuple[int, int, int, complex]]

    def column_norm(self) -> float:
        return float(sum(size * abs(w) ** 2 for _, _, size, w in self.entries))


def hamming_coefficient(n: int, m: int, d: int, t: float | np.ndarray) -> complex | np.ndarray:
    """Closed-form adjacency walk amplitude between Hamming-graph vertices at distance ``d``."""
    if not 0 <= d <= n:
        raise ValueError("need 0 <= d <= n")
    t = np.asarray(t, dtype=float)
    e = np.exp(1j * t * m)
    val = ((-1) ** d / m**n) * np.exp(-1j * t * n * (m - 1)) * (e - 1) ** d * (1 + (m - 1) * e) ** (n - d)
    return complex(val) if val.ndim == 0 else val


def hamming_model(n: int, m: int) -> CoefficientModel:
    ds = np.arange(n + 1)
    sizes = np.array([comb(n, d) * (m - 1) ** d for d in ds], dtype=float)

    def func(t: np.ndarray) -> np.ndarray:
        return np.stack([hamming_coefficient(n, m, int(d), t) for d in ds])

    return CoefficientModel(ds, np.zeros_like(ds), sizes, func)


def graph_model(
    spec: graphs.GraphSpec,
    reference: int = 0,
    partition: graphs.ShellPartition | None = None,
    tol: float = 1e-9,
) -> CoefficientModel:
    """Coefficient model from the adjacency eigendecomposition of an explicit graph."""
    if partition is None:
        partition = graphs.subshell_partition(spec, reference)
    lam, V = graphs.adjacency_eigh(spec)
    reps = np.array([members[0] for _, _, members in partition.subshells])
    weights = V[reps] * V[reference][None, :]
    d = np.array([d for d, _, _ in partition.subshells])
    k = np.array([k for _, k, _ in partition.subshells])
    sizes = np.array([len(mem) for _, _, mem in partition.subshells], dtype=float)

    def func(t: np.ndarray) -> np.ndarray:
        return weights @ np.exp(-1j * np.outer(lam, t))

    return CoefficientModel(d, k, sizes, func)


def subshell_coefficients(
    spec: graphs.GraphSpec,
    reference: int,
    t: float,
    partition: graphs.ShellPartition | None = None,
    tol: float = 1e-10,
) -> SubshellCoefficients:
    """Read ``w_{d,k}(t)`` off the walk column and check it is constant on each subshell."""
    if partition is None:
        partition = graphs.subshell_partition(spec, reference)
    col = graphs.walk_columns(spec, reference, [t])[:, 0]
    entries = []
    for d, k, members in partition.subshells:
        vals = col[members]
        if np.max(np.abs(vals - vals[0])) > tol:
            raise ValueError(f"walk amplitudes vary inside subshell ({d}, {k})")
        entries.append((d, k, len(members), complex(vals[0])))
    return SubshellCoefficients(t, entries)


def _golden_max(f: Callable[[float], float], a: float, b: float, tol: float = 1e-12) -> float:
    ratio = (np.sqrt(5.0) - 1.0) / 2.0
    c, d = b - ratio * (b - a), a + ratio * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - ratio * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + ratio * (b - a)
            fd = f(d)
    return 0.5 * (a + b)


def maximize_time(
    f: Callable[[np.ndarray], np.ndarray],
    n_grid: int = 1024,
    t_max: float = TWO_PI,
    tie_tol: float = 1e-10,
) -> tuple[float, float]:
    """Global maximum of ``f`` over ``(0, t_max]`` by grid scan plus golden-section refinement.

    Every grid local maximum is refined; values within ``tie_tol`` (relative)
    of the best count as ties and the smallest ``t`` wins.
    """
    grid = t_max * np.arange(1, n_grid + 1) / n_grid
    vals = np.asarray(f(grid), dtype=float)
    step = grid[0]
    padded = np.concatenate(([-np.inf], vals, [-np.inf]))
    peaks = np.flatnonzero((padded[1:-1] >= padded[:-2]) & (padded[1:-1] >= padded[2:]))
    scalar = lambda x: float(f(np.array([x]))[0])  # noqa: E731
    best: list[tuple[float, float]] = []
    for j in peaks:
        lo, hi = max(grid[j] - step, 1e-12), min(grid[j] + step, t_max)
        t = _golden_max(scalar, lo, hi)
        cands = [(scalar(t), t), (vals[j], grid[j])]
        best.append(max(cands, key=lambda c: c[0]))
    top = max(v for v, _ in best)
    tied = [t for v, t in best if v >= top - tie_tol * max(1.0, abs(top))]
    t_star = min(tied)
    return t_star, scalar(t_star)


def population_weighted_sum(model: CoefficientModel) -> Callable[[np.ndarray], np.ndarray]:
    return lambda t: model.sizes @ np.abs(model.func(t))


def optimal_walk_time(model: CoefficientModel, n_grid: int = 1024) -> float:
    return maximize_time(population_weighted_sum(model), n_grid)[0]


def convergence_potential(model: CoefficientModel, n_grid: int = 1024) -> float:
    """Single-layer probability at the reference with every subshell phase-aligned.

    Starting from the uniform superposition, aligned phases turn the target
    amplitude into ``sum |w_{d,k}| |N_{d,k}| / sqrt(|V|)``.
    """
    _, best = maximize_time(population_weighted_sum(model), n_grid)
    return float(best**2 / model.vertex_count)


def phase_optimal_costs(model: CoefficientModel, t_star: float) -> np.ndarray:
    """Costs whose phase shift ``exp(-i q)`` cancels the phase of each coefficient."""
    return np.angle(model(t_star))


def circular_distance(a: np.ndarray | float, b: np.ndarray | float) -> np.ndarray:
    diff = np.mod(np.asarray(a) - np.asarray(b), TWO_PI)
    return np.minimum(diff, TWO_PI - diff)


@dataclass
class VarianceAdjusted:
    sigma2: float
    seed: int
    probability: float
    discrepancy: float
    t: float
    gamma: float


def variance_adjusted_convergence(
    model: CoefficientModel,
    sigma2: float,
    seed: int,
    starts: int = 32,
    t_star: float | None = None,
) -> VarianceAdjusted:
    """Target probability with phase-optimal costs perturbed by uniform noise.

    Each vertex cost gets ``Z ~ U(-sqrt(12) sigma, sqrt(12) sigma)``. The
    probability is maximised over ``(t, gamma)`` by multi-start Nelder-Mead,
    one start at the unperturbed optimum ``(t*, 1)``.
    """
    from .optimize import nelder_mead

    if sigma2 < 0:
        raise ValueError("variance must be non-negative")
    rng = np.random.default_rng(seed)
    if t_star is None:
        t_star = optimal_walk_time(model)
    q_star = phase_optimal_costs(model, t_star)
    owner = np.repeat(np.arange(model.sizes.size), model.sizes.astype(int))
    half = np.sqrt(12.0) * np.sqrt(sigma2)
    q = q_star[owner] + rng.uniform(-half, half, owner.size)
    N = owner.size
    n_sub = model.sizes.size

    def amplitude_terms(t: float, gamma: float) -> np.ndarray:
        return model(t)[owner] * np.exp(-1j * gamma * q)

    def neg_prob(x: np.ndarray) -> float:
        return -abs(amplitude_terms(x[0], x[1]).sum()) ** 2 / N

    x0s = [np.array([t_star, 1.0])]
    x0s += [np.array([rng.uniform(0.0, TWO_PI), rng.uniform(0.0, 2.0)]) for _ in range(starts - 1)]
    best = min((nelder_mead(neg_prob, x0, max_iter=1000, tol=1e-10) for x0 in x0s), key=lambda r: r.fun)
    t_opt, g_opt = best.x
    terms = amplitude_terms(t_opt, g_opt)
    ref_phase = np.angle(terms[owner == 0][0])
    dist = circular_distance(np.angle(terms), ref_phase)
    per_sub = np.bincount(owner, weights=dist, minlength=n_sub) / model.sizes
    phi = float(per_sub[1:].mean()) if n_sub > 1 else 0.0
    return VarianceAdjusted(sigma2, seed, -best.fun, phi, float(t_opt), float(g_opt))


def hamming_convergence_potential(n: int, m: int, n_grid: int = 1024) -> float:
    return convergence_potential(hamming_model(n, m), n_grid)


def amplification(n: int, m: int) -> dict[str, float]:
    """Target-state amplification ``m**n * Prob*`` on the ``(n, m)`` Hamming graph.

    ``approx`` is ``(9 - 24/m + 16/m**2) ** n``, meaningful for ``m >= 4``.
    """
    prob = hamming_convergence_potential(n, m)
    approx = (9.0 - 24.0 / m + 16.0 / m**2) ** n if m >= 4 else float("nan")
    return {"n": n, "m": m, "prob": prob, "amplification": m**n * prob, "approx": approx}


@dataclass
class ShellVariance:
    per_shell: np.ndarray
    shell_sizes: np.ndarray
    mode: str
    seed: int | None = None

    @property
    def msv(self) -> float:
        return float(self.per_shell.mean())


def _weight_indicator(n: int, m: int, d: int) -> np.ndarray:
    digits = np.indices((m,) * n)
    return (np.count_nonzero(digits, axis=0) == d).astype(float)


def hamming_shell_moments(costs: np.ndarray, n: int, m: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Shell sums of costs and squared costs around every vertex of the ``(n, m)`` Hamming graph.

    Shell ``d`` of ``s`` is ``s + delta (mod m)`` over offsets of weight ``d``,
    so both sums are cyclic convolutions computed with an n-dimensional FFT.
    Returns ``(s1, s2, sizes)`` with ``s1, s2`` of shape ``(n + 1, m**n)``.
    """
    c = np.asarray(costs, dtype=float).reshape((m,) * n)
    F1, F2 = np.fft.fftn(c), np.fft.fftn(c * c)
    s1 = np.empty((n + 1, c.size))
    s2 = np.empty((n + 1, c.size))
    sizes = np.empty(n + 1)
    for d in range(n + 1):
        ind = _weight_indicator(n, m, d)
        sizes[d] = ind.sum()
        # the weight-d offset set is closed under negation, so correlation equals convolution
        G = np.fft.fftn(ind)
        s1[d] = np.fft.ifftn(F1 * G).real.ravel()
        s2[d] = np.fft.ifftn(F2 * G).real.ravel()
    return s1, s2, sizes


def msv_hamming(
    costs: np.ndarray,
    n: int,
    m: int,
    mode: str = "exact",
    k: int = 512,
    seed: int = 0,
) -> ShellVariance:
    """Mean shell variance of ``costs`` laid out on the ``(n, m)`` Hamming graph.

    The shell variance at distance ``d`` is ``sum_s Var(C(N_d(s))) / |N_d|``
    and the MSV is its mean over ``d = 0..n``. ``mode="sampled"`` estimates the
    sum over ``s`` from ``k`` uniformly drawn reference vertices.
    """
    costs = np.asarray(costs, dtype=float)
    if costs.size != m**n:
        raise ValueError(f"expected {m**n} costs, got {costs.size}")
    sizes = np.array([comb(n, d) * (m - 1) ** d for d in range(n + 1)], dtype=float)
    if mode == "exact":
        # variance is shift invariant; centring curbs cancellation in the FFT sums
        s1, s2, _ = hamming_shell_moments(costs - costs.flat[0], n, m)
        var = np.maximum(s2 / sizes[:, None] - (s1 / sizes[:, None]) ** 2, 0.0)
        var[sizes == 1] = 0.0
        totals = var.sum(axis=1)
        return ShellVariance(totals / sizes, sizes, "exact")
    if mode != "sampled":
        raise ValueError(f"unknown mode {mode!r}")
    rng = np.random.default_rng(seed)
    refs = rng.integers(0, costs.size, size=k)
    digits = np.indices((m,) * n).reshape(n, -1)
    totals = np.zeros(n + 1)
    for s in refs:
        dist = np.count_nonzero(digits != digits[:, s : s + 1], axis=0)
        cnt = np.bincount(dist, minlength=n + 1)
        mean = np.bincount(dist, weights=costs, minlength=n + 1) / cnt
        sq = np.bincount(dist, weights=costs**2, minlength=n + 1) / cnt
        var = np.maximum(sq - mean**2, 0.0)
        var[cnt == 1] = 0.0
        totals += var
    totals *= costs.size / k
    return ShellVariance(totals / sizes, sizes, "sampled", seed)


def msv_graph(spec: graphs.GraphSpec, costs: np.ndarray) -> ShellVariance:
    """Exact mean shell variance on an explicit graph via BFS distances."""
    costs = np.asarray(costs, dtype=float)
    N = graphs.vertex_count(spec)
    if costs.size != N:
        raise ValueError("one cost per vertex required")
    D = graphs.diameter(spec)
    totals = np.zeros(D + 1)
    counts = np.zeros(D + 1)
    for s in range(N):
        dist = graphs.bfs_distances(spec, s)
        cnt = np.bincount(dist, minlength=D + 1)
        mean = np.bincount(dist, weights=costs, minlength=D + 1) / np.maximum(cnt, 1)
        sq = np.bincount(dist, weights=costs**2, minlength=D + 1) / np.maximum(cnt, 1)
        var = np.maximum(sq - mean**2, 0.0)
        var[cnt <= 1] = 0.0
        totals += var
        counts = np.maximum(counts, cnt)
    return ShellVariance(totals / counts, counts, "exact")
