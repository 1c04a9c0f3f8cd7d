"""Acceptance suite: one test per criterion, each recording a pass/fail line.

Run with ``pytest tests/test_acceptance.py -v``; the verdicts are printed in
the terminal summary. Optimisation-heavy criteria are marked ``slow``.
"""
from __future__ import annotations

import functools

import numpy as np
import pytest

from ctqwva import combinatorics as cb
from ctqwva import graphs as g
from ctqwva import metrics as mt
from ctqwva import optimize as opt
from ctqwva import problems as pb
from ctqwva import qva
from ctqwva import walks as w

ROOT_SEED = 1
REPEATS = 5
DEPTH = 5


def _check(verdict, number: int, ok: bool, detail: str) -> None:
    verdict(number, ok, detail)
    assert ok, detail


# criterion 1 ---------------------------------------------------------------

TABLE = {
    "hamming_7_2": (128, 7, 7, 8, 1.00),
    "hamming_3_5": (125, 12, 3, 4, 0.91),
    "constrained_permutation": (168, 17, 3, 10, 0.84),
    "parity": (126, 20, 4, 5, 0.94),
    "permutation": (128, 28, 4, 5, 0.62),
    "complete_128": (128, 127, 1, 2, 0.069),
}


def test_c01_graph_characteristics_table(verdict):
    rows, ok = [], True
    for name, spec in g.table_graphs().items():
        part = g.subshell_partition(spec)
        prob = mt.convergence_potential(mt.graph_model(spec, 0, part))
        got = (g.vertex_count(spec), g.degree_bfs(spec), g.diameter_bfs(spec), len(part.subshells))
        want = TABLE[name]
        row_ok = got == want[:4] and abs(prob - want[4]) <= 0.01
        ok &= row_ok
        rows.append(f"{name}={got + (round(prob, 4),)}")
    _check(verdict, 1, ok, "; ".join(rows))


# criterion 2 ---------------------------------------------------------------


def test_c02_hamming_closed_form(verdict):
    rng = np.random.default_rng(ROOT_SEED)
    worst = 0.0
    for n in range(1, 5):
        for m in range(2, 7):
            spec = g.Hamming(n, m)
            A = g.build_adjacency(spec)
            dist = g.bfs_distances(spec, 0)
            for t in rng.uniform(0.0, 2 * np.pi, 20):
                col = w.dense_walk_oracle(A, t)[:, 0]
                closed = np.array([mt.hamming_coefficient(n, m, d, t) for d in range(n + 1)])
                worst = max(worst, float(np.max(np.abs(col - closed[dist]))))
    _check(verdict, 2, worst < 1e-10, f"max |closed form - dense column| = {worst:.2e}")


# criterion 3 ---------------------------------------------------------------


def test_c03_hamming_scaling_laws(verdict):
    single = {m: mt.hamming_convergence_potential(1, m) for m in range(2, 9)}
    power_gap = max(
        abs(mt.hamming_convergence_potential(n, m) - single[m] ** n) for n in range(1, 7) for m in range(2, 9)
    )
    unit_gap = max(abs(mt.hamming_convergence_potential(n, m) - 1.0) for n in range(1, 11) for m in range(2, 5))
    complete_gap = max(
        abs(mt.convergence_potential(mt.graph_model(g.Complete(m))) - (9 - 24 / m + 16 / m**2) / m)
        for m in (8, 16, 64, 128)
    )
    ok = power_gap < 1e-6 and unit_gap < 1e-6 and complete_gap < 1e-3
    _check(
        verdict, 3, ok,
        f"power-law gap {power_gap:.1e}, m<=4 gap {unit_gap:.1e}, complete-graph gap {complete_gap:.1e}",
    )


# criterion 4 ---------------------------------------------------------------


def _positive_count_vectors(max_n: int, limit: int):
    for n in range(1, max_n + 1):
        for k in range(1, n + 1):
            for c in cb.weak_compositions(n - k, k):
                counts = tuple(x + 1 for x in c)
                if cb.multinomial(n, counts) <= limit:
                    yield counts


def test_c04_combinatorics_oracles(verdict):
    checked = perms = 0
    bijection = True
    for counts in _positive_count_vectors(12, 10**4):
        total = cb.multinomial(sum(counts), counts)
        prev = None
        for i in range(total):
            s = cb.unrank_in_multiset(i, counts)
            if cb.counts_of(s, len(counts)) != counts or cb.rank_in_multiset(s, len(counts)) != i:
                bijection = False
            if prev is not None and not prev < s:
                bijection = False
            prev = s
        checked += 1
        perms += total

    def portfolio(n, A):
        return pb.portfolio_partition(pb.synthetic_portfolio(n, A, seed=0)).total

    counts = (portfolio(6, 2), portfolio(8, 2), portfolio(4, -1))
    full = pb.expand_to_hilbert(pb.synthetic_portfolio(4, -1, seed=0))
    degenerate = int(full.valid.sum())
    ok = bijection and counts == (90, 784, 16) and degenerate == 56 and len(full.degeneracy) == 16
    _check(
        verdict, 4, ok,
        f"{checked} multiplicity vectors / {perms} permutations bijective={bijection}; "
        f"valid counts {counts}; Hilbert encodings {degenerate}",
    )


# criterion 5 ---------------------------------------------------------------


def test_c05_kpartite_walk(verdict):
    rng = np.random.default_rng(ROOT_SEED)
    worst = 0.0
    for sizes in [(1, 1), (2, 3), (15, 60, 15)]:
        L = w.kpartite_laplacian(sizes)
        for _ in range(10):
            t = rng.uniform(0.0, 2 * np.pi)
            psi = rng.normal(size=sum(sizes)) + 1j * rng.normal(size=sum(sizes))
            psi /= np.linalg.norm(psi)
            dense = w.dense_walk_oracle(L, t) @ psi
            worst = max(worst, w.global_phase_distance(w.apply_kpartite_mixer(psi, sizes, t), dense))
    _check(verdict, 5, worst < 1e-10, f"max distance up to global phase = {worst:.2e}")


# criterion 6 ---------------------------------------------------------------


@functools.lru_cache(maxsize=None)
def _pms_ladder(algorithm: str, schedule: str) -> dict[int, opt.MultistartResult]:
    inst = pb.builtin_instances()[schedule]
    ansatz = qva.build_ansatz(algorithm, inst, DEPTH)
    return opt.depth_ladder(ansatz, REPEATS, ROOT_SEED)


def _best(res: opt.MultistartResult) -> tuple[float, float]:
    return res.best_ratio, max(r.optimum_probability for r in res.runs)


@pytest.mark.slow
def test_c06_pms_benchmark(verdict):
    a_ratio, a_prob = _best(_pms_ladder("qmoa", "ScheduleA")[DEPTH])
    b_ratio, b_prob = _best(_pms_ladder("qmoa", "ScheduleB")[DEPTH])
    q_ratio, _ = _best(_pms_ladder("qaoa", "ScheduleB")[DEPTH])
    ok = a_ratio >= 0.95 and b_ratio >= 0.95 and a_prob >= 0.25 and b_prob >= 0.35 and q_ratio >= 0.90
    _check(
        verdict, 6, ok,
        f"QMOA A ratio {a_ratio:.4f} P(opt) {a_prob:.3f}; QMOA B ratio {b_ratio:.4f} P(opt) {b_prob:.3f}; "
        f"QAOA B ratio {q_ratio:.4f}",
    )


# criterion 7 ---------------------------------------------------------------

LISTED_TIMES_7_4 = [1.79661, 1.90339, 1.14226, 2.10132, 2.46619, 0.785398, 0.785398]
LISTED_TIMES_14_2 = [
    0.27055, 0.387597, 0.481275, 0.563943, 0.640522, 0.713724, 0.785398,
    0.857072, 0.930274, 1.00685, 2.05207, 1.95839, 1.30025, 1.5708,
]


def test_c07a_subshell_optimal_times(verdict):
    ours_7_4 = opt.subshell_optimal_times(mt.hamming_model(7, 4))
    ours_14_2 = opt.subshell_optimal_times(mt.hamming_model(14, 2))
    off_7_4 = [d + 1 for d, (a, b) in enumerate(zip(ours_7_4, LISTED_TIMES_7_4)) if abs(a - b) > 1e-3]
    off_14_2 = [d + 1 for d, (a, b) in enumerate(zip(ours_14_2, LISTED_TIMES_14_2)) if abs(a - b) > 1e-3]
    ok = not off_7_4 and not off_14_2
    _check(
        verdict, 7, ok,
        f"time lists: (7,4) differ at d={off_7_4}, (14,2) differ at d={off_14_2} "
        f"(ours (7,4) {[round(t, 5) for t in ours_7_4]})",
    )


@pytest.mark.slow
def test_c07b_hybrid_schedule(verdict):
    # Equal maxima of |w_d| make the time list non-unique and the hybrid result depends on the
    # member chosen; the verdict uses the listed schedule, our tie-broken list is reported alongside.
    inst = pb.builtin_instances()["ScheduleB"]
    ansatz = qva.build_ansatz("qmoa", inst, DEPTH)
    _, full_prob = _best(_pms_ladder("qmoa", "ScheduleB")[DEPTH])
    ratio, prob = _best(opt.hybrid_optimize(ansatz, LISTED_TIMES_7_4, REPEATS, ROOT_SEED))
    ours = opt.subshell_optimal_times(mt.hamming_model(inst.n, inst.m))
    our_ratio, our_prob = _best(opt.hybrid_optimize(ansatz, ours, REPEATS, ROOT_SEED))
    ok = ratio >= 0.90 and prob >= 0.5 * full_prob
    _check(
        verdict, 7, ok,
        f"hybrid QMOA(gamma) B, listed times: ratio {ratio:.4f}, P(opt) {prob:.3f} = {prob / full_prob:.1%} of full "
        f"{full_prob:.3f}; smallest-t times: ratio {our_ratio:.4f}, P(opt) {our_prob:.3f} = {our_prob / full_prob:.1%}",
    )


# criterion 8 ---------------------------------------------------------------

PORTFOLIO_SEEDS = range(5)


@pytest.mark.slow
def test_c08_portfolio_comparison(verdict):
    wins = 0
    details = []
    for seed in PORTFOLIO_SEEDS:
        inst = pb.synthetic_portfolio(6, 2, seed)
        best = {}
        for alg in ("qwoa-cs", "qwoa", "qaoaz-complete"):
            ansatz = qva.build_ansatz(alg, inst, DEPTH)
            best[alg] = opt.depth_ladder(ansatz, REPEATS, ROOT_SEED)[DEPTH].best_ratio
        ordered = best["qwoa-cs"] >= best["qwoa"] >= best["qaoaz-complete"]
        wins += ordered
        details.append("/".join(f"{v:.3f}" for v in best.values()))

    inst = pb.synthetic_portfolio(6, 2, 0)
    cs = qva.build_ansatz("qwoa-cs", inst, DEPTH)
    disjoint = qva.build_ansatz("qwoa-cs-disjoint", inst, DEPTH)
    theta = np.random.default_rng(ROOT_SEED).uniform(0, 2 * np.pi, (DEPTH, 3))
    theta[:, 2] = 0.0
    exact = np.array_equal(cs.evolve(theta.ravel()), disjoint.evolve(theta[:, :2].ravel()))

    leak = 0.0
    for alg in ("qaoaz-complete", "qaoaz-parity"):
        ansatz = qva.build_ansatz(alg, inst, DEPTH)
        psi = ansatz.evolve(np.random.default_rng(ROOT_SEED).uniform(0, 2 * np.pi, ansatz.n_params))
        leak = max(leak, float(np.sum(np.abs(psi[~ansatz.valid]) ** 2)))

    ok = wins >= 4 and exact and leak < 1e-10
    _check(
        verdict, 8, ok,
        f"CS>=QWOA>=QAOAz on {wins}/5 (ratios cs/qwoa/qaoaz: {', '.join(details)}); "
        f"t1=0 bit-exact={exact}; leakage {leak:.1e}",
    )


# criterion 9 ---------------------------------------------------------------


def _msv(algorithm: str, schedule: str) -> float:
    inst = pb.builtin_instances()[schedule]
    if algorithm == "qmoa":
        costs = pb.pms_cost_table(inst)
        return mt.msv_hamming(costs / costs.mean(), inst.n, inst.m).msv
    costs, _ = pb.pms_binary_cost_table(inst)
    return mt.msv_hamming(costs / costs.mean(), inst.n * inst.bits, 2).msv


def test_c09_msv_ordering(verdict):
    target = {("qmoa", "ScheduleA"): 1.33, ("qaoa", "ScheduleA"): 16.5, ("qmoa", "ScheduleB"): 1.14,
              ("qaoa", "ScheduleB"): 2.31}
    got = {key: _msv(*key) for key in target}
    ordered = all(got[("qmoa", s)] < got[("qaoa", s)] for s in ("ScheduleA", "ScheduleB"))
    within = all(abs(got[k] - v) <= 0.02 * v for k, v in target.items())
    _check(
        verdict, 9, ordered and within,
        f"ordering QMOA<QAOA={ordered}; values "
        + ", ".join(f"{a}/{s[-1]} {got[(a, s)]:.3f} (target {v})" for (a, s), v in target.items()),
    )


# criterion 10 --------------------------------------------------------------


def _mean_probability(model: mt.CoefficientModel, sigma2: float, seeds) -> float:
    t_star = mt.optimal_walk_time(model)
    return float(np.mean([mt.variance_adjusted_convergence(model, sigma2, s, 32, t_star).probability for s in seeds]))


def test_c10_variance_sweep(verdict):
    seeds = range(20)
    complete = mt.graph_model(g.Complete(128))
    sweep = [_mean_probability(complete, s2, seeds) for s2 in (0.0, 0.01, 0.05, 0.1)]
    monotone = all(b <= a + 1e-12 for a, b in zip(sweep, sweep[1:]))
    hamming = mt.hamming_model(3, 5)
    drop = _mean_probability(hamming, 1e-4, seeds) - _mean_probability(hamming, 1e-2, seeds)
    ok = monotone and drop < 0.05
    _check(
        verdict, 10, ok,
        f"Complete(128) mean Prob {[round(p, 4) for p in sweep]} non-increasing={monotone}; "
        f"Hamming(3,5) drop {drop:.4f}",
    )
