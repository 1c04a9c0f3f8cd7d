"""Alternating phase-shift / quantum-walk ansatze and their observables."""
from __future__ import annotations

from collections.abc import Callable, Sequence
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
import scipy.sparse as sp

from . import combinatorics as cb
from . import graphs
from . import problems as pb
from . import walks


class Algorithm(str, Enum):
    QAOA = "qaoa"
    QMOA = "qmoa"
    QWOA = "qwoa"
    QWOA_CS = "qwoa-cs"
    QWOA_CS_DISJOINT = "qwoa-cs-disjoint"
    QAOAZ_PARITY = "qaoaz-parity"
    QAOAZ_COMPLETE = "qaoaz-complete"


PMS_ALGORITHMS = (Algorithm.QAOA, Algorithm.QMOA)
PORTFOLIO_ALGORITHMS = (
    Algorithm.QWOA,
    Algorithm.QWOA_CS,
    Algorithm.QWOA_CS_DISJOINT,
    Algorithm.QAOAZ_PARITY,
    Algorithm.QAOAZ_COMPLETE,
)


class IncompatibleProblem(ValueError):
    pass


Mixer = Callable[[np.ndarray, Sequence[float]], np.ndarray]


@dataclass
class Ansatz:
    """A fully specified ansatz: basis, costs, initial state and mixer.

    ``costs`` are the phase-shift values used in the simulation (possibly
    rescaled); ``valid`` marks basis states that encode valid solutions and
    ``optimal`` those that encode a global minimum.
    """

    algorithm: Algorithm
    p: int
    params_per_layer: int
    costs: np.ndarray
    valid: np.ndarray
    psi0: np.ndarray
    mixer: Mixer
    decode: Callable[[int], tuple[int, ...]]
    scale: float = 1.0
    info: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.p < 1:
            raise ValueError("need at least one layer")
        vc = self.costs[self.valid]
        self.cost_min = float(vc.min())
        self.cost_max = float(vc.max())
        span = max(abs(self.cost_max - self.cost_min), 1e-300)
        self.optimal = self.valid & (self.costs <= self.cost_min + 1e-9 * span)

    @property
    def dim(self) -> int:
        return self.costs.size

    @property
    def n_params(self) -> int:
        return self.p * self.params_per_layer

    def layers(self, theta: Sequence[float]) -> list[tuple[float, tuple[float, ...]]]:
        theta = np.asarray(theta, dtype=float)
        if theta.size != self.n_params:
            raise ValueError(f"expected {self.n_params} parameters, got {theta.size}")
        rows = theta.reshape(self.p, self.params_per_layer)
        return [(float(r[0]), tuple(float(x) for x in r[1:])) for r in rows]

    def initial_state(self) -> np.ndarray:
        return self.psi0.copy()

    def evolve(self, theta: Sequence[float]) -> np.ndarray:
        state = self.psi0.copy()
        for gamma, times in self.layers(theta):
            state = state * np.exp(-1j * gamma * self.costs)
            state = self.mixer(state, times)
        return state

    def objective(self, theta: Sequence[float]) -> float:
        return expectation(self.evolve(theta), self.costs)

    def approximation_ratio(self, state: np.ndarray) -> float:
        return approximation_ratio(expectation(state, self.costs), self.costs[self.valid])

    def optimum_probability(self, state: np.ndarray) -> float:
        return float(np.sum(np.abs(state[self.optimal]) ** 2))

    def solution_probabilities(self, state: np.ndarray) -> dict[tuple[int, ...], float]:
        """Measurement probability per decoded valid solution (degenerate encodings summed)."""
        out: dict[tuple[int, ...], float] = {}
        probs = np.abs(state) ** 2
        for i in np.flatnonzero(self.valid & (probs > 0)):
            key = self.decode(int(i))
            out[key] = out.get(key, 0.0) + float(probs[i])
        return out


def expectation(state: np.ndarray, costs: np.ndarray) -> float:
    state = np.asarray(state)
    costs = np.asarray(costs, dtype=float)
    if state.shape != costs.shape:
        raise ValueError(f"state {state.shape} and costs {costs.shape} differ")
    return float(np.dot(np.abs(state) ** 2, costs))


def approximation_ratio(value: float, valid_costs: np.ndarray) -> float:
    """``(value - max) / (min - max)``: 1 at the best valid cost, 0 at the worst."""
    lo, hi = float(np.min(valid_costs)), float(np.max(valid_costs))
    if hi == lo:
        raise ValueError("approximation ratio undefined for a constant cost table")
    return (value - hi) / (lo - hi)


def measurement_report(
    state: np.ndarray,
    costs: np.ndarray,
    k: int = 10,
    decode: Callable[[int], object] | None = None,
) -> list[dict]:
    """Top-``k`` basis states by probability with phases relative to the most likely one."""
    if k < 1:
        raise ValueError("k must be positive")
    probs = np.abs(state) ** 2
    order = np.argsort(-probs, kind="stable")[:k]
    order = order[probs[order] > 0]
    ref = state[order[0]]
    rows = []
    for i in order:
        phi = float(np.angle(state[i] / ref))
        if phi <= -np.pi:
            phi += 2 * np.pi
        rows.append(
            {
                "index": int(i),
                "solution": decode(int(i)) if decode else int(i),
                "probability": float(probs[i]),
                "cost": float(costs[i]),
                "phase": phi,
            }
        )
    return rows


def _cs_adjacency(partition: cb.MultisetPartition) -> sp.csr_matrix:
    """Transposition graphs of every part, in global-rank coordinates."""
    m = partition.m

    def oracle(v: int, l: int) -> int | None:
        s = cb.global_unrank(v, partition)
        if l >= cb.transposition_degree(s, m):
            return None
        return cb.global_rank(cb.nth_transposition_neighbor(s, l, m), partition)

    max_deg = max(graphs.degree(graphs.ConstrainedPermutation(p)) for p in partition.parts)
    return walks.oracle_to_csr(oracle, partition.total, max(max_deg, 1))


def _move_adjacency(n_qubits: int, moves: Sequence[tuple[int, int]]) -> sp.csr_matrix:
    """Adjacency of XY hopping moves over the full ``2**n_qubits`` basis."""
    idx = np.arange(1 << n_qubits)
    rows, cols = [], []
    for a, b in moves:
        ba = (idx >> (n_qubits - 1 - a)) & 1
        bb = (idx >> (n_qubits - 1 - b)) & 1
        hop = idx[ba != bb]
        rows.append(hop)
        cols.append(hop ^ ((1 << (n_qubits - 1 - a)) | (1 << (n_qubits - 1 - b))))
    r = np.concatenate(rows) if rows else np.zeros(0, dtype=np.int64)
    c = np.concatenate(cols) if cols else np.zeros(0, dtype=np.int64)
    return sp.csr_matrix((np.ones(r.size), (r, c)), shape=(idx.size, idx.size))


def qaoaz_register_moves(n: int, pairing: str) -> list[list[tuple[int, int]]]:
    """XY move groups on the even-qubit and odd-qubit registers.

    ``"complete"`` yields one group with every pair inside each register.
    ``"parity"`` yields the even-numbered ring edges then the odd-numbered
    ones, applied as two sequential exponentials.
    """
    registers = [list(range(0, 2 * n, 2)), list(range(1, 2 * n, 2))]
    if pairing == "complete":
        return [[mv for reg in registers for mv in graphs.all_pair_moves(reg)]]
    if pairing == "parity":
        groups: list[list[tuple[int, int]]] = [[], []]
        for reg in registers:
            for k, mv in enumerate(graphs.ring_moves(reg)):
                groups[k % 2].append(mv)
        return [g for g in groups if g]
    raise ValueError(f"unknown pairing {pairing!r}")


def qaoaz_initial_state(inst: pb.PortfolioInstance) -> np.ndarray:
    """|A| seeded pairs carrying the sign of ``A``, then Bell-like no-position pairs."""
    pos = np.array([0.0, 1.0, 0.0, 0.0], dtype=complex)  # |01>, long
    neg = np.array([0.0, 0.0, 1.0, 0.0], dtype=complex)  # |10>, short
    seed = pos if inst.long_sign * np.sign(inst.A) > 0 else neg
    bell = np.array([1.0, 0.0, 0.0, 1.0], dtype=complex) / np.sqrt(2.0)
    state = np.ones(1, dtype=complex)
    for i in range(inst.n):
        state = np.kron(state, seed if i < abs(inst.A) else bell)
    return state


def _pms_ansatz(alg: Algorithm, inst: pb.PmsInstance, p: int, scale: bool, register_size: int | None) -> Ansatz:
    if alg is Algorithm.QMOA:
        r = inst.m if register_size is None else register_size
        if r < inst.m:
            raise ValueError("register smaller than the machine count")
        base = pb.pms_cost_table(inst)
        grid = np.indices((r,) * inst.n).reshape(inst.n, -1)
        valid = np.all(grid < inst.m, axis=0)
        costs = np.full(r**inst.n, float(base.max()))
        costs[valid] = base
        factor = float(base.mean()) if scale else 1.0
        psi0 = valid.astype(complex) / np.sqrt(valid.sum())
        n, m = inst.n, inst.m

        def mixer(state, times):
            return walks.apply_hamming_mixer(state, n, m, times[0], r)

        def decode(i: int) -> tuple[int, ...]:
            return tuple(int(x) for x in np.unravel_index(i, (r,) * n))

        return Ansatz(alg, p, 2, costs / factor, valid, psi0, mixer, decode, factor, {"register_size": r})
    costs, valid = pb.pms_binary_cost_table(inst)
    factor = float(costs.mean()) if scale else 1.0
    q = inst.n * inst.bits
    psi0 = np.full(1 << q, 1.0 / np.sqrt(1 << q), dtype=complex)

    def mixer(state, times):
        return walks.apply_hamming_mixer(state, q, 2, times[0])

    def decode(i: int) -> tuple[int, ...]:
        return pb.pms_decode(i, inst, binary=True)

    return Ansatz(alg, p, 2, costs / factor, valid, psi0, mixer, decode, factor, {"qubits": q})


def _portfolio_ansatz(alg: Algorithm, inst: pb.PortfolioInstance, p: int, scale: bool, engine: str) -> Ansatz:
    if alg in (Algorithm.QAOAZ_PARITY, Algorithm.QAOAZ_COMPLETE):
        table = pb.expand_to_hilbert(inst)
        factor = float(np.mean(table.valid_costs)) if scale else 1.0
        q = 2 * inst.n
        pairing = "parity" if alg is Algorithm.QAOAZ_PARITY else "complete"
        groups = [_move_adjacency(q, g) for g in qaoaz_register_moves(inst.n, pairing)]
        if engine == "spectral":
            props = [walks.SpectralPropagator(A) for A in groups]

            def mixer(state, times):
                for prop in props:
                    state = prop.apply(state, times[0])
                return state

        else:
            bounds = [int(A.sum(axis=1).max()) for A in groups]

            def mixer(state, times):
                for A, bound in zip(groups, bounds):
                    state = walks.apply_sparse_mixer(state, A, bound, times[0])
                return state

        positions = pb.hilbert_positions(inst.n)

        def decode(i: int) -> tuple[int, ...]:
            return tuple(int(x) for x in positions[i])

        return Ansatz(
            alg, p, 2, table.costs / factor, table.valid, qaoaz_initial_state(inst), mixer, decode, factor,
            {"degeneracy": table.degeneracy},
        )
    partition = pb.portfolio_partition(inst)
    if partition.total < 2:
        raise IncompatibleProblem("constraint admits fewer than two valid solutions")
    table = pb.portfolio_cost_table(inst)
    factor = float(np.mean(table.costs)) if scale else 1.0
    valid = np.ones(partition.total, dtype=bool)

    def decode(i: int) -> tuple[int, ...]:
        return cb.global_unrank(i, partition)

    info = {"partition": partition}
    if alg is Algorithm.QWOA:
        psi0 = np.full(partition.total, 1.0 / np.sqrt(partition.total), dtype=complex)

        def mixer(state, times):
            return walks.apply_indexed_complete_mixer(state, times[0])

        return Ansatz(alg, p, 2, table.costs / factor, valid, psi0, mixer, decode, factor, info)

    A = _cs_adjacency(partition)
    if engine == "spectral":
        prop = walks.SpectralPropagator(A)
        within = prop.apply
    else:
        bound = max(graphs.degree(graphs.ConstrainedPermutation(pp)) for pp in partition.parts)

        def within(state, t):
            return walks.apply_sparse_mixer(state, A, bound, t)

    sizes = partition.sizes
    psi0 = np.concatenate([np.full(s, 1.0 / np.sqrt(len(sizes) * s)) for s in sizes]).astype(complex)
    if alg is Algorithm.QWOA_CS_DISJOINT:

        def mixer(state, times):
            return within(state, times[0])

        return Ansatz(alg, p, 2, table.costs / factor, valid, psi0, mixer, decode, factor, info)

    def mixer(state, times):
        return walks.apply_kpartite_mixer(within(state, times[0]), sizes, times[1])

    return Ansatz(alg, p, 3, table.costs / factor, valid, psi0, mixer, decode, factor, info)


def build_ansatz(
    algorithm: Algorithm | str,
    instance: pb.PmsInstance | pb.PortfolioInstance,
    p: int,
    *,
    scale: bool | None = None,
    register_size: int | None = None,
    engine: str = "spectral",
) -> Ansatz:
    """Assemble an ansatz for a benchmark instance.

    ``scale`` divides costs by their mean (default: on for scheduling, off
    for portfolios). ``engine`` picks the walk backend for graphs without a
    closed form: ``"spectral"`` (exact per-component eigendecomposition) or
    ``"chebyshev"`` (matrix-free expansion).
    """
    alg = Algorithm(algorithm)
    if engine not in ("spectral", "chebyshev"):
        raise ValueError(f"unknown engine {engine!r}")
    if isinstance(instance, pb.PmsInstance):
        if alg not in PMS_ALGORITHMS:
            raise IncompatibleProblem(f"{alg.value} needs a constrained (portfolio) instance")
        return _pms_ansatz(alg, instance, p, True if scale is None else scale, register_size)
    if isinstance(instance, pb.PortfolioInstance):
        if alg not in PORTFOLIO_ALGORITHMS:
            raise IncompatibleProblem(f"{alg.value} needs an unconstrained (scheduling) instance")
        return _portfolio_ansatz(alg, instance, p, False if scale is None else scale, engine)
    raise TypeError(f"unsupported instance {instance!r}")


def initial_state(ansatz: Ansatz) -> np.ndarray:
    return ansatz.initial_state()


def evolve(ansatz: Ansatz, theta: Sequence[float]) -> np.ndarray:
    return ansatz.evolve(theta)
