"""Benchmark cost models: parallel machine scheduling and portfolio rebalancing."""
from __future__ import annotations

import csv
import json
from collections.abc import Sequence
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import combinatorics as cb

SHORT, LONG, NO = 0, 1, 2
POSITIONS = ("short", "long", "no")


@dataclass(frozen=True)
class PmsInstance:
    """Jobs with priority ``w`` and duration ``tau`` on machines with speed ``kappa``.

    ``kappa_padded`` holds speeds for the ``2**ceil(log2 m)`` machine labels of
    the binary encoding; extra labels get the slowest valid speed.
    """

    w: tuple[float, ...]
    tau: tuple[float, ...]
    kappa: tuple[float, ...]
    eta: float = 0.5
    alpha: float = 2.0
    a: float = 100.0
    kappa_padded: tuple[float, ...] | None = None
    name: str = ""

    def __post_init__(self) -> None:
        for attr in ("w", "tau", "kappa"):
            object.__setattr__(self, attr, tuple(float(x) for x in getattr(self, attr)))
        if len(self.w) != len(self.tau):
            raise ValueError("w and tau must have one entry per job")
        if min(self.tau) <= 0 or min(self.kappa) <= 0:
            raise ValueError("processing times and speeds must be positive")
        if self.kappa_padded is None:
            pad = (1 << self.bits) - self.m
            object.__setattr__(self, "kappa_padded", self.kappa + (min(self.kappa),) * pad)
        else:
            object.__setattr__(self, "kappa_padded", tuple(float(x) for x in self.kappa_padded))
            if self.kappa_padded[: self.m] != self.kappa or len(self.kappa_padded) != 1 << self.bits:
                raise ValueError("padded speeds must extend the valid speeds to a power of two")

    @property
    def n(self) -> int:
        return len(self.w)

    @property
    def m(self) -> int:
        return len(self.kappa)

    @property
    def bits(self) -> int:
        return max(1, (self.m - 1).bit_length())


@dataclass(frozen=True)
class PortfolioInstance:
    """Discrete long/short/no positions on ``n`` assets with net position ``A``.

    ``long_sign`` is the eigenvalue assigned to a long position; short gets
    the opposite sign and no-position zero. The same map defines the net
    position constraint.
    """

    sigma: np.ndarray = field(repr=False)
    r: np.ndarray = field(repr=False)
    eta: float = 0.5
    A: int = 0
    long_sign: int = -1
    name: str = ""

    def __post_init__(self) -> None:
        sigma = np.asarray(self.sigma, dtype=float)
        r = np.asarray(self.r, dtype=float)
        if sigma.shape != (r.size, r.size):
            raise ValueError("covariance must be n x n")
        if not np.allclose(sigma, sigma.T):
            raise ValueError("covariance must be symmetric")
        if abs(self.A) > r.size:
            raise ValueError("|A| cannot exceed the number of assets")
        if self.long_sign not in (1, -1):
            raise ValueError("long_sign must be +1 or -1")
        object.__setattr__(self, "sigma", sigma)
        object.__setattr__(self, "r", r)

    @property
    def n(self) -> int:
        return self.r.size

    @property
    def zeta_map(self) -> tuple[int, int, int]:
        """Eigenvalue of (short, long, no)."""
        return (-self.long_sign, self.long_sign, 0)


@dataclass
class CostTable:
    """Costs over a simulated basis.

    ``space`` is ``"full"`` for a register or qubit basis and ``"indexed"``
    for the ranked valid-solution space. ``valid`` marks basis states that
    encode a valid solution and ``degeneracy`` counts encodings per solution.
    """

    costs: np.ndarray
    space: str
    valid: np.ndarray | None = None
    degeneracy: dict | None = None

    def __post_init__(self) -> None:
        self.costs = np.asarray(self.costs, dtype=float)
        if not np.all(np.isfinite(self.costs)):
            raise ValueError("cost table contains non-finite values")
        if self.valid is None:
            self.valid = np.ones(self.costs.size, dtype=bool)

    @property
    def valid_costs(self) -> np.ndarray:
        return self.costs[self.valid]


def scale_by_mean(costs: np.ndarray, reference: np.ndarray | None = None) -> np.ndarray:
    ref = costs if reference is None else reference
    return np.asarray(costs, dtype=float) / float(np.mean(ref))


def pms_costs(inst: PmsInstance, assignment: Sequence[int]) -> float:
    """Weighted completion time plus energy for jobs assigned to machines."""
    if len(assignment) != inst.n:
        raise ValueError("assignment must list one machine per job")
    speeds = inst.kappa_padded
    total = 0.0
    for w, tau, s in zip(inst.w, inst.tau, assignment):
        k = speeds[s]
        total += inst.eta * w * tau / k + (1.0 - inst.eta) * k**inst.alpha * tau / k
    return total


def pms_penalty(inst: PmsInstance, assignment: Sequence[int]) -> float:
    """Quadratic penalty on machine labels beyond the last valid machine (0-indexed)."""
    top = max(assignment)
    if top <= inst.m - 1:
        return 0.0
    return inst.a * float(top - (inst.m - 1)) ** 2


def pms_penalized_costs(inst: PmsInstance, assignment: Sequence[int]) -> float:
    return pms_costs(inst, assignment) + pms_penalty(inst, assignment)


def pms_cost_table(inst: PmsInstance) -> np.ndarray:
    """Costs of all ``m**n`` assignments, job 0 as the most significant digit."""
    return _sum_over_digits(_per_job_costs(inst, np.asarray(inst.kappa)))


def _per_job_costs(inst: PmsInstance, kappa: np.ndarray) -> np.ndarray:
    """Cost of job ``i`` on machine ``j`` as an ``n x len(kappa)`` array."""
    return inst.eta * np.outer(np.multiply(inst.w, inst.tau), 1.0 / kappa) + (
        1.0 - inst.eta
    ) * np.outer(inst.tau, kappa ** (inst.alpha - 1.0))


def _sum_over_digits(per_job: np.ndarray) -> np.ndarray:
    total = np.zeros((1,))
    for row in per_job:
        total = (total[:, None] + row[None, :]).ravel()
    return total


def pms_binary_cost_table(inst: PmsInstance) -> tuple[np.ndarray, np.ndarray]:
    """Penalized costs over the ``2**(n*bits)`` qubit basis and the validity mask.

    Each job owns ``bits`` consecutive qubits holding its machine label in
    big-endian binary.
    """
    kappa = np.asarray(inst.kappa_padded)
    base = _sum_over_digits(_per_job_costs(inst, kappa))
    labels = np.arange(kappa.size)
    top = np.zeros(1, dtype=np.int64)
    for _ in range(inst.n):
        top = np.maximum(top[:, None], labels[None, :]).ravel()
    excess = np.maximum(top - (inst.m - 1), 0)
    return base + inst.a * excess.astype(float) ** 2, excess == 0


def pms_decode(index: int, inst: PmsInstance, binary: bool = False) -> tuple[int, ...]:
    radix = 1 << inst.bits if binary else inst.m
    out = []
    for _ in range(inst.n):
        out.append(index % radix)
        index //= radix
    return tuple(reversed(out))


def zeta(inst: PortfolioInstance, positions: Sequence[int]) -> np.ndarray:
    z = inst.zeta_map
    return np.array([z[x] for x in positions], dtype=float)


def portfolio_costs(inst: PortfolioInstance, positions: Sequence[int]) -> float:
    """Risk minus return for a position vector over (short, long, no)."""
    if len(positions) != inst.n:
        raise ValueError("one position per asset required")
    if any(x not in (SHORT, LONG, NO) for x in positions):
        raise ValueError("positions must be 0 (short), 1 (long) or 2 (no)")
    zv = zeta(inst, positions)
    return float(inst.eta * zv @ inst.sigma @ zv - (1.0 - inst.eta) * inst.r @ zv)


def portfolio_partition(inst: PortfolioInstance) -> cb.MultisetPartition:
    return cb.enumerate_valid_multisets(inst.n, inst.zeta_map, inst.A)


def portfolio_valid_solutions(inst: PortfolioInstance) -> list[tuple[int, ...]]:
    part = portfolio_partition(inst)
    return [cb.global_unrank(i, part) for i in range(part.total)]


def portfolio_cost_table(inst: PortfolioInstance) -> CostTable:
    """Costs over the ranked valid space (global-rank order)."""
    sols = portfolio_valid_solutions(inst)
    Z = np.array([zeta(inst, s) for s in sols])
    costs = inst.eta * np.einsum("ij,jk,ik->i", Z, inst.sigma, Z) - (1.0 - inst.eta) * Z @ inst.r
    return CostTable(costs, "indexed")


def decode_pair(b_even: int, b_odd: int) -> int:
    """Two-qubit encoding: ``|01>`` long, ``|10>`` short, ``|00>``/``|11>`` no position."""
    if b_even == 0 and b_odd == 1:
        return LONG
    if b_even == 1 and b_odd == 0:
        return SHORT
    return NO


def hilbert_positions(n: int) -> np.ndarray:
    """Decoded positions of every ``2**(2n)`` basis state, qubit 0 most significant."""
    q = 2 * n
    idx = np.arange(1 << q)
    bits = (idx[:, None] >> (q - 1 - np.arange(q))[None, :]) & 1
    even, odd = bits[:, 0::2], bits[:, 1::2]
    pos = np.full((idx.size, n), NO, dtype=np.int64)
    pos[(even == 0) & (odd == 1)] = LONG
    pos[(even == 1) & (odd == 0)] = SHORT
    return pos


def expand_to_hilbert(inst: PortfolioInstance) -> CostTable:
    """Costs over all ``2**(2n)`` qubit basis states with degeneracy counts."""
    if inst.n > 10:
        raise ValueError("Hilbert-space expansion limited to n <= 10")
    pos = hilbert_positions(inst.n)
    z = np.asarray(inst.zeta_map, dtype=float)[pos]
    costs = inst.eta * np.einsum("ij,jk,ik->i", z, inst.sigma, z) - (1.0 - inst.eta) * z @ inst.r
    valid = z.sum(axis=1).round().astype(int) == inst.A
    degeneracy: dict[tuple[int, ...], int] = {}
    for row in pos[valid]:
        key = tuple(int(x) for x in row)
        degeneracy[key] = degeneracy.get(key, 0) + 1
    return CostTable(costs, "full", valid, degeneracy)


def ingest_prices(path: str | Path, eta: float = 0.5, A: int = 0, long_sign: int = -1) -> PortfolioInstance:
    """Portfolio inputs from a CSV of prices (header ``date,<asset>...``).

    Returns are simple daily returns; the covariance uses the ``T - 1`` divisor.
    """
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or len(rows[0]) < 2:
        raise ValueError("CSV needs a header with a date column and at least one asset")
    header, body = rows[0], [r for r in rows[1:] if any(c.strip() for c in r)]
    if len(body) < 2:
        raise ValueError("need at least two rows of prices")
    prices = np.empty((len(body), len(header) - 1))
    for i, row in enumerate(body):
        if len(row) != len(header):
            raise ValueError(f"row {i + 2} has {len(row)} cells, expected {len(header)}")
        for j, cell in enumerate(row[1:]):
            if not cell.strip():
                raise ValueError(f"missing value at row {i + 2}, column {header[j + 1]!r}")
            try:
                prices[i, j] = float(cell)
            except ValueError:
                raise ValueError(f"non-numeric value {cell!r} at row {i + 2}") from None
    returns = prices[1:] / prices[:-1] - 1.0
    r = returns.mean(axis=0)
    if returns.shape[0] < 2:
        sigma = np.zeros((r.size, r.size))
    else:
        sigma = np.atleast_2d(np.cov(returns, rowvar=False, ddof=1))
    return PortfolioInstance(sigma, r, eta, A, long_sign, name=Path(path).stem)


def synthetic_portfolio(n: int, A: int, seed: int, eta: float = 0.5, long_sign: int = -1) -> PortfolioInstance:
    """Random instance with an O(1) Wishart covariance and normal mean returns."""
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(n, 2 * n))
    sigma = X @ X.T / (2 * n)
    r = rng.normal(scale=0.5, size=n)
    return PortfolioInstance(sigma, r, eta, A, long_sign, name=f"synthetic-{seed}")


def builtin_instances() -> dict[str, PmsInstance]:
    schedule_a = PmsInstance(
        w=(3, 6, 1, 4, 5, 2),
        tau=(21, 22, 13, 14, 5, 15),
        kappa=(65, 61, 41, 36, 79),
        eta=0.5,
        alpha=2.0,
        a=100.0,
        kappa_padded=(65, 61, 41, 36, 79, 41, 41, 41),
        name="ScheduleA",
    )
    schedule_b = PmsInstance(
        w=(7, 3, 2, 4, 1, 6, 5),
        tau=(23, 9, 11, 17, 6, 11, 12),
        kappa=(71, 62, 50, 97),
        eta=0.5,
        alpha=2.0,
        a=100.0,
        name="ScheduleB",
    )
    return {"ScheduleA": schedule_a, "ScheduleB": schedule_b}


def save_instance(inst: PmsInstance | PortfolioInstance, path: str | Path) -> None:
    if isinstance(inst, PmsInstance):
        doc = {"type": "pms", **asdict(inst)}
    else:
        doc = {
            "type": "portfolio",
            "sigma": inst.sigma.tolist(),
            "r": inst.r.tolist(),
            "eta": inst.eta,
            "A": inst.A,
            "long_sign": inst.long_sign,
            "name": inst.name,
        }
    Path(path).write_text(json.dumps(doc, indent=2))


def load_instance(path: str | Path) -> PmsInstance | PortfolioInstance:
    doc = json.loads(Path(path).read_text())
    kind = doc.pop("type", None)
    if kind == "pms":
        return PmsInstance(**doc)
    if kind == "portfolio":
        return PortfolioInstance(np.array(doc.pop("sigma")), np.array(doc.pop("r")), **doc)
    raise ValueError(f"unknown instance type {kind!r}")
