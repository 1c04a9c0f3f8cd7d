"""Continuous-time quantum walk actions ``exp(-i t H)`` on statevectors.

Closed forms are used where the graph structure provides one (complete,
Hamming and complete multipartite graphs). Other graphs go through a
matrix-free Chebyshev expansion or a per-component spectral propagator.
"""
from __future__ import annotations

from collections.abc import Callable, Sequence

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components
from scipy.special import jv

DENSE_LIMIT = 4096
STATE_LIMIT = 2**20

NeighborOracle = Callable[[int, int], "int | None"]


def dense_walk_oracle(H: np.ndarray, t: float) -> np.ndarray:
    """``exp(-i t H)`` through the eigendecomposition of a real symmetric ``H``."""
    H = np.asarray(H, dtype=float)
    if H.ndim != 2 or H.shape[0] != H.shape[1]:
        raise ValueError("H must be square")
    if H.shape[0] > DENSE_LIMIT:
        raise ValueError(f"dimension {H.shape[0]} exceeds the dense limit")
    if not np.allclose(H, H.T, atol=1e-12):
        raise ValueError("H must be symmetric")
    lam, V = np.linalg.eigh(H)
    return (V * np.exp(-1j * t * lam)) @ V.conj().T


def complete_laplacian(m: int) -> np.ndarray:
    return m * np.eye(m) - np.ones((m, m))


def _rank_one_update(block: np.ndarray, axis: int, m: int, t: float) -> np.ndarray:
    # exp(-i t L_m) = P + exp(-i m t) (I - P), with P the projector on the uniform state
    mean = block.mean(axis=axis, keepdims=True)
    return np.exp(-1j * m * t) * (block - mean) + mean


def apply_complete_mixer(
    state: np.ndarray, register: int, m: int, t: float, dims: Sequence[int] | None = None
) -> np.ndarray:
    """Walk on ``K_m`` applied to one register of a product register layout.

    ``dims`` lists the register sizes (default: the whole state is one
    register). Basis states ``>= m`` of the chosen register are left alone,
    which is how padded registers are handled.
    """
    state = np.asarray(state, dtype=complex)
    dims = [state.size] if dims is None else list(dims)
    if int(np.prod(dims)) != state.size:
        raise ValueError("register sizes do not match the state dimension")
    if dims[register] < m:
        raise ValueError(f"register {register} holds {dims[register]} < {m} states")
    left = int(np.prod(dims[:register]))
    right = int(np.prod(dims[register + 1 :]))
    out = state.reshape(left, dims[register], right).copy()
    out[:, :m, :] = _rank_one_update(out[:, :m, :], 1, m, t)
    return out.reshape(state.shape)


def apply_hamming_mixer(
    state: np.ndarray, n: int, m: int, t: float, register_size: int | None = None
) -> np.ndarray:
    """Laplacian walk on the ``(n, m)`` Hamming graph as a product of ``K_m`` walks."""
    r = m if register_size is None else register_size
    state = np.asarray(state, dtype=complex)
    if state.size != r**n:
        raise ValueError(f"state dimension {state.size} != {r}^{n}")
    if r < m:
        raise ValueError("register smaller than the alphabet")
    phase = np.exp(-1j * m * t)
    out = state.copy()
    for i in range(n):
        view = out.reshape(r**i, r, r ** (n - 1 - i))
        block = view[:, :m, :]
        mean = block.mean(axis=1, keepdims=True)
        view[:, :m, :] = phase * (block - mean) + mean
    return out


def apply_indexed_complete_mixer(state: np.ndarray, t: float) -> np.ndarray:
    """Complete-graph walk over the whole (indexed) space."""
    state = np.asarray(state, dtype=complex)
    return _rank_one_update(state, 0, state.size, t)


def kpartite_laplacian(sizes: Sequence[int]) -> np.ndarray:
    N = sum(sizes)
    part = np.repeat(np.arange(len(sizes)), sizes)
    A = (part[:, None] != part[None, :]).astype(float)
    return np.diag(A.sum(axis=1)) - A


def apply_kpartite_mixer(state: np.ndarray, sizes: Sequence[int], t: float) -> np.ndarray:
    """Walk on the complete multipartite Laplacian with contiguous parts.

    The multipartite Laplacian is ``L(K_N) - sum_k L(K_{S_k})`` and the two
    terms commute. Complete-graph Laplacians are diagonal in the DFT basis
    (eigenvalue 0 at zero frequency, ``N`` elsewhere), so each factor is a
    transform, a diagonal phase and an inverse transform.
    """
    state = np.asarray(state, dtype=complex)
    N = state.size
    if t == 0.0:
        return state.copy()
    if sum(sizes) != N or any(s < 1 for s in sizes):
        raise ValueError(f"part sizes {tuple(sizes)} do not tile dimension {N}")
    out = np.empty_like(state)
    start = 0
    for size in sizes:
        f = np.fft.fft(state[start : start + size])
        f[1:] *= np.exp(1j * t * size)
        out[start : start + size] = np.fft.ifft(f)
        start += size
    f = np.fft.fft(out)
    f[1:] *= np.exp(-1j * t * N)
    return np.fft.ifft(f)


def oracle_to_csr(oracle: NeighborOracle, dim: int, degree: int) -> sp.csr_matrix:
    """Assemble the adjacency matrix enumerated by ``oracle(v, l)``.

    ``oracle`` returns the ``l``-th neighbour of ``v`` or ``None`` once ``l``
    reaches the degree of ``v``; ``degree`` bounds every vertex degree.
    """
    rows: list[int] = []
    cols: list[int] = []
    for v in range(dim):
        for l in range(degree):
            u = oracle(v, l)
            if u is None:
                break
            rows.append(v)
            cols.append(u)
    A = sp.csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(dim, dim))
    if (A != A.T).nnz:
        raise ValueError("neighbour oracle is not symmetric")
    return A


def chebyshev_order(x: float, tol: float, max_order: int = 100_000) -> int:
    """Smallest order ``K`` after which the Bessel tail is below ``tol``."""
    x = abs(x)
    k = int(np.ceil(x)) + 1
    while k < max_order:
        tail = sum(abs(jv(j, x)) for j in range(k + 1, k + 4))
        if 2.0 * tail < tol:
            return k
        k += 1
    raise RuntimeError(f"Chebyshev expansion needs more than {max_order} terms for x={x}")


def chebyshev_expm_action(
    A: sp.spmatrix | np.ndarray, state: np.ndarray, t: float, bound: float, tol: float = 1e-12
) -> np.ndarray:
    """``exp(-i t A) state`` for symmetric ``A`` with spectrum inside ``[-bound, bound]``.

    Uses ``exp(-i x y) = J_0(x) + 2 sum_k (-i)^k J_k(x) T_k(y)`` with
    ``y = A / bound`` and ``x = t * bound``.
    """
    state = np.asarray(state, dtype=complex)
    if t == 0.0 or bound == 0.0:
        return state.copy()
    x = t * bound
    order = chebyshev_order(x, tol)
    coeffs = jv(np.arange(order + 1), abs(x))
    sign = -1j if x > 0 else 1j
    T_prev = state
    T_cur = (A @ state) / bound
    out = coeffs[0] * T_prev + 2.0 * sign * coeffs[1] * T_cur
    for k in range(2, order + 1):
        T_next = 2.0 * (A @ T_cur) / bound - T_prev
        out = out + 2.0 * sign**k * coeffs[k] * T_next
        T_prev, T_cur = T_cur, T_next
    return out


def apply_sparse_mixer(
    state: np.ndarray,
    neighbor_oracle: NeighborOracle | sp.spmatrix,
    degree: int,
    t: float,
    tol: float = 1e-12,
) -> np.ndarray:
    """Adjacency walk from a neighbour oracle, matrix-free beyond the assembly step."""
    state = np.asarray(state, dtype=complex)
    if state.size > STATE_LIMIT:
        raise ValueError("state exceeds the matrix-free size limit")
    if sp.issparse(neighbor_oracle):
        A = neighbor_oracle
    else:
        A = oracle_to_csr(neighbor_oracle, state.size, degree)
    return chebyshev_expm_action(A, state, t, float(max(degree, 1)), tol)


class SpectralPropagator:
    """Exact ``exp(-i t A)`` for a sparse symmetric ``A`` by per-component eigh.

    Splitting into connected components keeps every dense block small, and
    amplitude can never move between components. Components of equal size
    are stacked so one batched product handles all of them.
    """

    def __init__(self, A: sp.spmatrix, dense_limit: int = DENSE_LIMIT) -> None:
        A = sp.csr_matrix(A)
        self.dim = A.shape[0]
        n_comp, labels = connected_components(A, directed=False)
        self.components = labels
        members: dict[int, list[np.ndarray]] = {}
        for c, idx in enumerate(np.split(np.argsort(labels, kind="stable"), np.cumsum(np.bincount(labels))[:-1])):
            members.setdefault(idx.size, []).append(idx)
        self.batches: list[tuple[np.ndarray, ...]] = []
        for size, groups in sorted(members.items()):
            if size > dense_limit:
                raise ValueError(f"component of size {size} exceeds the dense limit")
            idx = np.stack(groups)
            blocks = np.stack([A[g][:, g].toarray() for g in groups])
            lam, V = np.linalg.eigh(blocks)
            self.batches.append((idx, lam, V, np.ascontiguousarray(np.swapaxes(V, 1, 2))))

    def apply(self, state: np.ndarray, t: float) -> np.ndarray:
        state = np.asarray(state, dtype=complex)
        out = np.empty_like(state)
        for idx, lam, V, Vt in self.batches:
            x = state[idx][..., None]
            y = (Vt @ x.real + 1j * (Vt @ x.imag))[..., 0] * np.exp(-1j * t * lam)
            y = y[..., None]
            out[idx] = (V @ y.real + 1j * (V @ y.imag))[..., 0]
        return out


def global_phase_distance(a: np.ndarray, b: np.ndarray) -> float:
    """``min_phi max|a - exp(i phi) b|`` using the optimal overlap phase."""
    overlap = np.vdot(b, a)
    phase = overlap / abs(overlap) if abs(overlap) > 0 else 1.0
    return float(np.max(np.abs(a - phase * b)))
