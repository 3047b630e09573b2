"""Upper triangular ``C(mu, Gamma)`` and the Kronecker matrix
``Q(mu, Gamma, P) = sum_j (C**j)^T kron A_j``.

Index conventions
-----------------
``mu`` has ``r`` entries. ``Gamma`` has ``r(r-1)/2`` entries ordered
``gamma_21, gamma_31, ..., gamma_r1, gamma_32, ..., gamma_r,r-1``, i.e. for
``i = 1..r-1`` and ``k = i+1..r`` (1-based) the entry ``gamma_ki``, which
sits in row ``i``, column ``k`` of ``C``. :func:`index_of` is the only place
that maps a pair to a flat position.
"""

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations

import numpy as np

__all__ = [
    "StructuredQ",
    "index_of",
    "gamma_pairs",
    "n_gamma",
    "build_C",
    "c_powers",
    "build_Q_kronecker",
    "build_Q_divdiff",
    "DivDiffAssembler",
    "increasing_sequences",
    "dQ_dgamma",
]


@dataclass(frozen=True)
class StructuredQ:
    matrix: np.ndarray
    mu: np.ndarray
    gamma: np.ndarray
    provenance: str

    def block(self, i, l):
        """0-based ``n x n`` block at block row ``i``, block column ``l``."""
        n = self.matrix.shape[0] // self.mu.size
        return self.matrix[i * n:(i + 1) * n, l * n:(l + 1) * n]


def n_gamma(r):
    return r * (r - 1) // 2


def index_of(k, i, r):
    """Flat position of ``gamma_ki`` (1-based, ``1 <= i < k <= r``)."""
    if not 1 <= i < k <= r:
        raise IndexError(f"gamma_{k}{i} is not a parameter for r={r}")
    return (i - 1) * r - (i - 1) * i // 2 + (k - i - 1)


@lru_cache(maxsize=None)
def gamma_pairs(r):
    """Tuple of 0-based ``(row, col)`` positions in ``C`` for each flat entry."""
    out = [None] * n_gamma(r)
    for i in range(1, r):
        for k in range(i + 1, r + 1):
            out[index_of(k, i, r)] = (i - 1, k - 1)
    return tuple(out)


def _as_mu_gamma(mu, gamma):
    mu = np.atleast_1d(np.asarray(mu, dtype=complex))
    r = mu.size
    if r < 1:
        raise ValueError("mu must have at least one entry")
    gamma = np.zeros(n_gamma(r), complex) if gamma is None else np.atleast_1d(np.asarray(gamma, dtype=complex))
    if gamma.size != n_gamma(r):
        raise ValueError(f"gamma must have {n_gamma(r)} entries for r={r}, got {gamma.size}")
    return mu, gamma


def build_C(mu, gamma=None):
    mu, gamma = _as_mu_gamma(mu, gamma)
    C = np.diag(mu)
    for g, (row, col) in zip(gamma, gamma_pairs(mu.size)):
        C[row, col] = g
    return C


def c_powers(C, m):
    """``[I, C, C**2, ..., C**m]`` by repeated multiplication."""
    out = [np.eye(C.shape[0], dtype=complex)]
    for _ in range(m):
        out.append(out[-1] @ C)
    return out


def build_Q_kronecker(P, mu, gamma=None, powers=None):
    mu, gamma = _as_mu_gamma(mu, gamma)
    if powers is None:
        powers = c_powers(build_C(mu, gamma), P.m)
    Q = sum(np.kron(Cj.T, A) for Cj, A in zip(powers, P.coeffs))
    return StructuredQ(matrix=Q, mu=mu, gamma=gamma, provenance="kronecker")


def increasing_sequences(l, i):
    """All strictly increasing integer sequences starting at ``l`` and ending at ``i``."""
    if not l < i:
        raise ValueError(f"need l < i, got l={l}, i={i}")
    inner = range(l + 1, i)
    out = []
    for size in range(len(inner) + 1):
        for mid in combinations(inner, size):
            out.append((l, *mid, i))
    return out


def _contiguous_runs(nodes):
    """Reorder so equal values are adjacent, runs in order of first appearance."""
    order = []
    for v in nodes:
        if v not in order:
            order.append(v)
    return tuple(v for u in order for v in nodes if v == u)


class DivDiffAssembler:
    """Divided-difference form of ``Q`` for a fixed ``mu``.

    Block ``(i, l)``, ``i > l``, is the sum over increasing index sequences
    ``l = s_0 < s_1 < ... < s_k = i`` of
    ``gamma_{s_1 s_0} ... gamma_{s_k s_{k-1}} P[mu_{s_0}, ..., mu_{s_k}]``;
    diagonal blocks are ``P(mu_i)``. The divided differences depend on
    ``mu`` only and are computed once; calling the assembler with a
    ``Gamma`` forms the weighted sums.
    """

    def __init__(self, P, mu):
        self.P = P
        self.mu = np.atleast_1d(np.asarray(mu, dtype=complex))
        r, n = self.mu.size, P.n
        self.n, self.r = n, r
        self.diag = [P.eval(self.mu[i]) for i in range(r)]
        cache = {}
        self.terms = {}
        for i in range(r):
            for l in range(i):
                terms = []
                for seq in increasing_sequences(l, i):
                    # repeated values are regrouped into contiguous runs;
                    # divided differences are symmetric in their nodes
                    nodes = _contiguous_runs(tuple(complex(self.mu[s]) for s in seq))
                    if nodes not in cache:
                        cache[nodes] = P.divided_difference(nodes)
                    terms.append((tuple(zip(seq[:-1], seq[1:])), cache[nodes]))
                self.terms[i, l] = terms

    def __call__(self, gamma=None):
        mu, gamma = _as_mu_gamma(self.mu, gamma)
        n, r = self.n, self.r
        C = build_C(mu, gamma)
        Q = np.zeros((n * r, n * r), dtype=complex)
        for i in range(r):
            Q[i * n:(i + 1) * n, i * n:(i + 1) * n] = self.diag[i]
            for l in range(i):
                blk = Q[i * n:(i + 1) * n, l * n:(l + 1) * n]
                for steps, D in self.terms[i, l]:
                    coef = 1.0 + 0j
                    for a, b in steps:
                        coef *= C[a, b]
                    if coef != 0:
                        blk += coef * D
        return StructuredQ(matrix=Q, mu=mu, gamma=gamma, provenance="divdiff")


def build_Q_divdiff(P, mu, gamma=None):
    """Block lower triangular ``Q`` assembled from divided differences of ``P``
    (see :class:`DivDiffAssembler`)."""
    mu, gamma = _as_mu_gamma(mu, gamma)
    return DivDiffAssembler(P, mu)(gamma)


def dQ_dgamma(P, mu, gamma, k, i):
    """Partial derivatives of ``Q`` with respect to ``Re gamma_ki`` and ``Im gamma_ki``.

    ``k, i`` are 1-based with ``i < k``; the parameter lives at ``C[i, k]``.
    """
    mu, gamma = _as_mu_gamma(mu, gamma)
    r = mu.size
    index_of(k, i, r)
    powers = c_powers(build_C(mu, gamma), P.m)
    E = np.zeros((r, r), dtype=complex)
    E[i - 1, k - 1] = 1.0
    dre = np.zeros((P.n * r, P.n * r), dtype=complex)
    for j in range(1, P.m + 1):
        S = sum(powers[l] @ E @ powers[j - 1 - l] for l in range(j))
        dre += np.kron(S.T, P.coeffs[j])
    return dre, 1j * dre
