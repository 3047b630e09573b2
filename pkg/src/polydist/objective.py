"""Inner objective ``sigma_{-r}(Q(mu, Gamma, P))`` and its first-order data.

The gradient with respect to the real parameters of ``Gamma`` is read off
the ``r x r`` matrix

    G = sum_{j>=1} sum_{l<j} C**(j-1-l) U* A_j V C**l,

where ``U`` and ``V`` are the singular vectors unstacked column-wise into
``n x r`` matrices: ``d sigma / d Re gamma_ki = Re G[k, i]`` and
``d sigma / d Im gamma_ki = -Im G[k, i]``. At a stationary point the strict
lower triangle of ``G`` vanishes and ``U*U == V*V``.
"""

from dataclasses import dataclass

import numpy as np

from .linalg_core import singular_values, svd_full
from .structured import DivDiffAssembler, build_C, build_Q_divdiff, build_Q_kronecker, c_powers, gamma_pairs, n_gamma

__all__ = [
    "ObjectiveEval",
    "Certificates",
    "evaluate",
    "certificates",
    "g_matrix",
    "unstack",
    "gamma_to_real",
    "real_to_gamma",
    "SIMPLE_GAP_TOL",
    "V_RANK_TOL",
]

SIMPLE_GAP_TOL = 1e-8
V_RANK_TOL = 1e-8


@dataclass(frozen=True)
class ObjectiveEval:
    """Value and first-order data of ``sigma_{-r}(Q)`` at one ``(mu, Gamma)``.

    ``gradient`` has length ``r(r-1)``: for each ``Gamma`` entry in canonical
    order, the derivative w.r.t. its real part followed by its imaginary part.
    ``sigma_gap`` is the distance to the nearest other singular value,
    relative to ``||Q||_2``.
    """

    value: float
    U: np.ndarray
    V: np.ndarray
    gradient: np.ndarray
    sigma_gap: float
    q_norm: float
    mu: np.ndarray
    gamma: np.ndarray
    G: np.ndarray


@dataclass(frozen=True)
class Certificates:
    g_matrix: np.ndarray
    lower_G_residual: float
    uu_vv_residual: float
    v_rank_ok: bool
    sigma_simple: bool

    @property
    def g_norm(self):
        return float(np.linalg.norm(self.g_matrix))


def unstack(w, n, r):
    """Inverse of column-stacking ``vec``: length ``n r`` vector -> ``n x r``."""
    return np.asarray(w).reshape((r, n)).T


def gamma_to_real(gamma):
    g = np.asarray(gamma, dtype=complex)
    x = np.empty(2 * g.size)
    x[0::2] = g.real
    x[1::2] = g.imag
    return x


def real_to_gamma(x):
    x = np.asarray(x, dtype=float)
    return x[0::2] + 1j * x[1::2]


def g_matrix(P, powers, Umat, Vmat):
    r = Umat.shape[1]
    G = np.zeros((r, r), dtype=complex)
    for j in range(1, P.m + 1):
        W = Umat.conj().T @ P.coeffs[j] @ Vmat
        for l in range(j):
            G += powers[j - 1 - l] @ W @ powers[l]
    return G


def evaluate(P, mu, gamma=None, r=None, builder="kronecker"):
    """Evaluate ``sigma_{-r}(Q(mu, Gamma, P))`` with a consistent singular pair
    and its gradient over the real and imaginary parts of ``Gamma``.

    ``builder`` is ``"kronecker"``, ``"divdiff"`` or a prebuilt
    :class:`~polydist.structured.DivDiffAssembler` for this ``mu``.
    """
    mu = np.atleast_1d(np.asarray(mu, dtype=complex))
    r = mu.size if r is None else r
    if r != mu.size:
        raise ValueError(f"r={r} does not match len(mu)={mu.size}")
    gamma = np.zeros(n_gamma(r), complex) if gamma is None else np.atleast_1d(np.asarray(gamma, complex))
    C = build_C(mu, gamma)
    powers = c_powers(C, P.m)
    if builder == "kronecker":
        Q = build_Q_kronecker(P, mu, gamma, powers=powers).matrix
    elif builder == "divdiff":
        Q = build_Q_divdiff(P, mu, gamma).matrix
    elif isinstance(builder, DivDiffAssembler):
        Q = builder(gamma).matrix
    else:
        raise ValueError(f"unknown builder {builder!r}")

    res = svd_full(Q)
    idx = res.index_from_bottom(r)
    sigma = float(res.s[idx])
    u, v = res.pair_from_bottom(r)
    # fix the phase: largest |V| entry real positive
    p = np.argmax(np.abs(v))
    ph = np.conj(v[p]) / abs(v[p]) if v[p] != 0 else 1.0
    u, v = u * ph, v * ph
    v[p] = abs(v[p])

    s = res.s
    gaps = []
    if idx > 0:
        gaps.append(s[idx - 1] - sigma)
    if idx + 1 < s.size:
        gaps.append(sigma - s[idx + 1])
    qn = float(s[0])
    gap = min(gaps) / qn if gaps and qn > 0 else np.inf

    n = P.n
    Um, Vm = unstack(u, n, r), unstack(v, n, r)
    G = g_matrix(P, powers, Um, Vm)
    grad = np.empty(2 * n_gamma(r))
    for t, (row, col) in enumerate(gamma_pairs(r)):
        g = G[col, row]
        grad[2 * t] = g.real
        grad[2 * t + 1] = -g.imag
    return ObjectiveEval(value=sigma, U=u, V=v, gradient=grad, sigma_gap=float(gap), q_norm=qn,
                         mu=mu, gamma=gamma, G=G)


def certificates(P, ev):
    """Stationarity certificates at an evaluation point."""
    r = ev.mu.size
    n = P.n
    Um, Vm = unstack(ev.U, n, r), unstack(ev.V, n, r)
    G = ev.G
    lower = float(np.linalg.norm(np.tril(G, -1)))
    uu_vv = float(singular_values(Um.conj().T @ Um - Vm.conj().T @ Vm)[0])
    sv = singular_values(Vm)
    v_rank_ok = bool(sv[-1] > V_RANK_TOL * sv[0]) if sv[0] > 0 else False
    return Certificates(g_matrix=G, lower_G_residual=lower, uu_vv_residual=uu_vv,
                        v_rank_ok=v_rank_ok, sigma_simple=bool(ev.sigma_gap > SIMPLE_GAP_TOL))


def commutator_identity_residual(P, ev):
    """``||G C - C G - sigma (U*U - V*V)||_2``; zero whenever (U, V) is an
    exact singular pair, stationary or not."""
    r, n = ev.mu.size, P.n
    C = build_C(ev.mu, ev.gamma)
    Um, Vm = unstack(ev.U, n, r), unstack(ev.V, n, r)
    lhs = ev.G @ C - C @ ev.G
    rhs = ev.value * (Um.conj().T @ Um - Vm.conj().T @ Vm)
    return float(singular_values(lhs - rhs)[0])
