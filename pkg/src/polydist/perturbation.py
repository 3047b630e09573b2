"""Optimal constant-coefficient perturbation and its verification."""

from dataclasses import dataclass

import numpy as np

from .linalg_core import match_greedy, nullspace_basis, pseudo_inverse, singular_values, svd_full
from .objective import unstack
from .structured import build_C, build_Q_kronecker, c_powers

__all__ = ["PerturbationVerdict", "optimal_delta", "verify", "commutant_samples",
           "sylvester_residual", "MATCH_TOL", "RANK_TOL", "NORM_TOL"]

MATCH_TOL = 1e-4
RANK_TOL = 1e-8
NORM_TOL = 1e-8


@dataclass(frozen=True)
class PerturbationVerdict:
    kappa: float
    delta_norm: float
    norm_residual: float
    rank_residual: float
    sylvester_dim: int
    sylvester_residual: float
    eig_placement: list
    placement_count: int
    r: int
    match_tol: float
    q_norm: float = 1.0

    @property
    def checks(self):
        # at a numerically zero distance the relative norm residual is
        # rounding noise; "zero" uses the same scale as the rank check
        negligible = max(self.kappa, self.delta_norm) <= RANK_TOL * self.q_norm
        return {
            "norm": self.norm_residual <= NORM_TOL or negligible,
            "rank": self.rank_residual <= RANK_TOL,
            "sylvester_dim": self.sylvester_dim >= self.r,
            "sylvester_residual": self.sylvester_residual <= RANK_TOL,
            "placement": self.placement_count >= self.r,
        }

    @property
    def passed(self):
        return all(self.checks.values())


def optimal_delta(inner, n, r):
    """``Delta = -kappa * U_mat @ pinv(V_mat)`` from the maximizing singular pair,
    with ``U_mat, V_mat`` the ``n x r`` unstackings of the singular vectors."""
    if inner.kappa == 0.0:
        return np.zeros((n, n), dtype=complex)
    Um = unstack(inner.eval.U, n, r)
    Vm = unstack(inner.eval.V, n, r)
    return -inner.kappa * Um @ pseudo_inverse(Vm)


def sylvester_residual(P, X, C, delta):
    """``sum_j A_j X C**j + Delta X``."""
    powers = c_powers(C, P.m)
    R = delta @ X
    for A, Cj in zip(P.coeffs, powers):
        R = R + A @ X @ Cj
    return R


def verify(P, mu, gamma_star, r, delta, match_tol=MATCH_TOL):
    """Check the properties an optimal perturbation must have.

    ``P + Delta`` changes only the constant coefficient. Residuals are
    relative to ``||Q(mu, Gamma*, P + Delta)||_2``.
    """
    mu = np.atleast_1d(np.asarray(mu, dtype=complex))
    delta = np.asarray(delta, dtype=complex)
    Q0 = build_Q_kronecker(P, mu, gamma_star).matrix
    s0 = singular_values(Q0)
    kappa = float(s0[-r])
    dnorm = float(singular_values(delta)[0])
    norm_res = abs(dnorm - kappa) / max(kappa, np.finfo(float).eps)

    Pd = P.perturb_constant(delta)
    Qd = build_Q_kronecker(Pd, mu, gamma_star).matrix
    sd = svd_full(Qd).s
    qn = float(sd[0]) if sd[0] > 0 else 1.0  # Q == 0 is fully rank deficient
    rank_res = float(sd[-r] / qn)
    dim = int(np.count_nonzero(sd <= RANK_TOL * qn))

    C = build_C(mu, gamma_star)
    basis = nullspace_basis(Qd, RANK_TOL)
    syl = 0.0
    for t in range(basis.shape[1]):
        X = unstack(basis[:, t], P.n, r)
        R = sylvester_residual(P, X, C, delta)
        syl = max(syl, float(np.linalg.norm(R) / (qn * np.linalg.norm(X))))

    lam = Pd.eigenvalues()
    placement = match_greedy(lam, mu)
    count = sum(1 for _, _, d in placement if d <= match_tol)
    return PerturbationVerdict(kappa=kappa, delta_norm=dnorm, norm_residual=float(norm_res),
                               rank_residual=rank_res, sylvester_dim=dim, sylvester_residual=syl,
                               eig_placement=placement, placement_count=count, r=r,
                               match_tol=match_tol, q_norm=float(s0[0]))


def commutant_samples(C, rng, count=3):
    """Random polynomials in ``C``; they commute with ``C`` by construction."""
    r = C.shape[0]
    powers = c_powers(C, r - 1)
    out = []
    for _ in range(count):
        c = rng.standard_normal(r) + 1j * rng.standard_normal(r)
        out.append(sum(ck * Ck for ck, Ck in zip(c, powers)))
    return out
