import numpy as np
import pytest

from polydist.linalg_core import nullspace_basis, singular_values
from polydist.objective import unstack
from polydist.optimizer import make_rng, maximize_inner, tau_r
from polydist.perturbation import commutant_samples, optimal_delta, sylvester_residual, verify
from polydist.polynomial import MatrixPolynomial
from polydist.structured import build_C, build_Q_kronecker

from conftest import rand_poly


def test_r1_is_eckart_young_step():
    P = rand_poly(3, 4, 2)
    mu = 0.1 + 0.3j
    inner = maximize_inner(P, [mu])
    D = optimal_delta(inner, 4, 1)
    assert singular_values(D)[0] == pytest.approx(singular_values(P.eval(mu))[-1], rel=1e-12)
    assert np.linalg.matrix_rank(D, tol=1e-10) == 1
    assert singular_values(P.eval(mu) + D)[-1] <= 1e-13


def test_zero_distance_gives_zero_perturbation():
    P = MatrixPolynomial([-np.diag([1.0, 2.0]), np.eye(2)])
    inner = maximize_inner(P, [1.0])
    assert inner.kappa == 0.0
    assert not np.any(optimal_delta(inner, 2, 1))


def test_verify_zero_delta_on_existing_eigenvalues():
    P = MatrixPolynomial([-np.diag([1.0, 2.0]), np.eye(2)])
    v = verify(P, [1.0, 2.0], [0.0], 2, np.zeros((2, 2)))
    assert v.passed and v.placement_count == 2


def test_verify_negative_control():
    P = rand_poly(4, 3, 2)
    mu = np.array([5.0, 5.0 + 1j])
    v = verify(P, mu, [0.7], 2, np.zeros((3, 3)))
    assert v.placement_count == 0
    Q = build_Q_kronecker(P, mu, [0.7]).matrix
    s = singular_values(Q)
    assert v.rank_residual == pytest.approx(s[-2] / s[0])
    assert not v.passed


def test_clean_run_properties():
    P = rand_poly(17, 5, 2, complex_entries=False)
    rep = tau_r(P, [0.2 - 0.4j, -0.5], 2)
    assert rep.inner.clean
    v = rep.verification
    assert v.norm_residual <= 1e-8
    assert v.rank_residual <= 1e-8 and v.sylvester_dim >= 2 and v.sylvester_residual <= 1e-8
    assert v.placement_count >= 2
    # any verified perturbation bounds the distance from above
    assert rep.tau <= v.delta_norm * (1 + 1e-10)


def test_commutant_solutions():
    P = rand_poly(17, 5, 2, complex_entries=False)
    rep = tau_r(P, [0.2 - 0.4j, -0.5], 2)
    C = build_C(rep.mu_star, rep.inner.gamma_star)
    Pd = P.perturb_constant(rep.delta)
    Q = build_Q_kronecker(Pd, rep.mu_star, rep.inner.gamma_star).matrix
    X = unstack(nullspace_basis(Q, 1e-8)[:, 0], 5, 2)
    scale = singular_values(Q)[0]
    for D in commutant_samples(C, make_rng(0)):
        assert np.linalg.norm(C @ D - D @ C) <= 1e-12 * max(1, np.linalg.norm(D))
        R = sylvester_residual(P, X @ D, C, rep.delta)
        assert np.linalg.norm(R) <= 1e-8 * scale * np.linalg.norm(X @ D)
