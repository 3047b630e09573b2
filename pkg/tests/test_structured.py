import numpy as np
import pytest
from hypothesis import given, strategies as st

from polydist.linalg_core import singular_values
from polydist.structured import (
    DivDiffAssembler,
    build_C,
    build_Q_divdiff,
    build_Q_kronecker,
    dQ_dgamma,
    gamma_pairs,
    increasing_sequences,
    index_of,
    n_gamma,
)

from conftest import crandn, rand_poly


def test_index_of_enumerates_canonical_order():
    r = 4
    order = [(k, i) for i in range(1, r) for k in range(i + 1, r + 1)]
    assert [index_of(k, i, r) for k, i in order] == list(range(n_gamma(r)))
    assert order[:3] == [(2, 1), (3, 1), (4, 1)]
    with pytest.raises(IndexError):
        index_of(1, 2, 3)


def test_build_C_layout():
    mu = np.array([1.0, 2.0])
    assert np.array_equal(build_C(mu, [7.0]), [[1, 7], [0, 2]])
    C = build_C([1, 2, 3], [21, 31, 32])
    assert np.array_equal(C[0], [1, 21, 31])
    assert np.array_equal(C[1], [0, 2, 32])
    assert np.array_equal(build_C([1j, 2, 3]), np.diag([1j, 2, 3]))
    with pytest.raises(ValueError):
        build_C([1, 2], [1, 2])


def test_gamma_pairs_positions():
    assert gamma_pairs(3) == ((0, 1), (0, 2), (1, 2))


def test_increasing_sequences():
    assert increasing_sequences(1, 2) == [(1, 2)]
    assert sorted(increasing_sequences(1, 3)) == [(1, 2, 3), (1, 3)]
    assert len(increasing_sequences(1, 4)) == 4
    assert len(increasing_sequences(0, 6)) == 2**5


def test_kronecker_small_cases():
    P = rand_poly(1, 3, 2)
    mu = 0.3 - 0.4j
    assert np.allclose(build_Q_kronecker(P, [mu]).matrix, P.eval(mu))
    g = 1.7 - 0.2j
    Q = build_Q_kronecker(P, [mu, mu], [g])
    assert np.allclose(Q.block(0, 0), P.eval(mu)) and np.allclose(Q.block(1, 1), P.eval(mu))
    assert np.allclose(Q.block(0, 1), 0)
    assert np.allclose(Q.block(1, 0), g * P.eval_derivative(mu, 1))
    Q0 = build_Q_kronecker(P, [0.1, 2.0, -1j]).matrix
    D = np.zeros_like(Q0)
    for t, z in enumerate([0.1, 2.0, -1j]):
        D[3 * t:3 * t + 3, 3 * t:3 * t + 3] = P.eval(z)
    assert np.allclose(Q0, D)


def test_divdiff_small_cases():
    P = rand_poly(2, 2, 3)
    m1, m2, m3 = 0.5, -0.2 + 1j, 1.3j
    g = 0.8 + 0.1j
    Q = build_Q_divdiff(P, [m1, m2], [g])
    assert np.allclose(Q.block(1, 0), g * P.divided_difference([m1, m2]))
    G = [0.3, -1.1j, 2.0]  # gamma_21, gamma_31, gamma_32
    Q3 = build_Q_divdiff(P, [m1, m2, m3], G)
    want = G[0] * G[2] * P.divided_difference([m1, m2, m3]) + G[1] * P.divided_difference([m1, m3])
    assert np.allclose(Q3.block(2, 0), want)
    # confluent r = 3: gamma21 gamma32 P''/2 + gamma31 P'
    Qc = build_Q_divdiff(P, [m1] * 3, G)
    want = G[0] * G[2] * P.eval_derivative(m1, 2) / 2 + G[1] * P.eval_derivative(m1, 1)
    assert np.allclose(Qc.block(2, 0), want)


def _random_case(seed):
    rng = np.random.default_rng(seed)
    n, m, r = rng.integers(1, 6), rng.integers(1, 4), rng.integers(1, 5)
    P = rand_poly(seed, int(n), int(m))
    pool = crandn(rng, int(r))
    mu = pool[rng.integers(0, r, size=r)]  # repeats allowed, in any order
    gamma = crandn(rng, n_gamma(int(r))) * rng.choice([0.1, 1.0, 10.0])
    return P, mu, gamma


@given(st.integers(0, 2**32 - 1))
def test_builders_agree(seed):
    P, mu, gamma = _random_case(seed)
    Qk = build_Q_kronecker(P, mu, gamma).matrix
    Qd = build_Q_divdiff(P, mu, gamma).matrix
    assert singular_values(Qk - Qd)[0] <= 1e-12 * singular_values(Qk)[0]


def test_builders_agree_on_noncontiguous_repeats():
    P = rand_poly(9, 3, 3)
    mu = np.array([0.4, -1.0 + 0.5j, 0.4, -1.0 + 0.5j])
    gamma = np.arange(1, 7) * (0.3 - 0.2j)
    Qk = build_Q_kronecker(P, mu, gamma).matrix
    Qd = build_Q_divdiff(P, mu, gamma).matrix
    assert singular_values(Qk - Qd)[0] <= 1e-12 * singular_values(Qk)[0]


@given(st.integers(0, 2**32 - 1))
def test_block_structure(seed):
    P, mu, gamma = _random_case(seed)
    Qk = build_Q_kronecker(P, mu, gamma)
    Qd = build_Q_divdiff(P, mu, gamma)
    n, r = P.n, mu.size
    scale = singular_values(Qk.matrix)[0]
    for i in range(r):
        assert np.array_equal(Qd.block(i, i), P.eval(mu[i]))
        for l in range(i + 1, r):
            assert not np.any(Qd.block(i, l))
            assert np.linalg.norm(Qk.block(i, l)) <= 1e-13 * scale
    assert Qk.provenance == "kronecker" and Qd.provenance == "divdiff"


def test_assembler_reuses_divided_differences():
    P = rand_poly(4, 3, 2)
    a = DivDiffAssembler(P, [0.1, 0.1, 0.7j])
    for g in ([1, 2, 3], [0.5j, 0, -1]):
        assert np.allclose(a(g).matrix, build_Q_kronecker(P, [0.1, 0.1, 0.7j], g).matrix, atol=1e-12)


@given(st.integers(0, 2**32 - 1), st.floats(0, 2 * np.pi))
def test_r2_spectrum_depends_on_modulus(seed, phase):
    rng = np.random.default_rng(seed)
    P = rand_poly(seed, 3, 2)
    mu = crandn(rng, 2)
    g = abs(crandn(rng, 1)[0]) * 3
    s1 = singular_values(build_Q_kronecker(P, mu, [g * np.exp(1j * phase)]).matrix)
    s2 = singular_values(build_Q_kronecker(P, mu, [g]).matrix)
    assert np.allclose(s1, s2, rtol=1e-11, atol=1e-13 * s2[0])


def test_dQ_dgamma_linear_case():
    P = rand_poly(3, 2, 1)
    mu = [0.2, -0.5]
    dre, dim = dQ_dgamma(P, mu, [0.9], 2, 1)
    E = np.zeros((2, 2))
    E[0, 1] = 1
    assert np.allclose(dre, np.kron(E.T, P.coeffs[1]))
    assert np.array_equal(dim, 1j * dre)


@given(st.integers(0, 2**32 - 1))
def test_dQ_dgamma_matches_finite_differences(seed):
    rng = np.random.default_rng(seed)
    r = int(rng.integers(2, 5))
    P = rand_poly(seed, 2, int(rng.integers(1, 4)))
    mu, gamma = crandn(rng, r), crandn(rng, n_gamma(r))
    i = int(rng.integers(1, r))
    k = int(rng.integers(i + 1, r + 1))
    t = index_of(k, i, r)
    dre, dim = dQ_dgamma(P, mu, gamma, k, i)
    h = 1e-6
    for d, step in ((dre, h), (dim, 1j * h)):
        gp, gm = gamma.copy(), gamma.copy()
        gp[t] += step
        gm[t] -= step
        fd = (build_Q_kronecker(P, mu, gp).matrix - build_Q_kronecker(P, mu, gm).matrix) / (2 * h)
        assert np.linalg.norm(fd - d) <= 1e-6 * max(1.0, np.linalg.norm(d))


def test_decay_along_a_ray():
    # distinct non-eigenvalue mu with full-rank pairwise divided differences
    P = rand_poly(21, 3, 2)
    rng = np.random.default_rng(4)
    mu = crandn(rng, 3)
    for a in range(3):
        for b in range(a + 1, 3):
            assert singular_values(P.divided_difference([mu[a], mu[b]]))[-1] > 1e-6
    ghat = crandn(rng, 3)
    vals = [singular_values(build_Q_kronecker(P, mu, t * ghat).matrix)[-3] for t in (1e2, 1e3, 1e4, 1e5)]
    assert all(b < a for a, b in zip(vals, vals[1:]))
    assert vals[-1] < 1e-2 * vals[0]
