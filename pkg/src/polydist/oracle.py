"""Brute-force references for small instances.

These routines do not use the structured builders or the inner optimizer:
``scan_inner_r2`` assembles the 2x2 block matrix by hand and scans ``gamma``;
``penalty_min_distance`` attacks the distance definition directly by
Nelder-Mead over the entries of ``Delta``; ``random_ball_sampler`` probes
feasibility of random perturbations of a given norm.
"""

import numpy as np
from scipy.optimize import minimize

from .linalg_core import singular_values

__all__ = ["scan_inner_r2", "penalty_min_distance", "random_ball_sampler", "feasibility_penalty"]

_CHUNK = 20000


def _r2_blocks(P, mu):
    mu = np.atleast_1d(np.asarray(mu, dtype=complex))
    if mu.size == 1:
        mu = np.array([mu[0], mu[0]])
    if mu.size != 2:
        raise ValueError("scan_inner_r2 takes one point or a pair")
    a, b = mu
    Pa, Pb = P.eval(a), P.eval(b)
    if a == b:
        D = P.eval_derivative(a, 1)
    else:
        D = (Pa - Pb) / (a - b)
    return Pa, Pb, D


def _sigma2(Pa, Pb, D, gammas):
    n = Pa.shape[0]
    out = np.empty(gammas.size)
    for s in range(0, gammas.size, _CHUNK):
        g = gammas[s:s + _CHUNK]
        M = np.zeros((g.size, 2 * n, 2 * n), dtype=complex)
        M[:, :n, :n] = Pa
        M[:, n:, n:] = Pb
        M[:, n:, :n] = g[:, None, None] * D
        out[s:s + _CHUNK] = singular_values(M)[:, -2]
    return out


def _auto_gamma_max(Pa, Pb, D, max_doublings=60):
    g = 1.0
    prev = _sigma2(Pa, Pb, D, np.array([g]))[0]
    drops = 0
    for _ in range(max_doublings):
        g *= 2.0
        cur = _sigma2(Pa, Pb, D, np.array([g]))[0]
        drops = drops + 1 if cur < prev else 0
        prev = cur
        if drops >= 3:
            break
    return g


def scan_inner_r2(P, mu, gamma_max=None, steps=100_000, return_argmax=False):
    """Maximum of ``sigma_{-2}([[P(mu1), 0], [gamma D, P(mu2)]])`` over the grid
    ``gamma_k = k * gamma_max / steps``, ``k = 0..steps``.

    ``D`` is ``P'(mu)`` for a single point and ``(P(mu1) - P(mu2))/(mu1 - mu2)``
    for a distinct pair. ``gamma_max`` defaults to the first power of two
    after which three consecutive doublings decrease the value. Doubling
    ``steps`` refines the grid by nesting, so it never lowers the maximum.
    """
    if steps < 1000:
        raise ValueError("steps must be at least 1000")
    Pa, Pb, D = _r2_blocks(P, mu)
    if gamma_max is None:
        gamma_max = _auto_gamma_max(Pa, Pb, D)
    k = np.arange(steps + 1, dtype=float)
    gammas = (k * gamma_max) / steps
    vals = _sigma2(Pa, Pb, D, gammas)
    t = int(np.argmax(vals))
    if return_argmax:
        return float(vals[t]), float(gammas[t]), float(gamma_max)
    return float(vals[t])


class _ShiftedSpectrum:
    """Eigenvalues of ``P + Delta`` as those of ``-B^{-1}(A + Delta-block)``
    for the companion pencil, with ``B^{-1}`` formed once."""

    def __init__(self, P):
        L = P.companion()
        self.n = P.n
        Binv = np.linalg.inv(L.B)
        self.M0 = -Binv @ L.A
        self.K = -Binv[:, -P.n:]

    def __call__(self, delta):
        M = self.M0.copy()
        M[:, : self.n] += self.K @ delta
        return np.linalg.eigvals(M)


def _penalty(lam, T, r):
    d = np.min(np.abs(lam[:, None] - T[None, :]), axis=1)
    return float(np.sum(np.sort(d)[:r] ** 2))


def feasibility_penalty(P, targets, r, delta):
    """Sum of squared distances from the ``r`` eigenvalues of ``P + Delta``
    closest to the target set."""
    lam = P.perturb_constant(delta).eigenvalues()
    return _penalty(lam, np.atleast_1d(np.asarray(targets, dtype=complex)), r)


def _adjugate(M):
    n = M.shape[0]
    if n == 1:
        return np.ones((1, 1), dtype=complex)
    adj = np.empty_like(M)
    for i in range(n):
        for j in range(n):
            minor = np.delete(np.delete(M, j, axis=0), i, axis=1)
            adj[i, j] = (-1) ** (i + j) * np.linalg.det(minor)
    return adj


def _det_residual(P, pair, delta):
    """Characteristic-polynomial conditions (complex) for ``pair`` to be
    eigenvalues of ``P + Delta``: a double root when the points coincide."""
    a, b = pair
    Ma = P.eval(a) + delta
    fa = np.linalg.det(Ma)
    if a == b:
        fb = np.trace(_adjugate(Ma) @ P.eval_derivative(a, 1))
    else:
        fb = np.linalg.det(P.eval(b) + delta)
    return np.array([fa, fb])


def _det_conditions(P, pair, delta):
    F = _det_residual(P, pair, delta)
    return np.concatenate([F.real, F.imag])


def _project(P, pair, delta, steps=8):
    """Gauss-Newton (minimum-norm steps) onto the determinant conditions.
    The residual is holomorphic in the entries of ``Delta``, so one complex
    central difference per entry gives the Jacobian."""
    n = P.n
    D = np.array(delta, dtype=complex)
    for _ in range(steps):
        F = _det_residual(P, pair, D)
        h = 1e-6 * max(1.0, np.linalg.norm(D))
        J = np.empty((2, n * n), dtype=complex)
        for e in range(n * n):
            E = np.zeros(n * n, dtype=complex)
            E[e] = h
            E = E.reshape(n, n)
            J[:, e] = (_det_residual(P, pair, D + E) - _det_residual(P, pair, D - E)) / (2 * h)
        step = np.linalg.lstsq(J, -F, rcond=None)[0]
        D = D + step.reshape(n, n)
        if np.linalg.norm(step) <= 1e-15 * max(1.0, np.linalg.norm(D)):
            break
    return D


def _polish_constrained(P, pair, x0, unpack, maxiter=200):
    """SLSQP on ``min t`` s.t. ``t^2 I - Delta* Delta`` PSD and the determinant
    conditions, starting from ``x0``."""
    n = P.n
    d = x0.size
    detscale = max(1.0, abs(np.linalg.det(P.coeffs[-1])))

    def eq(y):
        return _det_conditions(P, pair, unpack(y[:d])) / detscale

    def psd(y):
        D = unpack(y[:d])
        H = y[d] ** 2 * np.eye(n) - D.conj().T @ D
        c = np.real(np.poly(H))[1:]
        return np.array([(-1) ** (k + 1) * c[k] for k in range(n)])

    t0 = float(singular_values(unpack(x0))[0]) * (1 + 1e-9)
    res = minimize(lambda y: y[d], np.append(x0, t0), method="SLSQP",
                   constraints=[{"type": "eq", "fun": eq}, {"type": "ineq", "fun": psd}],
                   options={"maxiter": maxiter, "ftol": 1e-14})
    return _project(P, pair, unpack(res.x[:d]))


def penalty_min_distance(P, targets, r, restarts=3, seed=0, rhos=(1e2, 1e4, 1e6),
                         maxiter=1000, feas_tol=1e-8, max_restarts=2, coarse_starts=12):
    """Upper-bound estimate of the distance by direct minimization over ``Delta``.

    Stage one minimizes ``||Delta||_2 + rho * feasibility_penalty(Delta)`` over
    the ``2 n**2`` real parameters of ``Delta`` with Nelder-Mead (simplex
    restarts, continuation in ``rho``). Stage two polishes each end point with
    SLSQP on an epigraph form whose constraints are smooth: the determinant
    conditions for the best-matched target pair and positive
    semidefiniteness of ``t^2 I - Delta* Delta``. Stage three runs a short
    SLSQP from ``coarse_starts`` random points around each rank-one start
    and fully polishes the two best, which escapes the local minima the
    simplex stage tends to settle in. Only points whose
    eigenvalue penalty is at most ``feas_tol`` count; returns the smallest
    ``||Delta||_2`` among them, or ``inf``. Supports ``r = 2``.
    """
    if r != 2:
        raise ValueError("penalty_min_distance supports r = 2 only")
    n = P.n
    T = np.atleast_1d(np.asarray(targets, dtype=complex))
    rng = np.random.Generator(np.random.Philox(int(seed)))
    d = 2 * n * n

    def unpack(x):
        return (x[: n * n] + 1j * x[n * n:]).reshape(n, n)

    def pack(D):
        return np.concatenate([D.real.ravel(), D.imag.ravel()])

    spectrum = _ShiftedSpectrum(P)

    def pen(x):
        return _penalty(spectrum(unpack(x)), T, r)

    def norm(x):
        return float(singular_values(unpack(x))[0])

    if pen(np.zeros(d)) <= feas_tol:
        return 0.0

    starts = []
    for t in T:
        # rank-one move putting one eigenvalue at t
        U, sv, Vh = np.linalg.svd(P.eval(t))
        starts.append(pack(-sv[-1] * np.outer(U[:, -1], Vh[-1])))
    s0 = min(np.linalg.norm(x) for x in starts)
    while len(starts) < restarts:
        starts.append(starts[len(starts) % T.size] + rng.standard_normal(d) * s0 * 0.5)

    pairs = [(T[i], T[j]) for i in range(T.size) for j in range(i, T.size)]
    best = np.inf
    for x in starts[:max(restarts, 1)]:
        for rho in rhos:
            f_prev = np.inf
            for _ in range(max_restarts):
                step = max(1e-6, 0.05 * np.linalg.norm(x))
                simplex = np.vstack([x, x + step * np.eye(d)])
                res = minimize(lambda y: norm(y) + rho * pen(y), x, method="Nelder-Mead",
                               options={"maxiter": maxiter, "adaptive": True, "initial_simplex": simplex,
                                        "xatol": 1e-12, "fatol": 1e-14})
                x = res.x
                if f_prev - res.fun <= 1e-10 * max(1.0, abs(res.fun)):
                    break
                f_prev = res.fun
        cands = [x]
        for pair in pairs:
            try:
                cands.append(pack(_polish_constrained(P, pair, x, unpack)))
            except (ValueError, np.linalg.LinAlgError):
                continue
        for y in cands:
            if np.all(np.isfinite(y)) and pen(y) <= feas_tol:
                best = min(best, norm(y))

    scales = (0.3, 1.0, 3.0)
    for pair in pairs:
        coarse = []
        for k in range(coarse_starts):
            base = starts[k % T.size]
            x = base + rng.standard_normal(d) * np.linalg.norm(base) * scales[k % len(scales)]
            try:
                y = pack(_polish_constrained(P, pair, x, unpack, maxiter=30))
            except (ValueError, np.linalg.LinAlgError):
                continue
            if np.all(np.isfinite(y)) and pen(y) <= feas_tol:
                coarse.append((norm(y), k, y))
        for v, _, y in sorted(coarse, key=lambda c: c[:2])[:2]:
            best = min(best, v)
            try:
                z = pack(_polish_constrained(P, pair, y, unpack))
            except (ValueError, np.linalg.LinAlgError):
                continue
            if np.all(np.isfinite(z)) and pen(z) <= feas_tol:
                best = min(best, norm(z))
    return best


def random_ball_sampler(P, targets, r, radius, samples=1000, seed=0, include=(), match_tol=1e-4):
    """Count perturbations of spectral norm ``radius`` that place at least
    ``r`` eigenvalues within ``match_tol`` of the targets.

    Directions are complex Gaussian matrices rescaled to the sphere; the
    matrices in ``include`` are tested as given, in addition.
    """
    if samples < 100:
        raise ValueError("samples must be at least 100")
    n = P.n
    rng = np.random.Generator(np.random.Philox(int(seed)))
    hits = 0
    for _ in range(samples):
        G = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        D = G * (radius / singular_values(G)[0])
        if P.perturb_constant(D).multiplicity_sum(targets, match_tol) >= r:
            hits += 1
    for D in include:
        if P.perturb_constant(D).multiplicity_sum(targets, match_tol) >= r:
            hits += 1
    return hits
