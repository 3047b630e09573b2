"""Inner maximization over Gamma and outer minimization over mu.

``maximize_inner`` computes ``kappa_r(mu) = sup_Gamma sigma_{-r}(Q(mu, Gamma, P))``
by multi-start BFGS with the analytic gradient, followed by a few Newton
steps on a finite-difference Hessian to drive the gradient to rounding
level. ``tau_r`` minimizes ``kappa_r`` over multisets drawn from the target
set; ``nearest_multiple_eig`` minimizes the multiple-eigenvalue distance
over the complex plane by a coarse grid plus Nelder-Mead refinement.
"""

from dataclasses import dataclass, field
from itertools import combinations_with_replacement

import numpy as np
from scipy.optimize import minimize

from .objective import certificates, evaluate, real_to_gamma, SIMPLE_GAP_TOL
from .pseudospectrum import Region
from .structured import DivDiffAssembler, n_gamma

__all__ = [
    "OptimizerConfig",
    "InnerResult",
    "DistanceReport",
    "maximize_inner",
    "tau_r",
    "mult_distance",
    "nearest_multiple_eig",
    "default_region",
    "make_rng",
]

START_SCALES = (0.1, 1.0, 10.0)


@dataclass(frozen=True)
class OptimizerConfig:
    starts: int = 8
    max_iters: int = 200
    grad_tol: float = 1e-9
    step_tol: float = 1e-14
    seed: int = 0
    r2_real_reduction: bool = True
    region: Region | None = None
    nx: int = 30
    ny: int = 30
    refine_iters: int = 200
    refine_best: int = 3
    gamma_cap: float = 1e6
    polish_steps: int = 6

    def __post_init__(self):
        if self.starts < 1 or self.max_iters < 1 or self.refine_iters < 1:
            raise ValueError("starts, max_iters and refine_iters must be positive")
        if not (self.grad_tol > 0 and self.step_tol > 0 and self.gamma_cap > 0):
            raise ValueError("tolerances must be positive")
        if self.nx < 2 or self.ny < 2:
            raise ValueError("grid needs nx, ny >= 2")


@dataclass(frozen=True)
class InnerResult:
    kappa: float
    gamma_star: np.ndarray
    eval: object
    certs: object
    converged: bool
    assumption_flags: dict
    start_values: tuple = ()

    @property
    def mu(self):
        return self.eval.mu

    @property
    def clean(self):
        f = self.assumption_flags
        return self.converged and f["sigma_simple"] and f["v_rank_ok"] and not f["attainment_suspect"]


@dataclass(frozen=True)
class DistanceReport:
    tau: float
    mu_star: np.ndarray
    inner: InnerResult
    delta: np.ndarray
    verification: object
    per_mu_table: list
    targets: np.ndarray
    r: int
    kind: str = "distance"
    grid_min: tuple | None = None
    refined_min: tuple | None = None
    extras: dict = field(default_factory=dict)

    @property
    def flags_clean(self):
        return self.inner.clean


def make_rng(seed):
    """Counter-based Philox generator; streams are reproducible across platforms."""
    return np.random.Generator(np.random.Philox(int(seed)))


def _start_points(p, cfg, real_reduced):
    rng = make_rng(cfg.seed)
    pts = [np.zeros(1 if real_reduced else 2 * p)]
    for s in range(cfg.starts):
        scale = START_SCALES[s % len(START_SCALES)]
        g = (rng.standard_normal(p) + 1j * rng.standard_normal(p)) / np.sqrt(2) * scale
        if real_reduced:
            pts.append(np.array([abs(g[0])]))
        else:
            x = np.empty(2 * p)
            x[0::2], x[1::2] = g.real, g.imag
            pts.append(x)
    return pts


def maximize_inner(P, mu, r=None, cfg=None, builder="kronecker"):
    """Maximize ``sigma_{-r}(Q(mu, Gamma, P))`` over ``Gamma``.

    Returns the best point over all starts (``Gamma = 0`` plus ``cfg.starts``
    random complex normal starts at scales 0.1, 1, 10 cycled). For ``r = 2``
    with ``cfg.r2_real_reduction`` only real ``gamma >= 0`` is searched, which
    loses nothing because the singular values depend on ``|gamma|`` only.
    """
    cfg = cfg or OptimizerConfig()
    mu = np.atleast_1d(np.asarray(mu, dtype=complex))
    r = mu.size if r is None else r
    if r != mu.size:
        raise ValueError(f"r={r} does not match len(mu)={mu.size}")
    p = n_gamma(r)
    attainment_suspect = r > P.n

    if p == 0:
        ev = evaluate(P, mu, None, r, builder)
        return _finish(P, ev, cfg, attainment_suspect, ())

    real_reduced = r == 2 and cfg.r2_real_reduction
    if builder == "divdiff":
        builder = DivDiffAssembler(P, mu)

    def to_gamma(z):
        return np.array([complex(z[0])]) if real_reduced else real_to_gamma(z)

    cache = {}

    def ev_at(z):
        key = z.tobytes()
        if key not in cache:
            cache[key] = evaluate(P, mu, to_gamma(z), r, builder)
        return cache[key]

    def reduced_grad(ev):
        return ev.gradient[:1] if real_reduced else ev.gradient

    candidates = []
    for z0 in _start_points(p, cfg, real_reduced):
        z = _ascend(ev_at, reduced_grad, z0, cfg, real_reduced)
        candidates.append((ev_at(z).value, z))
    start_values = tuple(v for v, _ in candidates)
    # fixed order: first best wins on ties
    best_val, best_z = candidates[0]
    for v, z in candidates[1:]:
        if v > best_val:
            best_val, best_z = v, z
    best_z = _polish(ev_at, reduced_grad, best_z, cfg, real_reduced)

    gnorm = float(np.linalg.norm(best_z))
    if gnorm > cfg.gamma_cap:
        best_z = best_z * (cfg.gamma_cap / gnorm)
        attainment_suspect = True
    ev = ev_at(best_z)
    return _finish(P, ev, cfg, attainment_suspect, start_values)


def _finish(P, ev, cfg, attainment_suspect, start_values):
    certs = certificates(P, ev)
    converged = bool(np.linalg.norm(ev.gradient) <= cfg.grad_tol * max(1.0, ev.value))
    flags = {
        "sigma_simple": certs.sigma_simple,
        "v_rank_ok": certs.v_rank_ok,
        "attainment_suspect": bool(attainment_suspect),
    }
    return InnerResult(kappa=ev.value, gamma_star=ev.gamma, eval=ev, certs=certs,
                       converged=converged, assumption_flags=flags, start_values=start_values)


def _ascend(ev_at, reduced_grad, z0, cfg, real_reduced):
    """Local ascent from one start; derivative-free if the singular value is
    (numerically) multiple at the start or at an accepted iterate. Trial
    points inside line searches do not count."""
    nonsimple = [ev_at(z0).sigma_gap <= SIMPLE_GAP_TOL]

    def fun(z):
        ev = ev_at(z)
        return -ev.value, -reduced_grad(ev)

    def watch(zk):
        if ev_at(np.asarray(zk, dtype=float)).sigma_gap <= SIMPLE_GAP_TOL:
            nonsimple[0] = True

    opts = {"maxiter": cfg.max_iters}
    if real_reduced:
        res = minimize(fun, z0, jac=True, method="L-BFGS-B", bounds=[(0.0, cfg.gamma_cap)], callback=watch,
                       options={**opts, "gtol": cfg.grad_tol * 1e-2, "ftol": 1e-15})
    else:
        res = minimize(fun, z0, jac=True, method="BFGS", callback=watch,
                       options={**opts, "gtol": cfg.grad_tol * 1e-2, "xrtol": cfg.step_tol})
    z = np.asarray(res.x, dtype=float)
    watch(z)
    if nonsimple[0]:
        bounds = [(0.0, cfg.gamma_cap)] if real_reduced else None
        nm = minimize(lambda w: -ev_at(np.asarray(w, float)).value, z0, method="Nelder-Mead",
                      bounds=bounds,
                      options={"maxiter": 200 * max(1, z0.size), "xatol": 1e-12, "fatol": 1e-15})
        if -nm.fun >= ev_at(z).value:
            z = np.asarray(nm.x, dtype=float)
    return z


def _polish(ev_at, reduced_grad, z, cfg, real_reduced):
    """Newton steps on the gradient with a central-difference Hessian."""
    for _ in range(cfg.polish_steps):
        ev = ev_at(z)
        g = reduced_grad(ev)
        gn = np.linalg.norm(g)
        if gn <= 1e-15 * max(1.0, ev.value) or ev.sigma_gap <= SIMPLE_GAP_TOL:
            break
        d = z.size
        h = 1e-5 * max(1.0, np.linalg.norm(z))
        H = np.empty((d, d))
        for t in range(d):
            e = np.zeros(d)
            e[t] = h
            H[:, t] = (reduced_grad(ev_at(z + e)) - reduced_grad(ev_at(z - e))) / (2 * h)
        H = 0.5 * (H + H.T)
        step = np.linalg.lstsq(H, -g, rcond=1e-10)[0]
        znew = z + step
        if real_reduced and znew[0] < 0:
            break
        evn = ev_at(znew)
        if evn.value < ev.value - 1e-14 * max(1.0, ev.value) or np.linalg.norm(reduced_grad(evn)) >= gn:
            break
        z = znew
    return z


def tau_r(P, S, r, cfg=None):
    """Distance to the nearest ``P + Delta`` with at least ``r`` eigenvalues
    (counted with multiplicity) in ``S``.

    Minimizes ``kappa_r`` over all size-``r`` multisets from ``S`` in
    lexicographic index order; the first minimizer wins ties.
    """
    from .perturbation import optimal_delta, verify

    cfg = cfg or OptimizerConfig()
    S = np.atleast_1d(np.asarray(S, dtype=complex))
    if S.size == 0:
        raise ValueError("target set S is empty")
    if np.unique(S).size != S.size:
        raise ValueError("target set S must have pairwise distinct elements")
    if r < 1:
        raise ValueError("r must be positive")

    table = []
    best = None
    for idx in combinations_with_replacement(range(S.size), r):
        mu = S[list(idx)]
        inner = maximize_inner(P, mu, r, cfg)
        table.append((mu, inner.kappa))
        if best is None or inner.kappa < best.kappa:
            best = inner
    delta = optimal_delta(best, P.n, r)
    verdict = verify(P, best.mu, best.gamma_star, r, delta)
    return DistanceReport(tau=best.kappa, mu_star=best.mu, inner=best, delta=delta,
                          verification=verdict, per_mu_table=table, targets=S, r=r)


def mult_distance(P, mu, r, cfg=None):
    """Distance to the nearest ``P + Delta`` having ``mu`` as an eigenvalue of
    algebraic multiplicity at least ``r`` (confluent divided-difference blocks)."""
    mu_t = np.full(r, complex(mu))
    return maximize_inner(P, mu_t, r, cfg, builder="divdiff")


def default_region(P, nx=30, ny=30):
    """Bounding box of the spectrum, enlarged by 50% (with a floor on the extent)."""
    lam = P.eigenvalues()
    x0, x1 = lam.real.min(), lam.real.max()
    y0, y1 = lam.imag.min(), lam.imag.max()
    w, h = x1 - x0, y1 - y0
    floor = 0.1 * max(w, h, 1e-3 * (1.0 + np.abs(lam).max()))
    hw = max(0.75 * w, floor)
    hh = max(0.75 * h, floor)
    cx, cy = 0.5 * (x0 + x1), 0.5 * (y0 + y1)
    return Region(cx - hw, cx + hw, cy - hh, cy + hh, nx, ny)


def nearest_multiple_eig(P, r, cfg=None):
    """Minimize the multiple-eigenvalue distance over ``mu`` in the plane.

    Evaluates on ``cfg.region`` (default: :func:`default_region`), then runs
    Nelder-Mead over ``(Re mu, Im mu)`` from the best ``cfg.refine_best``
    grid points. A grid too coarse to isolate the basin of the global
    minimizer can return a local one.
    """
    from .perturbation import optimal_delta, verify

    cfg = cfg or OptimizerConfig()
    region = cfg.region or default_region(P, cfg.nx, cfg.ny)
    xs, ys = region.xs, region.ys

    memo = {}

    def M(z):
        z = complex(z)
        if z not in memo:
            memo[z] = mult_distance(P, z, r, cfg)
        return memo[z]

    table = []
    for y in ys:
        for x in xs:
            z = complex(x, y)
            table.append((z, M(z).kappa))
    order = sorted(range(len(table)), key=lambda t: (table[t][1], t))
    g_best = table[order[0]]

    dx = xs[1] - xs[0]
    dy = ys[1] - ys[0]
    best_z, best_v = g_best
    for t in order[: cfg.refine_best]:
        z0 = table[t][0]
        simplex = np.array([[z0.real, z0.imag], [z0.real + dx, z0.imag], [z0.real, z0.imag + dy]])
        res = minimize(lambda w: M(complex(w[0], w[1])).kappa, [z0.real, z0.imag],
                       method="Nelder-Mead",
                       options={"maxiter": cfg.refine_iters, "initial_simplex": simplex,
                                "xatol": 1e-12 * max(1.0, abs(z0)), "fatol": 1e-15})
        z = complex(res.x[0], res.x[1])
        v = M(z).kappa
        if v < best_v:
            best_z, best_v = z, v

    inner = M(best_z)
    delta = optimal_delta(inner, P.n, r)
    verdict = verify(P, inner.mu, inner.gamma_star, r, delta)
    if best_z != g_best[0]:
        table.append((best_z, best_v))
    report = DistanceReport(tau=inner.kappa, mu_star=inner.mu, inner=inner, delta=delta,
                            verification=verdict, per_mu_table=[((z,) * r, v) for z, v in table],
                            targets=np.array([best_z]), r=r, kind="multiple",
                            grid_min=g_best, refined_min=(best_z, best_v),
                            extras={"region": region})
    return best_z, report
