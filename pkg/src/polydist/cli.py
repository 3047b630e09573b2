"""``polydist`` command line.

Exit codes: 0 success, 1 error, 2 result written but the inner maximizer
violated an assumption (or the constructed perturbation failed a check).
"""

import argparse
import sys
from pathlib import Path

import numpy as np

from . import io
from .linalg_core import singular_values
from .optimizer import OptimizerConfig, DistanceReport, make_rng, mult_distance, nearest_multiple_eig, tau_r
from .perturbation import optimal_delta, verify
from .polynomial import random_polynomial
from .pseudospectrum import Region, contour_extract, grid_sigma_min, write_grid_csv

EXIT_OK, EXIT_ERROR, EXIT_FLAGS = 0, 1, 2
ORACLE_TOL = 1e-3

_FLAGS = {"--complex", "--oracle", "-h", "--help"}


def _merge_values(argv):
    """Glue ``--opt value`` into ``--opt=value`` so values such as
    ``-0.65`` or ``-1+2i`` are not mistaken for options."""
    out, k = [], 0
    while k < len(argv):
        a = argv[k]
        if a.startswith("--") and "=" not in a and a not in _FLAGS and k + 1 < len(argv):
            out.append(f"{a}={argv[k + 1]}")
            k += 2
        else:
            out.append(a)
            k += 1
    return out


def _build_parser():
    p = argparse.ArgumentParser(prog="polydist",
                                description="Distances to matrix polynomials with prescribed eigenvalues.")
    sub = p.add_subparsers(dest="command", required=True)

    d = sub.add_parser("distance", help="distance to a polynomial with r eigenvalues in a target set")
    d.add_argument("--poly", required=True)
    d.add_argument("--targets", required=True, help='comma separated, e.g. "-0.3+0.1i,-0.65"')
    d.add_argument("--r", type=int, required=True)
    d.add_argument("--out")
    d.add_argument("--seed", type=int, default=0)

    mu = sub.add_parser("multiple", help="distance to a polynomial with an eigenvalue of multiplicity r")
    mu.add_argument("--poly", required=True)
    mu.add_argument("--r", type=int, required=True)
    mu.add_argument("--mu")
    for k in ("xmin", "xmax", "ymin", "ymax"):
        mu.add_argument(f"--{k}", type=float)
    mu.add_argument("--nx", type=int, default=30)
    mu.add_argument("--ny", type=int, default=30)
    mu.add_argument("--out")
    mu.add_argument("--seed", type=int, default=0)

    ps = sub.add_parser("pseudospectrum", help="sigma_min grid and level-set contours")
    ps.add_argument("--poly", required=True)
    for k in ("xmin", "xmax", "ymin", "ymax"):
        ps.add_argument(f"--{k}", type=float, required=True)
    ps.add_argument("--nx", type=int, required=True)
    ps.add_argument("--ny", type=int, required=True)
    ps.add_argument("--eps")
    ps.add_argument("--out", required=True)

    rd = sub.add_parser("random", help="random polynomial with standard normal entries")
    rd.add_argument("--n", type=int, required=True)
    rd.add_argument("--m", type=int, required=True)
    rd.add_argument("--seed", type=int, required=True)
    rd.add_argument("--out", required=True)
    rd.add_argument("--complex", action="store_true")

    v = sub.add_parser("verify", help="recheck a stored report")
    v.add_argument("--poly", required=True)
    v.add_argument("--report", required=True)
    v.add_argument("--oracle", action="store_true")
    return p


def _finish_report(report, P, cfg, out):
    data = io.report_to_dict(report, P, cfg)
    if out:
        io.write_json(data, out)
    ver = report.verification
    print(f"tau = {report.tau:.17g}")
    print("mu_star = " + ", ".join(f"{complex(z):.12g}" for z in report.mu_star))
    print(f"verification: {'pass' if ver.passed else 'FAIL'} "
          + " ".join(f"{k}={'ok' if ok else 'no'}" for k, ok in ver.checks.items()))
    f = report.inner.assumption_flags
    bad = [k for k in ("sigma_simple", "v_rank_ok") if not f[k]]
    bad += ["attainment_suspect"] * f["attainment_suspect"] + ["not_converged"] * (not report.inner.converged)
    if bad:
        print("assumption flags: " + ", ".join(bad))
    return EXIT_OK if report.flags_clean and ver.passed else EXIT_FLAGS


def cmd_distance(a):
    P = io.read_poly(a.poly)
    S = io.parse_complex_list(a.targets, "targets")
    if a.r < 1:
        raise io.FormatError("r: must be at least 1")
    if np.unique(S).size != S.size:
        raise io.FormatError("targets: entries must be distinct")
    cfg = OptimizerConfig(seed=a.seed)
    return _finish_report(tau_r(P, S, a.r, cfg), P, cfg, a.out)


def _region_args(a, required):
    vals = [getattr(a, k) for k in ("xmin", "xmax", "ymin", "ymax")]
    if all(v is None for v in vals) and not required:
        return None
    for k, v in zip(("xmin", "xmax", "ymin", "ymax"), vals):
        if v is None:
            raise io.FormatError(f"{k}: required when a region is given")
    try:
        return Region(*vals, a.nx, a.ny)
    except ValueError as exc:
        raise io.FormatError(f"region: {exc}") from None


def cmd_multiple(a):
    P = io.read_poly(a.poly)
    if a.r < 1:
        raise io.FormatError("r: must be at least 1")
    region = _region_args(a, required=False)
    if a.mu is not None:
        z = io.parse_complex(a.mu, "mu")
        cfg = OptimizerConfig(seed=a.seed)
        inner = mult_distance(P, z, a.r, cfg)
        delta = optimal_delta(inner, P.n, a.r)
        verdict = verify(P, inner.mu, inner.gamma_star, a.r, delta)
        report = DistanceReport(tau=inner.kappa, mu_star=inner.mu, inner=inner, delta=delta,
                                verification=verdict, per_mu_table=[(inner.mu, inner.kappa)],
                                targets=np.array([z]), r=a.r, kind="multiple")
    else:
        cfg = OptimizerConfig(seed=a.seed, region=region, nx=a.nx, ny=a.ny)
        _, report = nearest_multiple_eig(P, a.r, cfg)
        print(f"grid minimum {report.grid_min[1]:.17g} at {report.grid_min[0]:.12g}")
        print(f"refined minimum {report.refined_min[1]:.17g} at {report.refined_min[0]:.12g}")
    return _finish_report(report, P, cfg, a.out)


def contour_path(out, eps):
    out = Path(out)
    return out.with_name(f"{out.stem}_eps_{eps:g}.json")


def cmd_pseudospectrum(a):
    P = io.read_poly(a.poly)
    region = _region_args(a, required=True)
    eps_list = io.parse_real_list(a.eps, "eps") if a.eps else []
    for k, e in enumerate(eps_list):
        if not e > 0:
            raise io.FormatError(f"eps[{k}]: must be positive")
    grid = grid_sigma_min(P, region)
    write_grid_csv(grid, a.out)
    print(f"wrote {a.out} ({region.nx * region.ny} points, min sigma {grid.values.min():.6g})")
    for e in eps_list:
        lines = contour_extract(grid, e)
        path = contour_path(a.out, e)
        io.write_json([[[float(x), float(y)] for x, y in pl] for pl in lines], path)
        print(f"wrote {path} ({len(lines)} polylines)")
    return EXIT_OK


def cmd_random(a):
    if a.n < 1 or a.m < 1:
        raise io.FormatError("n, m: must be positive")
    if a.seed < 0:
        raise io.FormatError("seed: must be nonnegative")
    P = random_polynomial(a.n, a.m, make_rng(a.seed), complex_entries=a.complex)
    io.write_poly(P, a.out)
    print(f"wrote {a.out} (n={a.n}, m={a.m}, seed={a.seed})")
    return EXIT_OK


def _oracle_check(P, data, r, mu):
    from .oracle import penalty_min_distance, scan_inner_r2

    if not (P.n <= 3 and P.m <= 2 and r == 2):
        print("oracle: skipped (needs n <= 3, m <= 2, r = 2)")
        return True
    tau = data["tau"]
    ok = True
    if data["kind"] == "multiple" or len(data["targets"]) == 1 or mu[0] == mu[1]:
        scan = scan_inner_r2(P, mu, steps=100_000)
        agree = abs(scan - tau) <= 1e-6 * max(1.0, tau)
        print(f"oracle scan: {scan:.12g} ({'agrees' if agree else 'DISAGREES'})")
        ok &= agree
    targets = io.read_complex_vector(data["targets"], "targets")
    pen = penalty_min_distance(P, targets if data["kind"] != "multiple" else mu[:1], r)
    if not np.isfinite(pen):
        print("oracle penalty: no feasible point found (oracle failure, not counted)")
    else:
        agree = abs(pen - tau) <= ORACLE_TOL * max(pen, tau, np.finfo(float).tiny)
        print(f"oracle penalty: {pen:.12g} ({'agrees' if agree else 'DISAGREES'})")
        ok &= agree
    return ok


def cmd_verify(a):
    P = io.read_poly(a.poly)
    data = io.read_json(a.report, "report")
    if not isinstance(data, dict):
        raise io.FormatError("report: expected a JSON object")
    for key in ("poly_sha256", "r", "mu_star", "gamma_star", "delta", "tau", "targets", "kind"):
        if key not in data:
            raise io.FormatError(f"{key}: missing from report")
    if data["poly_sha256"] != io.poly_digest(P):
        raise io.FormatError("poly_sha256: report was produced for a different polynomial")
    r = data["r"]
    mu = io.read_complex_vector(data["mu_star"], "mu_star")
    gamma = io.read_complex_vector(data["gamma_star"], "gamma_star")
    delta = io.read_complex_matrix(data["delta"], P.n, "delta")
    if mu.size != r:
        raise io.FormatError("mu_star: length differs from r")
    verdict = verify(P, mu, gamma, r, delta)
    for k, ok in verdict.checks.items():
        print(f"{k}: {'ok' if ok else 'FAIL'}")
    tau_ok = abs(verdict.kappa - data["tau"]) <= 1e-10 * max(1.0, verdict.kappa)
    print(f"kappa recomputed {verdict.kappa:.17g} ({'matches' if tau_ok else 'DIFFERS from'} stored tau)")
    print(f"||Delta||_2 = {float(singular_values(delta)[0]):.17g}")
    passed = verdict.passed and tau_ok
    if a.oracle:
        passed &= _oracle_check(P, data, r, mu)
    print(f"verdict: {'pass' if passed else 'FAIL'}")
    return EXIT_OK if passed else EXIT_ERROR


COMMANDS = {
    "distance": cmd_distance,
    "multiple": cmd_multiple,
    "pseudospectrum": cmd_pseudospectrum,
    "random": cmd_random,
    "verify": cmd_verify,
}


def main(argv=None):
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = _build_parser()
    try:
        args = parser.parse_args(_merge_values(argv))
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_ERROR
    try:
        return COMMANDS[args.command](args)
    except (io.FormatError, ValueError, OSError) as exc:
        print(f"polydist {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
