"""File formats: complex literals, polynomial JSON, distance reports.

All floats are written with 17 significant digits, which round-trips
IEEE doubles exactly. Complex numbers are ``[re, im]`` pairs.
"""

import hashlib
import json
import math
import re

import numpy as np

from .polynomial import MatrixPolynomial

__all__ = [
    "parse_complex",
    "parse_complex_list",
    "parse_real_list",
    "dumps",
    "poly_to_dict",
    "poly_from_dict",
    "read_poly",
    "write_poly",
    "poly_digest",
    "report_to_dict",
    "write_json",
    "read_json",
    "read_complex_vector",
    "read_complex_matrix",
    "verdict_to_dict",
    "FormatError",
]


class FormatError(ValueError):
    """Malformed input; the message names the offending field."""


_NUM = r"(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?"
_REAL = re.compile(rf"^[+-]?{_NUM}$")
_IMAG = re.compile(rf"^(?P<s>[+-]?)(?P<b>{_NUM})?i$")
_BOTH = re.compile(rf"^(?P<a>[+-]?{_NUM})(?P<s>[+-])(?P<b>{_NUM})?i$")


def parse_complex(text, field="value"):
    """Parse ``a``, ``bi``, ``a+bi`` or ``a-bi`` (whitespace ignored)."""
    s = "".join(str(text).split())
    if _REAL.match(s):
        return complex(float(s), 0.0)
    m = _IMAG.match(s)
    if m:
        b = float(m["b"]) if m["b"] else 1.0
        return complex(0.0, -b if m["s"] == "-" else b)
    m = _BOTH.match(s)
    if m:
        b = float(m["b"]) if m["b"] else 1.0
        return complex(float(m["a"]), -b if m["s"] == "-" else b)
    raise FormatError(f"{field}: cannot parse complex literal {text!r}")


def parse_complex_list(text, field="targets"):
    parts = [p for p in str(text).split(",") if p.strip()]
    if not parts:
        raise FormatError(f"{field}: empty list")
    return np.array([parse_complex(p, f"{field}[{k}]") for k, p in enumerate(parts)])


def parse_real_list(text, field="eps"):
    out = []
    for k, p in enumerate(str(text).split(",")):
        if not p.strip():
            continue
        try:
            out.append(float(p))
        except ValueError:
            raise FormatError(f"{field}[{k}]: cannot parse number {p!r}") from None
    if not out:
        raise FormatError(f"{field}: empty list")
    return out


def _fmt_float(x):
    if math.isnan(x):
        return "NaN"
    if math.isinf(x):
        return "Infinity" if x > 0 else "-Infinity"
    s = format(x, ".17g")
    if not any(c in s for c in ".en"):
        s += ".0"
    return s


def dumps(obj, indent=1, _level=0):
    """JSON text with 17-significant-digit floats; key order preserved."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dumps(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple)) for v in obj):
            return "[" + ", ".join(dumps(v) for v in obj) + "]"
        return "[\n" + ",\n".join(pad + dumps(v, indent, _level + 1) for v in obj) + "\n" + end + "]"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt_float(float(obj))
    if isinstance(obj, str):
        return json.dumps(obj)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _c(z):
    z = complex(z)
    return [z.real, z.imag]


def _cvec(v):
    return [_c(z) for z in np.ravel(v)]


def _cmat(M):
    return [[_c(z) for z in row] for row in np.asarray(M)]


def _read_pair(x, field):
    if not (isinstance(x, (list, tuple)) and len(x) == 2):
        raise FormatError(f"{field}: expected a [re, im] pair")
    try:
        return complex(float(x[0]), float(x[1]))
    except (TypeError, ValueError):
        raise FormatError(f"{field}: non-numeric entry") from None


def read_complex_vector(data, field):
    if not isinstance(data, list):
        raise FormatError(f"{field}: expected a list of [re, im] pairs")
    return np.array([_read_pair(x, f"{field}[{k}]") for k, x in enumerate(data)], dtype=complex)


def read_complex_matrix(data, n, field):
    if not (isinstance(data, list) and len(data) == n):
        raise FormatError(f"{field}: expected {n} rows")
    M = np.empty((n, n), dtype=complex)
    for i, row in enumerate(data):
        if not (isinstance(row, list) and len(row) == n):
            raise FormatError(f"{field}[{i}]: expected {n} entries")
        for j, x in enumerate(row):
            M[i, j] = _read_pair(x, f"{field}[{i}][{j}]")
    return M


def poly_to_dict(P):
    return {"n": P.n, "m": P.m, "coeffs": [_cmat(A) for A in P.coeffs]}


def poly_from_dict(d):
    if not isinstance(d, dict):
        raise FormatError("poly: expected a JSON object")
    for key in ("n", "m", "coeffs"):
        if key not in d:
            raise FormatError(f"{key}: missing field")
    n, m = d["n"], d["m"]
    if not (isinstance(n, int) and n >= 1):
        raise FormatError("n: expected a positive integer")
    if not (isinstance(m, int) and m >= 1):
        raise FormatError("m: expected a positive integer")
    coeffs = d["coeffs"]
    if not (isinstance(coeffs, list) and len(coeffs) == m + 1):
        raise FormatError(f"coeffs: expected {m + 1} matrices")
    c = np.array([read_complex_matrix(A, n, f"coeffs[{j}]") for j, A in enumerate(coeffs)])
    if not np.all(np.isfinite(c)):
        raise FormatError("coeffs: non-finite entry")
    try:
        return MatrixPolynomial(c)
    except ValueError as exc:
        raise FormatError(f"coeffs[{m}]: {exc}") from None


def read_json(path, field="file"):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise FormatError(f"{field}: cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise FormatError(f"{field}: malformed JSON in {path}: {exc}") from None


def write_json(obj, path):
    with open(path, "w") as fh:
        fh.write(dumps(obj) + "\n")


def read_poly(path):
    return poly_from_dict(read_json(path, "poly"))


def write_poly(P, path):
    write_json(poly_to_dict(P), path)


def poly_digest(P):
    """SHA-256 of the canonical JSON text of ``P``; ties a report to its input."""
    return hashlib.sha256(dumps(poly_to_dict(P)).encode()).hexdigest()


def verdict_to_dict(v):
    return {
        "kappa": v.kappa,
        "delta_norm": v.delta_norm,
        "norm_residual": v.norm_residual,
        "rank_residual": v.rank_residual,
        "sylvester_dim": v.sylvester_dim,
        "sylvester_residual": v.sylvester_residual,
        "placement_count": v.placement_count,
        "match_tol": v.match_tol,
        "q_norm": v.q_norm,
        "eig_placement": [{"eigenvalue": _c(f), "target": _c(t), "distance": d} for f, t, d in v.eig_placement],
        "checks": dict(v.checks),
        "passed": v.passed,
    }


def report_to_dict(report, P, cfg=None):
    inner = report.inner
    out = {
        "kind": report.kind,
        "poly_sha256": poly_digest(P),
        "n": P.n,
        "m": P.m,
        "r": report.r,
        "targets": _cvec(report.targets),
        "tau": report.tau,
        "mu_star": _cvec(report.mu_star),
        "gamma_star": _cvec(inner.gamma_star),
        "delta": _cmat(report.delta),
        "converged": inner.converged,
        "assumption_flags": dict(inner.assumption_flags),
        "certificates": {
            "lower_G_residual": inner.certs.lower_G_residual,
            "uu_vv_residual": inner.certs.uu_vv_residual,
            "g_norm": inner.certs.g_norm,
            "sigma_gap": inner.eval.sigma_gap,
        },
        "verification": verdict_to_dict(report.verification),
        "per_mu_table": [{"mu": _cvec(mu), "kappa": k} for mu, k in report.per_mu_table],
    }
    if report.grid_min is not None:
        out["grid_min"] = {"mu": _c(report.grid_min[0]), "value": report.grid_min[1]}
    if report.refined_min is not None:
        out["refined_min"] = {"mu": _c(report.refined_min[0]), "value": report.refined_min[1]}
    region = report.extras.get("region")
    if region is not None:
        out["region"] = {"xmin": region.xmin, "xmax": region.xmax, "ymin": region.ymin,
                         "ymax": region.ymax, "nx": region.nx, "ny": region.ny}
    if cfg is not None:
        out["config"] = {"starts": cfg.starts, "max_iters": cfg.max_iters, "grad_tol": cfg.grad_tol,
                         "seed": cfg.seed, "r2_real_reduction": cfg.r2_real_reduction}
    return out
