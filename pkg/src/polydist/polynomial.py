"""Square matrix polynomials ``P(z) = sum_j z**j A_j`` with full-rank leading term."""

from dataclasses import dataclass
from math import factorial

import numpy as np

from .linalg_core import as_matrix, pencil_eigenvalues, singular_values

__all__ = [
    "MatrixPolynomial",
    "CompanionPencil",
    "random_polynomial",
    "LEADING_RANK_TOL",
    "CONFLUENT_TOL",
]

LEADING_RANK_TOL = 1e-10

# Distinct nodes closer than this (relative to the node scale) are rejected
# by the divided-difference table; only bitwise-equal nodes are confluent.
CONFLUENT_TOL = 1e-8


@dataclass(frozen=True)
class CompanionPencil:
    """Block companion pencil ``A + z B`` of size ``mn``."""

    A: np.ndarray
    B: np.ndarray


class MatrixPolynomial:
    """Matrix polynomial with coefficients ``A_0, ..., A_m`` (each ``n x n``).

    Parameters
    ----------
    coeffs : sequence of array_like
        Coefficients in increasing degree. The leading one must satisfy
        ``sigma_min(A_m) > leading_rank_tol * sigma_max(A_m)``.
    leading_rank_tol : float, optional
        Relative rank gate for ``A_m``.
    """

    def __init__(self, coeffs, leading_rank_tol=LEADING_RANK_TOL):
        mats = [as_matrix(A, f"A_{j}") for j, A in enumerate(coeffs)]
        if len(mats) < 2:
            raise ValueError("a matrix polynomial needs degree m >= 1 (at least two coefficients)")
        n = mats[0].shape[0]
        for j, A in enumerate(mats):
            if A.shape != (n, n):
                raise ValueError(f"A_{j} has shape {A.shape}, expected ({n}, {n})")
        s = singular_values(mats[-1])
        if not s[-1] > leading_rank_tol * s[0]:
            raise ValueError(
                f"leading coefficient A_{len(mats) - 1} is rank deficient "
                f"(sigma_min/sigma_max = {s[-1] / s[0] if s[0] else 0.0:.3e})"
            )
        self._coeffs = np.stack(mats)
        self._coeffs.setflags(write=False)

    @property
    def coeffs(self):
        return self._coeffs

    @property
    def n(self):
        return self._coeffs.shape[1]

    @property
    def m(self):
        return self._coeffs.shape[0] - 1

    def __repr__(self):
        return f"MatrixPolynomial(n={self.n}, m={self.m})"

    def __eq__(self, other):
        return isinstance(other, MatrixPolynomial) and np.array_equal(self._coeffs, other._coeffs)

    def __hash__(self):
        return hash(self._coeffs.tobytes())

    def coeff_norms(self):
        return singular_values(self._coeffs)[:, 0]

    def scale(self):
        """``max_j ||A_j||_2``, the reference magnitude for tolerances."""
        return float(np.max(self.coeff_norms()))

    def eval(self, z):
        """Evaluate by Horner's rule. ``z`` may be a scalar or an array of points,
        in which case the result has shape ``z.shape + (n, n)``."""
        z = np.asarray(z, dtype=complex)
        zz = z[..., None, None]
        out = np.broadcast_to(self._coeffs[-1], z.shape + (self.n, self.n)).copy()
        for A in self._coeffs[-2::-1]:
            out = out * zz + A
        return out

    __call__ = eval

    def eval_derivative(self, z, k):
        """k-th derivative ``sum_{j>=k} j!/(j-k)! z**(j-k) A_j``."""
        if k < 0:
            raise ValueError("derivative order must be nonnegative")
        z = complex(z)
        out = np.zeros((self.n, self.n), dtype=complex)
        for j in range(self.m, k - 1, -1):
            out = out * z + (factorial(j) // factorial(j - k)) * self._coeffs[j]
        return out

    def divided_difference(self, nodes):
        """Matrix divided difference ``P[x_0, ..., x_k]``.

        Equal nodes must form contiguous runs; a run of ``q + 1`` equal nodes
        contributes ``P^(q)(x)/q!``. Computed from the standard recursive table.
        """
        x = [complex(v) for v in nodes]
        if not x:
            raise ValueError("need at least one node")
        _check_contiguous(x)
        k = len(x) - 1
        scale = max(1.0, max(abs(v) for v in x))
        # table[i] holds P[x_i, ..., x_{i+d}] after pass d
        table = [self.eval(v) for v in x]
        for d in range(1, k + 1):
            nxt = []
            for i in range(k - d + 1):
                a, b = x[i], x[i + d]
                if a == b:
                    nxt.append(self.eval_derivative(a, d) / factorial(d))
                else:
                    if abs(b - a) < CONFLUENT_TOL * scale:
                        raise ValueError(
                            f"nodes {a} and {b} are distinct but closer than "
                            f"{CONFLUENT_TOL:g} relative; near-confluent divided differences are undefined"
                        )
                    nxt.append((table[i + 1] - table[i]) / (b - a))
            table = nxt
        return table[0]

    def companion(self):
        """Companion pencil: shifted identities above, ``A_0 .. A_{m-1}`` in the
        last block row of ``A``; ``-I`` blocks and ``A_m`` on the diagonal of ``B``."""
        n, m = self.n, self.m
        N = n * m
        A = np.zeros((N, N), dtype=complex)
        B = np.zeros((N, N), dtype=complex)
        for b in range(m - 1):
            A[b * n:(b + 1) * n, (b + 1) * n:(b + 2) * n] = np.eye(n)
            B[b * n:(b + 1) * n, b * n:(b + 1) * n] = -np.eye(n)
        for j in range(m):
            A[(m - 1) * n:, j * n:(j + 1) * n] = self._coeffs[j]
        B[(m - 1) * n:, (m - 1) * n:] = self._coeffs[m]
        return CompanionPencil(A=A, B=B)

    def eigenvalues(self):
        """All ``mn`` eigenvalues with multiplicity, via the companion pencil."""
        L = self.companion()
        return pencil_eigenvalues(L.A, L.B)

    def multiplicity_sum(self, S, match_tol=1e-4):
        """Number of eigenvalues within ``match_tol`` of some point of ``S``."""
        if match_tol <= 0:
            raise ValueError("match_tol must be positive")
        S = np.atleast_1d(np.asarray(S, dtype=complex))
        if S.size == 0:
            return 0
        lam = self.eigenvalues()
        d = np.min(np.abs(lam[:, None] - S[None, :]), axis=1)
        return int(np.count_nonzero(d <= match_tol))

    def perturb_constant(self, delta):
        """``P + Delta``: only ``A_0`` changes."""
        D = as_matrix(delta, "delta")
        if D.shape != (self.n, self.n):
            raise ValueError(f"delta has shape {D.shape}, expected ({self.n}, {self.n})")
        coeffs = self._coeffs.copy()
        coeffs[0] = coeffs[0] + D
        return MatrixPolynomial(coeffs)


def _check_contiguous(x):
    seen_closed = set()
    for i, v in enumerate(x):
        if i > 0 and v == x[i - 1]:
            continue
        if v in seen_closed:
            raise ValueError(
                f"equal divided-difference nodes must be contiguous; {v} reappears at position {i}"
            )
        if i > 0:
            seen_closed.add(x[i - 1])
    return True


def random_polynomial(n, m, rng, complex_entries=False, max_tries=100):
    """Polynomial with standard normal entries (real by default).

    With ``complex_entries`` the real and imaginary parts are independent
    N(0, 1/2), so each entry still has unit variance. A draw whose leading
    coefficient fails the rank gate is discarded and redrawn.
    """
    if n < 1 or m < 1:
        raise ValueError("n and m must be positive")
    for _ in range(max_tries):
        if complex_entries:
            c = (rng.standard_normal((m + 1, n, n)) + 1j * rng.standard_normal((m + 1, n, n))) / np.sqrt(2)
        else:
            c = rng.standard_normal((m + 1, n, n)).astype(complex)
        try:
            return MatrixPolynomial(c)
        except ValueError:
            continue
    raise RuntimeError("could not draw a polynomial with full-rank leading coefficient")
