"""Dense complex linear algebra used throughout the package.

Thin wrappers over LAPACK (through numpy/scipy) with the conventions the
rest of the code relies on: singular values sorted nonincreasing, the
``sigma_from_bottom(k)`` accessor for the k-th smallest singular value, and
explicit errors instead of silent NaNs.
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg

__all__ = [
    "NumericalFailure",
    "SvdResult",
    "as_matrix",
    "svd_full",
    "singular_values",
    "pencil_eigenvalues",
    "pseudo_inverse",
    "nullspace_basis",
    "norm2",
    "match_greedy",
    "DEFAULT_RANK_TOL",
]

DEFAULT_RANK_TOL = 1e-10

# Reconstruction bound constant: ||M - U S V*||_2 <= RECON_KAPPA * eps * ||M||_2.
RECON_KAPPA = 100.0


class NumericalFailure(RuntimeError):
    """A LAPACK routine failed to converge or produced non-finite output."""


def as_matrix(M, name="matrix"):
    """Return ``M`` as a finite 2-D complex array, raising ``ValueError`` otherwise."""
    A = np.asarray(M, dtype=complex)
    if A.ndim != 2 or A.shape[0] < 1 or A.shape[1] < 1:
        raise ValueError(f"{name} must be a nonempty 2-D array, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValueError(f"{name} has non-finite entries")
    return A


@dataclass(frozen=True)
class SvdResult:
    """Full SVD ``M = U diag(s) Vh`` with ``s`` nonincreasing."""

    s: np.ndarray
    U: np.ndarray
    Vh: np.ndarray

    @property
    def V(self):
        return self.Vh.conj().T

    def index_from_bottom(self, k):
        """Position (0-based, from the top) of the k-th smallest singular value."""
        p = self.s.size
        if not 1 <= k <= p:
            raise IndexError(f"k={k} out of range for {p} singular values")
        return p - k

    def sigma_from_bottom(self, k):
        return float(self.s[self.index_from_bottom(k)])

    def pair_from_bottom(self, k):
        """Left/right singular vectors ``(u, v)`` with ``M v = sigma u``."""
        idx = self.index_from_bottom(k)
        return self.U[:, idx], self.Vh[idx].conj()


def svd_full(M):
    A = as_matrix(M)
    try:
        U, s, Vh = np.linalg.svd(A, full_matrices=True)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailure(f"SVD did not converge: {exc}") from exc
    if not np.all(np.isfinite(s)):
        raise NumericalFailure("SVD produced non-finite singular values")
    return SvdResult(s=s, U=U, Vh=Vh)


def singular_values(M):
    """Singular values only, nonincreasing. Accepts stacks of matrices."""
    A = np.asarray(M, dtype=complex)
    try:
        return np.linalg.svd(A, compute_uv=False)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailure(f"SVD did not converge: {exc}") from exc


def norm2(M):
    return float(singular_values(M)[0]) if np.size(M) else 0.0


def pencil_eigenvalues(A, B, tol=DEFAULT_RANK_TOL):
    """Eigenvalues of the pencil ``A + lambda B`` (roots of ``det(A + lambda B)``).

    ``B`` must be numerically invertible; the generalized problem is solved
    with the QZ algorithm as ``A x = lambda (-B) x``.
    """
    A = as_matrix(A, "A")
    B = as_matrix(B, "B")
    if A.shape != B.shape or A.shape[0] != A.shape[1]:
        raise ValueError(f"pencil needs square matrices of equal size, got {A.shape} and {B.shape}")
    sb = singular_values(B)
    if sb[-1] <= tol * sb[0]:
        raise ValueError(
            f"B is numerically singular (sigma_min/sigma_max = {sb[-1] / sb[0]:.3e}); "
            "the leading coefficient must have full rank"
        )
    try:
        w = scipy.linalg.eigvals(A, -B)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailure(f"QZ did not converge: {exc}") from exc
    if not np.all(np.isfinite(w)):
        raise NumericalFailure("pencil eigenvalues are not finite")
    return w


def pseudo_inverse(M, rank_tol=DEFAULT_RANK_TOL):
    """Moore-Penrose inverse, dropping singular values below ``rank_tol * sigma_max``."""
    if rank_tol <= 0:
        raise ValueError("rank_tol must be positive")
    A = as_matrix(M)
    U, s, Vh = np.linalg.svd(A, full_matrices=False)
    if s.size == 0 or s[0] == 0.0:
        return np.zeros(A.shape[::-1], dtype=complex)
    keep = s > rank_tol * s[0]
    return (Vh[keep].conj().T / s[keep]) @ U[:, keep].conj().T


def nullspace_basis(M, tol=1e-8):
    """Orthonormal basis of the numerical right nullspace, as columns.

    Right singular vectors whose singular value is at most ``tol * sigma_max``
    (plus the trivially null directions of a wide matrix).
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    res = svd_full(M)
    smax = res.s[0] if res.s.size else 0.0
    ncols = res.Vh.shape[0]
    s_ext = np.zeros(ncols)
    s_ext[: res.s.size] = res.s
    null = s_ext <= tol * smax
    return res.Vh[null].conj().T


def match_greedy(found, targets):
    """Greedy nearest-pair matching between two multisets of complex numbers.

    Repeatedly takes the globally closest unused (found, target) pair. Not an
    optimal assignment, but adequate for small, well separated sets.
    Returns a list of ``(found_value, target_value, distance)``.
    """
    found = np.asarray(found, dtype=complex).ravel()
    targets = np.asarray(targets, dtype=complex).ravel()
    if found.size == 0 or targets.size == 0:
        return []
    D = np.abs(found[:, None] - targets[None, :])
    pairs = []
    used_f = np.zeros(found.size, bool)
    used_t = np.zeros(targets.size, bool)
    for _ in range(min(found.size, targets.size)):
        Dm = np.where(used_f[:, None] | used_t[None, :], np.inf, D)
        i, j = np.unravel_index(np.argmin(Dm), Dm.shape)
        used_f[i] = used_t[j] = True
        pairs.append((complex(found[i]), complex(targets[j]), float(D[i, j])))
    return pairs
