"""Dense matrix primitives: SVD, truncation, pseudo-inverse, bases and norms.

Matrices are plain 2-D float64 ``numpy.ndarray`` objects (C order). The rank
of a matrix is always decided by the same cutoff,
``max(m, n) * eps * sigma_1``, so that every module agrees on it.
"""
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInput

EPS = np.finfo(np.float64).eps


def as_matrix(A, name="A"):
    """Return ``A`` as a finite, C-ordered float64 2-D array (copying if needed)."""
    M = np.array(A, dtype=np.float64, order="C", ndmin=2, copy=True)
    if M.ndim != 2:
        raise InvalidInput(f"{name} must be 2-D, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise InvalidInput(f"{name} has non-finite entries")
    return M


def rank_tolerance(shape, sigma_max):
    return max(shape) * EPS * sigma_max


@dataclass(frozen=True)
class Svd:
    """Thin SVD truncated at the numerical rank: ``A = U diag(sigma) V^T``."""

    U: np.ndarray
    sigma: np.ndarray
    V: np.ndarray

    @property
    def rank(self):
        return self.sigma.shape[0]

    @property
    def shape(self):
        return (self.U.shape[0], self.V.shape[0])

    def reconstruct(self):
        return (self.U * self.sigma) @ self.V.T


def _raw_svd(A):
    U, s, Vt = np.linalg.svd(A, full_matrices=False)
    return U, s, Vt.T


def svd(A):
    """Rank-revealing thin SVD.

    Singular values at or below ``max(m, n) * eps * sigma_1`` are dropped, so
    the zero matrix has rank 0 and empty factors.
    """
    A = as_matrix(A)
    m, n = A.shape
    if m == 0 or n == 0:
        raise InvalidInput("empty matrix")
    U, s, V = _raw_svd(A)
    if s.size == 0 or s[0] == 0.0:
        rho = 0
    else:
        rho = int(np.count_nonzero(s > rank_tolerance(A.shape, s[0])))
    return Svd(
        U=np.ascontiguousarray(U[:, :rho]),
        sigma=s[:rho].copy(),
        V=np.ascontiguousarray(V[:, :rho]),
    )


def truncate_rank_k(S, k):
    """Best rank-``k`` approximation ``A_k`` from a precomputed :class:`Svd`."""
    if k < 0:
        raise InvalidInput("k must be non-negative")
    k = min(k, S.rank)
    return (S.U[:, :k] * S.sigma[:k]) @ S.V[:, :k].T


def pseudo_inverse(A):
    S = svd(A)
    return (S.V / S.sigma) @ S.U.T


def orthonormal_basis(C):
    """Orthonormal basis for range(C) with exactly rank(C) columns."""
    return svd(C).U


def spectral_norm(A):
    A = as_matrix(A)
    if A.size == 0:
        return 0.0
    s = np.linalg.svd(A, compute_uv=False)
    return float(s[0]) if s.size else 0.0


def frobenius_norm_sq(A):
    A = np.asarray(A, dtype=np.float64)
    return float(np.sum(A * A))


def tail_errors(S, k):
    """``(||A - A_k||_2^2, ||A - A_k||_F^2)`` read off the singular values."""
    tail = S.sigma[k:]
    spec = float(tail[0] ** 2) if tail.size else 0.0
    return spec, float(np.sum(tail ** 2))
