"""Best rank-k approximation of A inside the column span of C.

``Q (Q^T A)_k`` is the exact Frobenius-optimal rank-k approximation of ``A``
in range(C) and is within a factor sqrt(2) of the spectral-norm optimum, which
is the quantity we report for spectral methods.
"""
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInput
from .linalg import (as_matrix, frobenius_norm_sq, orthonormal_basis,
                     spectral_norm)


@dataclass(frozen=True)
class ProjectionResult:
    Q: np.ndarray        # orthonormal basis of range(C)
    W_k: np.ndarray      # (Q^T A)_k
    approx: np.ndarray   # Q W_k
    Z: np.ndarray        # n x k right singular vectors of (Q^T A)_k


def _check(A, C, k):
    A = as_matrix(A)
    C = as_matrix(C, "C")
    if C.shape[0] != A.shape[0]:
        raise InvalidInput(f"C has {C.shape[0]} rows, A has {A.shape[0]}")
    if C.shape[1] < 1:
        raise InvalidInput("C needs at least one column")
    if k < 1:
        raise InvalidInput("k must be >= 1")
    return A, C


def project_rank_k(A, C, k):
    A, C = _check(A, C, k)
    Q = orthonormal_basis(C)
    W = Q.T @ A
    if W.shape[0] == 0:
        n = A.shape[1]
        return ProjectionResult(Q, W, np.zeros_like(A), np.zeros((n, 0)))
    U, s, Vt = np.linalg.svd(W, full_matrices=False)
    kk = min(k, s.size)
    W_k = (U[:, :kk] * s[:kk]) @ Vt[:kk]
    Z = np.ascontiguousarray(Vt[:kk].T)
    return ProjectionResult(Q=Q, W_k=W_k, approx=Q @ W_k, Z=Z)


@dataclass(frozen=True)
class ErrorPair:
    spectral2: float
    frob2: float


@dataclass(frozen=True)
class ReconstructionErrors:
    full: ErrorPair      # A - C C^+ A
    rank_k: ErrorPair    # A - Q (Q^T A)_k


def _pair(R):
    s = spectral_norm(R)
    return ErrorPair(spectral2=s * s, frob2=frobenius_norm_sq(R))


def reconstruction_errors(A, C, k):
    """Squared spectral and Frobenius errors of ``C C^+ A`` and the rank-k projection."""
    A, C = _check(A, C, k)
    proj = project_rank_k(A, C, k)
    Q = proj.Q
    full = _pair(A - Q @ (Q.T @ A))
    rank_k = _pair(A - proj.approx)
    return ReconstructionErrors(full=full, rank_k=rank_k)
