"""Randomized factorizations ``A = B Z^T + E`` with ``Z^T Z = I`` and ``E Z = 0``.

Both flavors sketch the range of ``A`` with a Gaussian test matrix, take the
rank-k projection ``Q (Q^T A)_k`` of ``A`` onto the sketch, and keep its right
singular vectors as ``Z``. The spectral flavor adds power iterations.

Power steps are not re-orthonormalized. For large ``q`` on ill-conditioned
input the small directions of ``Y`` can drown in round-off; the ``q`` chosen
here stays small (a handful of steps) at desk scale.
"""
from dataclasses import dataclass
from math import ceil, e, log, sqrt

import numpy as np

from .errors import InvalidInput
from .linalg import as_matrix, svd
from .projection import project_rank_k


@dataclass(frozen=True)
class RngSpec:
    """Seed plus stream counter; each (seed, stream) pair is an independent generator."""

    seed: int
    stream: int = 0

    def generator(self):
        ss = np.random.SeedSequence(self.seed, spawn_key=(self.stream,))
        return np.random.Generator(np.random.PCG64(ss))

    def child(self, stream):
        return RngSpec(self.seed, stream)


def _as_rng(rng):
    if isinstance(rng, RngSpec):
        return rng.generator()
    if isinstance(rng, np.random.Generator):
        return rng
    return RngSpec(int(rng)).generator()


def gaussian_matrix(rows, cols, rng):
    if rows < 1 or cols < 1:
        raise InvalidInput("gaussian_matrix needs rows, cols >= 1")
    return _as_rng(rng).standard_normal((rows, cols))


def power_iteration_sketch(A, r, q, rng):
    """``Y = (A A^T)^q A R`` by alternating products with ``A`` and ``A^T``."""
    A = as_matrix(A)
    if r < 1 or q < 0:
        raise InvalidInput("need r >= 1 and q >= 0")
    Y = A @ gaussian_matrix(A.shape[1], r, rng)
    for _ in range(q):
        Y = A @ (A.T @ Y)
    return Y


def power_exponent(m, n, k, p, eps):
    """Smallest ``q >= 0`` with ``c ** (1/(2q+1)) <= 1 + eps/sqrt(2)``.

    ``c = 1 + sqrt(k/(p-1)) + e sqrt(k+p)/p * sqrt(min(m,n) - k)``.
    """
    c = 1 + sqrt(k / (p - 1)) + e * sqrt(k + p) / p * sqrt(max(min(m, n) - k, 0))
    target = log(1 + eps / sqrt(2))
    q = max(0, ceil((log(c) / target - 1) / 2))
    # guard the ceiling against round-off on either side
    while q > 0 and log(c) / (2 * (q - 1) + 1) <= target:
        q -= 1
    while log(c) / (2 * q + 1) > target:
        q += 1
    return q


def frobenius_oversampling(k, eps):
    return ceil(k / eps) + 1


@dataclass(frozen=True)
class Factorization:
    B: np.ndarray
    Z: np.ndarray
    E: np.ndarray
    flavor: str
    p: int
    q: int
    rng: RngSpec | None


def _check(A, k, eps):
    A = as_matrix(A)
    if not 0 < eps < 1:
        raise InvalidInput(f"need 0 < eps < 1, got {eps}")
    if k < 2:
        raise InvalidInput(f"need k >= 2, got {k}")
    rho = svd(A).rank
    if k > rho:
        raise InvalidInput(f"k={k} exceeds rank(A)={rho}")
    return A


def _factor(A, Y, k, flavor, p, q, rng):
    proj = project_rank_k(A, Y, k)
    Z = proj.Z
    if Z.shape[1] < k:
        raise InvalidInput(f"sketch has rank {Z.shape[1]} < k={k}")
    B = A @ Z
    E = A - B @ Z.T
    return Factorization(B=B, Z=Z, E=E, flavor=flavor, p=p, q=q, rng=rng)


def fast_spectral_factorization(A, k, eps, rng=0):
    """Power-iterated Gaussian sketch with ``p = k`` (``2k`` columns)."""
    A = _check(A, k, eps)
    rng = rng if isinstance(rng, RngSpec) else RngSpec(int(rng))
    m, n = A.shape
    p = k
    q = power_exponent(m, n, k, p, eps)
    Y = power_iteration_sketch(A, k + p, q, rng)
    return _factor(A, Y, k, "spectral", p, q, rng)


def fast_frobenius_factorization(A, k, eps, rng=0):
    """Plain Gaussian sketch with ``p = ceil(k/eps) + 1`` oversampling columns."""
    A = _check(A, k, eps)
    rng = rng if isinstance(rng, RngSpec) else RngSpec(int(rng))
    p = frobenius_oversampling(k, eps)
    Y = power_iteration_sketch(A, k + p, 0, rng)
    return _factor(A, Y, k, "frobenius", p, 0, rng)
