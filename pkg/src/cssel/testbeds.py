"""Test matrices: lower-bound constructions with closed-form errors and
seeded matrices with a prescribed spectrum."""
import numpy as np
import scipy.linalg

from .approx_svd import RngSpec
from .errors import InvalidInput


def gen_spectral_lb(n, alpha):
    """``(n+1) x n`` matrix with columns ``e_1 + alpha e_{j+1}``.

    ``A^T A = 1 1^T + alpha^2 I``, so ``sigma_1^2 = n + alpha^2`` and every
    other squared singular value is ``alpha^2``. Any ``r`` of its columns give
    ``||A - C C^+ A||_2^2 = alpha^2 (n + alpha^2) / (r + alpha^2)``.
    """
    if n < 2:
        raise InvalidInput("need n >= 2")
    if not alpha > 0:
        raise InvalidInput("need alpha > 0")
    A = np.zeros((n + 1, n))
    A[0, :] = 1.0
    A[np.arange(1, n + 1), np.arange(n)] = alpha
    return A


def gen_frobenius_lb(n, k, alpha):
    """Block diagonal with ``k`` copies of ``gen_spectral_lb(n // k, alpha)``."""
    if k < 1:
        raise InvalidInput("need k >= 1")
    if n % k:
        raise InvalidInput(f"k={k} does not divide n={n}")
    block = gen_spectral_lb(n // k, alpha)
    return scipy.linalg.block_diag(*([block] * k))


def spectral_lb_error(n, r, alpha):
    """Closed-form ``||A - C C^+ A||_2^2`` for ``r`` columns of ``gen_spectral_lb``."""
    a2 = alpha * alpha
    return a2 * (n + a2) / (r + a2)


def spectral_lb_frob_error(n, r, alpha):
    """Closed-form ``||A - C C^+ A||_F^2`` for ``r`` columns of ``gen_spectral_lb``."""
    a2 = alpha * alpha
    return a2 * (n - r) * (1 + 1 / (r + a2))


def random_orthonormal(rows, cols, rng):
    """QR of a Gaussian matrix with the sign of R's diagonal fixed non-negative."""
    G = rng.standard_normal((rows, cols))
    Q, R = np.linalg.qr(G)
    signs = np.where(np.diag(R) < 0, -1.0, 1.0)
    return Q * signs


def gen_spectrum(m, n, sigmas, seed=0):
    """``U diag(sigmas) V^T`` with seeded random orthonormal ``U`` and ``V``."""
    sigmas = np.asarray(sigmas, dtype=np.float64)
    if sigmas.ndim != 1 or sigmas.size == 0 or sigmas.size > min(m, n):
        raise InvalidInput("need 1 <= len(sigmas) <= min(m, n)")
    if np.any(sigmas < 0) or np.any(np.diff(sigmas) > 0) or not np.all(np.isfinite(sigmas)):
        raise InvalidInput("sigmas must be finite, non-negative and non-increasing")
    rng = RngSpec(seed).generator()
    t = sigmas.size
    U = random_orthonormal(m, t, rng)
    V = random_orthonormal(n, t, rng)
    return (U * sigmas) @ V.T


def geometric_spectrum(count, ratio, top=1.0):
    return top * ratio ** np.arange(count)
