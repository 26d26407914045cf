"""End-to-end column selection drivers and their error reports.

Every driver returns a :class:`SelectionResult` whose ``indices`` are distinct
column indices of ``A``. Sparsifier weights only rescale columns, which leaves
the span (and therefore every reconstruction error) unchanged, so ``C`` is
always built from the plain columns ``A[:, indices]``.
"""
import time
from dataclasses import dataclass, field
from enum import Enum
from math import ceil, sqrt

import numpy as np

from .approx_svd import (RngSpec, fast_frobenius_factorization,
                         fast_spectral_factorization)
from .errors import EarlyExact, InvalidInput
from .linalg import as_matrix, frobenius_norm_sq, orthonormal_basis, svd, tail_errors
from .projection import reconstruction_errors
from .sparsify import dual_set_spectral, dual_set_spectral_frobenius

EARLY_EXACT_TOL = 1e-12


class Method(str, Enum):
    DET_SPECTRAL = "det-spectral"
    DET_SPECTRAL_VK = "det-spectral-vk"
    DET_FROBENIUS = "det-frobenius"
    FAST_SPECTRAL = "fast-spectral"
    FAST_FROBENIUS = "fast-frobenius"
    RELATIVE_ERROR = "relative-error"
    NORM_SAMPLING = "norm-sampling"

    @property
    def deterministic(self):
        return self in (Method.DET_SPECTRAL, Method.DET_SPECTRAL_VK, Method.DET_FROBENIUS)

    @property
    def spectral(self):
        return self in (Method.DET_SPECTRAL, Method.DET_SPECTRAL_VK, Method.FAST_SPECTRAL)


@dataclass(frozen=True)
class ErrorReport:
    """Achieved errors, reference tails and the guarantee multiplier.

    ``ratio`` is ``||A - QW_k||_2 / sigma_{k+1}`` for spectral methods and
    ``||A - QW_k||_F^2 / ||A - A_k||_F^2`` for Frobenius methods; it is 1 when
    the tail vanishes. ``hard_bound`` is the per-instance guarantee (spectral
    bounds carry an extra sqrt(2) for the surrogate projection) and is
    ``None`` for randomized methods, whose bounds hold in expectation only.
    """

    spectral_err2: float          # ||A - C C^+ A||_2^2
    frob_err2: float              # ||A - C C^+ A||_F^2
    proj_spectral_err2: float     # ||A - Q (Q^T A)_k||_2^2
    proj_frob_err2: float         # ||A - Q (Q^T A)_k||_F^2
    sigma_kplus1_sq: float
    tail_frob2: float
    bound: float
    ratio: float
    hard_bound: float | None
    wall_time: float = 0.0

    @property
    def within_bound(self):
        return self.hard_bound is None or self.ratio <= self.hard_bound


@dataclass(frozen=True)
class RelErrParams:
    eps: float
    eps0: float
    d: float
    alpha: float
    r_hat: int
    c0: float
    s: int

    @classmethod
    def from_eps(cls, k, eps, economy=False):
        if economy:
            eps0, d = 62 / 181, 100.0
            alpha = sqrt(d) - 1
        else:
            eps0 = eps ** (2 / 3)
            alpha = ((1 + eps0) / eps) ** (1 / 3)
            d = (1 + alpha) ** 2
        r_hat = ceil(d * k)
        c0 = (1 + eps0) * (1 + 1 / (1 - sqrt(k / r_hat)) ** 2)
        s = ceil(c0 * k / eps)
        return cls(eps=eps, eps0=eps0, d=d, alpha=alpha, r_hat=r_hat, c0=c0, s=s)

    @property
    def budget(self):
        return self.r_hat + self.s


@dataclass(frozen=True)
class SelectionResult:
    method: Method
    k: int
    r: int
    indices: np.ndarray
    report: ErrorReport | None
    weights: np.ndarray | None = None
    draws: int | None = None
    eps: float | None = None
    seed: int | None = None
    params: RelErrParams | None = None
    diagnostics: dict = field(default_factory=dict)


@dataclass(frozen=True)
class SampleDraw:
    indices: np.ndarray       # sorted distinct
    draws: np.ndarray         # raw i.i.d. draws, in order
    probabilities: np.ndarray


def assemble_bound(method, m, n, rho, k, r, eps=None, energy_ratio=None):
    """Guarantee multiplier for ``method``.

    Spectral methods bound ``||A - Pi||_2 / sigma_{k+1}``; Frobenius methods
    bound ``||A - Pi||_F^2 / ||A - A_k||_F^2``. Norm sampling needs
    ``energy_ratio = ||A||_F^2 / ||A - A_k||_F^2``.
    """
    method = Method(method)
    if method is Method.RELATIVE_ERROR:
        return 1 + eps
    lo = 1 - sqrt(k / r)
    if method is Method.DET_SPECTRAL:
        return 1 + (1 + sqrt((rho - k) / r)) / lo
    if method is Method.DET_SPECTRAL_VK:
        return 1 + (1 + sqrt(n / r)) / lo
    if method is Method.FAST_SPECTRAL:
        return (sqrt(2) + eps) * (1 + (1 + sqrt(n / r)) / lo)
    if method is Method.DET_FROBENIUS:
        return 1 + 1 / lo ** 2
    if method is Method.FAST_FROBENIUS:
        return (1 + eps) * (1 + 1 / lo ** 2)
    if energy_ratio is None:
        return float("nan")
    return 1 + (k / r) * energy_ratio


def evaluate_selection(A, method, k, indices, r, eps=None, S=None, wall_time=0.0):
    """Recompute every error of the columns ``A[:, indices]`` from scratch."""
    A = as_matrix(A)
    method = Method(method)
    m, n = A.shape
    indices = np.asarray(indices, dtype=np.int64)
    if indices.size == 0 or indices.min() < 0 or indices.max() >= n:
        raise InvalidInput(f"column indices out of range for n={n}")
    S = S if S is not None else svd(A)
    sig2, tail_f = tail_errors(S, k)
    errs = reconstruction_errors(A, A[:, indices], k)
    energy = frobenius_norm_sq(A)
    bound = assemble_bound(method, m, n, S.rank, k, r, eps,
                           energy_ratio=energy / tail_f if tail_f > 0 else float("inf"))
    if method.spectral:
        ratio = sqrt(errs.rank_k.spectral2 / sig2) if sig2 > 0 else 1.0
        hard = sqrt(2) * bound if method.deterministic else None
    else:
        ratio = errs.rank_k.frob2 / tail_f if tail_f > 0 else 1.0
        hard = bound if method.deterministic else None
    return ErrorReport(
        spectral_err2=errs.full.spectral2, frob_err2=errs.full.frob2,
        proj_spectral_err2=errs.rank_k.spectral2, proj_frob_err2=errs.rank_k.frob2,
        sigma_kplus1_sq=sig2, tail_frob2=tail_f, bound=bound, ratio=ratio,
        hard_bound=hard, wall_time=wall_time)


# ---------------------------------------------------------------------------
# validation

def _check_rank(S, k):
    if k < 1:
        raise InvalidInput(f"need k >= 1, got {k}")
    if k > S.rank:
        raise InvalidInput(f"k={k} exceeds rank(A)={S.rank}")


def _check_budget(n, k, r):
    if not (k < r <= n):
        raise InvalidInput(f"need k < r <= n, got k={k}, r={r}, n={n}")


def _check_randomized(k, eps):
    if k < 2:
        raise InvalidInput(f"randomized methods need k >= 2, got {k}")
    if eps is None or not 0 < eps < 1:
        raise InvalidInput(f"need 0 < eps < 1, got {eps}")


def _sigma_k(Z, sel):
    return float(np.linalg.svd(Z.T @ sel.sampling_matrix, compute_uv=False)[Z.shape[1] - 1])


def _finish(A, method, k, r, sel_indices, t0, S, report, **extra):
    wall = time.perf_counter() - t0
    rep = None
    if report:
        rep = evaluate_selection(A, method, k, sel_indices, r, extra.get("eps"), S=S,
                                 wall_time=wall)
    return SelectionResult(method=method, k=k, r=r, indices=np.asarray(sel_indices),
                           report=rep, **extra)


# ---------------------------------------------------------------------------
# deterministic drivers

def det_spectral(A, k, r, report=True):
    """Sparsify the rows of ``V_k`` against the rows of ``V_{rho-k}``."""
    A = as_matrix(A)
    t0 = time.perf_counter()
    S = svd(A)
    _check_rank(S, k)
    _check_budget(A.shape[1], k, r)
    Vk = S.V[:, :k]
    sel = dual_set_spectral(Vk, S.V[:, k:], r)
    return _finish(A, Method.DET_SPECTRAL, k, r, sel.support, t0, S, report,
                   weights=sel.weights, diagnostics={"sigma_k_VS": _sigma_k(Vk, sel)})


def det_spectral_vk_only(A, k, r, report=True):
    """Sparsify the rows of ``V_k`` against the standard basis of R^n."""
    A = as_matrix(A)
    t0 = time.perf_counter()
    S = svd(A)
    _check_rank(S, k)
    _check_budget(A.shape[1], k, r)
    Vk = S.V[:, :k]
    sel = dual_set_spectral(Vk, None, r)
    return _finish(A, Method.DET_SPECTRAL_VK, k, r, sel.support, t0, S, report,
                   weights=sel.weights, diagnostics={"sigma_k_VS": _sigma_k(Vk, sel)})


def det_frobenius(A, k, r, report=True):
    """Sparsify the rows of ``V_k`` against the rows of ``(A - A_k)^T``."""
    A = as_matrix(A)
    t0 = time.perf_counter()
    S = svd(A)
    _check_rank(S, k)
    _check_budget(A.shape[1], k, r)
    Vk = S.V[:, :k]
    residual = A - (S.U[:, :k] * S.sigma[:k]) @ Vk.T
    sel = dual_set_spectral_frobenius(Vk, residual.T, r)
    return _finish(A, Method.DET_FROBENIUS, k, r, sel.support, t0, S, report,
                   weights=sel.weights, diagnostics={"sigma_k_VS": _sigma_k(Vk, sel)})


# ---------------------------------------------------------------------------
# randomized drivers

def fast_spectral(A, k, r, eps, seed=0, report=True):
    A = as_matrix(A)
    _check_randomized(k, eps)
    _check_budget(A.shape[1], k, r)
    t0 = time.perf_counter()
    F = fast_spectral_factorization(A, k, eps, RngSpec(seed))
    sel = dual_set_spectral(F.Z, None, r)
    S = svd(A) if report else None
    return _finish(A, Method.FAST_SPECTRAL, k, r, sel.support, t0, S, report,
                   weights=sel.weights, eps=eps, seed=seed,
                   diagnostics={"sigma_k_ZS": _sigma_k(F.Z, sel), "q": F.q, "p": F.p})


def _fast_frobenius_indices(A, k, r, eps, rng):
    F = fast_frobenius_factorization(A, k, eps, rng)
    sel = dual_set_spectral_frobenius(F.Z, F.E.T, r)
    return F, sel


def fast_frobenius(A, k, r, eps, seed=0, report=True):
    A = as_matrix(A)
    _check_randomized(k, eps)
    _check_budget(A.shape[1], k, r)
    t0 = time.perf_counter()
    F, sel = _fast_frobenius_indices(A, k, r, eps, RngSpec(seed))
    S = svd(A) if report else None
    return _finish(A, Method.FAST_FROBENIUS, k, r, sel.support, t0, S, report,
                   weights=sel.weights, eps=eps, seed=seed,
                   diagnostics={"sigma_k_ZS": _sigma_k(F.Z, sel), "p": F.p})


def draw_columns(weights, count, rng):
    """``count`` i.i.d. draws from the distribution proportional to ``weights``."""
    total = float(np.sum(weights))
    p = weights / total
    gen = rng.generator() if isinstance(rng, RngSpec) else RngSpec(int(rng)).generator()
    draws = gen.choice(p.size, size=count, replace=True, p=p)
    return SampleDraw(indices=np.unique(draws), draws=draws, probabilities=p)


def norm_sampling_probabilities(A):
    A = as_matrix(A)
    col = np.sum(A * A, axis=0)
    total = float(np.sum(col))
    if total == 0:
        raise InvalidInput("zero matrix has no sampling distribution")
    return col / total


def norm_sampling(A, r, seed=0, k=1, report=True):
    """``r`` i.i.d. draws with probability proportional to squared column norms."""
    A = as_matrix(A)
    if r < 1:
        raise InvalidInput("need r >= 1")
    t0 = time.perf_counter()
    p = norm_sampling_probabilities(A)
    drawn = draw_columns(p, r, RngSpec(seed))
    S = None
    if report:
        S = svd(A)
        _check_rank(S, k)
    return _finish(A, Method.NORM_SAMPLING, k, r, drawn.indices, t0, S, report,
                   draws=r, seed=seed)


def adaptive_sample(A, C1, s, seed=0):
    """Draw ``s`` columns with probability proportional to the squared residual norms.

    Raises :class:`EarlyExact` when ``A - C1 C1^+ A`` is numerically zero.
    """
    A = as_matrix(A)
    C1 = as_matrix(C1, "C1")
    if C1.shape[0] != A.shape[0]:
        raise InvalidInput("C1 and A must have the same number of rows")
    if s < 1:
        raise InvalidInput("need s >= 1")
    Q = orthonormal_basis(C1)
    B = A - Q @ (Q.T @ A)
    col = np.sum(B * B, axis=0)
    if sqrt(float(np.sum(col))) <= EARLY_EXACT_TOL * sqrt(frobenius_norm_sq(A)):
        raise EarlyExact("residual is numerically zero")
    rng = seed if isinstance(seed, RngSpec) else RngSpec(int(seed))
    return draw_columns(col, s, rng)


def relative_error_css(A, k, eps, seed=0, economy=False, report=True):
    """Fast Frobenius selection of ``r_hat`` columns plus ``s`` adaptive draws."""
    A = as_matrix(A)
    _check_randomized(k, eps)
    params = RelErrParams.from_eps(k, eps, economy=economy)
    n = A.shape[1]
    t0 = time.perf_counter()
    if params.r_hat >= n:
        first = np.arange(n)
    else:
        _, sel = _fast_frobenius_indices(A, k, params.r_hat, params.eps0, RngSpec(seed, 0))
        first = sel.support
    draws = 0
    try:
        extra = adaptive_sample(A, A[:, first], params.s, RngSpec(seed, 1))
        indices = np.union1d(first, extra.indices)
        draws = params.s
        early = False
    except EarlyExact:
        indices = first
        early = True
    S = None
    if report:
        S = svd(A)
        _check_rank(S, k)
    return _finish(A, Method.RELATIVE_ERROR, k, params.budget, indices, t0, S, report,
                   draws=draws, eps=eps, seed=seed, params=params,
                   diagnostics={"early_exact": early, "stage1": int(first.size),
                                "reference_columns": 2 * k / eps})


def select_columns(A, method, k, r=None, eps=None, seed=0, economy=False, report=True):
    """Dispatch on :class:`Method`."""
    method = Method(method)
    if method is Method.DET_SPECTRAL:
        return det_spectral(A, k, r, report=report)
    if method is Method.DET_SPECTRAL_VK:
        return det_spectral_vk_only(A, k, r, report=report)
    if method is Method.DET_FROBENIUS:
        return det_frobenius(A, k, r, report=report)
    if method is Method.FAST_SPECTRAL:
        return fast_spectral(A, k, r, eps, seed, report=report)
    if method is Method.FAST_FROBENIUS:
        return fast_frobenius(A, k, r, eps, seed, report=report)
    if method is Method.RELATIVE_ERROR:
        return relative_error_css(A, k, eps, seed, economy=economy, report=report)
    return norm_sampling(A, r, seed, k=k, report=report)
