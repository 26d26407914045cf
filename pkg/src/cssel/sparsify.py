"""Deterministic dual-set sparsification by greedy barrier potentials.

Given the rows ``v_i`` of a matrix with orthonormal columns (so that
``sum v_i v_i^T = I_k``) and a second row set, pick at most ``r`` indices and
non-negative weights ``s_i`` such that ``sum s_i v_i v_i^T`` keeps its smallest
eigenvalue above ``(1 - sqrt(k/r))^2`` while the second set's weighted Gram
matrix stays small: its largest eigenvalue (spectral variant) or its trace
(spectral-Frobenius variant).

Each of the ``r`` steps moves a lower barrier ``l`` up by ``delta_L = 1`` and an
upper barrier ``u`` up by ``delta_U``, picks the smallest index ``j`` whose
upper score does not exceed its lower score, and adds weight
``t = 2 / (U_j + L_j)`` to it.
"""
from dataclasses import dataclass, field
from math import sqrt

import numpy as np

from .errors import InvalidInput, NumericalBreakdown

IDENTITY_TOL = 1e-6


# ---------------------------------------------------------------------------
# barrier potentials and scores

def _eigvalsh(M):
    M = np.asarray(M, dtype=np.float64)
    if M.size == 0:
        return np.zeros(0)
    return np.linalg.eigvalsh(M)


def phi_lower(l, A):
    """``sum_i 1 / (lambda_i(A) - l)``; requires ``l < lambda_min(A)``."""
    gaps = _eigvalsh(A) - l
    if np.any(gaps <= 0):
        raise NumericalBreakdown(f"lower barrier {l} not below spectrum of A")
    return float(np.sum(1.0 / gaps))


def phi_upper(u, B):
    """``sum_i 1 / (u - lambda_i(B))``; requires ``u > lambda_max(B)``."""
    gaps = u - _eigvalsh(B)
    if np.any(gaps <= 0):
        raise NumericalBreakdown(f"upper barrier {u} not above spectrum of B")
    return float(np.sum(1.0 / gaps))


def _lower_scores(P2, lam, delta_L, l):
    # P2[i, j] = (v_i . w_j)^2 for the eigenvectors w_j of A
    inner = lam - (l + delta_L)
    if np.any(inner == 0):
        raise NumericalBreakdown("shifted lower matrix is singular")
    outer = lam - l
    if np.any(outer <= 0):
        raise NumericalBreakdown(f"lower barrier {l} not below spectrum of A")
    d1 = 1.0 / inner
    d2 = d1 * d1
    diff = np.sum(d1) - np.sum(1.0 / outer)
    return (P2 @ d2) / diff - P2 @ d1


def _upper_scores(P2, lam, delta_U, u):
    # P2[i, j] = (u_i . w_j)^2 for the eigenvectors w_j of B
    gaps = u - lam
    if np.any(gaps <= 0):
        raise NumericalBreakdown(f"upper barrier {u} not above spectrum of B")
    d1 = 1.0 / (u + delta_U - lam)
    d2 = d1 * d1
    diff = np.sum(1.0 / gaps) - np.sum(d1)
    return (P2 @ d2) / diff + P2 @ d1


def L_score(v, delta_L, A, l):
    """Lower-barrier score of a single vector ``v`` against ``A`` at level ``l``."""
    v = np.atleast_1d(np.asarray(v, dtype=np.float64))
    lam, W = np.linalg.eigh(np.atleast_2d(np.asarray(A, dtype=np.float64)))
    P2 = (v @ W)[None, :] ** 2
    return float(_lower_scores(P2, lam, delta_L, l)[0])


def U_score(u_vec, delta_U, B, u):
    """Upper-barrier score of a single vector against ``B`` at level ``u``."""
    x = np.atleast_1d(np.asarray(u_vec, dtype=np.float64))
    lam, W = np.linalg.eigh(np.atleast_2d(np.asarray(B, dtype=np.float64)))
    P2 = (x @ W)[None, :] ** 2
    return float(_upper_scores(P2, lam, delta_U, u)[0])


def U_F_score(a, delta_U):
    """Trace-barrier score ``|a|^2 / delta_U``."""
    if delta_U <= 0:
        raise InvalidInput("delta_U must be positive")
    a = np.asarray(a, dtype=np.float64)
    return float(a @ a) / delta_U


# ---------------------------------------------------------------------------
# state

@dataclass(frozen=True)
class Constants:
    delta_L: float
    delta_U: float
    l0: float
    u0: float

    @classmethod
    def spectral(cls, k, ell, r):
        delta_U = (1 + sqrt(ell / r)) / (1 - sqrt(k / r))
        return cls(1.0, delta_U, -sqrt(r * k), delta_U * sqrt(ell * r))

    @classmethod
    def frobenius(cls, k, r, total_sq):
        return cls(1.0, total_sq / (1 - sqrt(k / r)), -sqrt(r * k), 0.0)

    def levels(self, tau):
        return tau * self.delta_L + self.l0, tau * self.delta_U + self.u0


@dataclass
class BarrierState:
    tau: int
    s: np.ndarray
    A: np.ndarray                 # sum s_i v_i v_i^T
    B: np.ndarray | None          # sum s_i u_i u_i^T (generic spectral only)
    trace_B: float                # Frobenius variant only
    l: float
    u: float


@dataclass(frozen=True)
class StepRecord:
    tau: int
    index: int
    weight: float
    l: float
    u: float
    lam_min_A: float
    upper_stat: float             # lambda_max(B) or trace(B) before the update
    sum_U: float
    sum_L: float


@dataclass(frozen=True)
class WeightedSelection:
    weights: np.ndarray
    support: np.ndarray
    raw_weights: np.ndarray
    steps: tuple = field(default=(), repr=False)

    @property
    def sampling_matrix(self):
        """``n x |support|`` matrix with columns ``sqrt(s_i) e_i``."""
        n = self.weights.shape[0]
        S = np.zeros((n, self.support.size))
        S[self.support, np.arange(self.support.size)] = np.sqrt(self.weights[self.support])
        return S


# ---------------------------------------------------------------------------
# upper sides

class _GenericUpper:
    """Upper side given explicitly as rows ``u_i`` (sum u_i u_i^T = I)."""

    def __init__(self, U):
        self.U = U
        self.ell = U.shape[1]

    def init_state(self):
        return np.zeros((self.ell, self.ell))

    def scores(self, state, consts):
        if self.ell == 0:
            return np.zeros(self.U.shape[0]), -np.inf
        lam, W = np.linalg.eigh(state.B)
        P2 = (self.U @ W) ** 2
        return _upper_scores(P2, lam, consts.delta_U, state.u), float(lam[-1])

    def update(self, state, j, t):
        if self.ell:
            state.B += t * np.outer(self.U[j], self.U[j])


class _IdentityUpper:
    """Upper side ``u_i = e_i``: B is diagonal with the current weights."""

    def __init__(self, n):
        self.ell = n

    def init_state(self):
        return None

    def scores(self, state, consts):
        lam = np.sort(state.s)
        u = state.u
        if np.any(u - lam <= 0):
            raise NumericalBreakdown(f"upper barrier {u} not above spectrum of B")
        diff = np.sum(1.0 / (u - lam)) - np.sum(1.0 / (u + consts.delta_U - lam))
        d1 = 1.0 / (u + consts.delta_U - state.s)
        d2 = d1 * d1
        return d2 / diff + d1, float(lam[-1])

    def update(self, state, j, t):
        pass


class _TraceUpper:
    """Spectral-Frobenius variant: constant scores ``|a_i|^2 / delta_U``."""

    def __init__(self, Arows):
        self.sq = np.sum(Arows * Arows, axis=1)
        self.total = float(np.sum(self.sq))

    def init_state(self):
        return None

    def scores(self, state, consts):
        if consts.delta_U == 0:
            return np.zeros_like(self.sq), state.trace_B
        return self.sq / consts.delta_U, state.trace_B

    def update(self, state, j, t):
        state.trace_B += t * float(self.sq[j])


# ---------------------------------------------------------------------------
# driver

def _check_identity(X, name):
    G = X.T @ X
    err = np.max(np.abs(G - np.eye(G.shape[0]))) if G.size else 0.0
    if err > IDENTITY_TOL:
        raise InvalidInput(f"rows of {name} are not a decomposition of the identity "
                           f"(max |{name}^T {name} - I| = {err:.3g})")


def _rows(X, name):
    X = np.array(X, dtype=np.float64, order="C", ndmin=2)
    if X.ndim != 2 or not np.all(np.isfinite(X)):
        raise InvalidInput(f"{name} must be a finite 2-D array")
    return X


def _check_budget(n, k, r):
    if not (1 <= k < n):
        raise InvalidInput(f"need 1 <= k < n, got k={k}, n={n}")
    if not (k < r <= n):
        raise InvalidInput(f"need k < r <= n, got k={k}, r={r}, n={n}")


def select_index_and_weight(state, V, upper, consts, P2=None, lam=None):
    """Smallest index whose upper score is at most its lower score, with its weight.

    Returns ``(j, t, U_scores, L_scores, lam_min_A, upper_stat)``.
    """
    if lam is None:
        lam, W = np.linalg.eigh(state.A)
        P2 = (V @ W) ** 2
    if lam[0] <= state.l + consts.delta_L:
        raise NumericalBreakdown(
            f"lambda_min(A) = {lam[0]!r} not above l + delta_L = {state.l + consts.delta_L!r}",
            step=state.tau)
    Ls = _lower_scores(P2, lam, consts.delta_L, state.l)
    Us, upper_stat = upper.scores(state, consts)
    ok = (Us <= Ls) & (Us + Ls > 0)
    if not ok.any():
        raise NumericalBreakdown(
            "no index satisfies U <= L", step=state.tau,
            diagnostics={"sum_U": float(np.sum(Us)), "sum_L": float(np.sum(Ls)),
                         "l": state.l, "u": state.u})
    j = int(np.argmax(ok))
    t = 2.0 / (Us[j] + Ls[j])
    return j, t, Us, Ls, float(lam[0]), upper_stat


def _run(V, upper, r, consts, record):
    n, k = V.shape
    state = BarrierState(tau=0, s=np.zeros(n), A=np.zeros((k, k)), B=upper.init_state(),
                         trace_B=0.0, l=consts.l0, u=consts.u0)
    steps = []
    for tau in range(r):
        state.tau = tau
        state.l, state.u = consts.levels(tau)
        j, t, Us, Ls, lam_min, upper_stat = select_index_and_weight(state, V, upper, consts)
        if record:
            steps.append(StepRecord(tau=tau, index=j, weight=t, l=state.l, u=state.u,
                                    lam_min_A=lam_min, upper_stat=upper_stat,
                                    sum_U=float(np.sum(Us)), sum_L=float(np.sum(Ls))))
        state.s[j] += t
        state.A += t * np.outer(V[j], V[j])
        upper.update(state, j, t)

    raw = state.s
    weights = raw * ((1 - sqrt(k / r)) / r)
    support = np.flatnonzero(weights)
    return WeightedSelection(weights=weights, support=support, raw_weights=raw.copy(),
                             steps=tuple(steps))


def dual_set_spectral(V, U, r, record=False):
    """Spectral-spectral sparsification of two decompositions of the identity.

    ``V`` is ``n x k`` and ``U`` is ``n x ell``, both with orthonormal columns.
    Pass ``U=None`` for the standard basis of R^n (``ell = n``); that case
    never forms the ``n x n`` Gram matrix.
    """
    V = _rows(V, "V")
    n, k = V.shape
    _check_budget(n, k, r)
    _check_identity(V, "V")
    if U is None:
        upper = _IdentityUpper(n)
    else:
        U = _rows(U, "U")
        if U.shape[0] != n:
            raise InvalidInput(f"U has {U.shape[0]} rows, V has {n}")
        _check_identity(U, "U")
        upper = _GenericUpper(U)
    consts = Constants.spectral(k, upper.ell, r)
    return _run(V, upper, r, consts, record)


def dual_set_spectral_frobenius(V, Arows, r, record=False):
    """Sparsification controlling ``lambda_k`` of the V side and the trace of the A side."""
    V = _rows(V, "V")
    n, k = V.shape
    _check_budget(n, k, r)
    _check_identity(V, "V")
    Arows = _rows(Arows, "Arows")
    if Arows.shape[0] != n:
        raise InvalidInput(f"Arows has {Arows.shape[0]} rows, V has {n}")
    upper = _TraceUpper(Arows)
    consts = Constants.frobenius(k, r, upper.total)
    return _run(V, upper, r, consts, record)
