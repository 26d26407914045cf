from fractions import Fraction
from math import sqrt

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from cssel import InvalidInput, NumericalBreakdown
from cssel.sparsify import (BarrierState, Constants, L_score, U_F_score, U_score,
                            _GenericUpper, _IdentityUpper, dual_set_spectral,
                            dual_set_spectral_frobenius, phi_lower, phi_upper,
                            select_index_and_weight)

from conftest import random_orthonormal


def frac_L(a, l, delta=1):
    """Scalar lower score with exact rationals: k=1, v=1, A=[a]."""
    a, l, delta = Fraction(a), Fraction(l), Fraction(delta)
    inner = a - l - delta
    return (1 / inner ** 2) / (1 / inner - 1 / (a - l)) - 1 / inner


def frac_U(b, u, delta):
    """Scalar upper score with exact rationals: ell=1, u_vec=1, B=[b]."""
    b, u, delta = Fraction(b), Fraction(u), Fraction(delta)
    outer = u + delta - b
    return (1 / outer ** 2) / (1 / (u - b) - 1 / outer) + 1 / outer


# ---------------------------------------------------------------------------
# potentials and scores

def test_phi_examples():
    assert phi_lower(-2, [[0.0]]) == 0.5
    assert phi_upper(6, [[0.0]]) == pytest.approx(1 / 6, rel=1e-15)
    assert phi_lower(-1, np.zeros((2, 2))) == 2.0


def test_phi_barrier_violation():
    with pytest.raises(NumericalBreakdown):
        phi_lower(0.0, [[0.0]])
    with pytest.raises(NumericalBreakdown):
        phi_upper(1.0, [[2.0]])


def test_L_score_examples():
    assert L_score([1.0], 1.0, [[0.0]], -2.0) == pytest.approx(float(frac_L(0, -2)), rel=1e-14)
    assert frac_L(0, -2) == 1
    assert L_score(np.zeros(3), 1.0, np.eye(3), -2.0) == 0.0


def test_L_score_at_initial_barrier():
    # r=9, k=1: l = -sqrt(rk) = -3
    assert frac_L(0, -3) == 1
    assert L_score([1.0], 1.0, [[0.0]], -3.0) == pytest.approx(1.0, rel=1e-14)


def test_U_score_examples():
    assert frac_U(0, 6, 3) == Fraction(1, 3)
    assert U_score([1.0], 3.0, [[0.0]], 6.0) == pytest.approx(1 / 3, rel=1e-14)
    assert U_score(np.zeros(2), 3.0, np.eye(2), 6.0) == 0.0


@settings(max_examples=100, deadline=None)
@given(st.integers(-20, 20), st.integers(1, 40), st.integers(1, 40))
def test_scalar_scores_match_rationals(a, gap, du):
    l = a - 1 - gap            # keeps a - l - 1 > 0
    assert L_score([1.0], 1.0, [[a]], l) == pytest.approx(float(frac_L(a, l)), rel=1e-12)
    u = a + gap
    assert U_score([1.0], du, [[a]], u) == pytest.approx(float(frac_U(a, u, du)), rel=1e-12)


def test_identity_fast_path_score_matches_generic(rng):
    n = 7
    w = rng.uniform(0, 2, n)
    consts = Constants(1.0, 2.5, -3.0, 4.0)
    state = BarrierState(tau=0, s=w.copy(), A=np.eye(2), B=np.diag(w), trace_B=0.0, l=-3.0, u=4.0)
    fast, _ = _IdentityUpper(n).scores(state, consts)
    generic, _ = _GenericUpper(np.eye(n)).scores(state, consts)
    np.testing.assert_allclose(fast, generic, rtol=1e-13)
    for i in range(n):
        e = np.zeros(n)
        e[i] = 1.0
        assert fast[i] == pytest.approx(U_score(e, 2.5, np.diag(w), 4.0), rel=1e-13)


def test_U_F_score():
    assert U_F_score([3.0, 4.0], 50.0) == 0.5
    assert U_F_score([0.0, 0.0], 50.0) == 0.0
    with pytest.raises(InvalidInput):
        U_F_score([1.0], 0.0)


def test_U_F_full_set_average(rng):
    k, r = 3, 20
    a = rng.standard_normal((40, 6))
    dU = np.sum(a * a) / (1 - sqrt(k / r))
    assert sum(U_F_score(x, dU) for x in a) == pytest.approx(1 - sqrt(k / r), rel=1e-12)


# ---------------------------------------------------------------------------
# reference implementation with explicit inverses

def reference_spectral(V, U, r):
    n, k = V.shape
    ell = U.shape[1]
    dL = 1.0
    dU = (1 + sqrt(ell / r)) / (1 - sqrt(k / r))
    s = np.zeros(n)
    A = np.zeros((k, k))
    B = np.zeros((ell, ell))
    for tau in range(r):
        l = tau - sqrt(r * k)
        u = dU * (tau + sqrt(ell * r))
        Mi = np.linalg.inv(A - (l + dL) * np.eye(k))
        Ni = np.linalg.inv((u + dU) * np.eye(ell) - B)
        phiL = lambda x: np.trace(np.linalg.inv(A - x * np.eye(k)))
        phiU = lambda x: np.trace(np.linalg.inv(x * np.eye(ell) - B))
        j = None
        for i in range(n):
            L = V[i] @ Mi @ Mi @ V[i] / (phiL(l + dL) - phiL(l)) - V[i] @ Mi @ V[i]
            Uu = U[i] @ Ni @ Ni @ U[i] / (phiU(u) - phiU(u + dU)) + U[i] @ Ni @ U[i]
            if Uu <= L:
                j, t = i, 2 / (Uu + L)
                break
        assert j is not None
        s[j] += t
        A += t * np.outer(V[j], V[j])
        B += t * np.outer(U[j], U[j])
    return s * (1 - sqrt(k / r)) / r


@pytest.mark.parametrize("seed", range(4))
def test_matches_explicit_inverse_reference(seed):
    rng = np.random.default_rng(seed)
    V = random_orthonormal(rng, 16, 2)
    U = random_orthonormal(rng, 16, 3)
    sel = dual_set_spectral(V, U, 6)
    np.testing.assert_allclose(sel.weights, reference_spectral(V, U, 6), rtol=1e-9, atol=1e-12)


# ---------------------------------------------------------------------------
# dual-set spectral

def bounds_hold(V, U, sel, r):
    k = V.shape[1]
    S = sel.sampling_matrix
    lo = np.linalg.eigvalsh(V.T @ S @ S.T @ V)[0]
    ok = lo >= (1 - sqrt(k / r)) ** 2 - 1e-8
    if U is not None:
        ell = U.shape[1]
        hi = np.linalg.eigvalsh(U.T @ S @ S.T @ U)[-1] if ell else 0.0
        ok = ok and hi <= (1 + sqrt(ell / r)) ** 2 + 1e-8
    return ok and sel.support.size <= r


def test_two_point_example():
    V = np.full((2, 1), 1 / sqrt(2))
    sel = dual_set_spectral(V, V.copy(), 2, record=True)
    assert sel.steps[0].index == 0
    g = float(np.sum(sel.weights) / 2)    # v_i^2 = u_i^2 = 1/2
    assert g >= (1 - sqrt(0.5)) ** 2 - 1e-8
    assert g <= (1 + sqrt(0.5)) ** 2 + 1e-8
    assert (1 - sqrt(0.5)) ** 2 == pytest.approx(0.08579, abs=1e-5)
    assert (1 + sqrt(0.5)) ** 2 == pytest.approx(2.91421, abs=1e-5)


def test_two_point_hand_run():
    # both steps pick index 0; weights from the scalar formulas
    r, k = 2, 1
    dU = (1 + sqrt(1 / r)) / (1 - sqrt(k / r))
    a = b = 0.0
    s0 = 0.0
    for tau in range(r):
        l = tau - sqrt(r * k)
        u = dU * (tau + sqrt(r))
        L = 0.5 * float(frac_L(Fraction(a), Fraction(l)))
        U = 0.5 * float(frac_U(Fraction(b), Fraction(u), Fraction(dU)))
        t = 2 / (U + L)
        s0 += t
        a += t / 2
        b += t / 2
    V = np.full((2, 1), 1 / sqrt(2))
    sel = dual_set_spectral(V, V.copy(), 2)
    assert sel.support.tolist() == [0]
    assert sel.raw_weights[0] == pytest.approx(s0, rel=1e-12)


def test_random_n60(rng):
    V = random_orthonormal(rng, 60, 3)
    U = random_orthonormal(rng, 60, 5)
    sel = dual_set_spectral(V, U, 20)
    assert bounds_hold(V, U, sel, 20)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.integers(4, 40), st.integers(1, 5),
       st.integers(1, 8), st.integers(1, 40))
def test_bounds_property(seed, n, k, ell, r):
    assume(k < n and ell <= n and k < r <= n)
    rng = np.random.default_rng(seed)
    V = random_orthonormal(rng, n, k)
    U = random_orthonormal(rng, n, ell)
    sel = dual_set_spectral(V, U, r, record=True)
    assert bounds_hold(V, U, sel, r)
    lo = 1 - sqrt(k / r)
    for rec in sel.steps:
        assert rec.lam_min_A >= rec.l - 1e-8
        assert rec.upper_stat <= rec.u + 1e-8
        assert rec.sum_U <= lo + 1e-6
        assert rec.sum_L >= lo - 1e-6
    np.testing.assert_allclose(sel.weights, sel.raw_weights * lo / r, rtol=1e-15, atol=0)


def test_deterministic(rng):
    V = random_orthonormal(rng, 50, 4)
    U = random_orthonormal(rng, 50, 6)
    a = dual_set_spectral(V, U, 15)
    b = dual_set_spectral(V.copy(), U.copy(), 15)
    assert np.array_equal(a.weights, b.weights)


@pytest.mark.parametrize("n,k,r", [(5, 1, 2), (12, 2, 5), (30, 3, 12), (64, 4, 30), (64, 1, 64)])
def test_identity_fast_path_bit_identical(n, k, r):
    V = random_orthonormal(np.random.default_rng(n * 100 + r), n, k)
    fast = dual_set_spectral(V, None, r)
    generic = dual_set_spectral(V, np.eye(n), r)
    assert np.array_equal(fast.weights, generic.weights)
    assert np.array_equal(fast.support, generic.support)


def test_identity_fast_path_bounds(rng):
    V = random_orthonormal(rng, 50, 3)
    sel = dual_set_spectral(V, None, 20)
    assert bounds_hold(V, np.eye(50), sel, 20)


def test_validation(rng):
    V = random_orthonormal(rng, 10, 2)
    with pytest.raises(InvalidInput):
        dual_set_spectral(2 * V, None, 5)
    with pytest.raises(InvalidInput):
        dual_set_spectral(V, None, 2)
    with pytest.raises(InvalidInput):
        dual_set_spectral(V, None, 11)
    with pytest.raises(InvalidInput):
        dual_set_spectral(V, random_orthonormal(rng, 9, 2), 5)
    with pytest.raises(InvalidInput):
        dual_set_spectral_frobenius(V, np.ones((9, 2)), 5)


# ---------------------------------------------------------------------------
# spectral-Frobenius variant

def frob_bounds_hold(V, Arows, sel, r):
    k = V.shape[1]
    S = sel.sampling_matrix
    lo = np.linalg.eigvalsh(V.T @ S @ S.T @ V)[0]
    tr = float(np.sum(sel.weights * np.sum(Arows * Arows, axis=1)))
    total = float(np.sum(Arows * Arows))
    return (lo >= (1 - sqrt(k / r)) ** 2 - 1e-8 and tr <= total + 1e-8 * total
            and sel.support.size <= r)


def test_frobenius_zero_rows(rng):
    V = random_orthonormal(rng, 30, 3)
    Arows = np.zeros((30, 4))
    sel = dual_set_spectral_frobenius(V, Arows, 10)
    assert frob_bounds_hold(V, Arows, sel, 10)


def test_frobenius_unit_total(rng):
    V = random_orthonormal(rng, 30, 3)
    Arows = rng.standard_normal((30, 5))
    Arows /= np.linalg.norm(Arows)
    sel = dual_set_spectral_frobenius(V, Arows, 10)
    tr = float(np.sum(sel.weights * np.sum(Arows * Arows, axis=1)))
    assert tr <= 1 + 1e-8


def test_frobenius_residual_rows():
    rng = np.random.default_rng(7)
    A = rng.standard_normal((40, 60))
    u, s, vt = np.linalg.svd(A, full_matrices=False)
    V = vt[:3].T
    resid = A - (u[:, :3] * s[:3]) @ vt[:3]
    sel = dual_set_spectral_frobenius(V, resid.T, 20, record=True)
    assert frob_bounds_hold(V, resid.T, sel, 20)
    lo = 1 - sqrt(3 / 20)
    for rec in sel.steps:
        assert rec.sum_U <= lo + 1e-6 and rec.sum_L >= lo - 1e-6
        assert rec.upper_stat <= rec.u * (1 + 1e-12)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.integers(4, 40), st.integers(1, 5),
       st.integers(1, 6), st.integers(1, 40))
def test_frobenius_property(seed, n, k, ell, r):
    assume(k < n and k < r <= n)
    rng = np.random.default_rng(seed)
    V = random_orthonormal(rng, n, k)
    Arows = rng.standard_normal((n, ell)) * rng.uniform(0, 3, (n, 1))
    sel = dual_set_spectral_frobenius(V, Arows, r)
    assert frob_bounds_hold(V, Arows, sel, r)


# ---------------------------------------------------------------------------
# one step

def fresh_state(n, k, consts, B):
    return BarrierState(tau=0, s=np.zeros(n), A=np.zeros((k, k)), B=B, trace_B=0.0,
                        l=consts.l0, u=consts.u0)


def test_step_first_index_on_ties():
    V = np.full((2, 1), 1 / sqrt(2))
    consts = Constants.spectral(1, 1, 2)
    state = fresh_state(2, 1, consts, np.zeros((1, 1)))
    j, t, Us, Ls, _, _ = select_index_and_weight(state, V, _GenericUpper(V.copy()), consts)
    assert j == 0
    assert Us[j] <= 1 / t <= Ls[j]
    assert t > 0


def test_step_only_admissible_index():
    # index 0 has v = 0, so L = 0 < U; index 1 is the only admissible choice
    V = np.array([[0.0], [1.0]])
    U = np.array([[1.0], [0.0]])
    consts = Constants.spectral(1, 1, 2)
    state = fresh_state(2, 1, consts, np.zeros((1, 1)))
    j, t, Us, Ls, _, _ = select_index_and_weight(state, V, _GenericUpper(U), consts)
    assert Ls[0] == 0.0 and Us[0] > 0
    assert j == 1


def test_step_keeps_lower_barrier(rng):
    n, k, ell, r = 30, 3, 4, 12
    V = random_orthonormal(rng, n, k)
    U = random_orthonormal(rng, n, ell)
    consts = Constants.spectral(k, ell, r)
    upper = _GenericUpper(U)
    state = fresh_state(n, k, consts, np.zeros((ell, ell)))
    for tau in range(r):
        state.tau = tau
        state.l, state.u = consts.levels(tau)
        j, t, *_ = select_index_and_weight(state, V, upper, consts)
        state.s[j] += t
        state.A += t * np.outer(V[j], V[j])
        upper.update(state, j, t)
        l_next, u_next = consts.levels(tau + 1)
        assert np.linalg.eigvalsh(state.A)[0] >= l_next - 1e-8
        assert np.linalg.eigvalsh(state.B)[-1] <= u_next + 1e-8


def test_step_breakdown_reports_step():
    V = np.eye(2)[:, :1]
    consts = Constants.spectral(1, 1, 2)
    state = fresh_state(2, 1, consts, np.zeros((1, 1)))
    state.tau = 5
    state.l = 0.0      # lambda_min(A) = 0 <= l + delta_L
    with pytest.raises(NumericalBreakdown, match="step 5"):
        select_index_and_weight(state, V, _GenericUpper(np.eye(2)[:, :1]), consts)
