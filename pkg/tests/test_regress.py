import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from nullspace_interp import (
    CoefficientVector,
    Dataset,
    EarlyTerminationError,
    InputError,
    NotConvergedError,
    ProvenanceError,
    SolverConfig,
    apply_preprocess,
    fit_fused_lasso,
    fit_generalized_lasso,
    fit_min_norm,
    fit_pcr,
    fit_pls,
    fit_preprocess,
    fit_ridge,
    orthogonality_defect,
    predict,
    svd_factor,
)
from nullspace_interp.regress import (
    PenaltyMatrix,
    _BetaSystem,
    default_grid,
    default_lambda_grid,
    first_difference,
    fit_method,
    gen_lasso_objective,
    lambda_max,
)

from conftest import gaussian_problem


def raw(X, y):
    # already "centered" toy data: a preprocessing-free dataset is accepted by the fits
    return Dataset(np.asarray(X, float), np.asarray(y, float))


# -- min-norm / ridge --------------------------------------------------------

def test_min_norm_identity():
    assert np.allclose(fit_min_norm(raw(np.eye(3), [1, 2, 3])).beta, [1, 2, 3])


def test_min_norm_interpolates_wide(rng):
    d = gaussian_problem(rng, 5, 12)
    b = fit_min_norm(d).beta
    assert np.linalg.norm(d.y - d.X @ b) <= 1e-8 * np.linalg.norm(d.y)


def test_min_norm_rank_zero():
    with pytest.raises(InputError):
        fit_min_norm(raw(np.zeros((3, 4)), [1, 2, 3]))


def test_min_norm_equals_tiny_ridge(rng):
    d = gaussian_problem(rng, 5, 12)
    b0 = fit_min_norm(d).beta
    br = fit_ridge(d, 1e-12).beta
    assert np.linalg.norm(br - b0) <= 1e-6 * np.linalg.norm(b0)


def test_ridge_hand_case():
    assert np.allclose(fit_ridge(raw(np.eye(2), [2, 4]), 1.0).beta, [1, 2])


def test_ridge_dense_oracle(rng):
    X, y = rng.standard_normal((4, 7)), rng.standard_normal(4)
    lam = 0.7
    dense = np.linalg.solve(X.T @ X + lam * np.eye(7), X.T @ y)
    assert np.allclose(fit_ridge(raw(X, y), lam).beta, dense, atol=1e-9)


def test_ridge_shrinks_to_zero(rng):
    d = gaussian_problem(rng, 5, 12)
    smax = svd_factor(d.X).sigma_max
    b = fit_ridge(d, 1e12 * smax**2).beta
    assert np.linalg.norm(b) <= 1e-6 * np.linalg.norm(fit_min_norm(d).beta)


def test_ridge_rejects_nonpositive(rng):
    with pytest.raises(InputError):
        fit_ridge(gaussian_problem(rng, 3, 5), 0.0)


def test_ridge_converges_linearly_to_min_norm(rng):
    d = gaussian_problem(rng, 6, 15)
    smax2 = svd_factor(d.X).sigma_max ** 2
    b0 = fit_min_norm(d).beta
    lams = np.array([1e-4, 1e-6, 1e-8, 1e-10, 1e-12]) * smax2
    gaps = np.array([np.linalg.norm(fit_ridge(d, lam).beta - b0) for lam in lams])
    assert np.all(np.diff(gaps) < 0)
    assert np.all(gaps / lams <= 10 * gaps[0] / lams[0])


# -- PCR ---------------------------------------------------------------------

def test_pcr_full_rank_matches_min_norm(rng):
    d = gaussian_problem(rng, 6, 11)
    r = svd_factor(d.X).rank
    assert np.allclose(d.X @ fit_pcr(d, r).beta, d.X @ fit_min_norm(d).beta, atol=1e-8)


def test_pcr_rank_one(rng):
    u, v = rng.standard_normal(4), rng.standard_normal(9)
    d = raw(np.outer(u, v), rng.standard_normal(4))
    assert np.allclose(fit_pcr(d, 1).beta, fit_min_norm(d).beta)


def test_pcr_eigendecomposition_oracle(rng):
    X, y = rng.standard_normal((5, 9)), rng.standard_normal(5)
    w, V = np.linalg.eigh(X.T @ X)
    V = V[:, np.argsort(w)[::-1][:2]]
    T = X @ V
    theta = (T.T @ y) / np.sum(T * T, axis=0)
    assert np.allclose(fit_pcr(raw(X, y), 2).beta, V @ theta, atol=1e-10)


def test_pcr_bounds(rng):
    d = gaussian_problem(rng, 4, 9)
    for M in (0, 4):  # centered 4-row data has rank 3
        with pytest.raises(InputError):
            fit_pcr(d, M)


# -- PLS ---------------------------------------------------------------------

def test_pls_one_step(rng):
    X, y = rng.standard_normal((5, 8)), rng.standard_normal(5)
    coef, state = fit_pls(raw(X, y), 1)
    z = X @ X.T @ y
    theta = (z @ y) / (z @ z)
    assert np.allclose(coef.beta, theta * X.T @ y)
    assert state.thetas[0] == pytest.approx(theta)


def test_pls_full_rank_matches_min_norm(rng):
    d = gaussian_problem(rng, 6, 20)
    r = svd_factor(d.X).rank
    coef, _ = fit_pls(d, r)
    assert np.allclose(d.X @ coef.beta, d.X @ fit_min_norm(d).beta, atol=1e-6)


def test_pls_krylov_oracle(rng):
    # univariate PLS fitted values = projection of y onto span{(XX^T)^k y, k = 1..M}
    X, y = rng.standard_normal((7, 15)), rng.standard_normal(7)
    K = X @ X.T
    for M in range(1, 5):
        basis = np.column_stack([np.linalg.matrix_power(K, k) @ y for k in range(1, M + 1)])
        Q, _ = np.linalg.qr(basis)
        coef, _ = fit_pls(raw(X, y), M)
        assert np.allclose(X @ coef.beta, Q @ (Q.T @ y), atol=1e-8)


def test_pls_errors(rng):
    d = gaussian_problem(rng, 5, 10)
    with pytest.raises(InputError):
        fit_pls(d, 0)
    with pytest.raises(InputError):
        fit_pls(raw(rng.standard_normal((3, 5)), np.zeros(3)), 1)


def test_pls_early_termination_reports_components():
    # y is an eigenvector of XX^T: one component explains it, the second score vanishes
    X = np.diag([3.0, 1.0, 0.5])
    y = np.array([1.0, 0.0, 0.0])
    with pytest.raises(EarlyTerminationError) as err:
        fit_pls(raw(X, y), 2)
    assert err.value.achieved == 1 and err.value.requested == 2


def test_default_pls_grid_respects_termination():
    X = np.diag([3.0, 1.0, 0.5])
    assert list(default_grid(raw(X, [1.0, 0.0, 0.0]), "pls")) == [1]


@given(st.integers(3, 8), st.integers(5, 30), st.integers(0, 2**31))
def test_pls_state_and_orthogonality(n, p, seed):
    d = gaussian_problem(np.random.default_rng(seed), n, p)
    f = svd_factor(d.X)
    for M in range(1, f.rank + 1):
        try:
            coef, state = fit_pls(d, M)
        except EarlyTerminationError:
            break
        assert orthogonality_defect(coef, f) <= 1e-8
        Z = state.scores
        G = Z.T @ Z
        nz = np.sqrt(np.diag(G))
        off = np.abs(G - np.diag(np.diag(G)))
        assert np.all(off <= 1e-8 * np.outer(nz, nz))
        assert np.allclose(d.X @ coef.beta, Z @ state.thetas, atol=1e-9 * max(1, np.linalg.norm(d.y)))


@given(st.integers(3, 8), st.integers(5, 30), st.integers(0, 2**31))
def test_ridge_pcr_orthogonal_to_nullspace(n, p, seed):
    d = gaussian_problem(np.random.default_rng(seed), n, p)
    f = svd_factor(d.X)
    for lam in (1e-3, 1.0, 100.0):
        assert orthogonality_defect(fit_ridge(d, lam, f), f) <= 1e-8
    for M in range(1, f.rank + 1):
        assert orthogonality_defect(fit_pcr(d, M, f), f) <= 1e-8


# -- generalized lasso -------------------------------------------------------

def test_penalty_matrix_shapes():
    D = first_difference(4)
    assert D.rows == 3
    assert np.array_equal(D.dense(), [[1, -1, 0, 0], [0, 1, -1, 0], [0, 0, 1, -1]])
    w = np.arange(3.0)
    assert np.allclose(D.apply_T(w), D.dense().T @ w)
    with pytest.raises(InputError):
        PenaltyMatrix("second-difference", 4)


@pytest.mark.parametrize("kind", ["identity", "first-difference"])
@pytest.mark.parametrize("shape", [(5, 30), (41, 300), (30, 12)])
def test_beta_system_matches_dense(rng, kind, shape):
    n, p = shape
    X = rng.standard_normal((n, p))
    D = PenaltyMatrix(kind, p)
    rho = 0.37
    r = rng.standard_normal(p)
    Dm = D.dense()
    b = _BetaSystem(X, D, rho, 0.0).solve(r)
    assert np.linalg.norm((X.T @ X + rho * Dm.T @ Dm) @ b - r) <= 1e-9 * np.linalg.norm(r)


def test_soft_threshold_oracle():
    d = raw(np.eye(2), [3.0, 0.5])
    b = fit_generalized_lasso(d, 1.0, "identity").beta
    assert np.max(np.abs(b - [2.0, 0.0])) <= 1e-6


def test_constant_fusion_oracle(rng):
    d = gaussian_problem(rng, 8, 25)
    X, y = d.X, d.y
    lam = 1e6 * np.max(np.abs(X.T @ y))
    one = np.ones(25)
    c = (X @ one) @ y / np.sum((X @ one) ** 2)
    b = fit_fused_lasso(d, lam).beta
    assert np.linalg.norm(b - c) <= 1e-4 * np.linalg.norm(c * one)


def test_objective_not_worse_than_min_norm(rng):
    d = gaussian_problem(rng, 6, 20)
    D = first_difference(20)
    lam = 0.1 * lambda_max(d, D)
    b = fit_fused_lasso(d, lam).beta
    b0 = fit_min_norm(d).beta
    assert gen_lasso_objective(d.X, d.y, b, lam, D) <= gen_lasso_objective(d.X, d.y, b0, lam, D)


def test_kkt_conditions(rng):
    # X^T (y - X b) = D^T w with |w| <= lam, w_k = lam sign((Db)_k) on clearly nonzero jumps
    d = gaussian_problem(rng, 10, 30)
    D = first_difference(30)
    lam = 0.05 * lambda_max(d, D)
    b = fit_fused_lasso(d, lam, SolverConfig(abs_tol=1e-10, rel_tol=1e-9)).beta
    g = d.X.T @ (d.y - d.X @ b)
    assert abs(g.sum()) <= 1e-6 * lam
    w = np.cumsum(g)[:-1]
    assert np.max(np.abs(w)) <= lam * (1 + 1e-5)
    jumps = D.apply(b)
    big = np.abs(jumps) > 1e-5 * np.max(np.abs(jumps))
    assert np.allclose(w[big], lam * np.sign(jumps[big]), rtol=1e-4)


def test_matches_cvxpy_when_available(rng):
    cp = pytest.importorskip("cvxpy")
    d = gaussian_problem(rng, 8, 20)
    D = first_difference(20)
    lam = 0.2 * lambda_max(d, D)
    b = fit_fused_lasso(d, lam, SolverConfig(abs_tol=1e-10, rel_tol=1e-9)).beta
    x = cp.Variable(20)
    prob = cp.Problem(cp.Minimize(0.5 * cp.sum_squares(d.y - d.X @ x) + lam * cp.norm1(D.dense() @ x)))
    prob.solve()
    ours = gen_lasso_objective(d.X, d.y, b, lam, D)
    assert ours <= prob.value + 1e-6 * abs(prob.value)


def test_returned_iterate_is_best_seen(rng):
    d = gaussian_problem(rng, 6, 20)
    D = first_difference(20)
    lam = 0.3 * lambda_max(d, D)
    coef = fit_fused_lasso(d, lam, SolverConfig(record_history=True))
    rep = coef.info["report"]
    assert rep.converged
    assert rep.objective <= min(rep.history) + 1e-6 * abs(rep.objective)


def test_not_converged_carries_best(rng):
    d = gaussian_problem(rng, 6, 20)
    with pytest.raises(NotConvergedError) as err:
        fit_fused_lasso(d, 0.01, SolverConfig(max_iter=60))
    assert err.value.best.shape == (20,)
    assert not err.value.report.converged


def test_fusion_post_step(rng):
    d = gaussian_problem(rng, 6, 20)
    lam = 0.5 * lambda_max(d, first_difference(20))
    b = fit_fused_lasso(d, lam, SolverConfig(fuse=True, fusion_tol=1e-6)).beta
    jumps = np.abs(np.diff(b))
    assert np.all((jumps == 0) | (jumps > 1e-6))


def test_lambda_max_is_threshold(rng):
    d = gaussian_problem(rng, 7, 18)
    for kind in ("identity", "first-difference"):
        D = PenaltyMatrix(kind, 18)
        top = lambda_max(d, D)
        above = fit_generalized_lasso(d, 1.01 * top, D).beta
        below = fit_generalized_lasso(d, 0.8 * top, D).beta
        spread = np.ptp(above) if kind == "first-difference" else np.max(np.abs(above))
        spread_below = np.ptp(below) if kind == "first-difference" else np.max(np.abs(below))
        assert spread <= 1e-5 * np.max(np.abs(below)) < spread_below


def test_lambda_grids(rng):
    d = gaussian_problem(rng, 6, 20)
    g = default_lambda_grid(d, "fused-lasso", num=10)
    assert g.size == 10 and np.isclose(g[-1], lambda_max(d, first_difference(20)))
    assert np.isclose(g[0] / g[-1], 1e-4)
    x = default_lambda_grid(d, "lasso", num=5, scale="xty")
    assert np.isclose(x[-1], 1e2 * np.max(np.abs(d.X.T @ d.y)) / d.n)
    r = default_lambda_grid(d, "ridge", num=3)
    assert np.isclose(r[0], 1e-6 * svd_factor(d.X).sigma_max ** 2)


@given(st.integers(3, 8), st.integers(5, 30), st.integers(0, 2**31))
def test_fused_lasso_generally_not_orthogonal(n, p, seed):
    # sanity only: the fit is valid and its defect is a number in [0, 1]
    d = gaussian_problem(np.random.default_rng(seed), n, p)
    lam = 0.1 * lambda_max(d, first_difference(p))
    coef = fit_fused_lasso(d, lam)
    assert 0.0 <= orthogonality_defect(coef, svd_factor(d.X)) <= 1.0 + 1e-12


# -- predict / defect ----------------------------------------------------------

def test_predict_zero_beta_gives_mean(rng):
    rawd = Dataset(rng.standard_normal((5, 7)), rng.normal(3, 1, 5))
    st_ = fit_preprocess(rawd, "center")
    d = apply_preprocess(st_, rawd)
    zero = CoefficientVector(np.zeros(7), "custom", {}, st_)
    assert np.allclose(predict(zero, d, restore_mean=True), st_.y_mean)


def test_predict_min_norm_interpolates(rng):
    d = gaussian_problem(rng, 5, 9)
    assert np.allclose(predict(fit_min_norm(d), d), d.y, atol=1e-8)


def test_predict_nullspace_invariance(rng):
    d = gaussian_problem(rng, 5, 15)
    f = svd_factor(d.X)
    coef = fit_ridge(d, 0.5, f)
    yhat = predict(coef, d)
    for _ in range(10):
        shifted = coef.shifted(f.V0 @ rng.standard_normal(f.V0.shape[1]))
        assert np.linalg.norm(predict(shifted, d) - yhat) <= 1e-9 * np.linalg.norm(yhat)


def test_predict_provenance(rng):
    rawd = Dataset(rng.normal(0, 2, (6, 8)), rng.standard_normal(6))
    c = apply_preprocess(fit_preprocess(rawd, "center"), rawd)
    z = apply_preprocess(fit_preprocess(rawd, "zscore"), rawd)
    coef = fit_ridge(c, 1.0)
    with pytest.raises(ProvenanceError):
        predict(coef, z)
    predict(coef, z, allow_mismatch=True)


def test_defect_values(rng):
    d = gaussian_problem(rng, 4, 10)
    f = svd_factor(d.X)
    assert orthogonality_defect(fit_ridge(d, 1.0, f), f) <= 1e-8
    pure = CoefficientVector(f.V0 @ rng.standard_normal(f.V0.shape[1]), "custom")
    assert orthogonality_defect(pure, f) == pytest.approx(1.0)


def test_fused_lasso_defect_on_parabolic():
    from nullspace_interp import ParabolicSpec, gen_parabolic

    rawd, _, _ = gen_parabolic(ParabolicSpec(seed=0))
    st_ = fit_preprocess(rawd, "center")
    d = apply_preprocess(st_, rawd)
    lam = 0.05 * lambda_max(d, first_difference(d.p))
    assert orthogonality_defect(fit_fused_lasso(d, lam), svd_factor(d.X)) > 1e-3


def test_fit_method_dispatch(rng):
    d = gaussian_problem(rng, 5, 9)
    assert fit_method(d, "min-norm").method == "min-norm"
    assert fit_method(d, "pcr", 2).hyperparam == {"components": 2}
    with pytest.raises(InputError):
        fit_method(d, "elastic-net", 1.0)
