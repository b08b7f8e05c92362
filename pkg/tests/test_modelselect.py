import warnings

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from nullspace_interp import Dataset, InputError, apply_preprocess, fit_preprocess
from nullspace_interp.modelselect import (
    CYCLE_LIFE_RULES,
    SubsetRule,
    choose,
    cross_validate,
    evaluate,
    fit_cv,
    fold_indices,
)
from nullspace_interp.regress import CoefficientVector


def raw_problem(rng, n=30, p=12, noise=0.1):
    X = rng.standard_normal((n, p))
    beta = rng.standard_normal(p)
    return Dataset(X, X @ beta + noise * rng.standard_normal(n)), beta


def test_folds_partition_and_determinism():
    parts = fold_indices(23, 5, 7)
    assert sorted(np.concatenate(parts).tolist()) == list(range(23))
    assert [len(q) for q in parts] == [5, 5, 5, 4, 4]
    again = fold_indices(23, 5, 7)
    assert all(np.array_equal(a, b) for a, b in zip(parts, again))
    assert not all(np.array_equal(a, b) for a, b in zip(parts, fold_indices(23, 5, 8)))


def test_folds_validation():
    with pytest.raises(InputError):
        fold_indices(4, 5, 0)
    with pytest.raises(InputError):
        fold_indices(4, 1, 0)


def test_singleton_grid(rng):
    d, _ = raw_problem(rng)
    cv = cross_validate(d, "ridge", [0.3])
    assert cv.chosen_min == cv.chosen_1se == 0.3


def test_cv_deterministic(rng):
    d, _ = raw_problem(rng)
    a = cross_validate(d, "pcr", [1, 2, 4, 8], seed=3)
    b = cross_validate(d, "pcr", [1, 2, 4, 8], seed=3)
    assert np.array_equal(a.fold_errors, b.fold_errors)


def test_one_se_is_at_least_as_regularized(rng):
    d, _ = raw_problem(rng, noise=1.0)
    cv = cross_validate(d, "ridge", np.logspace(-3, 3, 13))
    assert cv.chosen_1se >= cv.chosen_min
    i = list(cv.grid).index(cv.chosen_1se)
    j = list(cv.grid).index(cv.chosen_min)
    assert cv.mean_curve[i] <= cv.mean_curve[j] + cv.std_curve[j]
    cvp = cross_validate(d, "pls", [1, 2, 3, 4, 5])
    assert cvp.chosen_1se <= cvp.chosen_min


def test_choose_monotone_curve():
    grid = np.array([1, 2, 3, 4])
    assert choose("pls", grid, [4.0, 3.0, 2.0, 1.0], [0.1] * 4) == (4, 4)
    assert choose("pls", grid, [4.0, 3.0, 2.0, 1.0], [2.5] * 4) == (4, 2)


def test_choose_ties_go_to_regularization():
    assert choose("ridge", [0.1, 1.0, 10.0], [1.0, 1.0, 1.0], [0.0] * 3) == (10.0, 10.0)
    assert choose("pcr", [3, 1, 2], [1.0, 1.0, 1.0], [0.0] * 3) == (1, 1)


@given(st.floats(1e-3, 1e3), st.integers(0, 2**31))
def test_choose_scale_invariant(scale, seed):
    rng = np.random.default_rng(seed)
    grid = np.logspace(-2, 2, 7)
    mean, std = rng.uniform(1, 2, 7), rng.uniform(0, 0.3, 7)
    assert choose("ridge", grid, mean, std) == choose("ridge", grid, scale * mean, scale * std)


def test_failed_fits_are_nan_and_dropped(rng):
    d, _ = raw_problem(rng, n=20, p=30)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        cv = cross_validate(d, "pls", [1, 2, 40])
    assert 40 in cv.dropped
    assert list(cv.grid) == [1, 2]


def test_rejects_preprocessed_input(rng):
    d, _ = raw_problem(rng)
    dd = apply_preprocess(fit_preprocess(d), d)
    with pytest.raises(InputError):
        cross_validate(dd, "ridge", [1.0])
    with pytest.raises(InputError):
        cross_validate(d, "ridge", [1.0], rule="best")


def test_fit_cv_refits_on_all(rng):
    d, beta = raw_problem(rng, noise=0.01)
    coef, cv, train = fit_cv(d, "ridge", np.logspace(-4, 1, 6), rule="min")
    assert list(coef.hyperparam.values()) == [cv.chosen_min]
    assert np.linalg.norm(coef.beta - beta) < 0.05 * np.linalg.norm(beta)
    assert train.preprocessing is coef.preprocessing or train.preprocessing.same_as(coef.preprocessing)


# -- evaluate ---------------------------------------------------------------------

def _exact_model(rng, transform=None):
    X = rng.standard_normal((10, 4))
    beta = np.array([0.1, -0.2, 0.05, 0.0])
    y = 3.0 + X @ beta
    raw = Dataset(X, 10.0**y if transform else y)
    if transform:
        from nullspace_interp.preprocess import transform_response
        raw = transform_response(raw, "log10")
    st_ = fit_preprocess(raw)
    b = st_.coef_to_transformed(beta)
    return raw, CoefficientVector(b, "custom", {}, st_)


@pytest.mark.parametrize("transform", [None, "log10"])
def test_perfect_fit_gives_zero(rng, transform):
    raw, coef = _exact_model(rng, transform)
    rep = evaluate(coef, {"train": raw})
    assert rep.get("train").rmse == pytest.approx(0.0, abs=1e-9 * (1000 if transform else 1))


def test_log_response_is_inverted(rng):
    raw, coef = _exact_model(rng, "log10")
    shifted = CoefficientVector(coef.beta, "custom", {}, coef.preprocessing)
    test = Dataset(raw.X, raw.y + np.log10(2.0), response_transform="log10")
    rep = evaluate(shifted, {"t": test})
    expected = np.sqrt(np.mean((10.0 ** raw.y) ** 2))  # prediction 10**y vs target 2*10**y
    assert rep.get("t").rmse == pytest.approx(expected, rel=1e-9)


def test_subsets_partition_and_labels(rng):
    X = rng.standard_normal((8, 3))
    y = np.array([100.0, 500, 1200, 1300, 2000, 800, 1199, 1201])
    raw = Dataset(X, y)
    st_ = fit_preprocess(raw)
    coef = CoefficientVector(np.zeros(3), "custom", {}, st_)
    rep = evaluate(coef, {"test1": raw}, CYCLE_LIFE_RULES, model="zero")
    lo, hi = rep.get("test1", "Low CL"), rep.get("test1", "High CL")
    assert lo.count + hi.count == rep.get("test1").count == 8
    assert lo.count == 5
    assert rep.row_label(lo) == "test1 Low CL (5)"
    assert rep.row_label(rep.get("test1")) == "test1 (8)"
    assert [r.subset for r in rep.table_rows()] == ["all", "Low CL", "High CL"]


def test_empty_subset_gives_none(rng):
    raw = Dataset(rng.standard_normal((4, 2)), np.array([1.0, 2.0, 3.0, 4.0]))
    coef = CoefficientVector(np.zeros(2), "custom", {}, fit_preprocess(raw))
    rep = evaluate(coef, {"s": raw}, [SubsetRule("big", lo=10.0)])
    assert rep.get("s", "big").count == 0 and rep.get("s", "big").rmse is None
