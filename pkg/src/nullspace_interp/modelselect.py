"""K-fold cross-validation with the one-standard-error rule, and RMSE reports."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np

from .errors import InputError, NullspaceError
from .preprocess import Dataset, apply_preprocess, fit_preprocess, inverse_response
from .regress import (
    COMPONENT_METHODS,
    LAMBDA_METHODS,
    CoefficientVector,
    SolverConfig,
    default_grid,
    fit_generalized_lasso,
    fit_method,
    predict,
)

RULES = ("min", "one-se")


def make_rng(seed: int) -> np.random.Generator:
    """Counter-based Philox stream; identical across platforms for a given seed."""
    return np.random.Generator(np.random.Philox(int(seed)))


def fold_indices(n: int, folds: int, seed: int) -> list[np.ndarray]:
    if not 2 <= folds <= n:
        raise InputError(f"folds must be in [2, {n}], got {folds}")
    perm = make_rng(seed).permutation(n)
    return [np.sort(part) for part in np.array_split(perm, folds)]


def regularization_order(method: str, grid: np.ndarray) -> np.ndarray:
    """Indices of ``grid`` from most to least regularized."""
    if method in LAMBDA_METHODS:
        return np.argsort(-np.asarray(grid, dtype=float), kind="stable")
    if method in COMPONENT_METHODS:
        return np.argsort(np.asarray(grid, dtype=float), kind="stable")
    raise InputError(f"method {method!r} has no regularization direction")


@dataclass
class CvResult:
    method: str
    grid: np.ndarray
    fold_errors: np.ndarray  # folds x grid, NaN where the fit failed
    mean_curve: np.ndarray
    std_curve: np.ndarray
    chosen_min: float
    chosen_1se: float
    rule_used: str
    dropped: list = field(default_factory=list)

    @property
    def chosen(self):
        return self.chosen_1se if self.rule_used == "one-se" else self.chosen_min


def choose(method: str, grid, mean_curve, std_curve) -> tuple[float, float]:
    """Return ``(chosen_min, chosen_1se)``; ties go to the more regularized value."""
    grid = np.asarray(grid)
    order = regularization_order(method, grid)
    means = np.asarray(mean_curve)[order]
    stds = np.asarray(std_curve)[order]
    i_min = int(np.argmin(means))  # first = most regularized among ties
    threshold = means[i_min] + (stds[i_min] if np.isfinite(stds[i_min]) else 0.0)
    i_1se = int(np.flatnonzero(means <= threshold)[0])
    return grid[order[i_min]].item(), grid[order[i_1se]].item()


def _rmse(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.sqrt(np.mean((a - b) ** 2)))


def cross_validate(
    d: Dataset,
    method: str,
    grid=None,
    folds: int = 5,
    seed: int = 0,
    rule: str = "one-se",
    scheme: str = "center",
    solver_cfg: SolverConfig | None = None,
) -> CvResult:
    """K-fold CV over a hyperparameter grid.

    ``d`` holds raw (unpreprocessed) data; centering or z-scoring is refit on
    every training fold.  Errors are RMSE on the held-out fold in the model's
    response space (e.g. log10 cycle life).
    """
    if rule not in RULES:
        raise InputError(f"rule must be one of {RULES}, got {rule!r}")
    if d.preprocessing is not None:
        raise InputError("cross_validate expects raw data; preprocessing is refit per fold")
    d.require_y()
    if grid is None:
        full = apply_preprocess(fit_preprocess(d, scheme), d)
        grid = default_grid(full, method)
    grid = np.asarray(grid)
    if grid.ndim != 1 or grid.size == 0:
        raise InputError("grid must be a nonempty 1-D sequence")

    parts = fold_indices(d.n, folds, seed)
    errors = np.full((folds, grid.size), np.nan)
    order = regularization_order(method, grid)
    for k, test_idx in enumerate(parts):
        train_idx = np.setdiff1d(np.arange(d.n), test_idx)
        train_raw, test_raw = d.subset(train_idx), d.subset(test_idx)
        try:
            state = fit_preprocess(train_raw, scheme)
        except NullspaceError as exc:
            warnings.warn(f"fold {k}: preprocessing failed ({exc}); fold skipped", RuntimeWarning, stacklevel=2)
            continue
        train = apply_preprocess(state, train_raw)
        test = apply_preprocess(state, test_raw)
        warm = None
        for j in order:
            try:
                if method in ("fused-lasso", "lasso"):
                    kind = "first-difference" if method == "fused-lasso" else "identity"
                    coef = fit_generalized_lasso(train, float(grid[j]), kind, solver_cfg, warm)
                    warm = coef.info["state"]
                else:
                    coef = fit_method(train, method, grid[j], solver_cfg)
            except NullspaceError as exc:
                warnings.warn(f"fold {k}, {method}={grid[j]}: {exc}", RuntimeWarning, stacklevel=2)
                continue
            errors[k, j] = _rmse(predict(coef, test), test.y)

    counts = np.sum(np.isfinite(errors), axis=0)
    keep = counts > 0
    dropped = [grid[j].item() for j in np.flatnonzero(~keep)]
    if not np.any(keep):
        raise InputError(f"every fit failed for method {method!r}")
    grid_k, errors_k, counts_k = grid[keep], errors[:, keep], counts[keep]
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        mean = np.nanmean(errors_k, axis=0)
        std = np.where(counts_k > 1, np.nanstd(errors_k, axis=0, ddof=1), np.nan) / np.sqrt(counts_k)
    c_min, c_1se = choose(method, grid_k, mean, std)
    return CvResult(method, grid_k, errors_k, mean, std, c_min, c_1se, rule, dropped)


def fit_cv(
    d: Dataset,
    method: str,
    grid=None,
    folds: int = 5,
    seed: int = 0,
    rule: str = "one-se",
    scheme: str = "center",
    solver_cfg: SolverConfig | None = None,
) -> tuple[CoefficientVector, CvResult, Dataset]:
    """Cross-validate, then refit on all of ``d`` with the chosen value.

    Returns the coefficients, the CV result and the preprocessed training set.
    """
    cv = cross_validate(d, method, grid, folds, seed, rule, scheme, solver_cfg)
    train = apply_preprocess(fit_preprocess(d, scheme), d)
    coef = fit_method(train, method, cv.chosen, solver_cfg)
    return coef, cv, train


# ---------------------------------------------------------------------------
# Evaluation reports
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SubsetRule:
    """Samples with ``lo < y <= hi`` in original response units."""

    name: str
    lo: float | None = None
    hi: float | None = None

    def mask(self, y: np.ndarray) -> np.ndarray:
        m = np.ones(y.shape, dtype=bool)
        if self.lo is not None:
            m &= y > self.lo
        if self.hi is not None:
            m &= y <= self.hi
        return m


CYCLE_LIFE_RULES = (SubsetRule("Low CL", hi=1200.0), SubsetRule("High CL", lo=1200.0))


@dataclass(frozen=True)
class EvalRow:
    split: str
    subset: str  # "all" for the whole split
    count: int
    rmse: float | None


@dataclass
class EvalReport:
    model: str
    rows: list[EvalRow]

    def get(self, split: str, subset: str = "all") -> EvalRow:
        for r in self.rows:
            if r.split == split and r.subset == subset:
                return r
        raise KeyError((split, subset))

    def row_label(self, row: EvalRow) -> str:
        name = row.split if row.subset == "all" else f"{row.split} {row.subset}"
        return f"{name} ({row.count})"

    def table_rows(self) -> list[EvalRow]:
        """Whole splits first, then each subset across splits (the usual report layout)."""
        subsets = []
        for r in self.rows:
            if r.subset not in subsets:
                subsets.append(r.subset)
        return [r for s in subsets for r in self.rows if r.subset == s]


def evaluate(
    beta: CoefficientVector,
    splits: Mapping[str, Dataset],
    subset_rules: Iterable[SubsetRule] = (),
    model: str | None = None,
) -> EvalReport:
    """RMSE per split and per subset, in original response units.

    Raw splits are transformed with the coefficient's preprocessing state;
    predictions and targets are mapped back through the response transform
    (``10**`` for log10) before the error is computed.
    """
    rules = list(subset_rules)
    state = beta.preprocessing
    rows: list[EvalRow] = []
    for name, ds in splits.items():
        if ds.preprocessing is None and state is not None:
            ds = apply_preprocess(state, ds)
        y_model = ds.require_y() + (ds.preprocessing.y_mean if ds.preprocessing is not None else 0.0)
        yhat_model = predict(beta, ds, restore_mean=True)
        y = inverse_response(y_model, ds.response_transform)
        yhat = inverse_response(yhat_model, ds.response_transform)
        rows.append(EvalRow(name, "all", int(y.size), _rmse(yhat, y) if y.size else None))
        for rule in rules:
            m = rule.mask(y)
            cnt = int(np.count_nonzero(m))
            rows.append(EvalRow(name, rule.name, cnt, _rmse(yhat[m], y[m]) if cnt else None))
    return EvalReport(model or beta.label(), rows)


def rmse_or_nan(row: EvalRow) -> float:
    return math.nan if row.rmse is None else row.rmse
