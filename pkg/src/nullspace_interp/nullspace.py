"""Nullspace comparison of two coefficient vectors.

Given coefficients ``beta_a`` and ``beta_b`` for the same data, the difference
``beta_delta = beta_a - beta_b`` is split into the part that can be absorbed by
(nearly) prediction-neutral directions and the part that actually changes
predictions:

* :func:`project_nullspace` gives the exact minimizer ``v*`` of
  ``|beta_delta + v|`` subject to ``X v = 0``;
* :func:`relaxed_nullspace` gives ``v_gamma = -(gamma X^T X + I)^{-1} beta_delta``,
  which trades ``|beta_delta + v|`` against ``gamma |X v|^2``;
* :func:`select_gamma` picks gamma from a tolerated change ``c`` in NRMSE.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InputError, ProvenanceError
from .linalg import SvdFactors, svd_factor
from .preprocess import Dataset, same_provenance
from .regress import CoefficientVector

GAMMA_INF = math.inf


def _as_factors(X_or_f) -> SvdFactors:
    if isinstance(X_or_f, SvdFactors):
        return X_or_f
    return svd_factor(X_or_f)


def _vec(beta, p: int | None = None) -> np.ndarray:
    b = beta.beta if isinstance(beta, CoefficientVector) else np.asarray(beta, dtype=float)
    if b.ndim != 1 or (p is not None and b.size != p):
        raise InputError(f"expected a vector of length {p}, got shape {b.shape}")
    return b


def project_nullspace(f, beta_delta) -> np.ndarray:
    """``v* = -V0 V0^T beta_delta``."""
    f = _as_factors(f)
    bd = _vec(beta_delta, f.p)
    return -(f.V0 @ (f.V0.T @ bd))


def relaxed_nullspace(f, beta_delta, gamma: float) -> np.ndarray:
    """``v_gamma = -(gamma X^T X + I)^{-1} beta_delta`` without forming a p x p inverse.

    ``gamma = inf`` returns the exact projection.
    """
    if gamma < 0 or math.isnan(gamma):
        raise InputError(f"gamma must be nonnegative, got {gamma}")
    f = _as_factors(f)
    bd = _vec(beta_delta, f.p)
    if math.isinf(gamma):
        return project_nullspace(f, bd)
    s2 = f.singular_values**2
    keep = (gamma * s2) / (gamma * s2 + 1.0)
    return -bd + f.V1 @ (keep * (f.V1.T @ bd))


def nrmse(y_hat, y) -> float:
    """Root-mean-square error divided by the response range."""
    y_hat = np.asarray(y_hat, dtype=float)
    y = np.asarray(y, dtype=float)
    if y.ndim != 1 or y_hat.shape != y.shape:
        raise InputError("y_hat and y must be vectors of equal length")
    if y.size < 2:
        raise InputError("nrmse needs at least 2 samples")
    s = float(y.max() - y.min())
    if s <= 0:
        raise InputError("nrmse is undefined for a constant response")
    return float(np.linalg.norm(y_hat - y)) / (s * math.sqrt(y.size))


@dataclass
class GammaSearch:
    """Log-spaced scan of ``gamma * sigma_max^2`` followed by bisection."""

    lo: float = 1e-8
    hi: float = 1e12
    num: int = 200
    bisect_iter: int = 30


@dataclass
class NullspaceComparison:
    beta_a: CoefficientVector
    beta_b: CoefficientVector
    beta_delta: np.ndarray
    gamma: float
    v: np.ndarray
    nrmse_before: float
    nrmse_after: float
    constraint_c: float | None = None
    scan: dict = field(default_factory=dict)

    @property
    def modified(self) -> np.ndarray:
        """``beta_a + v``."""
        return self.beta_a.beta + self.v

    @property
    def nrmse_change(self) -> float:
        return abs(self.nrmse_after - self.nrmse_before)

    @property
    def gamma_is_inf(self) -> bool:
        return math.isinf(self.gamma)


def _check_pair(d: Dataset, beta_a: CoefficientVector, beta_b: CoefficientVector, check_provenance: bool):
    if beta_a.p != d.p or beta_b.p != d.p:
        raise InputError("coefficient length does not match dataset")
    if check_provenance:
        for b in (beta_a, beta_b):
            if b.method == "true" and b.preprocessing is None:
                continue
            if not same_provenance(b.preprocessing, d.preprocessing):
                raise ProvenanceError(f"{b.label()} was produced under different preprocessing")


class _LossPath:
    """Cheap evaluation of the NRMSE change along the gamma path.

    With ``c = V1^T beta_delta`` the prediction change is
    ``X v_gamma = -U diag(s / (gamma s^2 + 1)) c``.
    """

    def __init__(self, f: SvdFactors, X_eval: np.ndarray, y_eval: np.ndarray, beta_a: np.ndarray, bd: np.ndarray):
        self.f = f
        self.y = y_eval
        self.base = X_eval @ beta_a
        self.nrmse_before = nrmse(self.base, y_eval)
        self.c = f.V1.T @ bd
        self.s2 = f.singular_values**2
        self.XV1 = X_eval @ f.V1
        # X_eval times the nullspace part of -beta_delta is constant in gamma
        self.offset = -(X_eval @ bd) + self.XV1 @ self.c

    def after(self, gamma: float) -> float:
        if math.isinf(gamma):
            shift = self.offset
        else:
            keep = (gamma * self.s2) / (gamma * self.s2 + 1.0)
            shift = self.offset - self.XV1 @ ((1.0 - keep) * self.c)
        return nrmse(self.base + shift, self.y)

    def change(self, gamma: float) -> float:
        return abs(self.after(gamma) - self.nrmse_before)


def compare(
    d: Dataset,
    beta_a: CoefficientVector,
    beta_b: CoefficientVector,
    gamma: float,
    factors: SvdFactors | None = None,
    check_provenance: bool = True,
) -> NullspaceComparison:
    """Nullspace comparison at a fixed ``gamma`` (``inf`` for the exact projection)."""
    _check_pair(d, beta_a, beta_b, check_provenance)
    f = factors or svd_factor(d.X)
    y = d.require_y()
    bd = beta_a.beta - beta_b.beta
    v = relaxed_nullspace(f, bd, gamma)
    before = nrmse(d.X @ beta_a.beta, y)
    after = nrmse(d.X @ (beta_a.beta + v), y)
    return NullspaceComparison(beta_a, beta_b, bd, float(gamma), v, before, after, None)


def select_gamma(
    d: Dataset,
    beta_a: CoefficientVector,
    beta_b: CoefficientVector,
    c: float,
    search: GammaSearch | None = None,
    factors: SvdFactors | None = None,
    eval_data: Dataset | None = None,
    check_provenance: bool = True,
) -> NullspaceComparison:
    """Choose gamma so the NRMSE changes by at most ``c``.

    The NRMSE change vanishes as gamma grows (``v_gamma`` tends to the exact
    projection), so the feasible set always contains a neighbourhood of
    infinity.  The scan walks the grid from the top down to the first
    infeasible point and bisects between it and its feasible upper
    neighbour; the returned gamma is the feasible end of that bracket, i.e.
    the smallest penalty on the branch connected to infinity.  If even the
    top of the grid violates ``c``, the exact projection (gamma = inf) is
    returned.  If the whole grid is feasible, the smallest grid value is
    returned.

    Feasibility is judged on ``eval_data`` when given (same preprocessing as
    ``d``), otherwise on the training data ``d``.  The exact projection only
    leaves training predictions unchanged, so with held-out ``eval_data`` the
    gamma = inf fallback can exceed ``c``; check ``nrmse_change``.
    """
    if not c > 0:
        raise InputError(f"c must be positive, got {c}")
    search = search or GammaSearch()
    _check_pair(d, beta_a, beta_b, check_provenance)
    f = factors or svd_factor(d.X)
    ev = eval_data if eval_data is not None else d
    if eval_data is not None and check_provenance and not same_provenance(eval_data.preprocessing, d.preprocessing):
        raise ProvenanceError("eval_data must share the training preprocessing")
    y = ev.require_y()
    bd = beta_a.beta - beta_b.beta

    path = _LossPath(f, ev.X, y, beta_a.beta, bd)
    before = path.nrmse_before

    def result(gamma, scan):
        v = relaxed_nullspace(f, bd, gamma)
        after = nrmse(ev.X @ (beta_a.beta + v), y)
        return NullspaceComparison(beta_a, beta_b, bd, float(gamma), v, before, after, float(c), scan)

    if not np.any(bd) or f.rank == 0:
        return result(GAMMA_INF, {"reason": "zero difference" if not np.any(bd) else "rank zero"})

    smax2 = f.sigma_max**2
    t_grid = np.logspace(math.log10(search.lo), math.log10(search.hi), search.num)
    changes = np.array([path.change(t / smax2) for t in t_grid])
    feasible = changes <= c
    scan = {"gamma_grid": t_grid / smax2, "changes": changes}

    if not feasible[-1]:
        scan["reason"] = "grid top infeasible; exact projection used"
        return result(GAMMA_INF, scan)
    infeasible = np.flatnonzero(~feasible)
    if infeasible.size == 0:
        scan["reason"] = "whole grid feasible"
        return result(t_grid[0] / smax2, scan)

    i = int(infeasible[-1])
    lo_t, hi_t = math.log10(t_grid[i]), math.log10(t_grid[i + 1])  # lo infeasible, hi feasible
    for _ in range(search.bisect_iter):
        mid = 0.5 * (lo_t + hi_t)
        if path.change(10.0**mid / smax2) <= c:
            hi_t = mid
        else:
            lo_t = mid
    scan["bracket"] = (10.0**lo_t / smax2, 10.0**hi_t / smax2)
    scan["reason"] = "boundary bisection"
    out = result(10.0**hi_t / smax2, scan)
    # the direct evaluation may differ from the path formula in the last bits
    while out.nrmse_change > c and hi_t < math.log10(t_grid[i + 1]):
        hi_t = min(hi_t + 1e-9 + 1e-6 * abs(hi_t), math.log10(t_grid[i + 1]))
        out = result(10.0**hi_t / smax2, scan)
    return out
