"""Datasets, column centering / z-scoring, and a smoothing-spline SNR profile."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np
from scipy.interpolate import BSpline
from scipy.linalg import LinAlgError, solveh_banded

from .errors import DegenerateColumnError, InputError

SCHEMES = ("center", "zscore")
RESPONSE_TRANSFORMS = (None, "log10")

_SCHEME_ALIASES = {
    "center": "center",
    "center-only": "center",
    "mean-center": "center",
    "zscore": "zscore",
    "z-score": "zscore",
    "standardize": "zscore",
}


def normalize_scheme(scheme: str) -> str:
    try:
        return _SCHEME_ALIASES[str(scheme).lower()]
    except KeyError:
        raise InputError(f"unknown preprocessing scheme {scheme!r}; use one of {SCHEMES}") from None


def _readonly(a, dtype=float):
    if a is None:
        return None
    a = np.array(a, dtype=dtype, copy=True)
    a.flags.writeable = False
    return a


@dataclass(frozen=True, eq=False)
class PreprocessState:
    """Training-set statistics of a centering or z-scoring transform.

    ``column_stds`` is present only for the z-score scheme and uses the
    population convention (divide by n).
    """

    column_means: np.ndarray
    y_mean: float
    scheme: str = "center"
    column_stds: np.ndarray | None = None

    def __post_init__(self):
        object.__setattr__(self, "column_means", _readonly(self.column_means))
        object.__setattr__(self, "column_stds", _readonly(self.column_stds))
        object.__setattr__(self, "scheme", normalize_scheme(self.scheme))
        if (self.scheme == "zscore") != (self.column_stds is not None):
            raise InputError("column_stds must be given exactly when scheme is 'zscore'")

    @property
    def p(self) -> int:
        return int(self.column_means.size)

    @property
    def scale(self) -> np.ndarray:
        if self.column_stds is None:
            return np.ones(self.p)
        return np.asarray(self.column_stds)

    def transform_X(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        if X.ndim != 2 or X.shape[1] != self.p:
            raise InputError(f"expected {self.p} columns, got shape {X.shape}")
        out = X - self.column_means
        if self.column_stds is not None:
            out = out / self.column_stds
        return out

    def inverse_X(self, Z) -> np.ndarray:
        Z = np.asarray(Z, dtype=float)
        if Z.ndim != 2 or Z.shape[1] != self.p:
            raise InputError(f"expected {self.p} columns, got shape {Z.shape}")
        if self.column_stds is not None:
            Z = Z * self.column_stds
        return Z + self.column_means

    def coef_to_original(self, beta) -> tuple[np.ndarray, float]:
        """Map coefficients fit in transformed space to ``(beta, intercept)`` on raw X."""
        beta = np.asarray(beta, dtype=float) / self.scale
        intercept = self.y_mean - float(self.column_means @ beta)
        return beta, intercept

    def coef_to_transformed(self, beta) -> np.ndarray:
        """Express raw-space coefficients in the transformed (e.g. z-scored) space."""
        return np.asarray(beta, dtype=float) * self.scale

    def same_as(self, other: "PreprocessState | None") -> bool:
        if other is None:
            return False
        if other is self:
            return True
        if self.scheme != other.scheme or self.p != other.p or self.y_mean != other.y_mean:
            return False
        if not np.array_equal(self.column_means, other.column_means):
            return False
        if self.column_stds is None:
            return other.column_stds is None
        return other.column_stds is not None and np.array_equal(self.column_stds, other.column_stds)


def same_provenance(a: PreprocessState | None, b: PreprocessState | None) -> bool:
    if a is None or b is None:
        return a is None and b is None
    return a.same_as(b)


@dataclass(frozen=True, eq=False)
class Dataset:
    """Predictor matrix, optional response, optional ordered domain grid.

    ``preprocessing`` records the transform already applied to ``X``/``y``
    (None for raw data).  ``response_transform`` records a transform applied
    to the response before any centering (``"log10"`` for cycle life).
    """

    X: np.ndarray
    y: np.ndarray | None = None
    domain: np.ndarray | None = None
    sample_ids: tuple[str, ...] | None = None
    preprocessing: PreprocessState | None = None
    response_transform: str | None = None
    name: str = ""
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        X = _readonly(self.X)
        if X.ndim != 2 or X.shape[0] < 1 or X.shape[1] < 1:
            raise InputError(f"X must be a non-empty 2-D array, got shape {X.shape}")
        if not np.all(np.isfinite(X)):
            raise InputError("X contains non-finite entries")
        object.__setattr__(self, "X", X)
        n, p = X.shape
        if self.y is not None:
            y = _readonly(self.y).ravel()
            if y.shape != (n,):
                raise InputError(f"y must have length {n}, got {y.shape}")
            if not np.all(np.isfinite(y)):
                raise InputError("y contains non-finite entries")
            object.__setattr__(self, "y", y)
        if self.domain is not None:
            d = _readonly(self.domain).ravel()
            if d.shape != (p,):
                raise InputError(f"domain must have length {p}, got {d.shape}")
            if not np.all(np.isfinite(d)):
                raise InputError("domain contains non-finite entries")
            if p > 1:
                step = np.diff(d)
                if not (np.all(step > 0) or np.all(step < 0)):
                    raise InputError("domain must be strictly monotone")
            object.__setattr__(self, "domain", d)
        if self.sample_ids is not None:
            ids = tuple(str(s) for s in self.sample_ids)
            if len(ids) != n:
                raise InputError(f"sample_ids must have length {n}, got {len(ids)}")
            object.__setattr__(self, "sample_ids", ids)
        if self.response_transform not in RESPONSE_TRANSFORMS:
            raise InputError(f"unknown response transform {self.response_transform!r}")

    @property
    def n(self) -> int:
        return int(self.X.shape[0])

    @property
    def p(self) -> int:
        return int(self.X.shape[1])

    def require_y(self) -> np.ndarray:
        if self.y is None:
            raise InputError(f"dataset {self.name or '<unnamed>'} has no response")
        return self.y

    def subset(self, index: Sequence[int] | np.ndarray, name: str | None = None) -> "Dataset":
        index = np.asarray(index)
        ids = None if self.sample_ids is None else tuple(np.asarray(self.sample_ids, dtype=object)[index])
        return replace(
            self,
            X=self.X[index],
            y=None if self.y is None else self.y[index],
            sample_ids=ids,
            name=self.name if name is None else name,
            meta=dict(self.meta),
        )

    def with_response(self, y, response_transform: str | None = None) -> "Dataset":
        return replace(self, y=y, response_transform=response_transform, meta=dict(self.meta))


def transform_response(d: Dataset, kind: str | None) -> Dataset:
    """Apply a response transform (currently only ``log10``) to raw responses."""
    if kind is None:
        return d
    if d.response_transform is not None:
        raise InputError(f"response already transformed ({d.response_transform})")
    if d.preprocessing is not None:
        raise InputError("response transforms must precede centering")
    y = d.require_y()
    if kind == "log10":
        if np.any(y <= 0):
            raise InputError("log10 response transform needs positive responses")
        return d.with_response(np.log10(y), "log10")
    raise InputError(f"unknown response transform {kind!r}")


def inverse_response(values, kind: str | None) -> np.ndarray:
    values = np.asarray(values, dtype=float)
    if kind is None:
        return values
    if kind == "log10":
        return np.power(10.0, values)
    raise InputError(f"unknown response transform {kind!r}")


def fit_preprocess(d: Dataset, scheme: str = "center") -> PreprocessState:
    """Estimate centering (and z-scoring) statistics on training data.

    Raises
    ------
    DegenerateColumnError
        Under z-scoring, a column whose population std is at or below
        ``1e-12 * max_j std_j``.
    """
    scheme = normalize_scheme(scheme)
    if d.preprocessing is not None:
        raise InputError("dataset is already preprocessed")
    if d.n < 2:
        raise InputError("need at least 2 samples to estimate column statistics")
    X = d.X
    means = X.mean(axis=0)
    y_mean = float(d.y.mean()) if d.y is not None else 0.0
    stds = None
    if scheme == "zscore":
        stds = X.std(axis=0, ddof=0)
        floor = 1e-12 * float(stds.max())
        bad = np.flatnonzero(stds <= floor)
        if bad.size:
            j = int(bad[0])
            raise DegenerateColumnError(j, float(stds[j]), floor)
    return PreprocessState(column_means=means, y_mean=y_mean, scheme=scheme, column_stds=stds)


def apply_preprocess(state: PreprocessState, d: Dataset) -> Dataset:
    """Transform ``d`` with training statistics from ``state`` (returns a copy)."""
    if d.preprocessing is not None:
        raise InputError("dataset is already preprocessed")
    if d.p != state.p:
        raise InputError(f"dataset has {d.p} columns, state expects {state.p}")
    y = None if d.y is None else d.y - state.y_mean
    return replace(d, X=state.transform_X(d.X), y=y, preprocessing=state, meta=dict(d.meta))


def invert_preprocess(d: Dataset) -> Dataset:
    state = d.preprocessing
    if state is None:
        raise InputError("dataset carries no preprocessing to invert")
    y = None if d.y is None else d.y + state.y_mean
    return replace(d, X=state.inverse_X(d.X), y=y, preprocessing=None, meta=dict(d.meta))


def fit_apply(d: Dataset, scheme: str = "center") -> tuple[Dataset, PreprocessState]:
    state = fit_preprocess(d, scheme)
    return apply_preprocess(state, d), state


# ---------------------------------------------------------------------------
# SNR profile
# ---------------------------------------------------------------------------

SIGNAL_MODES = ("row-centered", "raw", "column-centered")


@dataclass(frozen=True, eq=False)
class SnrProfile:
    snr_db: np.ndarray
    snr_ratio: np.ndarray
    noise_power: np.ndarray
    signal_power: np.ndarray
    column_mean: np.ndarray
    column_std: np.ndarray
    smooth: np.ndarray  # fitted spline values, same shape as X


class _PenalizedSpline:
    """Penalized B-spline smoother on a fixed ascending grid.

    Knots sit at every data point.  The penalty sums squared jumps of the
    ``degree``-th derivative across interior knots, so its null space is the
    global polynomials of that degree and ``lam -> inf`` gives the polynomial
    least-squares fit.
    """

    def __init__(self, x: np.ndarray, degree: int):
        self.x = x
        self.k = k = degree
        t = np.concatenate([np.repeat(x[0], k + 1), x[1:-1], np.repeat(x[-1], k + 1)])
        self.t = t
        nb = len(t) - k - 1
        self.nb = nb
        B = BSpline.design_matrix(x, t, k).toarray()
        self.B = B
        # k-th derivative is constant on each knot interval; jumps between neighbours
        mids = 0.5 * (x[:-1] + x[1:])
        Dk = BSpline(t, np.eye(nb), k)(mids, nu=k)
        h = float(np.mean(np.diff(x)))
        J = np.diff(Dk, axis=0) * h**k
        self.BtB = B.T @ B
        self.P = J.T @ J
        self.bw = k + 1
        self._scale = np.trace(self.BtB) / max(np.trace(self.P), np.finfo(float).tiny)
        xs = (x - x.mean()) / (np.ptp(x) or 1.0)
        self._vander = np.vander(xs, k + 1)

    def _banded(self, A: np.ndarray) -> np.ndarray:
        n, u = A.shape[0], self.bw
        ab = np.zeros((u + 1, n))
        for i in range(u + 1):
            ab[u - i, i:] = np.diagonal(A, offset=i)
        return ab

    def fit(self, y: np.ndarray, lam: float) -> np.ndarray:
        A = self.BtB + (lam * self._scale) * self.P
        c = solveh_banded(self._banded(A), self.B.T @ y, check_finite=False)
        return self.B @ c

    def poly_fit(self, y: np.ndarray) -> np.ndarray:
        coef, *_ = np.linalg.lstsq(self._vander, y, rcond=None)
        return self._vander @ coef

    def smooth(self, y: np.ndarray, target: float, lo: float = -12.0, hi: float = 12.0, iters: int = 60) -> np.ndarray:
        """Smoothest fit whose residual sum of squares stays within ``target``."""
        poly = self.poly_fit(y)
        if np.sum((y - poly) ** 2) <= target:
            return poly
        best = None
        a, b = lo, hi
        for _ in range(iters):
            mid = 0.5 * (a + b)
            try:
                f = self.fit(y, 10.0**mid)
            except LinAlgError:
                a = mid
                continue
            if np.sum((y - f) ** 2) <= target:
                best, a = f, mid
            else:
                b = mid
        if best is None:
            try:
                best = self.fit(y, 10.0**lo)
            except LinAlgError:
                best = y.copy()
        return best


def snr_profile(
    d: Dataset,
    smooth_target: float = 1e-6,
    degree: int = 3,
    signal: str = "row-centered",
) -> SnrProfile:
    """Per-column signal-to-noise estimate from row-wise smoothing splines.

    Each row is smoothed over ``d.domain``; residuals are treated as noise.
    Signal power per column is the mean over rows of the squared smooth
    values and noise power the mean over rows of squared residuals.

    ``signal`` selects what is squared: ``"row-centered"`` removes each
    row's mean of the smooth curve, ``"raw"`` keeps offsets, and
    ``"column-centered"`` removes the per-column mean across rows (the
    sample-to-sample variation that z-scoring rescales).
    """
    if signal not in SIGNAL_MODES:
        raise InputError(f"signal must be one of {SIGNAL_MODES}, got {signal!r}")
    if d.domain is None:
        raise InputError("snr_profile needs a domain grid")
    if smooth_target < 0 or not np.isfinite(smooth_target):
        raise InputError("smooth_target must be a nonnegative finite number")
    if not 1 <= int(degree) <= 5:
        raise InputError(f"spline degree must be in 1..5, got {degree}")
    degree = int(degree)
    if d.p < degree + 2:
        raise InputError(f"need at least {degree + 2} grid points for degree {degree}, got {d.p}")

    order = np.argsort(d.domain)
    x = d.domain[order]
    smoother = _PenalizedSpline(x, degree)
    fits = np.empty_like(d.X)
    for i in range(d.n):
        row = d.X[i, order]
        # constants are unpenalized, so smoothing the centered row loses nothing
        # and keeps large offsets out of the normal equations
        off = float(row.mean())
        fits[i, order] = smoother.smooth(row - off, smooth_target) + off

    resid = d.X - fits
    noise = np.mean(resid**2, axis=0)
    if signal == "row-centered":
        sig = fits - fits.mean(axis=1, keepdims=True)
    elif signal == "column-centered":
        sig = fits - fits.mean(axis=0, keepdims=True)
    else:
        sig = fits
    signal = np.mean(sig**2, axis=0)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(noise > 0, signal / np.where(noise > 0, noise, 1.0), np.inf)
        ratio = np.where((noise == 0) & (signal == 0), np.nan, ratio)
        db = np.where(ratio > 0, 10.0 * np.log10(ratio), np.where(ratio == 0, -np.inf, np.nan))
    return SnrProfile(
        snr_db=db,
        snr_ratio=ratio,
        noise_power=noise,
        signal_power=signal,
        column_mean=d.X.mean(axis=0),
        column_std=d.X.std(axis=0),
        smooth=fits,
    )
