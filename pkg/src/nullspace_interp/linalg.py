"""Dense SVD substrate: numerical rank, row-space / nullspace bases, pseudo-inverse.

Every nullspace operation in the package works from one :class:`SvdFactors`
object, so the full right-singular basis is computed once per data matrix.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InputError, NumericalError


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float, copy=True)
    a.flags.writeable = False
    return a


@dataclass(frozen=True, eq=False)
class SvdFactors:
    """Thin SVD ``X = U diag(s) V1^T`` plus an orthonormal nullspace basis ``V0``.

    Attributes
    ----------
    U : ndarray, shape (n, r)
    singular_values : ndarray, shape (r,)
        Nonincreasing, all strictly above ``rank_tolerance``.
    V1 : ndarray, shape (p, r)
        Orthonormal basis of the row space of X.
    V0 : ndarray, shape (p, p - r)
        Orthonormal basis of the numerical nullspace of X.
    rank_tolerance : float
        Absolute singular-value cutoff that was applied.
    """

    U: np.ndarray
    singular_values: np.ndarray
    V1: np.ndarray
    V0: np.ndarray
    rank_tolerance: float

    @property
    def rank(self) -> int:
        return int(self.singular_values.size)

    @property
    def n(self) -> int:
        return int(self.U.shape[0])

    @property
    def p(self) -> int:
        return int(self.V1.shape[0])

    @property
    def sigma_max(self) -> float:
        return float(self.singular_values[0]) if self.rank else 0.0

    @property
    def V(self) -> np.ndarray:
        """Full orthogonal ``[V1 V0]`` (p x p)."""
        return np.hstack([self.V1, self.V0])

    def reconstruct(self) -> np.ndarray:
        return (self.U * self.singular_values) @ self.V1.T


def _fix_signs(V: np.ndarray) -> np.ndarray:
    """Sign vector making the largest-magnitude entry of every column positive."""
    if V.size == 0:
        return np.ones(V.shape[1])
    idx = np.argmax(np.abs(V), axis=0)
    signs = np.sign(V[idx, np.arange(V.shape[1])])
    signs[signs == 0] = 1.0
    return signs


def svd_factor(X, rtol: float | None = None) -> SvdFactors:
    """Factor ``X`` and split the right singular vectors at the numerical rank.

    Parameters
    ----------
    X : array_like, shape (n, p)
    rtol : float, optional
        Relative cutoff; singular values ``<= rtol * sigma_max`` count as zero.
        Defaults to ``max(n, p) * eps``.

    Raises
    ------
    InputError
        ``X`` is not a finite, non-empty 2-D array.
    NumericalError
        LAPACK failed to converge.
    """
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[0] < 1 or X.shape[1] < 1:
        raise InputError(f"X must be a non-empty 2-D array, got shape {X.shape}")
    if not np.all(np.isfinite(X)):
        raise InputError("X contains non-finite entries")
    n, p = X.shape
    if rtol is None:
        rtol = max(n, p) * np.finfo(float).eps
    if rtol < 0:
        raise InputError("rtol must be nonnegative")

    try:
        U, s, Vt = np.linalg.svd(X, full_matrices=True)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise NumericalError(f"SVD did not converge: {exc}") from exc

    smax = s[0] if s.size else 0.0
    tol = float(rtol * smax)
    r = int(np.count_nonzero(s > tol)) if smax > 0 else 0

    V = Vt.T
    V1 = V[:, :r]
    V0 = V[:, r:]
    U1 = U[:, :r]

    signs = _fix_signs(V1)
    V1 = V1 * signs
    U1 = U1 * signs
    V0 = V0 * _fix_signs(V0)

    return SvdFactors(
        U=_frozen(U1),
        singular_values=_frozen(s[:r]),
        V1=_frozen(V1),
        V0=_frozen(V0),
        rank_tolerance=tol,
    )


def pinv_apply(f: SvdFactors, y) -> np.ndarray:
    """Minimum-norm least-squares solution ``V1 diag(1/s) U^T y``."""
    y = np.asarray(y, dtype=float)
    if y.ndim != 1 or y.shape[0] != f.n:
        raise InputError(f"y must have length {f.n}, got shape {y.shape}")
    if not np.all(np.isfinite(y)):
        raise InputError("y contains non-finite entries")
    return f.V1 @ ((f.U.T @ y) / f.singular_values)


def nullspace_component(f: SvdFactors, beta) -> np.ndarray:
    """Orthogonal projection of ``beta`` onto span(V0)."""
    beta = np.asarray(beta, dtype=float)
    if beta.shape != (f.p,):
        raise InputError(f"vector must have length {f.p}, got shape {beta.shape}")
    return f.V0 @ (f.V0.T @ beta)


def rowspace_component(f: SvdFactors, beta) -> np.ndarray:
    """Orthogonal projection of ``beta`` onto span(V1)."""
    beta = np.asarray(beta, dtype=float)
    if beta.shape != (f.p,):
        raise InputError(f"vector must have length {f.p}, got shape {beta.shape}")
    return f.V1 @ (f.V1.T @ beta)
