"""Linear estimators: min-norm, ridge, PCR, recursive PLS, generalized lasso.

All fits take a preprocessed (centered) :class:`~nullspace_interp.preprocess.Dataset`
and return a :class:`CoefficientVector` that remembers the preprocessing it was
fit under.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np
from scipy.linalg import cho_factor, cho_solve, cho_solve_banded, cholesky_banded, lu_factor, lu_solve

from .errors import EarlyTerminationError, InputError, NotConvergedError, ProvenanceError
from .linalg import SvdFactors, svd_factor
from .preprocess import Dataset, PreprocessState, same_provenance

METHODS = ("true", "min-norm", "ridge", "pcr", "pls", "fused-lasso", "lasso", "custom")

# methods whose regularization grows with the hyperparameter value
LAMBDA_METHODS = ("ridge", "fused-lasso", "lasso")
COMPONENT_METHODS = ("pcr", "pls")


@dataclass(frozen=True, eq=False)
class CoefficientVector:
    beta: np.ndarray
    method: str
    hyperparam: dict = field(default_factory=dict)
    preprocessing: PreprocessState | None = None
    info: dict = field(default_factory=dict)

    def __post_init__(self):
        b = np.array(self.beta, dtype=float, copy=True).ravel()
        if not np.all(np.isfinite(b)):
            raise InputError("coefficients must be finite")
        b.flags.writeable = False
        object.__setattr__(self, "beta", b)
        if self.method not in METHODS:
            raise InputError(f"unknown method tag {self.method!r}")

    @property
    def p(self) -> int:
        return int(self.beta.size)

    def label(self) -> str:
        if not self.hyperparam:
            return self.method
        inner = ",".join(f"{k}={_fmt(v)}" for k, v in sorted(self.hyperparam.items()))
        return f"{self.method}({inner})"

    def shifted(self, v, method: str = "custom", **info) -> "CoefficientVector":
        """Return ``beta + v`` with the same provenance."""
        return CoefficientVector(self.beta + np.asarray(v, dtype=float), method, dict(self.hyperparam),
                                 self.preprocessing, dict(info))


def _fmt(v: Any) -> str:
    if isinstance(v, float):
        return repr(v)
    return str(v)


@dataclass(frozen=True)
class PenaltyMatrix:
    """Generalized-lasso penalty: ``identity`` (lasso) or ``first-difference`` (fused)."""

    kind: str
    cols: int

    def __post_init__(self):
        if self.kind not in ("identity", "first-difference"):
            raise InputError(f"unsupported penalty kind {self.kind!r}")
        if self.cols < 1 or (self.kind == "first-difference" and self.cols < 2):
            raise InputError("penalty matrix needs more columns")

    @property
    def rows(self) -> int:
        return self.cols if self.kind == "identity" else self.cols - 1

    def dense(self) -> np.ndarray:
        p = self.cols
        if self.kind == "identity":
            return np.eye(p)
        D = np.zeros((p - 1, p))
        idx = np.arange(p - 1)
        D[idx, idx] = 1.0
        D[idx, idx + 1] = -1.0
        return D

    def apply(self, beta: np.ndarray) -> np.ndarray:
        if self.kind == "identity":
            return beta
        return beta[:-1] - beta[1:]

    def apply_T(self, w: np.ndarray) -> np.ndarray:
        if self.kind == "identity":
            return w
        out = np.empty(self.cols)
        out[0] = w[0]
        np.subtract(w[1:], w[:-1], out=out[1:-1])
        out[-1] = -w[-1]
        return out


def first_difference(p: int) -> PenaltyMatrix:
    return PenaltyMatrix("first-difference", p)


def identity_penalty(p: int) -> PenaltyMatrix:
    return PenaltyMatrix("identity", p)


@dataclass
class PlsComponent:
    z: np.ndarray
    theta: float
    direction: np.ndarray  # r_m with z_m = X r_m
    residual_norm: float  # Frobenius norm of the deflated X_m


@dataclass
class PlsState:
    components: list[PlsComponent]

    @property
    def scores(self) -> np.ndarray:
        return np.column_stack([c.z for c in self.components])

    @property
    def thetas(self) -> np.ndarray:
        return np.array([c.theta for c in self.components])


@dataclass
class SolverConfig:
    abs_tol: float = 1e-8
    rel_tol: float = 1e-6
    max_iter: int = 50_000
    rho: float = 1.0
    adapt_rho: bool = True
    adapt_until: int = 5_000
    fuse: bool = False
    fusion_tol: float = 1e-8
    polish: bool = True
    record_history: bool = False


@dataclass
class ConvergenceReport:
    converged: bool
    iterations: int
    primal_residual: float
    dual_residual: float
    objective: float
    rho: float
    history: list[float] | None = None
    polished: bool = False


def _xy(d: Dataset) -> tuple[np.ndarray, np.ndarray]:
    return d.X, d.require_y()


def _factors(d: Dataset, factors: SvdFactors | None) -> SvdFactors:
    if factors is None:
        return svd_factor(d.X)
    if factors.n != d.n or factors.p != d.p:
        raise InputError("SVD factors do not match dataset shape")
    return factors


def fit_min_norm(d: Dataset, factors: SvdFactors | None = None) -> CoefficientVector:
    """Minimum-norm least squares ``X^+ y``."""
    f = _factors(d, factors)
    y = d.require_y()
    if f.rank == 0:
        raise InputError("X has numerical rank 0")
    beta = f.V1 @ ((f.U.T @ y) / f.singular_values)
    return CoefficientVector(beta, "min-norm", {}, d.preprocessing)


def fit_ridge(d: Dataset, lam: float, factors: SvdFactors | None = None) -> CoefficientVector:
    """Ridge regression ``(X^T X + lam I)^{-1} X^T y`` evaluated through the SVD."""
    if not lam > 0 or not math.isfinite(lam):
        raise InputError(f"ridge lambda must be positive and finite, got {lam}")
    f = _factors(d, factors)
    y = d.require_y()
    s = f.singular_values
    beta = f.V1 @ ((s / (s**2 + lam)) * (f.U.T @ y))
    return CoefficientVector(beta, "ridge", {"lambda": float(lam)}, d.preprocessing)


def fit_pcr(d: Dataset, M: int, factors: SvdFactors | None = None) -> CoefficientVector:
    """Principal components regression on the leading ``M`` right singular vectors."""
    f = _factors(d, factors)
    y = d.require_y()
    M = int(M)
    if not 1 <= M <= f.rank:
        raise InputError(f"PCR needs 1 <= M <= rank={f.rank}, got {M}")
    V = f.V1[:, :M]
    scores = d.X @ V
    theta = (scores.T @ y) / np.einsum("ij,ij->j", scores, scores)
    beta = V @ theta
    return CoefficientVector(beta, "pcr", {"components": M}, d.preprocessing)


def fit_pls(d: Dataset, M: int, tol: float = 1e-12) -> tuple[CoefficientVector, PlsState]:
    """Recursive univariate PLS with row-space deflation of ``X``.

    Each step forms ``z_m = X_{m-1} X_{m-1}^T y``, regresses ``y`` on it, and
    projects ``z_m`` out of the columns of ``X_{m-1}``.  Every score is kept as
    ``z_m = X r_m`` with ``r_m`` in the row space of X, so the coefficient
    vector ``sum theta_m r_m`` reproduces the fitted values exactly.
    """
    X, y = _xy(d)
    M = int(M)
    if M < 1:
        raise InputError(f"PLS needs M >= 1, got {M}")
    if not np.any(y):
        raise InputError("PLS is undefined for an all-zero response")
    rank = svd_factor(X).rank
    if M > rank:
        raise InputError(f"PLS needs M <= rank={rank}, got {M}")

    scale = np.linalg.norm(X, 2) ** 2 * np.linalg.norm(y)
    Xm = X.copy()
    comps: list[PlsComponent] = []
    beta = np.zeros(d.p)
    for m in range(M):
        a = Xm.T @ y
        z = Xm @ a
        zz = float(z @ z)
        if math.sqrt(zz) <= tol * scale:
            raise EarlyTerminationError(M, m)
        # z = X a - sum_j z_j (z_j^T X a) / |z_j|^2  =>  r = a - sum_j r_j (...)
        Xa = X @ a
        r = a.copy()
        for c in comps:
            r -= c.direction * (float(c.z @ Xa) / float(c.z @ c.z))
        theta = float(z @ y) / zz
        beta += theta * r
        Xm = Xm - np.outer(z, z @ Xm) / zz
        comps.append(PlsComponent(z=z, theta=theta, direction=r, residual_norm=float(np.linalg.norm(Xm))))
    return CoefficientVector(beta, "pls", {"components": M}, d.preprocessing), PlsState(comps)


def gen_lasso_objective(X: np.ndarray, y: np.ndarray, beta: np.ndarray, lam: float, D: PenaltyMatrix) -> float:
    r = y - X @ beta
    return 0.5 * float(r @ r) + lam * float(np.sum(np.abs(D.apply(beta))))


def _norm(v: np.ndarray) -> float:
    return math.sqrt(float(v @ v))


def _soft(x: np.ndarray, t: float) -> np.ndarray:
    return np.sign(x) * np.maximum(np.abs(x) - t, 0.0)


def _fuse_runs(beta: np.ndarray, tol: float) -> np.ndarray:
    out = beta.copy()
    start = 0
    p = beta.size
    for j in range(1, p + 1):
        if j == p or abs(beta[j] - beta[j - 1]) > tol:
            out[start:j] = beta[start:j].mean()
            start = j
    return out


DENSE_MAX_COLS = 400  # below this width the ADMM beta system is factored densely
POLISH_EVERY = 25  # ADMM iterations between attempts to certify an exact solution


class _BetaSystem:
    """Solves ``(X^T X + rho D^T D) b = r`` for the ADMM beta update.

    For wide problems the matrix is a banded (or diagonal) part plus a rank-n
    term, so Woodbury keeps each solve at O(n p) instead of O(p^2); one step
    of iterative refinement cleans up the cancellation this can introduce.
    Tall or modest-width problems use a dense Cholesky factor with a tiny
    diagonal jitter, which is cheaper per solve below a few hundred columns.
    """

    def __init__(self, X: np.ndarray, D: PenaltyMatrix, rho: float, jitter: float):
        self.X, self.D, self.rho = X, D, rho
        n, p = X.shape
        self.structured = n < p and p > DENSE_MAX_COLS
        if not self.structured:
            XtX = X.T @ X
            Dm = D.dense()
            chol = cho_factor(XtX + rho * (Dm.T @ Dm) + jitter * np.eye(p), check_finite=False)
            # an explicit inverse turns each solve into one matvec, which is
            # much faster than a triangular solve pair at these sizes
            self.inv = cho_solve(chol, np.eye(p), check_finite=False)
            return
        if D.kind == "identity":
            self.W = X
            self.sign = np.ones(n)
            self.band = None
        else:
            # rho (D^T D + e1 e1^T) is tridiagonal and positive definite; the
            # pinning term is removed again through the low-rank correction
            ab = np.empty((2, p))
            ab[0, 0] = 0.0
            ab[0, 1:] = -rho
            ab[1, :] = 2.0 * rho
            ab[1, -1] = rho
            self.band = cholesky_banded(ab, check_finite=False)
            e1 = np.zeros(p)
            e1[0] = math.sqrt(rho)
            self.W = np.vstack([X, e1])
            self.sign = np.r_[np.ones(n), -1.0]
        G = np.column_stack([self._base_solve(w) for w in self.W])
        self.G = G
        self.cap = lu_factor(np.diag(self.sign) + self.W @ G, check_finite=False)

    def _base_solve(self, r: np.ndarray) -> np.ndarray:
        if self.band is None:
            return r / self.rho
        return cho_solve_banded((self.band, False), r, check_finite=False)

    def _woodbury(self, r: np.ndarray) -> np.ndarray:
        t = self._base_solve(r)
        return t - self.G @ lu_solve(self.cap, self.W @ t, check_finite=False)

    def apply(self, b: np.ndarray) -> np.ndarray:
        return self.X.T @ (self.X @ b) + self.rho * self.D.apply_T(self.D.apply(b))

    def solve(self, r: np.ndarray) -> np.ndarray:
        if not self.structured:
            return self.inv @ r
        b = self._woodbury(r)
        return b + self._woodbury(r - self.apply(b))


def solve_generalized_lasso(
    X: np.ndarray,
    y: np.ndarray,
    lam: float,
    D: PenaltyMatrix,
    cfg: SolverConfig | None = None,
    warm_start: tuple[np.ndarray, np.ndarray, np.ndarray] | None = None,
) -> tuple[np.ndarray, ConvergenceReport, tuple[np.ndarray, np.ndarray, np.ndarray]]:
    """ADMM for ``min 0.5 |y - X b|^2 + lam |D b|_1`` with splitting ``z = D b``.

    Returns the beta iterate, a convergence report and the final
    ``(beta, z, w)`` state, ``w = rho u`` being the unscaled dual (usable as
    a warm start along a lambda path, whatever rho the next solve settles on).
    Raises :class:`NotConvergedError` at the iteration cap.
    """
    cfg = cfg or SolverConfig()
    n, p = X.shape
    if D.cols != p:
        raise InputError(f"penalty has {D.cols} columns, X has {p}")
    if not lam > 0 or not math.isfinite(lam):
        raise InputError(f"lambda must be positive and finite, got {lam}")

    Xty = X.T @ y
    m = D.rows

    rho = float(cfg.rho)
    # scale rho to the data so the default of 1.0 behaves the same across datasets
    trace_dtd = float(p if D.kind == "identity" else 2 * (p - 1))
    rho_unit = max(float(np.sum(X * X)) / trace_dtd, np.finfo(float).tiny)
    rho *= rho_unit

    def factor(r):
        return _BetaSystem(X, D, r, 1e-14 * rho_unit)

    chol = factor(rho)
    if warm_start is not None:
        beta, z, w = (np.array(a, dtype=float, copy=True) for a in warm_start)
        u = w / rho
    else:
        beta = np.zeros(p)
        z = np.zeros(m)
        u = np.zeros(m)

    history = [] if cfg.record_history else None
    best = (math.inf, beta.copy())
    sqrt_m, sqrt_p = math.sqrt(m), math.sqrt(p)
    r_norm = s_norm = math.inf
    wait, next_adapt, last_step = 10, 10, 0
    polished = None
    for it in range(1, cfg.max_iter + 1):
        beta = chol.solve(Xty + rho * D.apply_T(z - u))
        Db = D.apply(beta)
        z_old = z
        z = _soft(Db + u, lam / rho)
        u = u + Db - z

        r_norm = _norm(Db - z)
        s_norm = rho * _norm(D.apply_T(z - z_old))
        eps_pri = sqrt_m * cfg.abs_tol + cfg.rel_tol * max(_norm(Db), _norm(z))
        eps_dual = sqrt_p * cfg.abs_tol + cfg.rel_tol * rho * _norm(D.apply_T(u))

        if history is not None or it % 50 == 0:
            obj = gen_lasso_objective(X, y, beta, lam, D)
            if history is not None:
                history.append(obj)
            if obj < best[0]:
                best = (obj, beta.copy())

        if r_norm <= eps_pri and s_norm <= eps_dual:
            break
        if cfg.polish and it % POLISH_EVERY == 0:
            # a certified polish is the exact optimum, so stop early
            polished = _polish(X, y, lam, D, beta, z, rho * u)
            if polished is not None:
                break

        if cfg.adapt_rho and it <= cfg.adapt_until and it >= next_adapt:
            # balance residuals relative to their tolerances, which keeps the
            # rule independent of the units of X and y
            r_rel, s_rel = r_norm / eps_pri, s_norm / eps_dual
            step = 0
            if r_rel > 10.0 * s_rel:
                step = 1
            elif s_rel > 10.0 * r_rel:
                step = -1
            if step:
                if step == -last_step:
                    wait *= 2  # back off when rho starts to oscillate
                last_step = step
                rho *= 2.0**step
                u /= 2.0**step
                chol = factor(rho)
            next_adapt = it + wait
    else:
        report = ConvergenceReport(False, cfg.max_iter, r_norm, s_norm,
                                   gen_lasso_objective(X, y, beta, lam, D), rho / rho_unit, history)
        raise NotConvergedError(
            f"generalized lasso did not converge in {cfg.max_iter} iterations "
            f"(primal {r_norm:.3g}, dual {s_norm:.3g})",
            best=best[1],
            report=report,
        )

    out = beta
    if polished is None and cfg.polish:
        polished = _polish(X, y, lam, D, beta, z, rho * u)
    if polished is not None:
        out = polished
    elif cfg.fuse and D.kind == "first-difference":
        out = _fuse_runs(beta, cfg.fusion_tol)
    elif cfg.fuse:
        out = np.where(np.abs(beta) <= cfg.fusion_tol, 0.0, beta)
    report = ConvergenceReport(True, it, r_norm, s_norm, gen_lasso_objective(X, y, out, lam, D),
                               rho / rho_unit, history, polished is not None)
    return out, report, (beta, z, rho * u)


def _polish(X, y, lam, D: PenaltyMatrix, beta, z, w, tol: float = 1e-9) -> np.ndarray | None:
    """Exact solution on a support read off the ADMM iterate, if one certifies.

    Candidate supports come from the nonzero entries of ``z`` and from the
    near-saturated entries of the dual ``w``; see :func:`_polish_support`.
    """
    tried = []
    for active, sgn in (
        (z != 0, np.sign(z)),
        (np.abs(w) >= lam * (1.0 - 1e-3), np.sign(w)),
    ):
        key = (active.tobytes(), sgn[active].tobytes())
        if key in tried:
            continue
        tried.append(key)
        cand = _polish_support(X, y, lam, D, beta, active, sgn[active], tol)
        if cand is not None:
            return cand
    return None


def _polish_support(X, y, lam, D: PenaltyMatrix, beta, active, sgn, tol: float) -> np.ndarray | None:
    """Optimum restricted to ``D_B b = 0`` with fixed signs ``sgn`` on ``A``.

    ``A`` is the support and ``B`` the rest.  The restricted problem is a
    small least-squares solve in the coordinates of null(D_B).  The result is
    kept only when it passes the optimality conditions: no active difference
    has the opposite sign, the implied dual is feasible, and the objective
    does not rise.  Otherwise ``None``.
    """
    p = X.shape[1]
    if D.kind == "identity":
        N = np.eye(p)[:, active]
    else:
        group = np.concatenate([[0], np.cumsum(active)])
        N = np.zeros((p, int(group[-1]) + 1))
        N[np.arange(p), group] = 1.0
    if N.shape[1] > X.shape[0]:
        return None  # more free coordinates than samples: not a unique candidate
    if N.shape[1] == 0:
        cand = np.zeros(p)
    else:
        XN = X @ N
        H = XN.T @ XN
        w_all = np.zeros(D.rows)
        w_all[active] = sgn
        rhs = XN.T @ y - lam * (N.T @ D.apply_T(w_all))
        try:
            theta = cho_solve(cho_factor(H, check_finite=False), rhs, check_finite=False)
        except np.linalg.LinAlgError:
            return None
        if not np.all(np.isfinite(theta)) or np.linalg.cond(H) > 1e12:
            return None
        cand = N @ theta
    Dc = D.apply(cand)
    scale = max(float(np.max(np.abs(Dc))), np.finfo(float).tiny)
    if np.any(Dc[active] * sgn < -1e-12 * scale):
        return None
    g = X.T @ (y - X @ cand)
    if D.kind == "identity":
        w = g
    else:
        if abs(g.sum()) > tol * max(lam, float(np.max(np.abs(g)))) * p:
            return None
        w = np.cumsum(g)[:-1]
    # on A the dual equals lam * sgn exactly, so its deviation there measures roundoff
    noise = float(np.max(np.abs(w[active] - lam * sgn))) if np.any(active) else 0.0
    if np.max(np.abs(w)) > lam * (1.0 + 1e-7) + 10.0 * noise:
        return None
    if gen_lasso_objective(X, y, cand, lam, D) > gen_lasso_objective(X, y, beta, lam, D) * (1 + 1e-12) + 1e-300:
        return None
    return cand


def fit_generalized_lasso(
    d: Dataset,
    lam: float,
    D: PenaltyMatrix | str = "first-difference",
    solver_cfg: SolverConfig | None = None,
    warm_start=None,
) -> CoefficientVector:
    """Generalized lasso fit; ``D`` may be a :class:`PenaltyMatrix` or its kind."""
    X, y = _xy(d)
    if isinstance(D, str):
        D = PenaltyMatrix(D, d.p)
    beta, report, state = solve_generalized_lasso(X, y, lam, D, solver_cfg, warm_start)
    method = "fused-lasso" if D.kind == "first-difference" else "lasso"
    return CoefficientVector(beta, method, {"lambda": float(lam)}, d.preprocessing,
                             {"report": report, "state": state})


def fit_fused_lasso(d: Dataset, lam: float, solver_cfg: SolverConfig | None = None, warm_start=None):
    return fit_generalized_lasso(d, lam, "first-difference", solver_cfg, warm_start)


def predict(
    beta: CoefficientVector,
    d: Dataset,
    restore_mean: bool = False,
    allow_mismatch: bool = False,
) -> np.ndarray:
    """``X beta`` (plus the training response mean when ``restore_mean``)."""
    if beta.p != d.p:
        raise InputError(f"coefficients have length {beta.p}, dataset has {d.p} columns")
    if not allow_mismatch and beta.method != "true" and not same_provenance(beta.preprocessing, d.preprocessing):
        raise ProvenanceError("coefficients were fit under different preprocessing than the dataset")
    yhat = d.X @ beta.beta
    if restore_mean and d.preprocessing is not None:
        yhat = yhat + d.preprocessing.y_mean
    return yhat


def orthogonality_defect(beta, f: SvdFactors) -> float:
    """``|V0^T beta| / max(|beta|, eps)``: 0 when beta avoids the nullspace entirely."""
    b = beta.beta if isinstance(beta, CoefficientVector) else np.asarray(beta, dtype=float)
    if b.shape != (f.p,):
        raise InputError(f"vector must have length {f.p}, got shape {b.shape}")
    denom = max(float(np.linalg.norm(b)), np.finfo(float).eps)
    return float(np.linalg.norm(f.V0.T @ b)) / denom


# ---------------------------------------------------------------------------
# hyperparameter grids and dispatch
# ---------------------------------------------------------------------------

def default_lambda_grid(d: Dataset, method: str, num: int = 50, factors: SvdFactors | None = None,
                        scale: str = "lambda-max") -> np.ndarray:
    """Log-spaced lambda grid.

    Ridge uses ``[1e-6, 1e4] * sigma_max^2``.  For the lasso family the
    default ``scale="lambda-max"`` spans ``[1e-4, 1] * lambda_max`` (see
    :func:`lambda_max`); ``scale="xty"`` gives ``[1e-4, 1e2] * |X^T y|_inf / n``.
    """
    if method == "ridge":
        smax = _factors(d, factors).sigma_max
        return np.logspace(-6, 4, num) * smax**2
    if method in ("fused-lasso", "lasso"):
        if scale == "xty":
            X, y = _xy(d)
            return np.logspace(-4, 2, num) * float(np.max(np.abs(X.T @ y))) / d.n
        if scale != "lambda-max":
            raise InputError(f"unknown lambda grid scale {scale!r}")
        kind = "first-difference" if method == "fused-lasso" else "identity"
        top = lambda_max(d, PenaltyMatrix(kind, d.p))
        if not top > 0:
            raise InputError("the unpenalized directions already fit y exactly; no lambda grid")
        return np.logspace(-4, 0, num) * top
    raise InputError(f"no lambda grid for method {method!r}")


def lambda_max(d: Dataset, D: PenaltyMatrix) -> float:
    """Smallest lambda at which the generalized lasso solution lies in null(D).

    Past this value the fit is all zeros (lasso) or a single constant (fused
    lasso), so it is the natural top of a lambda path.
    """
    X, y = _xy(d)
    if D.kind == "identity":
        return float(np.max(np.abs(X.T @ y)))
    x1 = X.sum(axis=1)
    c = float(x1 @ y) / float(x1 @ x1) if np.any(x1) else 0.0
    g = X.T @ (y - c * x1)
    # D^T w = g has the solution w = cumsum(g)[:-1] because sum(g) = 0
    return float(np.max(np.abs(np.cumsum(g)[:-1])))


def default_grid(d: Dataset, method: str, num: int = 50, max_components: int = 20) -> np.ndarray:
    if method in COMPONENT_METHODS:
        top = min(svd_factor(d.X).rank, max_components)
        if method == "pls" and top > 0:
            # cap at the number of components the recursion sustains on this data
            try:
                fit_pls(d, top)
            except EarlyTerminationError as exc:
                top = exc.achieved
        return np.arange(1, top + 1)
    return default_lambda_grid(d, method, num)


def fit_method(d: Dataset, method: str, value=None, solver_cfg: SolverConfig | None = None,
               factors: SvdFactors | None = None) -> CoefficientVector:
    """Dispatch on a method name with a single hyperparameter value."""
    if method == "min-norm":
        return fit_min_norm(d, factors)
    if method == "ridge":
        return fit_ridge(d, float(value), factors)
    if method == "pcr":
        return fit_pcr(d, int(value), factors)
    if method == "pls":
        return fit_pls(d, int(value))[0]
    if method == "fused-lasso":
        return fit_generalized_lasso(d, float(value), "first-difference", solver_cfg)
    if method == "lasso":
        return fit_generalized_lasso(d, float(value), "identity", solver_cfg)
    raise InputError(f"unknown estimator {method!r}")
