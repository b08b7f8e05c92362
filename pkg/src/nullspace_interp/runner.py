"""Orchestration of a :class:`~nullspace_interp.config.RunConfig` into artifact files."""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from . import plotting
from .config import ModelConfig, RunConfig
from .csvio import fmt_float, load_csv, save_csv
from .errors import ConfigError, InputError
from .linalg import svd_factor
from .modelselect import CvResult, EvalReport, cross_validate, evaluate
from .nullspace import NullspaceComparison, compare, select_gamma
from .preprocess import Dataset, PreprocessState, apply_preprocess, fit_preprocess, snr_profile
from .regress import CoefficientVector, SolverConfig, default_grid, fit_method
from .synthdata import (
    ParabolicSpec,
    SyntheticResponseSpec,
    attach_synthetic_response,
    gen_lfp_surrogate,
    gen_parabolic,
)

log = logging.getLogger(__name__)

ALL_STEPS = ("fit", "cv", "nullspace", "report", "snr")


@dataclass
class Workspace:
    """Everything derived from a config; filled lazily by :func:`run`."""

    config: RunConfig
    train: Dataset
    splits: dict[str, Dataset]
    truth: CoefficientVector | None
    prepared: dict[str, tuple[Dataset, PreprocessState]] = field(default_factory=dict)
    models: dict[str, CoefficientVector] = field(default_factory=dict)
    cv: dict[str, CvResult] = field(default_factory=dict)
    comparisons: list[tuple[str, str, NullspaceComparison]] = field(default_factory=list)
    reports: list[EvalReport] = field(default_factory=list)
    artifacts: list[Path] = field(default_factory=list)


def load_datasets(cfg: RunConfig) -> tuple[Dataset, dict[str, Dataset], CoefficientVector | None]:
    ds = cfg.dataset
    truth = None
    if ds.generator == "parabolic":
        params = {"seed": cfg.seed, **ds.params}
        train, truth, _ = gen_parabolic(ParabolicSpec(**params))
        splits: dict[str, Dataset] = {}
    elif ds.generator == "lfp-surrogate":
        params = dict(ds.params)
        all_splits = gen_lfp_surrogate(**params)
        train = all_splits.pop("train")
        splits = all_splits
        if ds.response_transform:
            from .preprocess import transform_response

            train = transform_response(train, ds.response_transform)
            splits = {k: transform_response(v, ds.response_transform) for k, v in splits.items()}
    else:
        src = ds.train
        train = load_csv(src.path, src.response, ds.response_transform, name="train")
        splits = {
            name: load_csv(s.path, s.response, ds.response_transform, name=name)
            for name, s in ds.splits.items()
        }
    if ds.synthetic_response:
        spec = SyntheticResponseSpec(**{"seed": cfg.seed, **ds.synthetic_response})
        if train.response_transform is not None:
            train = replace(train, response_transform=None)
        train, truth = attach_synthetic_response(train, spec)
        splits = {}
    return train, splits, truth


def prepare(ws: Workspace, scheme: str) -> tuple[Dataset, PreprocessState]:
    if scheme not in ws.prepared:
        state = fit_preprocess(ws.train, scheme)
        ws.prepared[scheme] = (apply_preprocess(state, ws.train), state)
    return ws.prepared[scheme]


def _scheme(ws: Workspace, m: ModelConfig) -> str:
    return m.scheme or ws.config.preprocess


def fit_models(ws: Workspace, solver_cfg: SolverConfig | None = None) -> None:
    cfg = ws.config
    for m in cfg.models:
        scheme = _scheme(ws, m)
        train, _ = prepare(ws, scheme)
        value = m.value
        if m.cv is not None:
            grid = m.cv.grid
            if grid is None:
                grid = default_grid(train, m.method, num=m.cv.num)
            cv = cross_validate(ws.train, m.method, np.asarray(grid), m.cv.folds, cfg.seed, m.cv.rule,
                                scheme, solver_cfg)
            ws.cv[m.id] = cv
            value = cv.chosen
        log.info("fitting %s (%s=%s, %s)", m.id, m.method, value, scheme)
        ws.models[m.id] = fit_method(train, m.method, value, solver_cfg)


def _resolve_b(ws: Workspace, spec, a: CoefficientVector) -> tuple[str, CoefficientVector]:
    state = a.preprocessing
    if spec == "true":
        if ws.truth is None:
            raise ConfigError("'true' coefficients are only known for synthetic data")
        beta = state.coef_to_transformed(ws.truth.beta) if state is not None else ws.truth.beta
        return "true", CoefficientVector(beta, "true", dict(ws.truth.hyperparam), state)
    if isinstance(spec, str):
        return spec, ws.models[spec]
    if "constant" in spec:
        val = float(spec["constant"])
        return f"constant({fmt_float(val)})", CoefficientVector(np.full(a.p, val), "custom", {"constant": val}, state)
    beta = read_coefficients(spec["file"], spec.get("model"))
    if beta.size != a.p:
        raise InputError(f"coefficients in {spec['file']} have length {beta.size}, expected {a.p}")
    return f"file({Path(spec['file']).name})", CoefficientVector(beta, "custom", {}, state)


def run_nullspace(ws: Workspace) -> None:
    for req in ws.config.nullspace:
        a = ws.models[req.a]
        b_name, b = _resolve_b(ws, req.b, a)
        scheme = _scheme(ws, ws.config.model(req.a))
        train, _ = prepare(ws, scheme)
        if isinstance(req.b, str) and req.b != "true":
            if _scheme(ws, ws.config.model(req.b)) != scheme:
                raise ConfigError(f"nullspace {req.a} vs {req.b}: models use different preprocessing")
        f = svd_factor(train.X)
        if req.gamma is not None:
            comp = compare(train, a, b, req.gamma, f)
        else:
            comp = select_gamma(train, a, b, req.c, factors=f)
        ws.comparisons.append((req.a, b_name, comp))


def run_reports(ws: Workspace) -> None:
    splits = {"Training": ws.train}
    for name, d in ws.splits.items():
        splits[_split_label(name)] = d
    for mid, coef in ws.models.items():
        ws.reports.append(evaluate(coef, splits, ws.config.subsets, model=mid))


def _split_label(name: str) -> str:
    labels = {"train": "Training", "test1": "Test 1", "test2": "Test 2"}
    return labels.get(name, name)


# ---------------------------------------------------------------------------
# writers
# ---------------------------------------------------------------------------

def _writer(path: Path):
    path.parent.mkdir(parents=True, exist_ok=True)
    fh = path.open("w", newline="")
    return fh, csv.writer(fh, lineterminator="\n")


def _hyper(coef: CoefficientVector) -> str:
    return ";".join(f"{k}={fmt_float(v) if isinstance(v, float) else v}" for k, v in sorted(coef.hyperparam.items()))


def _column_labels(ws: Workspace) -> list[str]:
    if ws.train.domain is not None:
        return [fmt_float(v) for v in ws.train.domain]
    return [f"x{j}" for j in range(ws.train.p)]


def write_coefficients(ws: Workspace, out: Path) -> Path:
    path = out / "coefficients.csv"
    fh, w = _writer(path)
    with fh:
        w.writerow(["model", "method", "hyperparam", "preprocessing", *_column_labels(ws)])
        if ws.truth is not None:
            w.writerow(["true", "true", "", "raw", *map(fmt_float, ws.truth.beta)])
        for mid, coef in ws.models.items():
            scheme = coef.preprocessing.scheme if coef.preprocessing is not None else "raw"
            w.writerow([mid, coef.method, _hyper(coef), scheme, *map(fmt_float, coef.beta)])
    return path


def read_coefficients(path, model: str | None = None) -> np.ndarray:
    with Path(path).open(newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise InputError(f"empty coefficient file {path}")
    body = rows[1:]
    for r in body:
        if model is None or r[0] == model:
            return np.array([float(x) for x in r[4:]])
    raise InputError(f"model {model!r} not found in {path}")


def write_cv(ws: Workspace, out: Path) -> Path:
    path = out / "cv.csv"
    fh, w = _writer(path)
    with fh:
        w.writerow(["model", "method", "value", "mean_rmse", "std_err", "chosen_min", "chosen_1se", "rule",
                    *[f"fold{k}" for k in range(max((c.fold_errors.shape[0] for c in ws.cv.values()), default=0))]])
        for mid, cv in ws.cv.items():
            for j, g in enumerate(cv.grid):
                w.writerow([
                    mid, cv.method, fmt_float(g), fmt_float(cv.mean_curve[j]), fmt_float(cv.std_curve[j]),
                    int(np.isclose(g, cv.chosen_min)), int(np.isclose(g, cv.chosen_1se)), cv.rule_used,
                    *map(fmt_float, cv.fold_errors[:, j]),
                ])
    return path


def write_nullspace(ws: Workspace, out: Path) -> Path:
    path = out / "nullspace.csv"
    fh, w = _writer(path)
    with fh:
        w.writerow(["a", "b", "gamma", "c", "nrmse_before", "nrmse_after", "quantity", *_column_labels(ws)])
        for a, b, comp in ws.comparisons:
            head = [a, b, fmt_float(comp.gamma), "" if comp.constraint_c is None else fmt_float(comp.constraint_c),
                    fmt_float(comp.nrmse_before), fmt_float(comp.nrmse_after)]
            for q, vec in (("beta_a", comp.beta_a.beta), ("beta_b", comp.beta_b.beta), ("v", comp.v),
                           ("beta_a_plus_v", comp.modified)):
                w.writerow([*head, q, *map(fmt_float, vec)])
    return path


def write_eval(ws: Workspace, out: Path) -> list[Path]:
    long_path = out / "eval_long.csv"
    fh, w = _writer(long_path)
    with fh:
        w.writerow(["model", "split", "subset", "count", "rmse"])
        for rep in ws.reports:
            for r in rep.table_rows():
                w.writerow([rep.model, r.split, r.subset, r.count, "" if r.rmse is None else fmt_float(r.rmse)])
    table_path = out / "eval.csv"
    fh, w = _writer(table_path)
    with fh:
        w.writerow(["set", *[rep.model for rep in ws.reports]])
        if ws.reports:
            first = ws.reports[0]
            for r in first.table_rows():
                cells = []
                for rep in ws.reports:
                    row = rep.get(r.split, r.subset)
                    cells.append("" if row.rmse is None else fmt_float(row.rmse))
                w.writerow([first.row_label(r), *cells])
    return [table_path, long_path]


def write_snr(ws: Workspace, out: Path) -> list[Path]:
    opts = {"smooth_target": 1e-6, "degree": 3, "signal": "row-centered", **ws.config.snr}
    prof = snr_profile(ws.train, float(opts["smooth_target"]), int(opts["degree"]), str(opts["signal"]))
    path = out / "snr.csv"
    fh, w = _writer(path)
    with fh:
        w.writerow(["domain", "snr_db", "snr_ratio", "signal_power", "noise_power", "column_mean", "column_std"])
        dom = ws.train.domain
        for j in range(ws.train.p):
            w.writerow([fmt_float(dom[j]), fmt_float(prof.snr_db[j]), fmt_float(prof.snr_ratio[j]),
                        fmt_float(prof.signal_power[j]), fmt_float(prof.noise_power[j]),
                        fmt_float(prof.column_mean[j]), fmt_float(prof.column_std[j])])
    return [path, plotting.plot_snr(out / "plots" / "snr.svg", dom, prof)]


def write_plots(ws: Workspace, out: Path, steps) -> list[Path]:
    plots = out / "plots"
    paths = []
    dom = ws.train.domain
    x = dom if dom is not None else np.arange(ws.train.p)
    if "fit" in steps and ws.models:
        series = []
        if ws.truth is not None and all(c.preprocessing is None or c.preprocessing.scheme == "center"
                                        for c in ws.models.values()):
            series.append(("true", ws.truth.beta, "black"))
        palette = ["tab:green", "tab:blue", "tab:orange", "tab:red", "tab:purple", "tab:brown"]
        for i, (mid, coef) in enumerate(ws.models.items()):
            series.append((mid, coef.beta, palette[i % len(palette)]))
        paths.append(plotting.plot_lines(plots / "coefficients.svg", x, series, ylabel="coefficient"))
        paths.append(plotting.plot_rows(plots / "data.svg", dom, ws.train.X, title="training data"))
    if "cv" in steps:
        for mid, cv in ws.cv.items():
            paths.append(plotting.plot_cv(plots / f"cv_{mid}.svg", cv))
    if "nullspace" in steps:
        for a, b, comp in ws.comparisons:
            paths.append(plotting.plot_nullspace(plots / f"nullspace_{a}_vs_{_slug(b)}.svg", dom, comp, a, b))
    return paths


def _slug(s: str) -> str:
    return "".join(ch if ch.isalnum() or ch in "-_" else "_" for ch in s).strip("_")


def run(cfg: RunConfig, steps=ALL_STEPS, out_dir: Path | None = None,
        solver_cfg: SolverConfig | None = None) -> Workspace:
    """Execute ``steps`` of a run and write artifacts under ``out_dir``."""
    unknown = set(steps) - set(ALL_STEPS)
    if unknown:
        raise ConfigError(f"unknown steps {sorted(unknown)}")
    out = Path(out_dir) if out_dir is not None else cfg.output_dir
    train, splits, truth = load_datasets(cfg)
    ws = Workspace(cfg, train, splits, truth)

    needs_fit = any(s in steps for s in ("fit", "cv", "nullspace", "report"))
    if needs_fit:
        fit_models(ws, solver_cfg)
    if "fit" in steps:
        ws.artifacts.append(write_coefficients(ws, out))
    if "cv" in steps or ("fit" in steps and ws.cv):
        if ws.cv:
            ws.artifacts.append(write_cv(ws, out))
    if "nullspace" in steps:
        if not cfg.nullspace:
            raise ConfigError("no nullspace comparisons configured")
        run_nullspace(ws)
        ws.artifacts.append(write_nullspace(ws, out))
    if "report" in steps:
        run_reports(ws)
        ws.artifacts.extend(write_eval(ws, out))
    if "snr" in steps:
        if ws.train.domain is None:
            if steps == ("snr",):
                raise InputError("snr needs a domain grid in the dataset")
        else:
            ws.artifacts.extend(write_snr(ws, out))
    ws.artifacts.extend(write_plots(ws, out, steps))
    return ws


def synth(cfg: RunConfig, out_dir: Path | None = None) -> list[Path]:
    """Write the configured dataset (generated or loaded) to canonical CSV files."""
    out = Path(out_dir) if out_dir is not None else cfg.output_dir
    train, splits, truth = load_datasets(cfg)
    paths = []
    for name, d in {"train": train, **splits}.items():
        x_path, y_path = out / f"{name}.csv", out / f"{name}_response.csv"
        save_csv(d, x_path, y_path if d.y is not None else None)
        paths.append(x_path)
        if d.y is not None:
            paths.append(y_path)
    if truth is not None:
        path = out / "true_coefficients.csv"
        fh, w = _writer(path)
        with fh:
            labels = [fmt_float(v) for v in train.domain] if train.domain is not None else [f"x{j}" for j in range(train.p)]
            w.writerow(["model", "method", "hyperparam", "preprocessing", *labels])
            w.writerow(["true", "true", "", "raw", *map(fmt_float, truth.beta)])
        paths.append(path)
    return paths
