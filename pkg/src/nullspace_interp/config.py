"""YAML run configuration.

Example::

    seed: 0
    output_dir: out/parabolic
    preprocess: center
    dataset:
      generator: parabolic
      params: {n: 50}
    cv: {folds: 5, rule: one-se}
    models:
      - {id: pls1, method: pls, value: 1}
      - {id: fl, method: fused-lasso, cv: {rule: one-se, num: 30}}
    nullspace:
      - {a: pls1, b: true, gamma: 10}
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import yaml

from .errors import ConfigError
from .modelselect import RULES, SubsetRule
from .preprocess import normalize_scheme
from .regress import METHODS

GENERATORS = ("parabolic", "lfp-surrogate")
FITTABLE = tuple(m for m in METHODS if m not in ("true", "custom"))


@dataclass
class FileSource:
    path: Path
    response: Path | None = None


@dataclass
class DatasetConfig:
    generator: str | None = None
    params: dict = field(default_factory=dict)
    train: FileSource | None = None
    splits: dict[str, FileSource] = field(default_factory=dict)
    response_transform: str | None = None
    synthetic_response: dict | None = None


@dataclass
class CvConfig:
    folds: int = 5
    rule: str = "one-se"
    grid: list | None = None
    num: int = 50


@dataclass
class ModelConfig:
    id: str
    method: str
    value: Any = None
    cv: CvConfig | None = None
    scheme: str | None = None


@dataclass
class NullspaceRequest:
    a: str
    b: Any  # model id, "true", {"constant": x} or {"file": path, "model": id}
    gamma: float | None = None
    c: float | None = None


@dataclass
class RunConfig:
    dataset: DatasetConfig
    models: list[ModelConfig]
    preprocess: str = "center"
    seed: int = 0
    output_dir: Path = Path("out")
    cv: CvConfig = field(default_factory=CvConfig)
    nullspace: list[NullspaceRequest] = field(default_factory=list)
    subsets: list[SubsetRule] = field(default_factory=list)
    snr: dict = field(default_factory=dict)
    base_dir: Path = Path(".")

    def model(self, model_id: str) -> ModelConfig:
        for m in self.models:
            if m.id == model_id:
                return m
        raise ConfigError(f"unknown model id {model_id!r}")


def _require(d: dict, key: str, where: str):
    if key not in d:
        raise ConfigError(f"{where}: missing key {key!r}")
    return d[key]


def _cv(raw: Any, default: CvConfig | None = None) -> CvConfig:
    base = default or CvConfig()
    if raw is None or raw is True:
        return CvConfig(base.folds, base.rule, base.grid, base.num)
    if not isinstance(raw, dict):
        raise ConfigError("cv settings must be a mapping")
    unknown = set(raw) - {"folds", "rule", "grid", "num"}
    if unknown:
        raise ConfigError(f"cv: unknown keys {sorted(unknown)}")
    cfg = CvConfig(
        folds=int(raw.get("folds", base.folds)),
        rule=str(raw.get("rule", base.rule)),
        grid=raw.get("grid", base.grid),
        num=int(raw.get("num", base.num)),
    )
    if cfg.rule not in RULES:
        raise ConfigError(f"cv rule must be one of {RULES}, got {cfg.rule!r}")
    return cfg


def _source(raw: Any, base: Path, where: str) -> FileSource:
    if isinstance(raw, str):
        return FileSource(base / raw)
    if not isinstance(raw, dict):
        raise ConfigError(f"{where}: expected a path or mapping")
    resp = raw.get("response")
    return FileSource(base / _require(raw, "path", where), base / resp if resp else None)


def parse_config(raw: dict, base_dir: Path | str = ".") -> RunConfig:
    if not isinstance(raw, dict):
        raise ConfigError("config root must be a mapping")
    base = Path(base_dir)

    ds_raw = _require(raw, "dataset", "config")
    if not isinstance(ds_raw, dict):
        raise ConfigError("dataset must be a mapping")
    ds = DatasetConfig(
        generator=ds_raw.get("generator"),
        params=dict(ds_raw.get("params") or {}),
        response_transform=ds_raw.get("response_transform"),
        synthetic_response=ds_raw.get("synthetic_response"),
    )
    if "train" in ds_raw:
        ds.train = _source(ds_raw["train"], base, "dataset.train")
    for name, src in (ds_raw.get("splits") or {}).items():
        ds.splits[str(name)] = _source(src, base, f"dataset.splits.{name}")
    if (ds.generator is None) == (ds.train is None):
        raise ConfigError("dataset needs exactly one source: 'generator' or 'train'")
    if ds.generator is not None and ds.generator not in GENERATORS:
        raise ConfigError(f"unknown generator {ds.generator!r}; choose from {GENERATORS}")
    if ds.response_transform not in (None, "log10"):
        raise ConfigError(f"unknown response_transform {ds.response_transform!r}")

    cv_default = _cv(raw.get("cv"))
    models_raw = raw.get("models") or []
    if not isinstance(models_raw, list) or not models_raw:
        raise ConfigError("models must be a nonempty list")
    models = []
    seen = set()
    for i, m in enumerate(models_raw):
        where = f"models[{i}]"
        if not isinstance(m, dict):
            raise ConfigError(f"{where} must be a mapping")
        mid = str(_require(m, "id", where))
        if mid in seen or mid == "true":
            raise ConfigError(f"{where}: duplicate or reserved id {mid!r}")
        seen.add(mid)
        method = str(_require(m, "method", where))
        if method not in FITTABLE:
            raise ConfigError(f"{where}: unknown method {method!r}; choose from {FITTABLE}")
        cv = _cv(m["cv"], cv_default) if m.get("cv") not in (None, False) else None
        value = m.get("value")
        if method != "min-norm" and cv is None and value is None:
            raise ConfigError(f"{where}: give either 'value' or 'cv'")
        scheme = normalize_scheme(m["scheme"]) if m.get("scheme") else None
        models.append(ModelConfig(mid, method, value, cv, scheme))

    requests = []
    for i, r in enumerate(raw.get("nullspace") or []):
        where = f"nullspace[{i}]"
        a = str(_require(r, "a", where))
        b = _require(r, "b", where)
        if b is True:
            b = "true"
        gamma, c = r.get("gamma"), r.get("c")
        if (gamma is None) == (c is None):
            raise ConfigError(f"{where}: give exactly one of 'gamma' or 'c'")
        if a not in seen:
            raise ConfigError(f"{where}: unknown model id {a!r}")
        if isinstance(b, str) and b != "true" and b not in seen:
            raise ConfigError(f"{where}: unknown model id {b!r}")
        if isinstance(b, dict) and not ({"constant"} <= set(b) or {"file"} <= set(b)):
            raise ConfigError(f"{where}: b must be a model id, 'true', {{constant: x}} or {{file: path}}")
        if isinstance(b, dict) and "file" in b:
            b = {**b, "file": base / b["file"]}
        requests.append(NullspaceRequest(a, b, None if gamma is None else float(gamma),
                                         None if c is None else float(c)))

    subsets = []
    for i, s in enumerate(raw.get("subsets") or []):
        subsets.append(SubsetRule(str(_require(s, "name", f"subsets[{i}]")), s.get("lo"), s.get("hi")))

    return RunConfig(
        dataset=ds,
        models=models,
        preprocess=normalize_scheme(raw.get("preprocess", "center")),
        seed=int(raw.get("seed", 0)),
        output_dir=base / str(raw.get("output_dir", "out")),
        cv=cv_default,
        nullspace=requests,
        subsets=subsets,
        snr=dict(raw.get("snr") or {}),
        base_dir=base,
    )


def load_config(path) -> RunConfig:
    path = Path(path)
    try:
        raw = yaml.safe_load(path.read_text())
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except yaml.YAMLError as exc:
        raise ConfigError(f"invalid YAML in {path}: {exc}") from None
    return parse_config(raw, path.parent)
