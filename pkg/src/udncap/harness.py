"""Experiment grid runner and result emitters."""
from __future__ import annotations

import csv
import json
import math
import time
from dataclasses import asdict, dataclass, field, fields, replace
from typing import TextIO

from .capacity import exact_estimator, replicate, summarize
from .channel import FadingParams
from .closed_form import closed_form_estimator, continuous_uniform_estimator
from .fise import fise_estimator
from .netgen import ScenarioConfig, ScenarioKind, Selector
from .rngkit import RngStream

ESTIMATORS = {
    "exact": exact_estimator,
    "fise": fise_estimator,
    "closed_form": closed_form_estimator,
    "continuous": continuous_uniform_estimator,
}
METHODS = (*ESTIMATORS, "auto")

CSV_HEADER = ["scenario", "beta", "cluster", "method", "capacity_mean", "capacity_std",
              "rel_err", "wall_time_s", "reps", "seed"]


class ConfigError(ValueError):
    def __init__(self, field_name: str, message: str):
        super().__init__(f"{field_name}: {message}")
        self.field = field_name


@dataclass
class ExperimentConfig:
    """One experiment grid.

    ``closed_form_anchor_beta`` enables the reuse protocol: the closed-form
    estimate is computed once at that ratio and reported for every beta > 1.
    ``timing`` records wall-clock seconds per row; it is off by default so
    that identical configs give byte-identical output.
    """

    scenario: ScenarioConfig
    fading: FadingParams = field(default_factory=FadingParams)
    beta_grid: list[float] = field(default_factory=lambda: [0.5])
    cluster_selector: Selector = Selector.CLOSEST
    methods: list[str] = field(default_factory=lambda: ["exact"])
    reps: int = 50
    seed: int = 0
    output_path: str | None = None
    closed_form_anchor_beta: float | None = None
    timing: bool = False

    def validate(self) -> None:
        if not isinstance(self.reps, int) or self.reps < 1:
            raise ConfigError("reps", f"must be an integer >= 1, got {self.reps!r}")
        if not self.beta_grid:
            raise ConfigError("beta_grid", "must be nonempty")
        if any(not (isinstance(b, (int, float)) and b > 0) for b in self.beta_grid):
            raise ConfigError("beta_grid", f"ratios must be positive, got {self.beta_grid}")
        if not self.methods:
            raise ConfigError("methods", "must be nonempty")
        bad = [m for m in self.methods if m not in METHODS]
        if bad:
            raise ConfigError("methods", f"unknown {bad}; choose from {list(METHODS)}")
        if not (isinstance(self.seed, int) and 0 <= self.seed < 2**64):
            raise ConfigError("seed", f"must be a 64-bit unsigned integer, got {self.seed!r}")
        try:
            Selector(self.cluster_selector)
        except ValueError:
            raise ConfigError("cluster_selector", f"unknown selector {self.cluster_selector!r}") from None
        if self.closed_form_anchor_beta is not None and not self.closed_form_anchor_beta > 1:
            raise ConfigError("closed_form_anchor_beta", "must be > 1")


@dataclass
class ResultRow:
    scenario: str
    beta: float
    cluster: str
    method: str
    capacity_mean: float
    capacity_std: float
    rel_err: float | None
    wall_time_s: float | None
    reps: int
    seed: int


def _resolve(method: str, beta: float) -> str:
    if method == "auto":
        return "fise" if beta <= 1 else "closed_form"
    return method


def run_experiment(cfg: ExperimentConfig, workers: int | None = None) -> list[ResultRow]:
    """Rows ordered by beta, then by the order of ``cfg.methods``.

    The replication streams for a given seed are shared across betas and
    methods, so method comparisons use common random numbers.
    """
    cfg.validate()
    which = Selector(cfg.cluster_selector)
    base = RngStream(cfg.seed, 0)
    cache: dict[tuple[float, str], tuple[float, float, float]] = {}

    def cell(beta: float, name: str) -> tuple[float, float, float]:
        key = (beta, name)
        if key not in cache:
            scen = cfg.scenario.with_beta(beta)
            t0 = time.perf_counter()
            ests = replicate(scen, which, cfg.fading, cfg.reps, base, ESTIMATORS[name], workers)
            elapsed = time.perf_counter() - t0
            cache[key] = (*summarize(e.value for e in ests), elapsed)
        return cache[key]

    rows = []
    want_exact = "exact" in cfg.methods
    for beta in cfg.beta_grid:
        exact_mean = cell(beta, "exact")[0] if want_exact else None
        for method in cfg.methods:
            name = _resolve(method, beta)
            src_beta = beta
            if name == "closed_form" and cfg.closed_form_anchor_beta is not None and beta > 1:
                src_beta = cfg.closed_form_anchor_beta
            mean, std, elapsed = cell(src_beta, name)
            rel = abs(mean - exact_mean) / exact_mean if want_exact else None
            rows.append(ResultRow(
                scenario=cfg.scenario.kind.value, beta=beta, cluster=which.value, method=name,
                capacity_mean=mean, capacity_std=std, rel_err=rel,
                wall_time_s=elapsed if cfg.timing else None, reps=cfg.reps, seed=cfg.seed))
    return rows


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return f"{v:.10g}"
    return str(v)


def _round(v):
    if isinstance(v, float) and math.isfinite(v):
        return float(f"{v:.10g}")
    return v


def write_results(rows: list[ResultRow], fh: TextIO, format: str = "csv") -> None:
    if format == "csv":
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for r in rows:
            w.writerow([_fmt(getattr(r, k)) for k in CSV_HEADER])
    elif format == "json":
        json.dump([{k: _round(getattr(r, k)) for k in CSV_HEADER} for r in rows], fh, indent=2)
        fh.write("\n")
    else:
        raise ValueError(f"unknown format {format!r}")


def emit_results(rows: list[ResultRow], path: str, format: str = "csv") -> None:
    if format not in ("csv", "json"):
        raise ValueError(f"unknown format {format!r}")
    with open(path, "w", newline="") as fh:
        write_results(rows, fh, format)


def read_csv(path: str) -> list[dict]:
    """Parse an emitted CSV back into typed dicts (empty cells become None)."""
    conv = {"beta": float, "capacity_mean": float, "capacity_std": float, "rel_err": float,
            "wall_time_s": float, "reps": int, "seed": int}
    out = []
    with open(path, newline="") as fh:
        for rec in csv.DictReader(fh):
            out.append({k: (None if v == "" else conv.get(k, str)(v)) for k, v in rec.items()})
    return out


# Config documents: {"scenario": {...}, "fading": {...}, "beta_grid": [...], ...}
# with field names matching the dataclasses above.

def config_from_dict(doc: dict) -> ExperimentConfig:
    doc = dict(doc)
    try:
        scen = doc.pop("scenario")
    except KeyError:
        raise ConfigError("scenario", "missing") from None
    scen = dict(scen)
    if "expected_bs" in scen:
        # S1 convenience: lambda_b = expected_bs / (pi D^2)
        scen["lambda_b"] = scen.pop("expected_bs") / (math.pi * scen.get("D", 1000.0) ** 2)
    known = {f.name for f in fields(ScenarioConfig)}
    extra = set(scen) - known
    if extra:
        raise ConfigError("scenario", f"unknown fields {sorted(extra)}")
    try:
        scenario = ScenarioConfig(**scen)
    except (TypeError, ValueError) as exc:
        raise ConfigError("scenario", str(exc)) from None
    try:
        fading = FadingParams(**doc.pop("fading", {}))
    except (TypeError, ValueError) as exc:
        raise ConfigError("fading", str(exc)) from None
    known = {f.name for f in fields(ExperimentConfig)}
    extra = set(doc) - known
    if extra:
        raise ConfigError(sorted(extra)[0], "unknown field")
    cfg = ExperimentConfig(scenario=scenario, fading=fading, **doc)
    cfg.validate()
    return cfg


def config_to_dict(cfg: ExperimentConfig) -> dict:
    d = asdict(cfg)
    d["scenario"]["kind"] = cfg.scenario.kind.value
    d["fading"]["log_base"] = cfg.fading.log_base.value
    d["cluster_selector"] = Selector(cfg.cluster_selector).value
    return d


def load_config(path: str) -> ExperimentConfig:
    with open(path) as fh:
        return config_from_dict(json.load(fh))


def override(cfg: ExperimentConfig, **kw) -> ExperimentConfig:
    """Apply CLI-style overrides; ``scenario`` may be a ScenarioKind value."""
    kw = {k: v for k, v in kw.items() if v is not None}
    scen = kw.pop("scenario", None)
    if scen is not None and ScenarioKind(scen) is not cfg.scenario.kind:
        raise ConfigError("scenario", f"config describes {cfg.scenario.kind.value}; "
                                      f"cannot switch kind to {scen} without its fields")
    new = replace(cfg, **kw)
    new.validate()
    return new
