"""Experiment presets, the seeded multi-trial runner, and output files."""
from __future__ import annotations

import json
import platform
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields, replace
from functools import partial
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from . import __version__
from .codebook import Codebook, build_codebook
from .memory import ModelSpec
from .metrics import (CURVE_FIELDS, SUMMARY_FIELDS, AggregateResult, TrialTrace, aggregate,
                      read_csv, write_curves_csv, write_summary_csv)
from .sim import STREAMS, EnvConfig, derive_seed, run_trial, write_eventlog_csv

PRESETS = ("exp1", "exp2", "exp3")


def default_roster(gammas: Iterable[float] = (1.0, 0.95)) -> list[ModelSpec]:
    """naive, then temporal(g) (for g < 1) and srmu(g) for each g in order."""
    roster = [ModelSpec("naive")]
    for g in gammas:
        if g < 1.0:
            roster.append(ModelSpec("temporal", g))
        roster.append(ModelSpec("srmu", g))
    return roster


@dataclass
class ExperimentSpec:
    name: str
    env: EnvConfig
    models: list[ModelSpec] = field(default_factory=default_roster)
    trials: int = 1000
    dim: int = 256
    master_seed: int = 0
    shared_codebook: bool = False
    final_window: int = 1

    def __post_init__(self):
        if not self.models:
            raise ValueError("model roster is empty")
        if self.trials < 1:
            raise ValueError(f"trials must be >= 1, got {self.trials}")
        if self.dim < 1:
            raise ValueError(f"dim must be >= 1, got {self.dim}")
        if not 1 <= self.final_window <= self.env.T:
            raise ValueError(f"final_window must lie in [1, T={self.env.T}]")

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "env": self.env.to_dict(),
            "models": [[m.kind, m.gamma] for m in self.models],
            "trials": self.trials,
            "dim": self.dim,
            "master_seed": self.master_seed,
            "shared_codebook": self.shared_codebook,
            "final_window": self.final_window,
        }


def preset(name: str) -> ExperimentSpec:
    if name == "exp1":
        env = EnvConfig(sampling="partitioned", p_drift=0.0, p_jump=0.0)
    elif name == "exp2":
        env = EnvConfig(sampling="uniform", p_drift=0.01, p_jump=0.0)
    elif name == "exp3":
        env = EnvConfig(sampling="partitioned", p_drift=0.01, p_jump=0.001)
    else:
        raise ValueError(f"unknown preset {name!r}; expected one of {PRESETS}")
    return ExperimentSpec(name, env)


# ---------------------------------------------------------------- config

def load_config(path: str | Path) -> dict:
    path = Path(path)
    if path.suffix.lower() == ".toml":
        try:
            import tomllib
        except ModuleNotFoundError:  # python < 3.11
            import tomli as tomllib
        with open(path, "rb") as fh:
            return tomllib.load(fh)
    return json.loads(path.read_text())


_ENV_FIELDS = {f.name for f in fields(EnvConfig)}
_SPEC_KEYS = {"experiment", "name", "env", "models", "gamma_list", "trials", "dim",
              "master_seed", "shared_codebook", "final_window"}


def resolve_spec(config: dict | None = None, **overrides) -> ExperimentSpec:
    """Preset <- config file <- explicit overrides (``None`` values are skipped).

    Recognised overrides: experiment, trials, steps, dim, gamma_list, seed,
    shared_codebook, final_window.
    """
    config = dict(config or {})
    unknown = set(config) - _SPEC_KEYS
    if unknown:
        raise ValueError(f"unknown config keys: {sorted(unknown)}")
    env_over = dict(config.get("env", {}))
    bad_env = set(env_over) - _ENV_FIELDS
    if bad_env:
        raise ValueError(f"unknown env keys: {sorted(bad_env)}")

    name = overrides.get("experiment") or config.get("experiment") or config.get("name")
    if name in PRESETS:
        base = preset(name)
    else:
        base = ExperimentSpec(name or "custom", EnvConfig())
    env = replace(base.env, **env_over)
    if overrides.get("steps") is not None:
        env = replace(env, T=int(overrides["steps"]))

    models = base.models
    if "models" in config:
        models = [ModelSpec(str(k), float(g)) for k, g in config["models"]]
    if "gamma_list" in config:
        models = default_roster(float(g) for g in config["gamma_list"])
    if overrides.get("gamma_list") is not None:
        models = default_roster(overrides["gamma_list"])

    def pick(key, cfg_key=None, default=None):
        if overrides.get(key) is not None:
            return overrides[key]
        return config.get(cfg_key or key, default)

    return ExperimentSpec(
        name=name or base.name,
        env=env,
        models=models,
        trials=int(pick("trials", default=base.trials)),
        dim=int(pick("dim", default=base.dim)),
        master_seed=int(pick("seed", "master_seed", base.master_seed)),
        shared_codebook=bool(pick("shared_codebook", default=base.shared_codebook)),
        final_window=int(pick("final_window", default=base.final_window)),
    )


# ---------------------------------------------------------------- running

def trial_seed(master_seed: int, index: int) -> int:
    return derive_seed(master_seed, index)


def shared_codebook(spec: ExperimentSpec) -> Codebook:
    return build_codebook(spec.env.K, spec.env.S, spec.dim,
                          derive_seed(spec.master_seed, STREAMS["codebook"]))


def run_single_trial(spec: ExperimentSpec, index: int, record_events: bool = False) -> TrialTrace:
    """Replay trial ``index`` of ``spec`` in isolation."""
    cb = shared_codebook(spec) if spec.shared_codebook else None
    return run_trial(spec.env, spec.models, spec.dim, trial_seed(spec.master_seed, index),
                     codebook=cb, record_events=record_events)


def _run_index(spec: ExperimentSpec, codebook: Codebook | None, record: frozenset, index: int):
    return run_trial(spec.env, spec.models, spec.dim, trial_seed(spec.master_seed, index),
                     codebook=codebook, record_events=index in record)


def run_trials(spec: ExperimentSpec, workers: int = 1,
               eventlog_trials: Sequence[int] = ()) -> list[TrialTrace]:
    cb = shared_codebook(spec) if spec.shared_codebook else None
    job = partial(_run_index, spec, cb, frozenset(eventlog_trials))
    if workers <= 1:
        return [job(i) for i in range(spec.trials)]
    chunk = max(1, spec.trials // (4 * workers))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(job, range(spec.trials), chunksize=chunk))


def run_experiment(spec: ExperimentSpec, workers: int = 1, out_dir: str | Path | None = None,
                   eventlog_trials: Sequence[int] = ()) -> AggregateResult:
    """Run all trials, aggregate in trial order, and optionally write outputs.

    The result does not depend on ``workers``: every trial is seeded from
    ``(master_seed, index)`` and the reduction order is fixed.
    """
    for i in eventlog_trials:
        if not 0 <= i < spec.trials:
            raise ValueError(f"event-log trial {i} outside [0, {spec.trials})")
    traces = run_trials(spec, workers, eventlog_trials)
    agg = aggregate(traces, spec.final_window)
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        write_outputs(out, spec, agg)
        for i in eventlog_trials:
            write_eventlog_csv(out / f"eventlog_{spec.name}_{i}.csv", traces[i].events)
        validate_outputs(out, spec)
    return agg


def manifest(spec: ExperimentSpec) -> dict:
    return {
        "spec": spec.to_dict(),
        "trial_seeds": [trial_seed(spec.master_seed, i) for i in range(spec.trials)],
        "shared_codebook_seed": (derive_seed(spec.master_seed, STREAMS["codebook"])
                                 if spec.shared_codebook else None),
        "versions": {"srmu": __version__, "numpy": np.__version__,
                     "python": platform.python_version()},
        "argv": sys.argv,
    }


def write_outputs(out: Path, spec: ExperimentSpec, agg: AggregateResult) -> None:
    write_curves_csv(out / f"curves_{spec.name}.csv", spec.name, agg)
    write_summary_csv(out / f"summary_{spec.name}.csv", spec.name, agg)
    (out / "run_manifest.json").write_text(json.dumps(manifest(spec), indent=2))


def validate_outputs(out: str | Path, spec: ExperimentSpec) -> None:
    """Self-check: headers and row counts of the written CSVs."""
    out = Path(out)
    n = len(spec.models)
    for fname, header, rows in ((f"curves_{spec.name}.csv", CURVE_FIELDS, n * spec.env.T),
                                (f"summary_{spec.name}.csv", SUMMARY_FIELDS, n)):
        data = read_csv(out / fname)
        if not data or tuple(data[0].keys()) != header:
            raise RuntimeError(f"{fname}: unexpected header")
        if len(data) != rows:
            raise RuntimeError(f"{fname}: expected {rows} rows, found {len(data)}")


def format_summary(spec: ExperimentSpec, agg: AggregateResult) -> str:
    lines = [f"{spec.name}: {agg.trial_count} trials, T={spec.env.T}, D={spec.dim}",
             f"{'model':<22}{'cosine':>10}{'+-se':>9}{'magnitude':>12}{'+-se':>9}"]
    for i, label in enumerate(agg.labels):
        lines.append(f"{label:<22}{agg.final_cosine[i]:>10.3f}{agg.se_cosine[i]:>9.4f}"
                     f"{agg.final_magnitude[i]:>12.2f}{agg.se_magnitude[i]:>9.2f}")
    return "\n".join(lines)
