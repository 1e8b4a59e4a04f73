"""Per-step metrics, trial traces, cross-trial aggregation, CSV output."""
from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .fhrr import NORM_EPS, norms
from .memory import ModelSpec


def step_metrics(model_state: np.ndarray, truth: np.ndarray):
    """Cosine to ground truth and L2 magnitude of one memory or a (n, D) stack.

    The cosine of an all-zero memory is reported as 0.
    """
    t_norm = norms(truth)
    assert t_norm > NORM_EPS, "ground-truth memory has zero norm"
    mag = norms(model_state)
    inner = np.abs(model_state @ np.conj(truth))
    ok = mag > NORM_EPS
    cos = np.where(ok, inner / (np.where(ok, mag, 1.0) * t_norm), 0.0)
    if np.ndim(cos) == 0:
        return float(cos), float(mag)
    return cos, mag


@dataclass
class TrialTrace:
    seed: int
    specs: list[ModelSpec]
    cosine: np.ndarray  # (n_models, T)
    magnitude: np.ndarray  # (n_models, T)
    weight: np.ndarray  # (n_models, T); ungated models record 1.0
    final_states: np.ndarray | None = field(default=None, repr=False)
    final_true_states: np.ndarray | None = field(default=None, repr=False)
    events: list | None = field(default=None, repr=False)

    @property
    def labels(self) -> list[str]:
        return [s.label for s in self.specs]

    @property
    def T(self) -> int:
        return self.cosine.shape[1]

    def series(self, label: str) -> dict[str, np.ndarray]:
        i = self.labels.index(label)
        return {"cosine": self.cosine[i], "magnitude": self.magnitude[i], "weight": self.weight[i]}


@dataclass
class AggregateResult:
    specs: list[ModelSpec]
    mean_cosine: np.ndarray  # (n_models, T)
    mean_magnitude: np.ndarray
    final_cosine: np.ndarray  # (n_models,)
    final_magnitude: np.ndarray
    se_cosine: np.ndarray
    se_magnitude: np.ndarray
    trial_count: int
    window: int = 1

    @property
    def labels(self) -> list[str]:
        return [s.label for s in self.specs]

    def final(self, label: str) -> dict[str, float]:
        i = self.labels.index(label)
        return {"cosine": float(self.final_cosine[i]), "se_cosine": float(self.se_cosine[i]),
                "magnitude": float(self.final_magnitude[i]), "se_magnitude": float(self.se_magnitude[i])}


def _final_stats(stack: np.ndarray, window: int):
    per_trial = stack[:, :, -window:].mean(axis=2)
    n = per_trial.shape[0]
    se = per_trial.std(axis=0, ddof=1) / np.sqrt(n) if n > 1 else np.zeros(per_trial.shape[1])
    return per_trial.mean(axis=0), se


def aggregate(traces: Sequence[TrialTrace], window: int = 1) -> AggregateResult:
    """Pointwise mean over trials; final values average the last ``window`` steps.

    Traces are reduced in the order given, so a fixed trial order gives a
    bitwise-reproducible result.
    """
    if not traces:
        raise ValueError("cannot aggregate an empty list of traces")
    first = traces[0]
    for tr in traces[1:]:
        if tr.specs != first.specs or tr.cosine.shape != first.cosine.shape:
            raise ValueError("traces differ in model roster or length")
    if not 1 <= window <= first.T:
        raise ValueError(f"window must lie in [1, {first.T}], got {window}")
    cos = np.stack([tr.cosine for tr in traces])
    mag = np.stack([tr.magnitude for tr in traces])
    final_cos, se_cos = _final_stats(cos, window)
    final_mag, se_mag = _final_stats(mag, window)
    return AggregateResult(list(first.specs), cos.mean(axis=0), mag.mean(axis=0),
                           final_cos, final_mag, se_cos, se_mag, len(traces), window)


CURVE_FIELDS = ("experiment", "model", "gamma", "trial_count", "step", "mean_cosine", "mean_magnitude")
SUMMARY_FIELDS = ("experiment", "model", "gamma", "trial_count", "window",
                  "cosine", "cosine_se", "magnitude", "magnitude_se")


def write_curves_csv(path: str | Path, experiment: str, agg: AggregateResult) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(CURVE_FIELDS)
        for i, spec in enumerate(agg.specs):
            for t in range(agg.mean_cosine.shape[1]):
                w.writerow([experiment, spec.kind, repr(spec.gamma), agg.trial_count, t + 1,
                            repr(float(agg.mean_cosine[i, t])), repr(float(agg.mean_magnitude[i, t]))])


def write_summary_csv(path: str | Path, experiment: str, agg: AggregateResult) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(SUMMARY_FIELDS)
        for i, spec in enumerate(agg.specs):
            w.writerow([experiment, spec.kind, repr(spec.gamma), agg.trial_count, agg.window,
                        repr(float(agg.final_cosine[i])), repr(float(agg.se_cosine[i])),
                        repr(float(agg.final_magnitude[i])), repr(float(agg.se_magnitude[i]))])


def read_csv(path: str | Path) -> list[dict]:
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))
