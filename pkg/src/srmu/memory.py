"""Sequential memory update policies: naive bundling, temporal decay, SRMU.

All three are special cases of one step::

    decayed = gamma * M
    v_hat   = unbind(decayed, k)
    s       = cos(v_hat, v)  (0 if either norm is zero)
    w       = 1 - s          (forced to 1 for ungated policies)
    M'      = decayed + w * bind(k, v)

with naive = (gamma=1, ungated), temporal = (gamma, ungated),
srmu = (gamma, gated).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .fhrr import NORM_EPS, Hypervector, _check_dims, norms, unbind, zeros

KINDS = ("naive", "temporal", "srmu")


def _check_gamma(gamma: float) -> None:
    if not (0.0 < gamma <= 1.0):
        raise ValueError(f"gamma must lie in (0, 1], got {gamma}")


def update_step(state: np.ndarray, key: Hypervector, value: Hypervector,
                gamma=1.0, gated=True) -> tuple[np.ndarray, np.ndarray]:
    """Pure single update. Returns ``(new_state, weight)``.

    ``state`` may be one memory of shape (D,) or a stack of memories of shape
    (n, D); ``gamma`` and ``gated`` then broadcast per row.
    """
    _check_dims(state, key)
    _check_dims(state, value)
    gamma = np.asarray(gamma, dtype=np.float64)
    decayed = state * gamma[..., np.newaxis]
    v_hat = decayed * np.conj(key)
    n_hat = norms(v_hat)
    n_val = norms(value)
    ok = (n_hat > NORM_EPS) & (n_val > NORM_EPS)
    inner = np.abs(v_hat @ np.conj(value))
    s = np.where(ok, inner / np.where(ok, n_hat * n_val, 1.0), 0.0)
    # rounding can push s a few ulps above 1
    w = np.where(gated, np.minimum(np.maximum(1.0 - s, 0.0), 1.0), 1.0)
    return decayed + w[..., np.newaxis] * (key * value), w


@dataclass(frozen=True)
class ModelSpec:
    kind: str
    gamma: float = 1.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown memory kind {self.kind!r}; expected one of {KINDS}")
        _check_gamma(self.gamma)
        if self.kind == "naive" and self.gamma != 1.0:
            object.__setattr__(self, "gamma", 1.0)

    @property
    def gated(self) -> bool:
        return self.kind == "srmu"

    @property
    def label(self) -> str:
        if self.kind == "naive":
            return "naive"
        return f"{self.kind}(gamma={self.gamma:g})"


@dataclass
class MemoryModel:
    """One stateful memory. ``naive`` ignores ``gamma`` (fixed at 1.0)."""

    kind: str
    gamma: float
    dim: int
    state: np.ndarray = field(default=None, repr=False)
    update_count: int = 0
    last_weight: float = 1.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown memory kind {self.kind!r}")
        _check_gamma(self.gamma)
        if self.dim < 1:
            raise ValueError(f"dim must be >= 1, got {self.dim}")
        if self.kind == "naive":
            self.gamma = 1.0
        if self.state is None:
            self.state = zeros(self.dim)
        elif self.state.shape != (self.dim,):
            raise ValueError(f"state shape {self.state.shape} does not match dim {self.dim}")

    @classmethod
    def from_spec(cls, spec: ModelSpec, dim: int) -> "MemoryModel":
        return cls(spec.kind, spec.gamma, dim)

    def _apply(self, k, v, gamma, gated):
        self.state, w = update_step(self.state, k, v, gamma, gated)
        self.update_count += 1
        self.last_weight = float(w)
        return self.last_weight

    def update_naive(self, k: Hypervector, v: Hypervector) -> None:
        self._apply(k, v, 1.0, False)

    def update_temporal(self, k: Hypervector, v: Hypervector) -> None:
        self._apply(k, v, self.gamma, False)

    def update_srmu(self, k: Hypervector, v: Hypervector, force_ungated: bool = False) -> float:
        """Relevance-gated update; returns the applied weight ``w``.

        ``force_ungated`` pins ``w = 1`` (reduces SRMU to temporal decay).
        """
        return self._apply(k, v, self.gamma, not force_ungated)

    def update(self, k: Hypervector, v: Hypervector) -> float:
        if self.kind == "naive":
            self.update_naive(k, v)
        elif self.kind == "temporal":
            self.update_temporal(k, v)
        else:
            return self.update_srmu(k, v)
        return self.last_weight

    def read(self, k: Hypervector) -> Hypervector:
        return unbind(self.state, k)

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "gamma": self.gamma,
            "dim": self.dim,
            "update_count": self.update_count,
            "last_weight": self.last_weight,
            "state": np.stack([self.state.real, self.state.imag], axis=-1).tolist(),
        }

    @classmethod
    def from_json(cls, data: dict) -> "MemoryModel":
        pairs = np.asarray(data["state"], dtype=np.float64)
        return cls(data["kind"], float(data["gamma"]), int(data["dim"]),
                   state=pairs[:, 0] + 1j * pairs[:, 1],
                   update_count=int(data["update_count"]),
                   last_weight=float(data["last_weight"]))


class MemoryBank:
    """Several memories updated in lockstep as one (n_models, D) array."""

    def __init__(self, specs: Sequence[ModelSpec], dim: int):
        if not specs:
            raise ValueError("need at least one model spec")
        self.specs = list(specs)
        self.dim = dim
        self.gammas = np.array([s.gamma for s in self.specs])
        self.gated = np.array([s.gated for s in self.specs])
        self.states = np.zeros((len(self.specs), dim), dtype=np.complex128)
        self.last_weights = np.ones(len(self.specs))
        self.update_count = 0

    def update(self, k: Hypervector, v: Hypervector) -> np.ndarray:
        self.states, self.last_weights = update_step(self.states, k, v, self.gammas, self.gated)
        self.update_count += 1
        return self.last_weights

    def models(self) -> list[MemoryModel]:
        return [MemoryModel(s.kind, s.gamma, self.dim, state=self.states[i].copy(),
                            update_count=self.update_count,
                            last_weight=float(self.last_weights[i]))
                for i, s in enumerate(self.specs)]
