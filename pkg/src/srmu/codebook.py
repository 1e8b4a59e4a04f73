"""Seeded key/value codebooks for devices and ordinal states."""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .fhrr import Hypervector, cosine_sim, random_phasor, unbind

MAX_COSINE = 0.25
MAX_RETRIES = 100


class CodebookError(RuntimeError):
    pass


@dataclass(frozen=True, eq=False)
class Codebook:
    device_keys: np.ndarray  # (K, D)
    state_values: np.ndarray  # (S, D)
    seed: int

    @property
    def dim(self) -> int:
        return self.device_keys.shape[1]

    @property
    def n_devices(self) -> int:
        return self.device_keys.shape[0]

    @property
    def n_states(self) -> int:
        return self.state_values.shape[0]

    def to_json(self) -> dict:
        return {
            "seed": self.seed,
            "K": self.n_devices,
            "S": self.n_states,
            "dim": self.dim,
            "device_keys": _pairs(self.device_keys),
            "state_values": _pairs(self.state_values),
        }

    @classmethod
    def from_json(cls, data: dict) -> "Codebook":
        return cls(_unpairs(data["device_keys"]), _unpairs(data["state_values"]), int(data["seed"]))

    def dump(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_json()))

    @classmethod
    def load(cls, path: str | Path) -> "Codebook":
        return cls.from_json(json.loads(Path(path).read_text()))


def _pairs(a: np.ndarray) -> list:
    return np.stack([a.real, a.imag], axis=-1).tolist()


def _unpairs(data) -> np.ndarray:
    arr = np.asarray(data, dtype=np.float64)
    return arr[..., 0] + 1j * arr[..., 1]


def build_codebook(K: int, S: int, dim: int, seed: int,
                   max_cosine: float = MAX_COSINE, max_retries: int = MAX_RETRIES) -> Codebook:
    """Draw K device keys then S state values from one seeded stream.

    Any vector whose cosine with an already-accepted vector reaches
    ``max_cosine`` is redrawn, at most ``max_retries`` times per vector.
    """
    if K < 1 or S < 2 or dim < 1:
        raise ValueError(f"need K >= 1, S >= 2, dim >= 1 (got K={K}, S={S}, dim={dim})")
    rng = np.random.default_rng(seed)
    accepted: list[Hypervector] = []
    for _ in range(K + S):
        for _attempt in range(max_retries + 1):
            cand = random_phasor(dim, rng)
            if all(cosine_sim(cand, other) < max_cosine for other in accepted):
                accepted.append(cand)
                break
        else:
            raise CodebookError(
                f"could not draw {K + S} vectors with pairwise cosine < {max_cosine} at dim={dim}")
    vecs = np.array(accepted)
    return Codebook(vecs[:K], vecs[K:], seed)


def ground_truth_memory(cb: Codebook, states) -> Hypervector:
    """Unnormalized bundle of ``bind(key_i, value[state_i])`` over all devices."""
    states = np.asarray(states, dtype=np.int64)
    if states.shape != (cb.n_devices,):
        raise ValueError(f"expected {cb.n_devices} states, got shape {states.shape}")
    if states.min() < 0 or states.max() >= cb.n_states:
        raise IndexError(f"state index out of range [0, {cb.n_states - 1}]: {states.tolist()}")
    return (cb.device_keys * cb.state_values[states]).sum(axis=0)


def cleanup_state(cb: Codebook, noisy_value: Hypervector) -> tuple[int, float]:
    sims = [cosine_sim(noisy_value, v) for v in cb.state_values]
    best = int(np.argmax(sims))  # first maximum -> lowest index on ties
    return best, sims[best]


def decode_device(cb: Codebook, memory: Hypervector, device: int) -> tuple[int, float]:
    return cleanup_state(cb, unbind(memory, cb.device_keys[device]))
