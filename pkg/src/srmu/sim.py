"""Synthetic device-health environment and the per-trial streaming loop."""
from __future__ import annotations

import csv
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .codebook import Codebook, build_codebook, ground_truth_memory
from .memory import MemoryBank, ModelSpec
from .metrics import TrialTrace, step_metrics

NO_EVENT, DRIFT, JUMP = 0, 1, 2
STREAMS = {"dynamics": 0, "sampling": 1, "noise": 2, "codebook": 3}
SAMPLING_MODES = ("uniform", "partitioned")


def derive_seed(*path: int) -> int:
    """Deterministic 64-bit seed from an integer path, e.g. (master, trial)."""
    return int(np.random.SeedSequence([int(p) for p in path]).generate_state(1, np.uint64)[0])


def substream(seed: int, name: str) -> np.random.Generator:
    return np.random.default_rng(derive_seed(seed, STREAMS[name]))


@dataclass
class EnvConfig:
    K: int = 5
    S: int = 5
    p_drift: float = 0.0
    p_jump: float = 0.0
    noise_prob: float = 0.05
    sampling: str = "uniform"
    # per-device weights for (frequent, medium, sparse) groups, normalized later
    partition_weights: tuple[float, float, float] = (0.60, 0.15, 0.05)
    group_sizes: tuple[int, int, int] = (1, 2, 2)
    T: int = 500
    seed: int = 0
    jump_excludes_current: bool = False

    def __post_init__(self):
        self.partition_weights = tuple(float(w) for w in self.partition_weights)
        self.group_sizes = tuple(int(g) for g in self.group_sizes)
        self.validate()

    def validate(self) -> None:
        if self.K < 1 or self.S < 2:
            raise ValueError(f"need K >= 1 and S >= 2 (K={self.K}, S={self.S})")
        for name in ("p_drift", "p_jump", "noise_prob"):
            p = getattr(self, name)
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {p}")
        if self.p_drift + self.p_jump > 1.0:
            raise ValueError("p_drift + p_jump must not exceed 1")
        if self.sampling not in SAMPLING_MODES:
            raise ValueError(f"sampling must be one of {SAMPLING_MODES}, got {self.sampling!r}")
        if self.T < self.K:
            raise ValueError(f"T={self.T} is smaller than K={self.K}")
        if self.sampling == "partitioned":
            if len(self.group_sizes) != len(self.partition_weights):
                raise ValueError("group_sizes and partition_weights differ in length")
            if sum(self.group_sizes) != self.K or min(self.group_sizes) < 0:
                raise ValueError(f"group_sizes {self.group_sizes} must be nonnegative and sum to K={self.K}")
            if min(self.partition_weights) < 0 or self.device_weights().sum() <= 0:
                raise ValueError("partition_weights must be nonnegative with positive total")

    def device_weights(self) -> np.ndarray:
        """Unnormalized per-device weights; devices fill groups in index order."""
        return np.repeat(np.asarray(self.partition_weights), self.group_sizes)

    def device_probs(self) -> np.ndarray:
        if self.sampling == "uniform":
            return np.full(self.K, 1.0 / self.K)
        w = self.device_weights()
        return w / w.sum()

    def to_dict(self) -> dict:
        d = asdict(self)
        d["partition_weights"] = list(self.partition_weights)
        d["group_sizes"] = list(self.group_sizes)
        return d


@dataclass
class EnvState:
    states: np.ndarray
    step: int = 0
    events: np.ndarray = field(default=None, repr=False)  # per-device NO_EVENT/DRIFT/JUMP of the last step


@dataclass(frozen=True)
class Observation:
    device: int
    observed_state: int
    true_state: int
    step: int
    corrupted: bool = False


def initial_state(cfg: EnvConfig, rng: np.random.Generator) -> EnvState:
    states = rng.integers(0, cfg.S, size=cfg.K)
    return EnvState(states, 0, np.zeros(cfg.K, dtype=np.int8))


def step_dynamics(env: EnvState, cfg: EnvConfig, rng: np.random.Generator) -> EnvState:
    """Advance every device once: jump with p_jump, else drift +-1 with p_drift.

    One uniform draw per device decides the (mutually exclusive) event; jump
    targets and drift signs are drawn only for devices that need them.
    """
    u = rng.random(cfg.K)
    jump = u < cfg.p_jump
    drift = ~jump & (u < cfg.p_jump + cfg.p_drift)
    states = env.states.copy()
    events = np.zeros(cfg.K, dtype=np.int8)
    n_jump = int(jump.sum())
    if n_jump:
        if cfg.jump_excludes_current:
            target = rng.integers(0, cfg.S - 1, size=n_jump)
            target += target >= states[jump]
        else:
            target = rng.integers(0, cfg.S, size=n_jump)
        states[jump] = target
        events[jump] = JUMP
    n_drift = int(drift.sum())
    if n_drift:
        sign = 2 * rng.integers(0, 2, size=n_drift) - 1
        states[drift] = np.clip(states[drift] + sign, 0, cfg.S - 1)
        events[drift] = DRIFT
    return EnvState(states, env.step + 1, events)


def build_sampler(cfg: EnvConfig, rng: np.random.Generator) -> np.ndarray:
    """Length-T device schedule.

    Partitioned schedules open with a random permutation of all devices so
    each is observed at least once; the remaining slots are i.i.d. draws.
    """
    if cfg.T < cfg.K:
        raise ValueError(f"T={cfg.T} is smaller than K={cfg.K}")
    if cfg.sampling == "uniform":
        return rng.integers(0, cfg.K, size=cfg.T)
    head = rng.permutation(cfg.K)
    tail = rng.choice(cfg.K, size=cfg.T - cfg.K, p=cfg.device_probs())
    return np.concatenate([head, tail])


def observe(env: EnvState, device: int, cfg: EnvConfig, rng: np.random.Generator) -> Observation:
    true_state = int(env.states[device])
    observed = true_state
    corrupted = bool(rng.random() < cfg.noise_prob)
    if corrupted:
        sign = 1 if rng.random() < 0.5 else -1
        observed = min(max(true_state + sign, 0), cfg.S - 1)
    return Observation(int(device), observed, true_state, env.step, corrupted)


def run_trial(cfg: EnvConfig, models: Sequence[ModelSpec], dim: int = 256,
              seed: int | None = None, codebook: Codebook | None = None,
              record_events: bool = False) -> TrialTrace:
    """Stream T observations into every model and record per-step metrics.

    All models see the same environment stream. Without an explicit
    ``codebook`` one is built from the trial's codebook substream.
    """
    seed = cfg.seed if seed is None else seed
    if codebook is None:
        codebook = build_codebook(cfg.K, cfg.S, dim, derive_seed(seed, STREAMS["codebook"]))
    if codebook.dim != dim or codebook.n_devices != cfg.K or codebook.n_states != cfg.S:
        raise ValueError("codebook shape does not match config/dim")
    dyn_rng, noise_rng = substream(seed, "dynamics"), substream(seed, "noise")
    schedule = build_sampler(cfg, substream(seed, "sampling"))

    bank = MemoryBank(models, dim)
    n = len(bank.specs)
    cosine = np.empty((n, cfg.T))
    magnitude = np.empty((n, cfg.T))
    weight = np.empty((n, cfg.T))
    events = [] if record_events else None
    keys, values = codebook.device_keys, codebook.state_values

    env = initial_state(cfg, dyn_rng)
    truth = ground_truth_memory(codebook, env.states)
    for t in range(cfg.T):
        env = step_dynamics(env, cfg, dyn_rng)
        if env.events.any():
            truth = ground_truth_memory(codebook, env.states)
        obs = observe(env, schedule[t], cfg, noise_rng)
        weight[:, t] = bank.update(keys[obs.device], values[obs.observed_state])
        cosine[:, t], magnitude[:, t] = step_metrics(bank.states, truth)
        if record_events:
            events.append(obs)
    return TrialTrace(seed=seed, specs=list(bank.specs), cosine=cosine, magnitude=magnitude,
                      weight=weight, final_states=bank.states.copy(),
                      final_true_states=env.states.copy(), events=events)


EVENTLOG_FIELDS = ("t", "device", "true_state", "observed_state", "corrupted")


def write_eventlog_csv(path: str | Path, events: Sequence[Observation]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(EVENTLOG_FIELDS)
        for e in events:
            w.writerow([e.step, e.device, e.true_state, e.observed_state, int(e.corrupted)])


def read_eventlog_csv(path: str | Path) -> list[Observation]:
    with open(path, newline="") as fh:
        return [Observation(int(r["device"]), int(r["observed_state"]), int(r["true_state"]),
                            int(r["t"]), bool(int(r["corrupted"])))
                for r in csv.DictReader(fh)]
