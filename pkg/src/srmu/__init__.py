"""Streaming FHRR memories with relevance-gated (SRMU) updates."""
__version__ = "0.1.0"

from .fhrr import (DimensionMismatchError, ZeroNormError, bind, bundle, cosine_sim, l2_norm,
                   random_phasor, scale, unbind)
from .codebook import Codebook, build_codebook, cleanup_state, ground_truth_memory
from .memory import MemoryBank, MemoryModel, ModelSpec, update_step
from .metrics import AggregateResult, TrialTrace, aggregate, step_metrics
from .sim import EnvConfig, EnvState, Observation, build_sampler, observe, run_trial, step_dynamics
