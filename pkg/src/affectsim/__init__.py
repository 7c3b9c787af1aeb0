"""Emotion-code propagation on weighted complex networks."""

from .config import ConfigError, SimConfig, load_config, load_preset
from .emotion import EmotionCode, MutationParams, code_with_etv, crossover, etv, mutate
from .engine import AgentState, SimulationTrace, run, seed_initial, step
from .kernels import BACKEND

__version__ = "0.1.0"

__all__ = [
    "AgentState",
    "BACKEND",
    "ConfigError",
    "EmotionCode",
    "MutationParams",
    "SimConfig",
    "SimulationTrace",
    "code_with_etv",
    "crossover",
    "etv",
    "load_config",
    "load_preset",
    "mutate",
    "run",
    "seed_initial",
    "step",
]
