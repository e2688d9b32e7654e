"""Failure-directed search with multi-armed-bandit choice selection."""

from .bandit import Policy, StrategyConfig
from .engine import EngineConfig, FDSSolver, Limits, SolveResult, Status, solve
from .instances import build_model, load_instance, parse_jssp, parse_psplib
from .model import Model, ModelError

__all__ = [
    "EngineConfig", "FDSSolver", "Limits", "Model", "ModelError", "Policy",
    "SolveResult", "Status", "StrategyConfig", "build_model", "load_instance",
    "parse_jssp", "parse_psplib", "solve",
]
