"""Finite-key rate calculator and parameter optimizer for asynchronous
MDI-QKD with advantage distillation post-processing.
"""
from ._kernels import IMPL as KERNEL_IMPL
from .config import (
    ConfigError,
    DetectorParams,
    EpsilonBudget,
    ExperimentConfig,
    FiberParams,
    NoiseParams,
    SourceParams,
)

__version__ = "0.1.0"

__all__ = [
    "KERNEL_IMPL",
    "ConfigError",
    "DetectorParams",
    "EpsilonBudget",
    "ExperimentConfig",
    "FiberParams",
    "NoiseParams",
    "SourceParams",
    "__version__",
]
