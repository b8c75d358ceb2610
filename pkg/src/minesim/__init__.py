"""Discrete-event simulation of proof-of-work mining with any number of
concurrently operating selfish miners, plus the sweep and analysis
pipeline for power thresholds, equilibrium ranges, and safety levels."""

from .chain import Block, BlockTree, DuplicateId, UnknownBlock, UnknownParent
from .engine import (
    CONCURRENT,
    CONVENTIONAL,
    InvalidPowerConfiguration,
    PowerConfiguration,
    RunConfig,
    RunOutcome,
    run,
)
from .strategies import HonestStrategy, ParentMismatch, PublishAction, SelfishStrategy

__version__ = "0.1.0"

__all__ = [
    "Block",
    "BlockTree",
    "CONCURRENT",
    "CONVENTIONAL",
    "DuplicateId",
    "HonestStrategy",
    "InvalidPowerConfiguration",
    "ParentMismatch",
    "PowerConfiguration",
    "PublishAction",
    "RunConfig",
    "RunOutcome",
    "SelfishStrategy",
    "UnknownBlock",
    "UnknownParent",
    "run",
    "__version__",
]
