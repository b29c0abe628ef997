"""Deterministic evolution strategies with an ask/evaluate/tell interface."""

from . import random
from .core import (
    EvaluationError,
    GenerationLog,
    Strategy,
    StrategyError,
    StrategyParams,
    StrategyState,
    run_loop,
    states_equal,
)
from .harness import RestartCriteria, RestartWrapper, RunConfig, multi_run, read_csv, write_csv
from .problems import evaluate_batched, make_problem
from .reshape import TreeLayout, build_layout, flatten, unflatten
from .strategies import (
    ARS,
    CMAES,
    DE,
    PGPE,
    PSO,
    SNES,
    STRATEGIES,
    XNES,
    GaussianES,
    GaussianGA,
    OpenAIES,
    SepCMAES,
    get_strategy,
)

__version__ = "0.1.0"
