"""Noisy-optimization toolkit: a distributed population switching
evolutionary algorithm with local-regression fitness estimation, baseline
optimizers (canonical GA, DE/rand/1/bin, PSO), noisy benchmark problems,
and a reproducible experiment harness."""

from .benchmarks import (
    BenchmarkFunction,
    NoiseModel,
    evaluate,
    make_function,
    noisy_evaluate,
    optimum,
)
from .baselines import CgaConfig, DeConfig, PsoConfig, run_cga, run_de, run_pso
from .engine import DpseaParams, PseudoPopulation, run
from .ga import GaParams, Individual
from .regression import ModelKind, RegressionModel, fit, predict, select_kind
from .results import CycleRecord, RunResult
from .stochastics import Budget, RngState, gaussian, resampled_fitness

__version__ = "0.1.0"

__all__ = [
    "BenchmarkFunction",
    "NoiseModel",
    "evaluate",
    "make_function",
    "noisy_evaluate",
    "optimum",
    "CgaConfig",
    "DeConfig",
    "PsoConfig",
    "run_cga",
    "run_de",
    "run_pso",
    "DpseaParams",
    "PseudoPopulation",
    "run",
    "GaParams",
    "Individual",
    "ModelKind",
    "RegressionModel",
    "fit",
    "predict",
    "select_kind",
    "CycleRecord",
    "RunResult",
    "Budget",
    "RngState",
    "gaussian",
    "resampled_fitness",
]
