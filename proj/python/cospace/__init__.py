"""Python access to the CoSpace solver, baselines and metrics."""

from ._cospace import (
    CoSpaceModel,
    Hyperparams,
    IoError,
    NumericalError,
    ValidationError,
    evaluate,
    fit,
    fit_baseline,
    knn1_predict,
    simulate_scene,
)

__all__ = [
    "CoSpaceModel",
    "Hyperparams",
    "IoError",
    "NumericalError",
    "ValidationError",
    "evaluate",
    "fit",
    "fit_baseline",
    "knn1_predict",
    "simulate_scene",
]
