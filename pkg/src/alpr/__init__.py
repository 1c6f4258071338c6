"""ALPR: row-sparse linear regression onto relaxed targets with adaptive within-class neighbor graphs."""
from .core import (Dataset, DatasetError, FitResult, Projection, SolverConfig, TargetMatrix, one_hot,
                   validate)
from .classify import PrunedModel, accuracy, build_model, predict, predict_batch, prune
from .solver import fit, objective, update_projection

__all__ = [
    "Dataset", "DatasetError", "FitResult", "Projection", "SolverConfig", "TargetMatrix", "one_hot",
    "validate", "PrunedModel", "accuracy", "build_model", "predict", "predict_batch", "prune", "fit",
    "objective", "update_projection",
]
