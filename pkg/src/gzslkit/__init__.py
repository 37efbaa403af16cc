"""Generalized zero-shot learning harness.

Turns a classical zero-shot scorer into a GZSL system: stratified GZSL
splits, seen-class score calibration, GZSL-specific regularisation
selection and the usual metrics (per-class accuracy, harmonic mean, AUSUC).
"""

__version__ = "0.1.0"

from .calibration import (
    CalibratedClassifier,
    TradeoffPoint,
    ausuc,
    calibrate_scores,
    gamma_breakpoints,
    predict,
    select_gamma,
    tradeoff_curve,
)
from .data import ClassPartition, Dataset, GzslReport, GzslSplit, RunResult, ScoreMatrix, ZslReport, normalize_prototypes, validate_dataset
from .metrics import AccuracyKind, class_variances, harmonic_mean, per_class_accuracy, per_sample_accuracy
from .models import BilinearRanking, LinearSV, LinearVS, ModelSpec, SgdConfig
from .pipeline import ExperimentConfig, run_gzsl_evaluation, run_zsl_evaluation
from .splits import SplitConfig, make_gzsl_split, make_partition, make_validation_folds
from .synthetic import SyntheticConfig, generate

__all__ = [
    "AccuracyKind",
    "BilinearRanking",
    "CalibratedClassifier",
    "ClassPartition",
    "Dataset",
    "ExperimentConfig",
    "GzslReport",
    "GzslSplit",
    "LinearSV",
    "LinearVS",
    "ModelSpec",
    "RunResult",
    "ScoreMatrix",
    "SgdConfig",
    "SplitConfig",
    "SyntheticConfig",
    "TradeoffPoint",
    "ZslReport",
    "ausuc",
    "calibrate_scores",
    "class_variances",
    "gamma_breakpoints",
    "generate",
    "harmonic_mean",
    "make_gzsl_split",
    "make_partition",
    "make_validation_folds",
    "normalize_prototypes",
    "per_class_accuracy",
    "per_sample_accuracy",
    "predict",
    "run_gzsl_evaluation",
    "run_zsl_evaluation",
    "select_gamma",
    "tradeoff_curve",
    "validate_dataset",
]
