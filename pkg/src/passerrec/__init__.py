"""Review-based product recommendation with a Bi-LSTM trained by Passer Learning."""

from .bilstm import BiLstmClassifier, ModelShape
from .data import ReviewRecord, label_records, parse_reviews, split
from .evaluation import emit_report, evaluate_scores, run_experiment
from .features import ReviewFeaturizer
from .optim import PLConfig, optimize, pso_optimize, random_search

__version__ = "0.1.0"

__all__ = [
    "BiLstmClassifier",
    "ModelShape",
    "PLConfig",
    "ReviewFeaturizer",
    "ReviewRecord",
    "emit_report",
    "evaluate_scores",
    "label_records",
    "optimize",
    "parse_reviews",
    "pso_optimize",
    "random_search",
    "run_experiment",
    "split",
]
