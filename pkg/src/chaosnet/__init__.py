"""ChaosNet: classification with chaotic GLS neurons."""

from .classifier import (
    Prediction,
    TrainedModel,
    cosine_similarity,
    evaluate,
    load_model,
    predict,
    save_model,
    train,
    train_dataset,
)
from .coding import CodingInterval, UatCode, code_length_bits, decode, encode, uat_decode, uat_encode
from .datakit import LabeledDataset, load_csv, load_iris, normalize, sample_per_class
from .gls import DomainError, GlsMap, MapKind, apply, iterate, lyapunov_exponent, symbolize
from .multilayer import LayerSpec, hidden_layer_series, input_layer_series, paired_layer_spec
from .noise import NoiseTrial, noise_sweep, perturb_model, snr_db
from .ttss import PRESETS, FiringTrajectory, Hyperparams, NonConvergenceError, extract_features, fire, ttss_feature

__version__ = "0.1.0"

__all__ = [
    "apply",
    "code_length_bits",
    "CodingInterval",
    "cosine_similarity",
    "decode",
    "DomainError",
    "encode",
    "evaluate",
    "extract_features",
    "fire",
    "FiringTrajectory",
    "GlsMap",
    "hidden_layer_series",
    "Hyperparams",
    "input_layer_series",
    "iterate",
    "LabeledDataset",
    "LayerSpec",
    "load_csv",
    "load_iris",
    "load_model",
    "lyapunov_exponent",
    "MapKind",
    "noise_sweep",
    "NoiseTrial",
    "NonConvergenceError",
    "normalize",
    "paired_layer_spec",
    "perturb_model",
    "predict",
    "Prediction",
    "PRESETS",
    "sample_per_class",
    "save_model",
    "snr_db",
    "symbolize",
    "train",
    "train_dataset",
    "TrainedModel",
    "ttss_feature",
    "uat_decode",
    "uat_encode",
    "UatCode",
]
