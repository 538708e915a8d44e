"""Single-layer ChaosNet training and testing.

Training turns every class matrix into TT-SS features and keeps the column-wise
mean as that class's representation vector.  Testing extracts the same features
from each test row and picks the class whose mean vector has the largest cosine
similarity (first class wins ties).
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field, replace

import numpy as np

from . import docformat
from .datakit import Extrema, apply_extrema, normalize
from .ttss import Hyperparams, extract_features

TEST_SCALINGS = ("self", "train")


@dataclass(frozen=True)
class TrainedModel:
    classes: tuple
    mean_vectors: np.ndarray
    params: Hyperparams
    normalization: Extrema | None = None
    test_scaling: str = "self"
    layers: tuple = field(default=())

    def __post_init__(self):
        mv = np.array(self.mean_vectors, dtype=float)
        if mv.ndim != 2 or mv.shape[0] != len(self.classes):
            raise ValueError(
                f"need one mean vector per class: {len(self.classes)} classes, mean_vectors shape {mv.shape}"
            )
        if self.test_scaling not in TEST_SCALINGS:
            raise ValueError(f"test_scaling must be one of {TEST_SCALINGS}, got {self.test_scaling!r}")
        mv.setflags(write=False)
        object.__setattr__(self, "mean_vectors", mv)
        object.__setattr__(self, "classes", tuple(self.classes))
        object.__setattr__(self, "layers", tuple(self.layers))

    @property
    def n_features(self) -> int:
        """Input width expected by :func:`predict`."""
        if self.layers:
            return self.layers[0].n_inputs
        return self.mean_vectors.shape[1]


@dataclass(frozen=True)
class Prediction:
    label: str
    similarities: np.ndarray


def cosine_similarity(u, v) -> float:
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if u.shape != v.shape:
        raise ValueError(f"length mismatch: {u.shape} vs {v.shape}")
    nu, nv = np.linalg.norm(u), np.linalg.norm(v)
    if nu == 0.0 or nv == 0.0:
        return 0.0
    return float(np.dot(u, v) / (nu * nv))


def similarity_matrix(features: np.ndarray, mean_vectors: np.ndarray) -> np.ndarray:
    """Cosine similarity of every feature row against every mean vector (r x s)."""
    f = np.asarray(features, dtype=float)
    m = np.asarray(mean_vectors, dtype=float)
    norms = np.linalg.norm(f, axis=1)[:, None] * np.linalg.norm(m, axis=1)[None, :]
    dots = f @ m.T
    out = np.zeros_like(dots)
    np.divide(dots, norms, out=out, where=norms > 0)
    return np.clip(out, -1.0, 1.0)


def _features(data, params: Hyperparams, layers) -> np.ndarray:
    if layers:
        from .multilayer import multilayer_features

        return multilayer_features(data, params, layers)
    return extract_features(data, params)


def fit_mean_vectors(per_class_features, classes) -> np.ndarray:
    means = []
    for label, feats in zip(classes, per_class_features):
        feats = np.asarray(feats, dtype=float)
        if feats.shape[0] == 0:
            raise ValueError(f"class {label!r} has no training rows")
        means.append(feats.mean(axis=0))
    return np.vstack(means)


def train(
    per_class_data,
    params: Hyperparams,
    classes=None,
    normalization: Extrema | None = None,
    test_scaling: str = "self",
    layers=(),
) -> TrainedModel:
    """Fit mean representation vectors from already-normalised class matrices."""
    per_class_data = [np.asarray(u, dtype=float) for u in per_class_data]
    if classes is None:
        classes = tuple(str(i + 1) for i in range(len(per_class_data)))
    if len(classes) != len(per_class_data):
        raise ValueError(f"{len(classes)} class labels for {len(per_class_data)} class matrices")
    if not per_class_data:
        raise ValueError("need at least one class")
    widths = {u.shape[1] if u.ndim == 2 else None for u in per_class_data}
    if len(widths) != 1 or None in widths:
        raise ValueError(f"all class matrices must be 2-D with equal column counts, got {widths}")
    for label, u in zip(classes, per_class_data):
        if u.shape[0] == 0:
            raise ValueError(f"class {label!r} has no training rows")
    feats = [_features(u, params, layers) for u in per_class_data]
    return TrainedModel(
        tuple(classes), fit_mean_vectors(feats, classes), params, normalization, test_scaling, layers
    )


def train_dataset(dataset, params: Hyperparams, test_scaling: str = "self", layers=()) -> TrainedModel:
    """Normalise a labelled training set with its global extrema and train on it."""
    scaled, extrema = normalize(dataset.features)
    classes = dataset.classes
    per_class = [scaled[dataset.class_index[c]] for c in classes]
    return train(per_class, params, classes, extrema, test_scaling, layers)


def prepare_test(model: TrainedModel, test_data, already_normalized: bool = False) -> np.ndarray:
    z = np.asarray(test_data, dtype=float)
    if z.ndim != 2:
        raise ValueError(f"test data must be a 2-D matrix, got shape {z.shape}")
    if z.shape[1] != model.n_features:
        raise ValueError(f"test data has {z.shape[1]} columns, model expects {model.n_features}")
    if already_normalized:
        return z
    if model.test_scaling == "train":
        if model.normalization is None:
            raise ValueError("model has no stored training extrema for test_scaling='train'")
        return apply_extrema(z, model.normalization, clamp=True)
    return normalize(z)[0]


def extract_test_features(model: TrainedModel, test_data, already_normalized: bool = False) -> np.ndarray:
    """Scale test rows as the model prescribes and extract their features.

    Non-convergence errors carry the offending (row, column).
    """
    return _features(prepare_test(model, test_data, already_normalized), model.params, model.layers)


def classify_features(mean_vectors: np.ndarray, features: np.ndarray) -> np.ndarray:
    """Index of the most similar mean vector per row; argmax keeps the first maximum."""
    return similarity_matrix(features, mean_vectors).argmax(axis=1)


def predict(model: TrainedModel, test_data, already_normalized: bool = False) -> list[Prediction]:
    feats = extract_test_features(model, test_data, already_normalized)
    sims = similarity_matrix(feats, model.mean_vectors)
    return [Prediction(model.classes[int(i)], row) for i, row in zip(sims.argmax(axis=1), sims)]


@dataclass(frozen=True)
class Evaluation:
    accuracy: float
    confusion: np.ndarray
    classes: tuple


def evaluate_labels(predicted, true_labels, classes) -> Evaluation:
    predicted = list(predicted)
    true_labels = [str(t) for t in true_labels]
    if len(predicted) != len(true_labels):
        raise ValueError(f"{len(predicted)} predictions for {len(true_labels)} labels")
    classes = tuple(classes)
    idx = {c: i for i, c in enumerate(classes)}
    unknown = sorted(set(true_labels) - set(idx))
    if unknown:
        raise ValueError(f"labels not known to the model: {unknown}")
    confusion = np.zeros((len(classes), len(classes)), dtype=np.int64)
    for p, t in zip(predicted, true_labels):
        confusion[idx[t], idx[p]] += 1
    total = len(true_labels)
    acc = float(np.trace(confusion)) / total if total else 0.0
    return Evaluation(acc, confusion, classes)


def evaluate(model: TrainedModel, test_data, true_labels, already_normalized: bool = False) -> Evaluation:
    """Accuracy and confusion counts (rows: true class, columns: predicted)."""
    if len(true_labels) != np.asarray(test_data).shape[0]:
        raise ValueError(f"{len(true_labels)} labels for {np.asarray(test_data).shape[0]} test rows")
    preds = predict(model, test_data, already_normalized)
    return evaluate_labels([p.label for p in preds], true_labels, model.classes)


def with_mean_vectors(model: TrainedModel, mean_vectors) -> TrainedModel:
    return replace(model, mean_vectors=np.asarray(mean_vectors, dtype=float))


# -- persistence ------------------------------------------------------------

MODEL_FORMAT = "chaosnet-model"


def model_to_dict(model: TrainedModel) -> dict:
    from .multilayer import layer_to_dict

    return {
        "params": model.params.to_dict(),
        "classes": list(model.classes),
        "normalization": None if model.normalization is None else model.normalization.to_dict(),
        "test_scaling": model.test_scaling,
        "mean_vectors": [[float(v) for v in row] for row in model.mean_vectors],
        "layers": [layer_to_dict(layer) for layer in model.layers],
    }


def dumps_model(model: TrainedModel) -> str:
    return docformat.dumps(MODEL_FORMAT, model_to_dict(model))


def loads_model(text: str) -> TrainedModel:
    from .multilayer import layer_from_dict

    doc = docformat.loads(text, MODEL_FORMAT)
    req = docformat.require
    try:
        params = Hyperparams.from_dict(req(doc, "params"))
        norm = doc.get("normalization")
        layers = tuple(layer_from_dict(d) for d in doc.get("layers", []))
        return TrainedModel(
            tuple(req(doc, "classes")),
            np.array(req(doc, "mean_vectors"), dtype=float),
            params,
            None if norm is None else Extrema.from_dict(norm),
            doc.get("test_scaling", "self"),
            layers,
        )
    except docformat.DocumentError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise docformat.DocumentError(f"invalid model document: {exc}") from None


def save_model(model: TrainedModel, destination) -> None:
    text = dumps_model(model)
    if isinstance(destination, (str, os.PathLike)):
        with open(destination, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        destination.write(text)


def load_model(source) -> TrainedModel:
    if isinstance(source, (str, os.PathLike)):
        with open(source, encoding="utf-8") as fh:
            return loads_model(fh.read())
    return loads_model(source.read())
