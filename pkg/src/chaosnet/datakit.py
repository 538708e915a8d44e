"""Dataset loading, global min/max normalisation and per-class sampling."""

from __future__ import annotations

import csv
import io
import math
import os
from dataclasses import dataclass, field
from importlib import resources

import numpy as np

MISSING_TOKENS = frozenset({"", "na", "nan", "?", "null", "none"})


class DatasetError(ValueError):
    """Malformed or unusable dataset."""


@dataclass(frozen=True)
class Extrema:
    min: float
    max: float

    def to_dict(self) -> dict:
        return {"min": self.min, "max": self.max}

    @classmethod
    def from_dict(cls, d: dict) -> "Extrema":
        return cls(float(d["min"]), float(d["max"]))


@dataclass
class LabeledDataset:
    features: np.ndarray
    labels: tuple
    dropped_rows: int = 0
    columns: tuple | None = None
    label_name: str | None = None
    class_index: dict = field(init=False, repr=False)

    def __post_init__(self):
        self.features = np.asarray(self.features, dtype=float)
        if self.features.ndim != 2:
            raise DatasetError(f"features must be a 2-D matrix, got shape {self.features.shape}")
        self.labels = tuple(str(v) for v in self.labels)
        if len(self.labels) != self.features.shape[0]:
            raise DatasetError(
                f"{len(self.labels)} labels for {self.features.shape[0]} feature rows"
            )
        index: dict = {}
        for i, lab in enumerate(self.labels):
            index.setdefault(lab, []).append(i)
        self.class_index = {k: np.array(v) for k, v in index.items()}

    @property
    def classes(self) -> tuple:
        """Class labels in order of first appearance."""
        return tuple(self.class_index)

    def __len__(self) -> int:
        return len(self.labels)

    def subset(self, rows) -> "LabeledDataset":
        rows = np.asarray(rows, dtype=int)
        return LabeledDataset(
            self.features[rows],
            tuple(self.labels[i] for i in rows),
            columns=self.columns,
            label_name=self.label_name,
        )

    def per_class(self, classes=None) -> list:
        """Feature matrices grouped by class (``U^1 .. U^s``)."""
        classes = self.classes if classes is None else classes
        return [self.features[self.class_index[c]] for c in classes]


def _open_text(source):
    if isinstance(source, (str, os.PathLike)):
        if not os.path.exists(source):
            raise FileNotFoundError(f"dataset file not found: {source}")
        return open(source, newline="", encoding="utf-8")
    return source


def _read_rows(source):
    fh = _open_text(source)
    try:
        rows = [(i + 1, r) for i, r in enumerate(csv.reader(fh)) if any(c.strip() for c in r)]
    finally:
        if fh is not source:
            fh.close()
    if not rows:
        raise DatasetError("empty file: no data rows")
    return rows


def _resolve_label_column(label_column, header, width):
    if label_column is None:
        return None
    if isinstance(label_column, str) and not label_column.lstrip("-").isdigit():
        if header is None:
            raise DatasetError(f"label column {label_column!r} given by name but file has no header")
        try:
            return header.index(label_column)
        except ValueError:
            raise DatasetError(f"label column {label_column!r} not in header {header}") from None
    idx = int(label_column)
    if not -width <= idx < width:
        raise DatasetError(f"label column {idx} out of range for {width} columns")
    return idx % width


def _parse(source, label_column, has_header):
    rows = _read_rows(source)
    header = None
    if has_header:
        header = [c.strip() for c in rows[0][1]]
        rows = rows[1:]
        if not rows:
            raise DatasetError("empty file: header but no data rows")
    width = len(header) if header is not None else len(rows[0][1])
    lab = _resolve_label_column(label_column, header, width)
    feats, labels = [], []
    dropped = 0
    for lineno, row in rows:
        if len(row) != width:
            raise DatasetError(f"line {lineno}: expected {width} fields, found {len(row)}")
        cells = [c.strip() for c in row]
        if any(c.lower() in MISSING_TOKENS for c in cells):
            dropped += 1
            continue
        values = []
        for col, cell in enumerate(cells):
            if col == lab:
                continue
            try:
                v = float(cell)
            except ValueError:
                raise DatasetError(
                    f"line {lineno}, column {col + 1}: non-numeric feature value {cell!r}"
                ) from None
            if not math.isfinite(v):
                raise DatasetError(f"line {lineno}, column {col + 1}: non-finite value {cell!r}")
            values.append(v)
        feats.append(values)
        if lab is not None:
            labels.append(cells[lab])
    n_feat = width - (lab is not None)
    matrix = np.array(feats, dtype=float).reshape(len(feats), n_feat)
    columns = None
    if header is not None:
        columns = tuple(h for i, h in enumerate(header) if i != lab)
    label_name = header[lab] if header is not None and lab is not None else None
    return matrix, labels, dropped, columns, label_name


def load_csv(source, label_column=-1, has_header: bool = True) -> LabeledDataset:
    """Read a comma-delimited labelled dataset.

    ``label_column`` is a 0-based index (negative counts from the end) or a header
    name.  Rows with a missing cell are dropped and counted in ``dropped_rows``.
    """
    if label_column is None:
        raise DatasetError("a label column is required; use load_features_csv for unlabelled data")
    matrix, labels, dropped, columns, label_name = _parse(source, label_column, has_header)
    if matrix.shape[0] == 0:
        raise DatasetError("no complete rows left after dropping rows with missing values")
    return LabeledDataset(matrix, labels, dropped, columns, label_name)


def load_features_csv(source, has_header: bool = True, label_column=None) -> np.ndarray:
    """Read a numeric matrix, optionally skipping a label column."""
    matrix, _, _, _, _ = _parse(source, label_column, has_header)
    return matrix


def save_csv(dataset: LabeledDataset, dest) -> None:
    fh = open(dest, "w", newline="", encoding="utf-8") if isinstance(dest, (str, os.PathLike)) else dest
    try:
        w = csv.writer(fh)
        cols = dataset.columns or tuple(f"x{i + 1}" for i in range(dataset.features.shape[1]))
        w.writerow([*cols, dataset.label_name or "label"])
        for row, lab in zip(dataset.features, dataset.labels):
            w.writerow([repr(float(v)) for v in row] + [lab])
    finally:
        if fh is not dest:
            fh.close()


def load_iris() -> LabeledDataset:
    """The bundled 150-row Iris table (4 features, 3 classes of 50)."""
    text = resources.files("chaosnet").joinpath("data/iris.csv").read_text(encoding="utf-8")
    return load_csv(io.StringIO(text), label_column="species", has_header=True)


def normalize(data) -> tuple[np.ndarray, Extrema]:
    """Scale a matrix by its global min and max into [0, 1].

    A constant matrix maps to all ones.
    """
    x = np.asarray(data, dtype=float)
    if x.size == 0:
        return x.copy(), Extrema(0.0, 1.0)
    lo, hi = float(x.min()), float(x.max())
    return apply_extrema(x, Extrema(lo, hi)), Extrema(lo, hi)


def apply_extrema(data, extrema: Extrema, clamp: bool = True) -> np.ndarray:
    """Scale with previously recorded extrema, clamping into [0, 1] by default."""
    x = np.asarray(data, dtype=float)
    if extrema.max == extrema.min:
        return np.ones_like(x)
    out = (x - extrema.min) / (extrema.max - extrema.min)
    return np.clip(out, 0.0, 1.0) if clamp else out


def sample_per_class(dataset: LabeledDataset, k: int, seed) -> tuple[LabeledDataset, LabeledDataset]:
    """Draw ``k`` rows per class uniformly without replacement.

    Returns ``(train, rest)``; both keep the original row order.
    """
    if k < 1:
        raise DatasetError(f"k must be at least 1, got {k}")
    for c, rows in dataset.class_index.items():
        if len(rows) < k:
            raise DatasetError(f"class {c!r} has only {len(rows)} rows, cannot draw {k}")
    rng = np.random.default_rng(seed)
    picked = np.concatenate(
        [rng.choice(rows, size=k, replace=False) for rows in dataset.class_index.values()]
    )
    mask = np.zeros(len(dataset), dtype=bool)
    mask[picked] = True
    return dataset.subset(np.flatnonzero(mask)), dataset.subset(np.flatnonzero(~mask))
