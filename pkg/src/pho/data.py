"""CSV ingestion, one-hot encoding and seeded train/test resplitting."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np


class DataError(ValueError):
    pass


@dataclass(frozen=True)
class Dataset:
    features: np.ndarray
    labels: np.ndarray
    column_names: tuple[str, ...]

    def __post_init__(self):
        features = np.asarray(self.features, dtype=float)
        if features.ndim != 2:
            raise DataError("feature matrix must be two-dimensional")
        labels = np.asarray(self.labels, dtype=np.int64)
        if labels.shape != (features.shape[0],):
            raise DataError("labels length must equal row count")
        if not np.isin(labels, (0, 1)).all():
            raise DataError("labels must be binary 0/1")
        if np.isnan(features).any():
            raise DataError("feature matrix has missing cells")
        features.flags.writeable = False
        labels.flags.writeable = False
        object.__setattr__(self, "features", features)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "column_names", tuple(self.column_names))

    @property
    def row_count(self) -> int:
        return self.features.shape[0]

    @property
    def column_count(self) -> int:
        return self.features.shape[1]

    def take(self, rows) -> "Dataset":
        return Dataset(self.features[rows], self.labels[rows], self.column_names)


@dataclass(frozen=True)
class SplitPair:
    train: Dataset
    test: Dataset
    seed: int
    train_fraction: float
    train_rows: np.ndarray
    test_rows: np.ndarray


def _is_number(cell: str) -> bool:
    try:
        float(cell)
    except ValueError:
        return False
    return True


def load_csv(path, label_column: str, positive_label: str, delimiter: str = ",") -> Dataset:
    """Read a headed CSV into a numeric dataset.

    A column is numeric when its first row parses as a number; a later
    non-numeric cell in such a column is an error rather than a silent
    switch to categorical. Categorical columns become one indicator column
    per category, in order of first appearance (``job=admin.`` style names).
    """
    try:
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh, delimiter=delimiter))
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    except csv.Error as exc:
        raise DataError(f"malformed CSV {path}: {exc}") from exc
    rows = [r for r in rows if r]
    if not rows:
        raise DataError(f"{path} is empty")
    header, body = rows[0], rows[1:]
    if label_column not in header:
        raise DataError(f"label column {label_column!r} not in header")
    if not body:
        raise DataError(f"{path} has a header but no data rows")
    for lineno, row in enumerate(body, start=2):
        if len(row) != len(header):
            raise DataError(f"line {lineno}: expected {len(header)} cells, got {len(row)}")

    label_idx = header.index(label_column)
    labels = np.array([1 if r[label_idx] == positive_label else 0 for r in body])

    blocks = []
    names: list[str] = []
    for col, name in enumerate(header):
        if col == label_idx:
            continue
        cells = [r[col] for r in body]
        if _is_number(cells[0]):
            values = np.empty(len(cells))
            for i, cell in enumerate(cells):
                try:
                    values[i] = float(cell)
                except ValueError:
                    raise DataError(
                        f"line {i + 2}: non-numeric cell {cell!r} in numeric column {name!r}"
                    ) from None
            blocks.append(values[:, None])
            names.append(name)
        else:
            categories = list(dict.fromkeys(cells))
            lookup = {c: j for j, c in enumerate(categories)}
            onehot = np.zeros((len(cells), len(categories)))
            onehot[np.arange(len(cells)), [lookup[c] for c in cells]] = 1.0
            blocks.append(onehot)
            names.extend(f"{name}={c}" for c in categories)
    features = np.hstack(blocks) if blocks else np.zeros((len(body), 0))
    return Dataset(features, labels, tuple(names))


def split(dataset: Dataset, train_fraction: float, seed: int, stratified: bool = False) -> SplitPair:
    """Shuffle then cut. ``round(train_fraction * rows)`` rows go to train."""
    if not 0.0 < train_fraction < 1.0:
        raise DataError(f"train_fraction must lie in (0, 1), got {train_fraction}")
    n = dataset.row_count
    if n == 0:
        raise DataError("cannot split an empty dataset")
    rng = np.random.default_rng(seed)
    if stratified:
        train_parts, test_parts = [], []
        for label in (0, 1):
            rows = np.flatnonzero(dataset.labels == label)
            rows = rows[rng.permutation(rows.size)]
            cut = int(round(train_fraction * rows.size))
            train_parts.append(rows[:cut])
            test_parts.append(rows[cut:])
        train_rows = np.concatenate(train_parts)
        test_rows = np.concatenate(test_parts)
        train_rows = train_rows[rng.permutation(train_rows.size)]
        test_rows = test_rows[rng.permutation(test_rows.size)]
    else:
        order = rng.permutation(n)
        cut = int(round(train_fraction * n))
        train_rows, test_rows = order[:cut], order[cut:]
    return SplitPair(
        dataset.take(train_rows), dataset.take(test_rows), seed, train_fraction,
        train_rows, test_rows,
    )


def make_two_gaussians(
    rows: int = 300,
    features: int = 5,
    separation: float = 1.0,
    positive_rate: float = 0.4,
    seed: int = 0,
) -> Dataset:
    """Two isotropic Gaussian classes whose means differ along every feature.

    Only the first half of the features carry signal; the rest are noise so
    that feature subsampling matters.
    """
    rng = np.random.default_rng(seed)
    labels = (rng.random(rows) < positive_rate).astype(np.int64)
    shift = np.zeros(features)
    informative = max(1, features // 2)
    shift[:informative] = separation / np.sqrt(informative)
    x = rng.standard_normal((rows, features)) + labels[:, None] * shift
    return Dataset(x, labels, tuple(f"x{i}" for i in range(features)))
