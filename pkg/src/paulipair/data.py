"""Dataset ingestion, PCA-based angle encoding, and one-vs-one task construction."""
from __future__ import annotations

import csv
from dataclasses import dataclass
from importlib import resources

import numpy as np

from .errors import (
    ClassTooSmall,
    DegenerateCovariance,
    DimensionMismatch,
    EmptyDataset,
    MissingLabelColumn,
    NonNumericFeature,
)


@dataclass
class Dataset:
    features: np.ndarray  # (N, d) float
    labels: np.ndarray  # (N,) int, classes 1..C
    feature_names: list[str]
    class_names: list[str]

    @property
    def n_samples(self) -> int:
        return self.features.shape[0]

    @property
    def n_features(self) -> int:
        return self.features.shape[1]

    @property
    def n_classes(self) -> int:
        return len(self.class_names)


@dataclass(frozen=True)
class PairTask:
    """One binary task (a, b) with a < b; rows index into the parent dataset."""

    class_a: int
    class_b: int
    train_rows: np.ndarray
    test_rows: np.ndarray


@dataclass
class EncoderModel:
    """Standardization + PCA + angle map fitted on training rows only."""

    mu: np.ndarray  # per-feature mean
    sd: np.ndarray  # per-feature std, zeros replaced by 1 (constant feature -> 0)
    pca_mean: np.ndarray  # mean of the standardized training block
    components: np.ndarray  # (d, p), orthonormal columns, sign-fixed
    scales: np.ndarray  # (p,) max |z_j| over training, zeros replaced by 1
    alpha: float
    n: int
    p: int

    @property
    def excluded_qubits(self) -> frozenset[int]:
        """Padded qubits (p..n-1) that never receive data."""
        return frozenset(range(self.p, self.n))


def load_csv(path, label_column: str) -> Dataset:
    """Read a comma-separated file with a header row into a Dataset.

    Every non-label column must parse as a float; class ids are assigned by
    first appearance of each label value.
    """
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise EmptyDataset(f"{path}: file is empty") from None
        if label_column not in header:
            raise MissingLabelColumn(label_column, header)
        label_idx = header.index(label_column)
        feature_names = [name for i, name in enumerate(header) if i != label_idx]
        rows, labels_raw = [], []
        for row_number, row in enumerate(reader, start=1):
            if not row:
                continue
            values = []
            for i, cell in enumerate(row):
                if i == label_idx:
                    continue
                try:
                    values.append(float(cell))
                except ValueError:
                    raise NonNumericFeature(row_number, header[i], cell) from None
            rows.append(values)
            labels_raw.append(row[label_idx].strip())
    if len(rows) < 2:
        raise EmptyDataset(f"{path}: needs at least 2 data rows, found {len(rows)}")
    class_names: list[str] = []
    labels = []
    for value in labels_raw:
        if value not in class_names:
            class_names.append(value)
        labels.append(class_names.index(value) + 1)
    labels = np.array(labels, dtype=int)
    for c, name in enumerate(class_names, start=1):
        count = int(np.sum(labels == c))
        if count < 2:
            raise ClassTooSmall(name, count)
    return Dataset(
        features=np.array(rows, dtype=float),
        labels=labels,
        feature_names=feature_names,
        class_names=class_names,
    )


def fixture_path(name: str):
    """Path of a bundled desk-scale dataset: iris, wine, or breast_cancer."""
    ref = resources.files("paulipair.datasets") / f"{name}.csv"
    if not ref.is_file():
        raise FileNotFoundError(f"no bundled dataset named {name!r}")
    return ref


def split(ds: Dataset, test_fraction: float, seed: int) -> tuple[np.ndarray, np.ndarray]:
    """Stratified train/test row split, deterministic in the seed."""
    if not 0.0 < test_fraction < 1.0:
        raise ValueError(f"test_fraction must be in (0, 1), got {test_fraction}")
    rng = np.random.default_rng(seed)
    train, test = [], []
    for c in range(1, ds.n_classes + 1):
        rows = np.flatnonzero(ds.labels == c)
        if rows.size < 2:
            raise ClassTooSmall(ds.class_names[c - 1], int(rows.size))
        perm = rng.permutation(rows)
        n_test = int(np.floor(rows.size * test_fraction))
        n_test = min(rows.size - 1, max(1, n_test))
        test.append(perm[:n_test])
        train.append(perm[n_test:])
    return np.sort(np.concatenate(train)), np.sort(np.concatenate(test))


def fit_encoder(ds: Dataset, train_rows: np.ndarray, n: int, alpha: float) -> EncoderModel:
    """Standardize, run PCA on the training covariance, and fix the angle scales."""
    x = ds.features[train_rows]
    if x.shape[0] < 2:
        raise ValueError("encoder needs at least 2 training samples")
    mu = x.mean(axis=0)
    sd = x.std(axis=0)
    if np.all(sd == 0):
        raise DegenerateCovariance("every feature is constant on the training rows")
    sd_safe = np.where(sd == 0, 1.0, sd)
    xs = (x - mu) / sd_safe
    p = min(n, ds.n_features, x.shape[0] - 1)
    pca_mean = xs.mean(axis=0)
    centered = xs - pca_mean
    cov = centered.T @ centered / (x.shape[0] - 1)
    eigvals, eigvecs = np.linalg.eigh(cov)
    order = np.argsort(eigvals)[::-1][:p]
    components = eigvecs[:, order]
    # PCA signs are arbitrary but angles are sign-sensitive: make the
    # largest-magnitude entry of each component positive.
    for j in range(components.shape[1]):
        lead = np.argmax(np.abs(components[:, j]))
        if components[lead, j] < 0:
            components[:, j] = -components[:, j]
    z = centered @ components
    scales = np.abs(z).max(axis=0)
    scales = np.where(scales == 0, 1.0, scales)
    return EncoderModel(
        mu=mu,
        sd=sd_safe,
        pca_mean=pca_mean,
        components=components,
        scales=scales,
        alpha=alpha,
        n=n,
        p=p,
    )


def encode_angles(model: EncoderModel, x: np.ndarray) -> np.ndarray:
    """Angle vector for one sample: clipped scaled projections, zero-padded to n."""
    x = np.asarray(x, dtype=float)
    if x.shape != model.mu.shape:
        raise DimensionMismatch(f"sample has shape {x.shape}, expected {model.mu.shape}")
    xs = (x - model.mu) / model.sd
    z = model.components.T @ (xs - model.pca_mean)
    theta = np.zeros(model.n)
    theta[: model.p] = np.clip(model.alpha * z / model.scales, -np.pi, np.pi)
    return theta


def angle_matrix(model: EncoderModel, ds: Dataset) -> np.ndarray:
    """encode_angles applied to every dataset row, stacked to (N, n)."""
    return np.stack([encode_angles(model, x) for x in ds.features])


def make_pair_tasks(ds: Dataset, train_rows: np.ndarray, test_rows: np.ndarray) -> list[PairTask]:
    """All C(C-1)/2 one-vs-one tasks, rows restricted to the two classes."""
    tasks = []
    for a in range(1, ds.n_classes + 1):
        for b in range(a + 1, ds.n_classes + 1):
            keep = lambda rows: rows[np.isin(ds.labels[rows], (a, b))]
            tasks.append(
                PairTask(class_a=a, class_b=b, train_rows=keep(train_rows), test_rows=keep(test_rows))
            )
    return tasks
