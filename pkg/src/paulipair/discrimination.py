"""Per-pair discrimination scores, sparse readout selection, and separability diagnostics."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import SingleClass
from .pauli import PauliFamily, weight

# Stabilizer in the discriminative score denominator; fixed, not a tuning knob.
EPSILON = 1e-8


@dataclass(frozen=True)
class ScoreParams:
    lambda_cost: float = 0.1
    lambda_fisher: float = 1e-3
    m: int = 12

    def __post_init__(self):
        if self.lambda_cost < 0:
            raise ValueError("lambda_cost must be >= 0")
        if self.lambda_fisher <= 0:
            raise ValueError("lambda_fisher must be > 0")
        if self.m < 1:
            raise ValueError("sparse budget m must be >= 1")


@dataclass(frozen=True)
class SparseReadout:
    """Retained family columns, strongest penalized score first."""

    columns: tuple[int, ...]
    scores: tuple[float, ...]

    def __len__(self) -> int:
        return len(self.columns)


def _class_split(labels: np.ndarray):
    classes = np.unique(labels)
    if classes.size < 2:
        raise SingleClass(f"need two classes, got {classes.tolist()}")
    return classes


def disc_scores(features: np.ndarray, labels: np.ndarray) -> np.ndarray:
    """|mean gap| / (sum of population stds + EPSILON) per feature column."""
    classes = _class_split(labels)
    a, b = classes[0], classes[1]
    fa = features[labels == a]
    fb = features[labels == b]
    gap = np.abs(fa.mean(axis=0) - fb.mean(axis=0))
    return gap / (fa.std(axis=0) + fb.std(axis=0) + EPSILON)


def penalize(scores: np.ndarray, family: PauliFamily, lambda_cost: float) -> np.ndarray:
    """Subtract lambda_cost times the Pauli weight normalized by the family max."""
    weights = family.weights
    return scores - lambda_cost * weights / weights.max()


def select_top_m(penalized: np.ndarray, m: int) -> SparseReadout:
    """Highest-m penalized columns; ties go to the lower (canonical) index."""
    if m < 1:
        raise ValueError("m must be >= 1")
    order = np.argsort(-penalized, kind="stable")[: min(m, penalized.size)]
    return SparseReadout(
        columns=tuple(int(j) for j in order),
        scores=tuple(float(penalized[j]) for j in order),
    )


def fisher_score(features: np.ndarray, labels: np.ndarray, ridge: float) -> float:
    """Trace of (S_W + ridge I)^(-1) S_B with 1/N scatter normalization."""
    classes = _class_split(labels)
    n, d = features.shape
    mean = features.mean(axis=0)
    s_w = np.zeros((d, d))
    s_b = np.zeros((d, d))
    for c in classes:
        fc = features[labels == c]
        mc = fc.mean(axis=0)
        centered = fc - mc
        s_w += centered.T @ centered
        dm = (mc - mean)[:, None]
        s_b += fc.shape[0] * (dm @ dm.T)
    s_w /= n
    s_b /= n
    solved = np.linalg.solve(s_w + ridge * np.eye(d), s_b)
    return float(np.trace(solved))


def class_mean_cosine(features: np.ndarray, labels: np.ndarray) -> float:
    """Cosine of the two class-mean feature vectors; 0 if either mean is zero."""
    classes = _class_split(labels)
    ma = features[labels == classes[0]].mean(axis=0)
    mb = features[labels == classes[1]].mean(axis=0)
    na, nb = np.linalg.norm(ma), np.linalg.norm(mb)
    if na == 0 or nb == 0:
        # Degenerate mean: treat the pair as maximally dissimilar.
        return 0.0
    return float(ma @ mb / (na * nb))
