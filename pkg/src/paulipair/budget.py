"""Finite-measurement modeling: shot allocation, sampling-noise surrogate, ranking.

All randomness flows through counter-based Philox streams keyed by explicit
integers, so a perturbation drawn for (seed, stream, row, column) is the same
no matter how many other draws happened first or on which thread.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np

from .errors import BudgetTooSmall
from .probe import fit_probe, task_accuracy

_MASK64 = (1 << 64) - 1

# Number of perturb_features calls since import; lets tests prove that
# ideal-regime runs never touch the noise stream.
_PERTURB_CALLS = 0


def perturb_call_count() -> int:
    return _PERTURB_CALLS


@dataclass(frozen=True)
class BudgetParams:
    B: int = 2048
    beta: float = 1.0
    gamma: float = 0.1
    trials: int = 5
    seed: int = 0

    def __post_init__(self):
        if self.B < 1:
            raise ValueError("shot budget B must be >= 1")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.beta < 0 or self.gamma < 0:
            raise ValueError("beta and gamma must be >= 0")


@dataclass(frozen=True)
class BudgetEvaluation:
    groups: int
    shots_per_group: int
    noisy_acc: float
    var_penalty: float
    budget_score: float


def stream_key(*parts) -> int:
    """Stable 64-bit key from arbitrary parts (unlike hash(), fixed across runs)."""
    text = "|".join(str(p) for p in parts)
    return int.from_bytes(hashlib.blake2b(text.encode(), digest_size=8).digest(), "big")


def shots_per_group(budget: int, groups: int) -> int:
    """Shots allocated to each measurement group: floor(B / G)."""
    if groups < 1:
        raise ValueError("group count must be >= 1")
    shots = budget // groups
    if shots < 1:
        raise BudgetTooSmall(budget, groups)
    return shots


def shot_variance(a, n_shot: int):
    """Estimator variance surrogate (1 - a^2) / N_shot for an expectation a."""
    return (1.0 - np.square(a)) / n_shot


def perturb_features(features: np.ndarray, n_shot: int, seed: int, stream: int = 0) -> np.ndarray:
    """Each entry f gets Gaussian noise of variance (1 - f^2)/N_shot.

    The draw for entry (i, j) depends only on (seed, stream, i, j). Entries at
    exactly +-1 keep zero variance; the output is not re-clipped to [-1, 1].
    """
    global _PERTURB_CALLS
    _PERTURB_CALLS += 1
    key = np.array([seed & _MASK64, stream & _MASK64], dtype=np.uint64)
    gen = np.random.Generator(np.random.Philox(key=key))
    noise = gen.standard_normal(features.shape)
    sigma = np.sqrt(np.clip(shot_variance(features, n_shot), 0.0, None))
    return features + sigma * noise


def noisy_accuracy(
    f_train: np.ndarray,
    f_test: np.ndarray,
    y_train: np.ndarray,
    y_test: np.ndarray,
    columns,
    n_shot: int,
    trials: int,
    seed: int,
    iterations: int = 100,
    rho=None,
) -> float:
    """Mean probe accuracy over independently perturbed train/test features."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    cols = list(columns)
    train = f_train[:, cols]
    test = f_test[:, cols]
    accs = []
    for trial in range(trials):
        noisy_train = perturb_features(train, n_shot, seed, stream=2 * trial)
        noisy_test = perturb_features(test, n_shot, seed, stream=2 * trial + 1)
        model = fit_probe(noisy_train, y_train, iterations=iterations, rho=rho)
        accs.append(task_accuracy(model, noisy_test, y_test))
    return float(np.mean(accs))


def variance_penalty(features: np.ndarray, n_shot: int) -> float:
    """Mean of the per-entry shot variance over the selected feature matrix."""
    if features.size == 0:
        raise ValueError("variance penalty needs a non-empty feature matrix")
    return float(np.mean(shot_variance(features, n_shot)))


def budget_score(j_fisher: float, var_penalty_value: float, groups: int, d: int, beta: float, gamma: float) -> float:
    """Separability minus sampling and group-cost penalties."""
    if d < 1 or groups < 1:
        raise ValueError("groups and readout size must be >= 1")
    return j_fisher - beta * var_penalty_value - gamma * groups / d


def rank_key(noisy_acc: float, score: float, ideal_acc: float, groups: int, length: int):
    """Lexicographic candidate order: noisy acc, budget score, ideal acc, fewer
    groups, then shorter sequence (descending on the first three)."""
    return (-noisy_acc, -score, -ideal_acc, groups, length)


def pair_rank(entries) -> list[int]:
    """Indices of (noisy_acc, budget_score, ideal_acc, groups, length) tuples in
    rank order; full ties keep insertion order."""
    entries = list(entries)
    if not entries:
        raise ValueError("cannot rank an empty candidate list")
    return sorted(range(len(entries)), key=lambda i: rank_key(*entries[i]) + (i,))
