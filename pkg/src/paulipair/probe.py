"""The logistic probe: a deterministic from-scratch logistic regression.

Candidate readouts are compared by the test accuracy of this classifier, so it
has to be bit-reproducible: full-batch gradient descent from zero weights with
a fixed step size (inverse of a Lipschitz bound on the gradient), run for an
exact iteration count. No stochastic shuffling anywhere.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ColumnMismatch, EmptyTestSet, SingleClass


@dataclass
class ProbeModel:
    weights: np.ndarray  # one per feature column
    bias: float
    feat_mu: np.ndarray
    feat_sd: np.ndarray  # zeros replaced by 1 (constant column -> standardized 0)
    class_a: int
    class_b: int
    iterations: int


def _sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def loss_and_gradient(weights, bias, x, y, rho):
    """Mean logistic loss with an L2 weight penalty (bias unpenalized)."""
    z = x @ weights + bias
    # log(1 + exp(-yz)) written stably via logaddexp against 0
    signed = np.where(y == 1, z, -z)
    loss = np.logaddexp(0.0, -signed).mean() + 0.5 * rho * weights @ weights
    p = _sigmoid(z)
    residual = p - y
    grad_w = x.T @ residual / x.shape[0] + rho * weights
    grad_b = residual.mean()
    return float(loss), grad_w, float(grad_b)


def fit_probe(features: np.ndarray, labels: np.ndarray, iterations: int = 100, rho=None) -> ProbeModel:
    """Train on one binary task; labels hold the two raw class ids."""
    features = np.asarray(features, dtype=float)
    classes = np.unique(labels)
    if classes.size != 2:
        raise SingleClass(f"probe needs exactly two classes, got {classes.tolist()}")
    class_a, class_b = int(classes[0]), int(classes[1])
    y = (labels == class_b).astype(float)
    n, d = features.shape
    if rho is None:
        rho = 1.0 / n
    mu = features.mean(axis=0)
    sd = features.std(axis=0)
    sd = np.where(sd == 0, 1.0, sd)
    x = (features - mu) / sd
    # Largest step with a descent guarantee: the logistic Hessian is bounded by
    # (X~^T X~)/4N + rho I with the bias folded in as a constant column.
    xt = np.hstack([x, np.ones((n, 1))])
    lipschitz = np.linalg.eigvalsh(xt.T @ xt)[-1] / (4.0 * n) + rho
    step = 1.0 / lipschitz
    weights = np.zeros(d)
    bias = 0.0
    for _ in range(iterations):
        _, grad_w, grad_b = loss_and_gradient(weights, bias, x, y, rho)
        weights = weights - step * grad_w
        bias = bias - step * grad_b
    return ProbeModel(
        weights=weights,
        bias=float(bias),
        feat_mu=mu,
        feat_sd=sd,
        class_a=class_a,
        class_b=class_b,
        iterations=iterations,
    )


def predict(model: ProbeModel, features: np.ndarray) -> np.ndarray:
    """Predicted class ids; probability ties resolve to the larger class id."""
    features = np.asarray(features, dtype=float)
    if features.ndim != 2 or features.shape[1] != model.weights.shape[0]:
        raise ColumnMismatch(
            f"features have {features.shape[1] if features.ndim == 2 else '?'} columns, "
            f"model expects {model.weights.shape[0]}"
        )
    x = (features - model.feat_mu) / model.feat_sd
    p = _sigmoid(x @ model.weights + model.bias)
    return np.where(p >= 0.5, model.class_b, model.class_a)


def task_accuracy(model: ProbeModel, features: np.ndarray, labels: np.ndarray) -> float:
    """Fraction of correct predictions on held-out rows."""
    if len(labels) == 0:
        raise EmptyTestSet("cannot score an empty test set")
    return float(np.mean(predict(model, features) == labels))
