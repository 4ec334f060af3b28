"""Binary logistic regression and the margin-of-confidence score.

The model stores its bias and coefficients in raw encoded units, so the
class probability is always sigmoid(bias + coefficients . encoded(x)) with
no hidden scaling.  Training standardizes continuous columns internally for
stable gradient descent and back-transforms the solution afterwards; the
standardization parameters are kept on the model for provenance and for the
standardized-coefficient feature ranking.

Confidence is the margin between the two class probabilities, which for a
binary classifier reduces to U = |2P - 1|: zero at P = 0.5 and approaching
one as the model becomes certain either way.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .tabular import (
    DistanceWeights,
    FeatureSchema,
    Instance,
    encode,
)

MODEL_FORMAT_VERSION = 1

# Probabilities are kept strictly inside (0, 1) so confidence stays below 1
# and logit transforms stay finite even for saturating scores.
_P_CLIP = 1e-15


class ModelError(ValueError):
    """Training input or model/vector mismatch errors."""


@dataclass(frozen=True)
class Standardization:
    """Per-encoded-column shift and scale recorded at training time."""

    mean: tuple[float, ...]
    scale: tuple[float, ...]


@dataclass(frozen=True)
class LogisticModel:
    bias: float
    coefficients: np.ndarray
    class_labels: tuple[str, str]
    decision_boundary: float = 0.5
    standardization: Standardization | None = None
    schema_hash: str | None = None

    def __post_init__(self):
        coefs = np.asarray(self.coefficients, dtype=float)
        if coefs.ndim != 1:
            raise ModelError("coefficients must be a 1-D array")
        object.__setattr__(self, "coefficients", coefs)
        if not 0.0 < self.decision_boundary < 1.0:
            raise ModelError("decision boundary must lie strictly inside (0, 1)")
        if len(self.class_labels) != 2 or self.class_labels[0] == self.class_labels[1]:
            raise ModelError("class labels must be two distinct names")

    @property
    def width(self) -> int:
        return self.coefficients.shape[0]

    @property
    def negative_label(self) -> str:
        return self.class_labels[0]

    @property
    def positive_label(self) -> str:
        return self.class_labels[1]


@dataclass(frozen=True)
class Prediction:
    probability: float
    predicted_class: str
    confidence: float


@dataclass(frozen=True)
class TrainingConfig:
    learning_rate: float = 0.5
    l2_penalty: float = 1e-3
    max_epochs: int = 2000
    tol: float = 1e-9
    seed: int = 42
    decision_boundary: float = 0.5


def sigmoid(y: float) -> float:
    """Numerically stable logistic function for scalar scores."""
    if y >= 0:
        return 1.0 / (1.0 + math.exp(-y))
    e = math.exp(y)
    return e / (1.0 + e)


def predict_proba(model: LogisticModel, x: np.ndarray) -> float:
    """Class-1 probability sigmoid(bias + coefficients . x), clipped into (0, 1)."""
    x = np.asarray(x, dtype=float)
    if x.shape != (model.width,):
        raise ModelError(
            f"vector has shape {x.shape}, model expects ({model.width},)"
        )
    p = sigmoid(model.bias + float(np.dot(model.coefficients, x)))
    return min(max(p, _P_CLIP), 1.0 - _P_CLIP)


def confidence(p: float) -> float:
    """Margin of confidence |2p - 1|; zero exactly at the 0.5 boundary."""
    if not 0.0 <= p <= 1.0:
        raise ModelError(f"probability {p} outside [0, 1]")
    return abs(2.0 * p - 1.0)


def predict(model: LogisticModel, instance: Instance, schema: FeatureSchema) -> Prediction:
    """Probability, decision-rule class (ties to positive), and confidence."""
    if model.schema_hash is not None and model.schema_hash != schema.schema_hash:
        raise ModelError("model was trained against a different schema")
    p = predict_proba(model, encode(instance, schema))
    label = (
        model.positive_label if p >= model.decision_boundary else model.negative_label
    )
    return Prediction(p, label, confidence(p))


def loss_and_gradient(
    X: np.ndarray, y: np.ndarray, coefs: np.ndarray, bias: float, l2: float
) -> tuple[float, np.ndarray, float]:
    """Mean negative log-likelihood with L2 penalty on coefficients (not bias).

    Returns (loss, gradient wrt coefs, gradient wrt bias).  Exposed so the
    gradient can be cross-checked against finite differences.
    """
    scores = X @ coefs + bias
    # log(1 + exp(s)) computed stably for either sign of s
    softplus = np.where(scores > 0, scores + np.log1p(np.exp(-scores)), np.log1p(np.exp(scores)))
    nll = float(np.mean(softplus - y * scores))
    loss = nll + 0.5 * l2 * float(np.dot(coefs, coefs))
    p = np.where(
        scores >= 0, 1.0 / (1.0 + np.exp(-scores)), np.exp(scores) / (1.0 + np.exp(scores))
    )
    residual = p - y
    grad_coefs = X.T @ residual / len(y) + l2 * coefs
    grad_bias = float(np.mean(residual))
    return loss, grad_coefs, grad_bias


def train(
    data: list[Instance],
    labels: list[str],
    schema: FeatureSchema,
    config: TrainingConfig | None = None,
    class_labels: tuple[str, str] | None = None,
    loss_history: list[float] | None = None,
) -> LogisticModel:
    """Gradient-descent training with backtracking steps.

    Backtracking halves the step whenever it would increase the penalized
    loss, which keeps the per-epoch loss monotonically non-increasing.
    Stops when the improvement drops below ``tol`` or at ``max_epochs``.
    When ``loss_history`` is given, the loss after every accepted epoch is
    appended to it.
    """
    config = config or TrainingConfig()
    if not data:
        raise ModelError("training requires at least one example")
    if class_labels is None:
        distinct = sorted(set(labels))
        if len(distinct) != 2:
            raise ModelError(
                f"training requires exactly two classes, got {distinct}"
            )
        class_labels = (distinct[0], distinct[1])
    else:
        stray = set(labels) - set(class_labels)
        if stray:
            raise ModelError(f"labels {sorted(stray)} not in declared classes")
        if len(set(labels)) < 2:
            raise ModelError("training requires at least one example of each class")

    X = np.stack([encode(inst, schema) for inst in data])
    if not np.all(np.isfinite(X)):
        raise ModelError("training data contains non-finite feature values")
    y = np.array([1.0 if lab == class_labels[1] else 0.0 for lab in labels])

    # standardize continuous columns only; one-hot blocks pass through
    mean = np.zeros(schema.encoded_width)
    scale = np.ones(schema.encoded_width)
    for spec, (start, stop) in zip(schema.features, schema.column_spans):
        if not spec.is_categorical:
            mean[start] = float(np.mean(X[:, start]))
            sd = float(np.std(X[:, start]))
            scale[start] = sd if sd > 1e-12 else 1.0
    Xs = (X - mean) / scale

    rng = np.random.default_rng(config.seed)
    coefs = rng.normal(0.0, 0.01, size=schema.encoded_width)
    bias = 0.0
    loss, grad_c, grad_b = loss_and_gradient(Xs, y, coefs, bias, config.l2_penalty)
    if loss_history is not None:
        loss_history.append(loss)
    for _ in range(config.max_epochs):
        step = config.learning_rate
        for _ in range(60):
            trial_c = coefs - step * grad_c
            trial_b = bias - step * grad_b
            trial_loss, trial_gc, trial_gb = loss_and_gradient(
                Xs, y, trial_c, trial_b, config.l2_penalty
            )
            if trial_loss <= loss:
                break
            step *= 0.5
        else:
            break
        improvement = loss - trial_loss
        coefs, bias, loss = trial_c, trial_b, trial_loss
        grad_c, grad_b = trial_gc, trial_gb
        if loss_history is not None:
            loss_history.append(loss)
        if improvement < config.tol:
            break

    raw_coefs = coefs / scale
    raw_bias = bias - float(np.dot(coefs, mean / scale))
    return LogisticModel(
        bias=raw_bias,
        coefficients=raw_coefs,
        class_labels=class_labels,
        decision_boundary=config.decision_boundary,
        standardization=Standardization(tuple(mean.tolist()), tuple(scale.tolist())),
        schema_hash=schema.schema_hash,
    )


def rank_features(model: LogisticModel, schema: FeatureSchema) -> list[tuple[str, float]]:
    """Heuristic importance ranking from standardized coefficient magnitudes.

    Continuous features score |coefficient| * training scale; categorical
    features score the spread (max - min) of their level coefficients, i.e.
    the largest score swing a single flip can cause.  Descending order,
    ties broken by schema position.
    """
    scale = (
        np.asarray(model.standardization.scale)
        if model.standardization is not None
        else np.ones(model.width)
    )
    scored = []
    for i, (spec, (start, stop)) in enumerate(zip(schema.features, schema.column_spans)):
        block = model.coefficients[start:stop]
        if spec.is_categorical:
            importance = float(np.max(block) - np.min(block))
        else:
            importance = abs(float(block[0]) * float(scale[start]))
        scored.append((spec.name, importance, i))
    scored.sort(key=lambda t: (-t[1], t[2]))
    return [(name, importance) for name, importance, _ in scored]


def save_model(path, model: LogisticModel, weights: DistanceWeights | None = None) -> None:
    """Persist a model (and optionally its distance weights) as versioned JSON."""
    doc: dict = {
        "format_version": MODEL_FORMAT_VERSION,
        "schema_hash": model.schema_hash,
        "bias": model.bias,
        "coefficients": model.coefficients.tolist(),
        "class_labels": list(model.class_labels),
        "decision_boundary": model.decision_boundary,
    }
    if model.standardization is not None:
        doc["standardization"] = {
            "mean": list(model.standardization.mean),
            "scale": list(model.standardization.scale),
        }
    if weights is not None:
        doc["distance_weights"] = {
            "continuous": dict(weights.continuous),
            "categorical": dict(weights.categorical),
        }
    Path(path).write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")


def load_model(path) -> tuple[LogisticModel, DistanceWeights | None]:
    path = Path(path)
    if not path.exists():
        raise ModelError(f"model file not found: {path}")
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ModelError(f"{path}: not a valid model file: {exc}") from None
    version = doc.get("format_version")
    if version != MODEL_FORMAT_VERSION:
        raise ModelError(
            f"{path}: unsupported model format version {version!r} "
            f"(expected {MODEL_FORMAT_VERSION})"
        )
    std = None
    if "standardization" in doc:
        std = Standardization(
            tuple(doc["standardization"]["mean"]), tuple(doc["standardization"]["scale"])
        )
    model = LogisticModel(
        bias=float(doc["bias"]),
        coefficients=np.asarray(doc["coefficients"], dtype=float),
        class_labels=tuple(doc["class_labels"]),
        decision_boundary=float(doc["decision_boundary"]),
        standardization=std,
        schema_hash=doc.get("schema_hash"),
    )
    weights = None
    if "distance_weights" in doc:
        dw = doc["distance_weights"]
        weights = DistanceWeights(dict(dw["continuous"]), dict(dw["categorical"]))
    return model, weights
