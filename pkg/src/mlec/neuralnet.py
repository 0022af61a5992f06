"""A small feed-forward classifier written directly on numpy.

Topology 5-5-3-2: two sigmoid layers and a softmax output.  Training uses
minibatch backpropagation through a class-weighted cross-entropy with an L2
penalty on the weights, RMSProp updates and early stopping on the held-out
split.
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

LAYER_SIZES = (5, 5, 3, 2)
MODEL_FORMAT = "mlec-model"
MODEL_VERSION = 1


class DegenerateDatasetError(ValueError):
    pass


class ModelFileError(ValueError):
    """The model file is unreadable or structurally broken."""


class ModelVersionError(ModelFileError):
    pass


@dataclass
class NetworkParameters:
    weights: list[np.ndarray]
    biases: list[np.ndarray]

    def copy(self) -> "NetworkParameters":
        return NetworkParameters([w.copy() for w in self.weights], [b.copy() for b in self.biases])

    def arrays(self) -> list[np.ndarray]:
        return [*self.weights, *self.biases]

    @property
    def layer_sizes(self) -> tuple[int, ...]:
        return (self.weights[0].shape[0], *(w.shape[1] for w in self.weights))


@dataclass
class NormalizerStats:
    mean: np.ndarray
    std: np.ndarray


@dataclass
class TrainConfig:
    epochs_max: int = 400
    minibatch: int = 128
    learning_rate: float = 1e-3
    l2: float = 1e-3
    class_weights: tuple[float, float] = (0.8, 1.2)
    train_fraction: float = 0.7
    time_budget: float = 60.0
    seed: int = 0
    rmsprop_decay: float = 0.95
    rmsprop_epsilon: float = 1e-8

    def __post_init__(self) -> None:
        if self.epochs_max < 0 or self.minibatch <= 0:
            raise ValueError("epochs_max must be >= 0 and minibatch > 0")
        if self.learning_rate <= 0 or self.l2 < 0 or self.time_budget < 0:
            raise ValueError("learning_rate must be positive; l2 and time_budget non-negative")
        if not 0 < self.train_fraction < 1:
            raise ValueError("train_fraction must lie in (0, 1)")
        if not 0 <= self.rmsprop_decay < 1:
            raise ValueError("rmsprop_decay must lie in [0, 1)")


# ---------------------------------------------------------------------------
# Network maths
# ---------------------------------------------------------------------------


def init(seed: int, layer_sizes: Sequence[int] = LAYER_SIZES) -> NetworkParameters:
    """Xavier initialization: ``N(0, 2 / (n_in + n_out))`` weights, zero biases."""
    rng = np.random.default_rng(seed)
    weights, biases = [], []
    for n_in, n_out in zip(layer_sizes[:-1], layer_sizes[1:]):
        weights.append(rng.normal(0.0, math.sqrt(2.0 / (n_in + n_out)), size=(n_in, n_out)))
        biases.append(np.zeros(n_out))
    return NetworkParameters(weights, biases)


def sigmoid(z: np.ndarray) -> np.ndarray:
    return 0.5 * (1.0 + np.tanh(0.5 * z))


def softmax(z: np.ndarray) -> np.ndarray:
    z = z - z.max(axis=1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=1, keepdims=True)


def _forward(params: NetworkParameters, x: np.ndarray) -> list[np.ndarray]:
    activations = [np.asarray(x, dtype=float).reshape(-1, params.layer_sizes[0])]
    last = len(params.weights) - 1
    for i, (w, b) in enumerate(zip(params.weights, params.biases)):
        z = activations[-1] @ w + b
        activations.append(softmax(z) if i == last else sigmoid(z))
    return activations


def forward(params: NetworkParameters, x: np.ndarray) -> np.ndarray:
    """Row-wise class probabilities for already-normalized inputs."""
    return _forward(params, x)[-1]


def l2_penalty(params: NetworkParameters, l2: float) -> float:
    return 0.5 * l2 * sum(float(np.sum(w * w)) for w in params.weights)


def loss(
    probs: np.ndarray,
    labels: np.ndarray,
    class_weights: Sequence[float] = (0.8, 1.2),
    params: NetworkParameters | None = None,
    l2: float = 0.0,
) -> float:
    """Mean of ``-w_y log p_y`` plus ``(l2 / 2) * sum(W**2)``."""
    labels = np.asarray(labels, dtype=int)
    data = 0.0
    if len(labels):
        p = np.clip(probs[np.arange(len(labels)), labels], 1e-300, None)
        data = float(np.mean(-np.asarray(class_weights)[labels] * np.log(p)))
    return data + (l2_penalty(params, l2) if params is not None else 0.0)


def gradients(
    params: NetworkParameters,
    x: np.ndarray,
    labels: np.ndarray,
    class_weights: Sequence[float] = (0.8, 1.2),
    l2: float = 0.0,
) -> NetworkParameters:
    """Analytic gradient of :func:`loss` with respect to every parameter."""
    labels = np.asarray(labels, dtype=int)
    acts = _forward(params, x)
    n = len(labels)
    grads_w = [l2 * w for w in params.weights]
    grads_b = [np.zeros_like(b) for b in params.biases]
    if n == 0:
        return NetworkParameters(grads_w, grads_b)
    target = np.zeros_like(acts[-1])
    target[np.arange(n), labels] = 1.0
    delta = (acts[-1] - target) * np.asarray(class_weights)[labels][:, None] / n
    for i in range(len(params.weights) - 1, -1, -1):
        grads_w[i] = grads_w[i] + acts[i].T @ delta
        grads_b[i] = delta.sum(axis=0)
        if i:
            a = acts[i]
            delta = (delta @ params.weights[i].T) * a * (1.0 - a)
    return NetworkParameters(grads_w, grads_b)


def rmsprop_init(params: NetworkParameters) -> list[np.ndarray]:
    return [np.zeros_like(a) for a in params.arrays()]


def rmsprop_step(
    params: NetworkParameters,
    grads: NetworkParameters,
    cache: list[np.ndarray],
    learning_rate: float = 1e-3,
    decay: float = 0.95,
    epsilon: float = 1e-8,
) -> tuple[NetworkParameters, list[np.ndarray]]:
    new_cache, updated = [], []
    for theta, g, c in zip(params.arrays(), grads.arrays(), cache):
        c = decay * c + (1.0 - decay) * g * g
        new_cache.append(c)
        updated.append(theta - learning_rate * g / (np.sqrt(c) + epsilon))
    k = len(params.weights)
    return NetworkParameters(updated[:k], updated[k:]), new_cache


# ---------------------------------------------------------------------------
# Normalization
# ---------------------------------------------------------------------------


def fit_normalizer(x: np.ndarray) -> NormalizerStats:
    mean = x.mean(axis=0)
    std = x.std(axis=0)
    constant = std < 1e-12
    # a constant column passes through unchanged
    return NormalizerStats(np.where(constant, 0.0, mean), np.where(constant, 1.0, std))


def normalize(stats: NormalizerStats, x: np.ndarray) -> np.ndarray:
    return (np.asarray(x, dtype=float) - stats.mean) / stats.std


# ---------------------------------------------------------------------------
# Evaluation
# ---------------------------------------------------------------------------


def _div(a: float, b: float) -> float:
    return a / b if b else 0.0


def _f1(p: float, r: float) -> float:
    return _div(2 * p * r, p + r)


@dataclass(frozen=True)
class EvalReport:
    """Metrics with class 1 as the positive class, plus macro averages."""

    tp: int
    fp: int
    tn: int
    fn: int

    @classmethod
    def from_confusion(cls, tp: int, fp: int, tn: int, fn: int) -> "EvalReport":
        return cls(int(tp), int(fp), int(tn), int(fn))

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn

    @property
    def accuracy(self) -> float:
        return _div(self.tp + self.tn, self.total)

    @property
    def precision(self) -> float:
        return _div(self.tp, self.tp + self.fp)

    @property
    def recall(self) -> float:
        return _div(self.tp, self.tp + self.fn)

    @property
    def f1(self) -> float:
        return _f1(self.precision, self.recall)

    @property
    def macro_precision(self) -> float:
        return 0.5 * (self.precision + _div(self.tn, self.tn + self.fn))

    @property
    def macro_recall(self) -> float:
        return 0.5 * (self.recall + _div(self.tn, self.tn + self.fp))

    @property
    def macro_f1(self) -> float:
        neg = _f1(_div(self.tn, self.tn + self.fn), _div(self.tn, self.tn + self.fp))
        return 0.5 * (self.f1 + neg)

    @property
    def confusion(self) -> np.ndarray:
        """Rows are actual (0, 1), columns predicted (0, 1)."""
        return np.array([[self.tn, self.fp], [self.fn, self.tp]])

    def table(self) -> str:
        lines = [
            f"{'metric':<10} {'class 1':>9} {'macro':>9}",
            f"{'accuracy':<10} {self.accuracy:>9.4f} {'':>9}",
            f"{'precision':<10} {self.precision:>9.4f} {self.macro_precision:>9.4f}",
            f"{'recall':<10} {self.recall:>9.4f} {self.macro_recall:>9.4f}",
            f"{'f1':<10} {self.f1:>9.4f} {self.macro_f1:>9.4f}",
            "confusion (rows actual 0/1, columns predicted 0/1)",
            f"  {self.tn:>6} {self.fp:>6}",
            f"  {self.fn:>6} {self.tp:>6}",
        ]
        return "\n".join(lines)


def evaluate(params: NetworkParameters, stats: NormalizerStats | None, x: np.ndarray, y: np.ndarray) -> EvalReport:
    y = np.asarray(y, dtype=int)
    if len(y) == 0:
        raise ValueError("empty evaluation set")
    inputs = normalize(stats, x) if stats is not None else x
    pred = forward(params, inputs).argmax(axis=1)
    return EvalReport.from_confusion(
        tp=np.sum((pred == 1) & (y == 1)),
        fp=np.sum((pred == 1) & (y == 0)),
        tn=np.sum((pred == 0) & (y == 0)),
        fn=np.sum((pred == 0) & (y == 1)),
    )


# ---------------------------------------------------------------------------
# Training
# ---------------------------------------------------------------------------


@dataclass
class TrainResult:
    params: NetworkParameters
    stats: NormalizerStats
    report: EvalReport
    log: list[str] = field(default_factory=list)
    test_losses: list[float] = field(default_factory=list)
    best_epoch: int = 0
    epochs_run: int = 0


def split(x: np.ndarray, y: np.ndarray, train_fraction: float, seed: int):
    order = np.random.default_rng(seed).permutation(len(y))
    cut = int(round(train_fraction * len(y)))
    tr, te = order[:cut], order[cut:]
    return x[tr], y[tr], x[te], y[te]


def train(
    x: np.ndarray,
    y: np.ndarray,
    config: TrainConfig | None = None,
    clock: Callable[[], float] = time.perf_counter,
    on_log: Callable[[str], None] | None = None,
) -> TrainResult:
    """Shuffle, split, normalize, then minibatch RMSProp with early stopping.

    The test split is scored after every epoch (epoch 0 is the initial
    parameters) with the plain unweighted cross-entropy; the best parameters
    seen are returned.
    """
    config = config or TrainConfig()
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=int)
    counts = np.bincount(y, minlength=2) if len(y) else np.zeros(2, int)
    if len(counts) != 2 or counts.min() < 2:
        raise DegenerateDatasetError(f"need at least 2 rows of each class, got counts {counts.tolist()}")

    rng = np.random.default_rng(config.seed)
    x_tr, y_tr, x_te, y_te = split(x, y, config.train_fraction, int(rng.integers(2**63)))
    if len(y_te) == 0 or len(y_tr) == 0:
        raise DegenerateDatasetError("split left an empty partition")
    stats = fit_normalizer(x_tr)
    x_tr, x_te = normalize(stats, x_tr), normalize(stats, x_te)

    log: list[str] = []

    def emit(line: str) -> None:
        log.append(line)
        if on_log:
            on_log(line)

    params = init(int(rng.integers(2**63)))
    cache = rmsprop_init(params)
    best = params.copy()
    best_loss = loss(forward(params, x_te), y_te, (1.0, 1.0))
    history = [best_loss]
    best_epoch = 0
    emit(f"epoch=0 test_loss={best_loss:.6f}")
    start = clock()
    epoch = 0
    for epoch in range(1, config.epochs_max + 1):
        if clock() - start >= config.time_budget:
            emit(f"budget exhausted after {epoch - 1} epochs")
            epoch -= 1
            break
        order = rng.permutation(len(y_tr))
        for lo in range(0, len(order), config.minibatch):
            idx = order[lo:lo + config.minibatch]
            g = gradients(params, x_tr[idx], y_tr[idx], config.class_weights, config.l2)
            params, cache = rmsprop_step(
                params, g, cache, config.learning_rate, config.rmsprop_decay, config.rmsprop_epsilon
            )
        test_loss = loss(forward(params, x_te), y_te, (1.0, 1.0))
        history.append(test_loss)
        if test_loss < best_loss:
            best_loss, best, best_epoch = test_loss, params.copy(), epoch
        emit(f"epoch={epoch} test_loss={test_loss:.6f} best_epoch={best_epoch}")
    report = evaluate(best, None, x_te, y_te)
    emit(f"best epoch {best_epoch} test_loss={best_loss:.6f} accuracy={report.accuracy:.4f}")
    return TrainResult(best, stats, report, log, history, best_epoch, epoch)


# ---------------------------------------------------------------------------
# Inference bundle and persistence
# ---------------------------------------------------------------------------


@dataclass
class TrainedModel:
    params: NetworkParameters
    stats: NormalizerStats
    seed: int = 0

    def predict_proba(self, raw_features: np.ndarray) -> np.ndarray:
        """Probability of label 1 for each raw (unnormalized) feature row."""
        return forward(self.params, normalize(self.stats, raw_features))[:, 1]


def model_to_dict(model: TrainedModel) -> dict:
    return {
        "format": MODEL_FORMAT,
        "version": MODEL_VERSION,
        "seed": model.seed,
        "layer_sizes": list(model.params.layer_sizes),
        "weights": [w.tolist() for w in model.params.weights],
        "biases": [b.tolist() for b in model.params.biases],
        "normalizer": {"mean": model.stats.mean.tolist(), "std": model.stats.std.tolist()},
    }


def model_from_dict(doc: dict) -> TrainedModel:
    if not isinstance(doc, dict) or doc.get("format") != MODEL_FORMAT:
        raise ModelFileError("not a model file")
    if doc.get("version") != MODEL_VERSION:
        raise ModelVersionError(f"unsupported model version {doc.get('version')!r}, expected {MODEL_VERSION}")
    try:
        weights = [np.array(w, dtype=float) for w in doc["weights"]]
        biases = [np.array(b, dtype=float) for b in doc["biases"]]
        stats = NormalizerStats(np.array(doc["normalizer"]["mean"], float), np.array(doc["normalizer"]["std"], float))
        params = NetworkParameters(weights, biases)
        sizes = tuple(doc["layer_sizes"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ModelFileError(f"corrupt model file: {exc}") from exc
    if params.layer_sizes != sizes or any(b.shape != (w.shape[1],) for w, b in zip(weights, biases)):
        raise ModelFileError("corrupt model file: inconsistent shapes")
    if not all(np.all(np.isfinite(a)) for a in params.arrays()):
        raise ModelFileError("corrupt model file: non-finite parameters")
    return TrainedModel(params, stats, int(doc.get("seed", 0)))


def save_model(path: str | Path, model: TrainedModel) -> None:
    Path(path).write_text(json.dumps(model_to_dict(model)) + "\n", encoding="utf-8")


def load_model(path: str | Path) -> TrainedModel:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise ModelFileError(f"corrupt model file: {exc}") from exc
    return model_from_dict(doc)
