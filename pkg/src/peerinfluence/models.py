"""Built-in classifiers and model persistence.

Both estimators follow the scikit-learn protocol (``fit`` / ``predict`` /
``get_params``) and expose raw scores on the log-odds scale through
``decision_function``; the predicted class is 1 iff the raw score is
non-negative. Scores are pure deterministic functions of the input, which
is what the attribution layer relies on.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator

from .data import Dataset
from .errors import ModelFormatError, TrainingError
from .validation import as_binary_labels, as_float_matrix, check_feature_count

MODEL_FORMAT = "peerinfluence-model"
MODEL_VERSION = 1

# Leaf-weight shrinkage for Newton steps; keeps leaves finite when the
# Hessian mass in a node is tiny.
_LAMBDA = 1.0


def _sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def _log_loss(y: np.ndarray, margins: np.ndarray) -> float:
    # log(1 + exp(-s)) written via logaddexp for stability
    return float(np.mean(np.logaddexp(0.0, -margins * (2.0 * y - 1.0))))


def _resolve_xy(X, y) -> tuple[np.ndarray, np.ndarray]:
    if isinstance(X, Dataset):
        if y is not None:
            raise ValueError("pass either a Dataset or (X, y), not both")
        return X.rows, X.labels
    Xm = as_float_matrix(X)
    ym = as_binary_labels(y, n=Xm.shape[0])
    return Xm, ym


@dataclass
class _Tree:
    """Flat regression tree; ``feature == -1`` marks a leaf."""

    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray

    def predict(self, X: np.ndarray, _ar: np.ndarray | None = None) -> np.ndarray:
        n = X.shape[0]
        ar = np.arange(n) if _ar is None else _ar
        idx = np.zeros(n, dtype=np.int64)
        while True:
            f = self.feature[idx]
            leaf = f < 0
            if leaf.all():
                return self.value[idx]
            go_left = X[ar, np.maximum(f, 0)] <= self.threshold[idx]
            idx = np.where(leaf, idx, np.where(go_left, self.left[idx], self.right[idx]))

    def depth(self, node: int = 0) -> int:
        if self.feature[node] < 0:
            return 0
        return 1 + max(self.depth(self.left[node]), self.depth(self.right[node]))

    def to_dict(self) -> dict:
        return {
            "feature": self.feature.tolist(),
            "threshold": self.threshold.tolist(),
            "left": self.left.tolist(),
            "right": self.right.tolist(),
            "value": self.value.tolist(),
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "_Tree":
        return cls(
            feature=np.asarray(doc["feature"], dtype=np.int64),
            threshold=np.asarray(doc["threshold"], dtype=np.float64),
            left=np.asarray(doc["left"], dtype=np.int64),
            right=np.asarray(doc["right"], dtype=np.int64),
            value=np.asarray(doc["value"], dtype=np.float64),
        )


def _find_split(X, g, h, rows, min_leaf):
    """Best axis-aligned split of ``rows`` by Newton gain, or None.

    Ties break toward the lowest feature index, then the lowest
    threshold, so tree construction is fully deterministic.
    """
    G, H = g[rows].sum(), h[rows].sum()
    parent = G * G / (H + _LAMBDA)
    best = None  # (gain, feature, threshold)
    for f in range(X.shape[1]):
        xs = X[rows, f]
        order = np.argsort(xs, kind="stable")
        xs_sorted = xs[order]
        gl = np.cumsum(g[rows][order])[:-1]
        hl = np.cumsum(h[rows][order])[:-1]
        sizes = np.arange(1, rows.size)
        valid = (xs_sorted[:-1] < xs_sorted[1:]) & (sizes >= min_leaf) & (rows.size - sizes >= min_leaf)
        if not valid.any():
            continue
        gain = gl**2 / (hl + _LAMBDA) + (G - gl) ** 2 / (H - hl + _LAMBDA) - parent
        gain[~valid] = -np.inf
        k = int(np.argmax(gain))
        if gain[k] > 1e-12 and (best is None or gain[k] > best[0]):
            best = (float(gain[k]), f, float((xs_sorted[k] + xs_sorted[k + 1]) / 2.0))
    return best


def _grow_tree(X, g, h, max_depth, min_leaf) -> _Tree:
    feature: list[int] = []
    threshold: list[float] = []
    left: list[int] = []
    right: list[int] = []
    value: list[float] = []

    def new_node() -> int:
        feature.append(-1)
        threshold.append(0.0)
        left.append(-1)
        right.append(-1)
        value.append(0.0)
        return len(feature) - 1

    def build(rows: np.ndarray, depth: int) -> int:
        node = new_node()
        split = None
        if depth < max_depth and rows.size >= 2 * min_leaf:
            split = _find_split(X, g, h, rows, min_leaf)
        if split is None:
            value[node] = float(-g[rows].sum() / (h[rows].sum() + _LAMBDA))
            return node
        _, f, thr = split
        feature[node] = f
        threshold[node] = thr
        mask = X[rows, f] <= thr
        left[node] = build(rows[mask], depth + 1)
        right[node] = build(rows[~mask], depth + 1)
        return node

    build(np.arange(X.shape[0]), 0)
    return _Tree(
        feature=np.asarray(feature, dtype=np.int64),
        threshold=np.asarray(threshold, dtype=np.float64),
        left=np.asarray(left, dtype=np.int64),
        right=np.asarray(right, dtype=np.int64),
        value=np.asarray(value, dtype=np.float64),
    )


class GbdtClassifier(BaseEstimator):
    """Gradient-boosted decision trees for binary classification.

    Boosts regression trees on the logistic loss with second-order
    (Newton) leaf weights, exact greedy split search, and no row or
    column subsampling, so training is deterministic for fixed data and
    configuration.

    Parameters
    ----------
    rounds : int
        Number of boosting rounds (trees).
    max_depth : int
        Maximum tree depth; depth 0 means a single leaf.
    learning_rate : float
        Shrinkage applied to every tree's contribution.
    min_leaf : int
        Minimum number of training rows in each leaf.
    seed : int
        Kept for interface parity; the exact greedy procedure does not
        consume randomness.
    """

    def __init__(self, rounds=60, max_depth=3, learning_rate=0.2, min_leaf=5, seed=0):
        self.rounds = rounds
        self.max_depth = max_depth
        self.learning_rate = learning_rate
        self.min_leaf = min_leaf
        self.seed = seed

    kind = "gbdt"

    def fit(self, X, y=None):
        X, y = _resolve_xy(X, y)
        classes = np.unique(y)
        if classes.size < 2:
            raise TrainingError("training data must contain both classes")
        if self.rounds < 0:
            raise ValueError(f"rounds must be >= 0, got {self.rounds}")

        prevalence = float(y.mean())
        self.base_score_ = float(np.log(prevalence / (1.0 - prevalence)))
        self.trees_: list[_Tree] = []
        self.n_features_in_ = X.shape[1]
        self.train_loss_path_ = [_log_loss(y, np.full(y.shape, self.base_score_))]

        margins = np.full(y.shape, self.base_score_)
        for _ in range(self.rounds):
            p = _sigmoid(margins)
            g = p - y
            h = p * (1.0 - p)
            tree = _grow_tree(X, g, h, self.max_depth, self.min_leaf)
            margins = margins + self.learning_rate * tree.predict(X)
            self.trees_.append(tree)
            self.train_loss_path_.append(_log_loss(y, margins))
        self.train_accuracy_ = float(np.mean((margins >= 0).astype(np.int64) == y))
        return self

    def decision_function(self, X) -> np.ndarray:
        X = as_float_matrix(X)
        check_feature_count(self.n_features_in_, X.shape[1])
        ar = np.arange(X.shape[0])
        scores = np.full(X.shape[0], self.base_score_)
        for tree in self.trees_:
            scores = scores + self.learning_rate * tree.predict(X, ar)
        return scores

    def predict(self, X) -> np.ndarray:
        return (self.decision_function(X) >= 0).astype(np.int64)

    def used_features(self) -> frozenset[int]:
        """Indices of features any tree actually splits on."""
        used: set[int] = set()
        for tree in self.trees_:
            used.update(int(f) for f in tree.feature if f >= 0)
        return frozenset(used)

    @property
    def config_digest(self) -> str:
        blob = json.dumps(self.get_params(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]


class LogisticClassifier(BaseEstimator):
    """Binary logistic regression fit by full-batch gradient descent.

    The ridge penalty is applied as a proximal (implicit) step,
    ``w <- (w - lr * grad) / (1 + lr * l2)``, which stays stable for
    arbitrarily large ``l2``. The linear score identity
    ``decision_function(x) = bias_ + weights_ @ x`` is exact, which makes
    this model an analytic oracle for attribution tests.
    """

    def __init__(self, epochs=800, learning_rate=0.5, l2=0.0, seed=0):
        self.epochs = epochs
        self.learning_rate = learning_rate
        self.l2 = l2
        self.seed = seed

    kind = "logistic"

    def fit(self, X, y=None):
        X, y = _resolve_xy(X, y)
        if np.unique(y).size < 2:
            raise TrainingError("training data must contain both classes")
        n, m = X.shape
        w = np.zeros(m)
        b = 0.0
        lr = float(self.learning_rate)
        for _ in range(self.epochs):
            margins = X @ w + b
            p = _sigmoid(margins)
            grad_w = X.T @ (p - y) / n
            grad_b = float(np.mean(p - y))
            w = (w - lr * grad_w) / (1.0 + lr * self.l2)
            b = b - lr * grad_b
            if not (np.isfinite(w).all() and math.isfinite(b)):
                raise TrainingError("logistic training diverged to non-finite parameters")
        self.weights_ = w
        self.bias_ = b
        self.n_features_in_ = m
        self.train_accuracy_ = float(np.mean(((X @ w + b) >= 0).astype(np.int64) == y))
        return self

    def decision_function(self, X) -> np.ndarray:
        X = as_float_matrix(X)
        check_feature_count(self.n_features_in_, X.shape[1])
        return X @ self.weights_ + self.bias_

    def predict(self, X) -> np.ndarray:
        return (self.decision_function(X) >= 0).astype(np.int64)

    @property
    def config_digest(self) -> str:
        blob = json.dumps(self.get_params(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]


def train_gbdt(train: Dataset, **params) -> GbdtClassifier:
    return GbdtClassifier(**params).fit(train)


def train_logistic(train: Dataset, **params) -> LogisticClassifier:
    return LogisticClassifier(**params).fit(train)


def save_model(model, path) -> None:
    """Write a fitted model as a versioned JSON document."""
    if isinstance(model, GbdtClassifier):
        state = {
            "base_score": model.base_score_,
            "n_features": model.n_features_in_,
            "trees": [t.to_dict() for t in model.trees_],
        }
    elif isinstance(model, LogisticClassifier):
        state = {
            "weights": model.weights_.tolist(),
            "bias": model.bias_,
            "n_features": model.n_features_in_,
        }
    else:
        raise ModelFormatError(f"cannot serialise model of type {type(model).__name__}")
    doc = {
        "format": MODEL_FORMAT,
        "version": MODEL_VERSION,
        "kind": model.kind,
        "params": model.get_params(),
        "state": state,
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")


def load_model(path):
    """Load a model written by :func:`save_model`."""
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ModelFormatError(f"{path}: malformed model file ({exc})") from exc
    if not isinstance(doc, dict) or doc.get("format") != MODEL_FORMAT:
        raise ModelFormatError(f"{path}: not a {MODEL_FORMAT} document")
    version = doc.get("version")
    if version != MODEL_VERSION:
        raise ModelFormatError(
            f"{path}: file version {version}, this build supports version {MODEL_VERSION}"
        )
    try:
        kind = doc["kind"]
        params = doc["params"]
        state = doc["state"]
        if kind == "gbdt":
            model = GbdtClassifier(**params)
            model.base_score_ = float(state["base_score"])
            model.n_features_in_ = int(state["n_features"])
            model.trees_ = [_Tree.from_dict(t) for t in state["trees"]]
            for tree in model.trees_:
                bad = tree.feature[(tree.feature >= model.n_features_in_)]
                if bad.size:
                    raise ModelFormatError(f"{path}: split feature {int(bad[0])} out of range")
            return model
        if kind == "logistic":
            model = LogisticClassifier(**params)
            model.weights_ = np.asarray(state["weights"], dtype=np.float64)
            model.bias_ = float(state["bias"])
            model.n_features_in_ = int(state["n_features"])
            return model
        raise ModelFormatError(f"{path}: unknown model kind {kind!r}")
    except (KeyError, TypeError, ValueError) as exc:
        raise ModelFormatError(f"{path}: malformed model file ({exc})") from exc
