"""From-scratch 4-class classifiers over scaled pose encodings.

Decision tree (CART, Gini impurity), bagged random forest with per-split
feature subsampling, and a multinomial logistic baseline trained by batch
gradient descent. Includes stratified K-fold cross-validation, grid
search, per-class evaluation metrics, and the persistable model bundle
that carries the classifier together with its preprocessing stats and
feature order.

All training is deterministic given (data, params, seed): per-tree RNG
streams are spawned from the master seed up front, so serial and
tree-parallel training would produce identical models.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import preprocess
from .encoder import ENCODING_SIZE, spec_feature_names
from .preprocess import EmptyDataset, LabeledDataset, PreprocessStats

N_CLASSES = 4
LABEL_MAP = ("L1", "L2", "L3", "L4")

MODEL_FORMAT_VERSION = 1


class LabelOutOfRange(ValueError):
    """A training label falls outside {1, 2, 3, 4}."""


class NonFiniteFeature(ValueError):
    """A feature matrix contains NaN or infinities."""


class ModelNotTrained(ValueError):
    """Prediction was requested from an unfitted model."""


class TooFewRows(ValueError):
    """Dataset too small for the requested fold count."""


class BadModelFile(ValueError):
    """Model file missing, unparseable, or of an unsupported format."""


@dataclass(frozen=True)
class Hyperparams:
    """Forest/tree training knobs. ``max_depth=None`` means unlimited."""

    n_trees: int = 100
    max_depth: int | None = None
    min_samples_split: int = 2
    max_features: int = 3  # floor(sqrt(15))
    bootstrap: bool = True
    seed: int = 0

    def __post_init__(self) -> None:
        if self.n_trees < 1:
            raise ValueError("n_trees must be >= 1")
        if self.min_samples_split < 2:
            raise ValueError("min_samples_split must be >= 2")
        if self.max_features < 1:
            raise ValueError("max_features must be >= 1")

    def to_dict(self) -> dict:
        return {
            "n_trees": self.n_trees,
            "max_depth": self.max_depth,
            "min_samples_split": self.min_samples_split,
            "max_features": self.max_features,
            "bootstrap": self.bootstrap,
        }


@dataclass(frozen=True)
class LogisticParams:
    """Fixed gradient-descent budget for the reproducible baseline."""

    learning_rate: float = 0.1
    n_iter: int = 500
    l2: float = 1e-3

    def to_dict(self) -> dict:
        return {"learning_rate": self.learning_rate, "n_iter": self.n_iter, "l2": self.l2}


# ---------------------------------------------------------------------------
# Tree nodes
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Leaf:
    counts: tuple[int, int, int, int]

    @property
    def prediction(self) -> int:
        # first argmax -> lowest label on ties
        return int(np.argmax(self.counts)) + 1

    def to_dict(self) -> dict:
        return {"counts": list(self.counts), "prediction": self.prediction}


@dataclass(frozen=True)
class Split:
    feature: int
    threshold: float
    left: "Split | Leaf"
    right: "Split | Leaf"

    def to_dict(self) -> dict:
        return {
            "feature": self.feature,
            "threshold": self.threshold,
            "left": self.left.to_dict(),
            "right": self.right.to_dict(),
        }


def node_from_dict(obj: dict) -> Split | Leaf:
    if "counts" in obj:
        counts = obj["counts"]
        if len(counts) != N_CLASSES:
            raise BadModelFile("leaf counts must have 4 entries")
        return Leaf(tuple(int(c) for c in counts))
    return Split(
        int(obj["feature"]),
        float(obj["threshold"]),
        node_from_dict(obj["left"]),
        node_from_dict(obj["right"]),
    )


def gini_impurity(y: np.ndarray) -> float:
    """1 - sum(p_i^2) over the class distribution of ``y`` (labels 1..4)."""
    counts = np.bincount(np.asarray(y, dtype=int) - 1, minlength=N_CLASSES)
    p = counts / counts.sum()
    return float(1.0 - np.sum(p * p))


def _validate_training_data(X, y) -> tuple[np.ndarray, np.ndarray]:
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=int)
    if X.ndim != 2 or X.shape[0] == 0:
        raise EmptyDataset("training data must be a non-empty 2D matrix")
    if y.shape != (X.shape[0],):
        raise ValueError("labels must align with rows of X")
    if np.any((y < 1) | (y > N_CLASSES)):
        raise LabelOutOfRange(f"labels must lie in 1..{N_CLASSES}")
    if not np.all(np.isfinite(X)):
        raise NonFiniteFeature("feature matrix contains non-finite values")
    return X, y


_EYE4 = np.eye(N_CLASSES)


def _best_split(Xn: np.ndarray, y0: np.ndarray, feature_order, budget: int):
    """Lowest weighted-Gini (feature, threshold) among candidate midpoints.

    Candidate thresholds are midpoints of consecutive distinct sorted
    values. Features constant within the node do not consume the
    ``budget`` of considered features, so a valid partition is found
    whenever one exists. Ties keep the earlier feature / smaller
    threshold.
    """
    m = len(y0)
    onehot = _EYE4[y0]
    best_score = np.inf
    best = None
    considered = 0
    for f in feature_order:
        col = Xn[:, int(f)]
        order = np.argsort(col, kind="stable")
        cs = col[order]
        boundaries = np.nonzero(cs[:-1] < cs[1:])[0]
        if boundaries.size == 0:
            continue
        considered += 1
        cum = np.cumsum(onehot[order], axis=0)
        left = cum[boundaries]
        right = cum[-1] - left
        nl = boundaries + 1.0
        nr = m - nl
        # m * weighted_gini = (nl*gini_l + nr*gini_r) = nl - sum(l^2)/nl + nr - sum(r^2)/nr
        score = nl - (left * left).sum(axis=1) / nl + nr - (right * right).sum(axis=1) / nr
        j = int(np.argmin(score))
        if score[j] < best_score:
            best_score = score[j]
            best = (int(f), float((cs[boundaries[j]] + cs[boundaries[j] + 1]) / 2.0))
        if considered >= budget:
            break
    return best


def _grow(Xn, y0, depth, params: Hyperparams, rng: np.random.Generator) -> Split | Leaf:
    counts = np.bincount(y0, minlength=N_CLASSES)
    m = len(y0)
    pure = counts.max() == m
    depth_capped = params.max_depth is not None and depth >= params.max_depth
    if pure or depth_capped or m < params.min_samples_split:
        return Leaf(tuple(int(c) for c in counts))

    n_features = Xn.shape[1]
    if params.max_features >= n_features:
        feature_order = np.arange(n_features)
        budget = n_features
    else:
        feature_order = rng.permutation(n_features)
        budget = params.max_features
    found = _best_split(Xn, y0, feature_order, budget)
    if found is None:
        return Leaf(tuple(int(c) for c in counts))
    f, thr = found
    mask = Xn[:, f] <= thr
    return Split(
        f,
        thr,
        _grow(Xn[mask], y0[mask], depth + 1, params, rng),
        _grow(Xn[~mask], y0[~mask], depth + 1, params, rng),
    )


def train_tree(X, y, params: Hyperparams | None = None) -> Split | Leaf:
    """Grow one CART tree; ``params.seed`` only matters when subsampling features."""
    params = params or Hyperparams(n_trees=1, max_features=ENCODING_SIZE, bootstrap=False)
    X, y = _validate_training_data(X, y)
    rng = np.random.default_rng(np.random.SeedSequence(params.seed))
    return _grow(X, y - 1, 0, params, rng)


class _CompiledTree:
    """Flat-array form of a tree for vectorized batch application."""

    def __init__(self, root: Split | Leaf):
        feature, threshold, left, right, probs = [], [], [], [], []

        def add(node) -> int:
            idx = len(feature)
            if isinstance(node, Leaf):
                feature.append(-1)
                threshold.append(0.0)
                left.append(-1)
                right.append(-1)
                total = max(sum(node.counts), 1)
                probs.append([c / total for c in node.counts])
            else:
                feature.append(node.feature)
                threshold.append(node.threshold)
                left.append(-1)
                right.append(-1)
                probs.append([0.0] * N_CLASSES)
                pos = idx
                left[pos] = add(node.left)
                right[pos] = add(node.right)
            return idx

        add(root)
        self.feature = np.array(feature, dtype=np.int32)
        self.threshold = np.array(threshold)
        self.left = np.array(left, dtype=np.int32)
        self.right = np.array(right, dtype=np.int32)
        self.probs = np.array(probs)

    def leaf_indices(self, X: np.ndarray) -> np.ndarray:
        idx = np.zeros(len(X), dtype=np.int32)
        while True:
            feats = self.feature[idx]
            active = np.nonzero(feats >= 0)[0]
            if active.size == 0:
                return idx
            node = idx[active]
            go_left = X[active, feats[active]] <= self.threshold[node]
            idx[active] = np.where(go_left, self.left[node], self.right[node])

    def predict(self, X: np.ndarray) -> np.ndarray:
        leaves = self.leaf_indices(X)
        return np.argmax(self.probs[leaves], axis=1) + 1


class DecisionTreeModel:
    """A single trained tree plus its derived fast predictor."""

    def __init__(self, root: Split | Leaf, params: Hyperparams):
        self.root = root
        self.params = params
        self._compiled = _CompiledTree(root)

    def predict(self, X: np.ndarray) -> np.ndarray:
        return self._compiled.predict(np.asarray(X, dtype=float))

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        leaves = self._compiled.leaf_indices(np.asarray(X, dtype=float))
        return self._compiled.probs[leaves]


class RandomForestModel:
    """Bagged trees; prediction is a majority vote with lowest-label ties."""

    def __init__(self, roots: list[Split | Leaf], params: Hyperparams):
        self.roots = roots
        self.params = params
        self._compiled = [_CompiledTree(r) for r in roots]

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        votes = np.zeros((len(X), N_CLASSES))
        rows = np.arange(len(X))
        for tree in self._compiled:
            votes[rows, tree.predict(X) - 1] += 1.0
        return votes / len(self._compiled)

    def predict(self, X: np.ndarray) -> np.ndarray:
        return np.argmax(self.predict_proba(X), axis=1) + 1


class LogisticModel:
    """Multinomial logistic weights; prediction is argmax of softmax scores."""

    def __init__(self, weights: np.ndarray, bias: np.ndarray, params: LogisticParams,
                 loss_history: list[float] | None = None):
        self.weights = weights
        self.bias = bias
        self.params = params
        self.loss_history = loss_history or []

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        return _softmax(X @ self.weights.T + self.bias)

    def predict(self, X: np.ndarray) -> np.ndarray:
        return np.argmax(self.predict_proba(X), axis=1) + 1


AnyModel = DecisionTreeModel | RandomForestModel | LogisticModel


def train_forest(X, y, params: Hyperparams) -> RandomForestModel:
    """Train ``n_trees`` trees on bootstrap resamples with feature subsampling."""
    X, y = _validate_training_data(X, y)
    y0 = y - 1
    n = len(y0)
    seeds = np.random.SeedSequence(params.seed).spawn(params.n_trees)
    roots = []
    for seq in seeds:
        rng = np.random.default_rng(seq)
        idx = rng.integers(0, n, size=n) if params.bootstrap else np.arange(n)
        roots.append(_grow(X[idx], y0[idx], 0, params, rng))
    return RandomForestModel(roots, params)


def _softmax(Z: np.ndarray) -> np.ndarray:
    Z = Z - Z.max(axis=1, keepdims=True)
    E = np.exp(Z)
    return E / E.sum(axis=1, keepdims=True)


def logistic_loss_grad(weights, bias, X, y, l2):
    """L2-penalized cross-entropy loss and its analytic gradient.

    The bias is unpenalized. Exposed separately so the gradient can be
    checked against finite differences.
    """
    n = len(X)
    Z = X @ weights.T + bias
    zmax = Z.max(axis=1, keepdims=True)
    lse = zmax[:, 0] + np.log(np.exp(Z - zmax).sum(axis=1))
    y0 = y - 1
    loss = float(np.mean(lse - Z[np.arange(n), y0]) + 0.5 * l2 * np.sum(weights * weights))
    P = _softmax(Z)
    P[np.arange(n), y0] -= 1.0
    grad_w = P.T @ X / n + l2 * weights
    grad_b = P.mean(axis=0)
    return loss, grad_w, grad_b


def train_logistic(X, y, params: LogisticParams | None = None) -> LogisticModel:
    """Batch gradient descent from zero initialization; fully deterministic."""
    params = params or LogisticParams()
    X, y = _validate_training_data(X, y)
    weights = np.zeros((N_CLASSES, X.shape[1]))
    bias = np.zeros(N_CLASSES)
    history = []
    for _ in range(params.n_iter):
        loss, grad_w, grad_b = logistic_loss_grad(weights, bias, X, y, params.l2)
        history.append(loss)
        weights -= params.learning_rate * grad_w
        bias -= params.learning_rate * grad_b
    return LogisticModel(weights, bias, params, history)


def predict(model, features: np.ndarray) -> tuple[int, np.ndarray]:
    """Classify one 15-vector; returns (label, class probabilities).

    Works on any trained model kind; probabilities always sum to 1 and
    ties break toward the lowest class.
    """
    if model is None:
        raise ModelNotTrained("no trained model supplied")
    x = np.asarray(features, dtype=float).reshape(1, -1)
    if not np.all(np.isfinite(x)):
        raise NonFiniteFeature("features must be finite; preprocess first")
    probs = model.predict_proba(x)[0]
    return int(np.argmax(probs)) + 1, probs


# ---------------------------------------------------------------------------
# Metrics
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Metrics:
    """Accuracy plus per-class precision/recall/F1 and the confusion matrix.

    ``confusion[i][j]`` counts rows of true class i+1 predicted as j+1,
    so row sums equal per-class support.
    """

    accuracy: float
    precision: np.ndarray
    recall: np.ndarray
    f1: np.ndarray
    confusion: np.ndarray
    support: np.ndarray

    def to_dict(self) -> dict:
        return {
            "accuracy": self.accuracy,
            "per_class": [
                {
                    "label": LABEL_MAP[i],
                    "precision": float(self.precision[i]),
                    "recall": float(self.recall[i]),
                    "f1": float(self.f1[i]),
                    "support": int(self.support[i]),
                }
                for i in range(N_CLASSES)
            ],
            "confusion": self.confusion.tolist(),
        }


def f1_score(p: float, r: float) -> float:
    return 0.0 if p + r == 0.0 else 2.0 * p * r / (p + r)


def confusion_matrix(y_true, y_pred) -> np.ndarray:
    y_true = np.asarray(y_true, dtype=int)
    y_pred = np.asarray(y_pred, dtype=int)
    cm = np.zeros((N_CLASSES, N_CLASSES), dtype=int)
    np.add.at(cm, (y_true - 1, y_pred - 1), 1)
    return cm


def evaluate_predictions(y_true, y_pred) -> Metrics:
    """Confusion-derived metrics; undefined ratios fall back to 0."""
    y_true = np.asarray(y_true, dtype=int)
    if len(y_true) == 0:
        raise EmptyDataset("cannot evaluate on an empty dataset")
    cm = confusion_matrix(y_true, y_pred)
    tp = np.diag(cm).astype(float)
    support = cm.sum(axis=1)
    pred_totals = cm.sum(axis=0)
    precision = np.divide(tp, pred_totals, out=np.zeros(N_CLASSES), where=pred_totals > 0)
    recall = np.divide(tp, support, out=np.zeros(N_CLASSES), where=support > 0)
    f1 = np.array([f1_score(p, r) for p, r in zip(precision, recall)])
    accuracy = float(tp.sum() / cm.sum())
    return Metrics(accuracy, precision, recall, f1, cm, support)


def format_class_table(metrics: Metrics) -> str:
    lines = ["Class-Wise Results", f"{'Class':<10}{'Precision':>10}{'Recall':>10}{'F1-Score':>10}{'Support':>10}"]
    for i in range(N_CLASSES):
        lines.append(
            f"{'Level ' + str(i + 1):<10}{metrics.precision[i]:>10.3f}"
            f"{metrics.recall[i]:>10.3f}{metrics.f1[i]:>10.3f}{metrics.support[i]:>10d}"
        )
    lines.append(f"{'Accuracy':<10}{metrics.accuracy:>10.2%}")
    return "\n".join(lines)


def format_classifier_table(rows: list[tuple[str, float]]) -> str:
    width = max(len(name) for name, _ in rows) + 2
    lines = ["Classifier-Wise Results", f"{'Classifier':<{width}}{'Accuracy':>10}"]
    for name, acc in rows:
        lines.append(f"{name:<{width}}{acc:>10.2%}")
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# Cross-validation and grid search
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CvReport:
    kind: str
    params: Hyperparams | LogisticParams
    fold_accuracies: tuple[float, ...]

    @property
    def mean_accuracy(self) -> float:
        return float(np.mean(self.fold_accuracies))


def stratified_fold_indices(labels: np.ndarray, k: int, seed: int) -> list[np.ndarray]:
    """Deal rows to k folds class by class, round-robin with a running offset.

    Per-class proportions are preserved to within one row per fold and
    total fold sizes differ by at most one.
    """
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    folds: list[list[int]] = [[] for _ in range(k)]
    slot = 0
    for label in range(1, N_CLASSES + 1):
        idx = np.nonzero(labels == label)[0]
        rng.shuffle(idx)
        for row in idx:
            folds[slot % k].append(int(row))
            slot += 1
    return [np.array(sorted(f), dtype=int) for f in folds]


def _train_by_kind(kind: str, X, y, params):
    if kind == "forest":
        return train_forest(X, y, params)
    if kind == "tree":
        return DecisionTreeModel(train_tree(X, y, params), params)
    if kind == "logistic":
        return train_logistic(X, y, params)
    raise ValueError(f"unknown classifier kind: {kind}")


def kfold_cv(ds: LabeledDataset, k: int, params, kind: str = "forest",
             seed: int | None = None) -> CvReport:
    """Stratified K-fold accuracy with per-fold preprocessing.

    Preprocessing stats are fitted on the training folds only and applied
    to both sides, so no information leaks from the held-out fold.
    """
    ds = preprocess.filter_rows(ds)
    n = len(ds)
    if k < 2 or n < k:
        raise TooFewRows(f"need 2 <= k <= n rows, got k={k}, n={n}")
    if seed is None:
        seed = params.seed if isinstance(params, Hyperparams) else 0
    folds = stratified_fold_indices(ds.labels, k, seed)
    accuracies = []
    for i, test_idx in enumerate(folds):
        train_idx = np.concatenate([folds[j] for j in range(k) if j != i])
        train = LabeledDataset(ds.features[train_idx], ds.labels[train_idx])
        stats = preprocess.fit(train)
        X_train = preprocess.transform_matrix(train.features, stats)
        X_test = preprocess.transform_matrix(ds.features[test_idx], stats)
        model = _train_by_kind(kind, X_train, train.labels, params)
        accuracies.append(float(np.mean(model.predict(X_test) == ds.labels[test_idx])))
    return CvReport(kind, params, tuple(accuracies))


def grid_search(ds: LabeledDataset, grid: list[Hyperparams], k: int,
                kind: str = "forest") -> tuple[Hyperparams, list[CvReport]]:
    """Evaluate every grid point with K-fold CV; ties keep the earliest point."""
    if not grid:
        raise ValueError("grid must be non-empty")
    reports = [kfold_cv(ds, k, params, kind) for params in grid]
    best = max(range(len(grid)), key=lambda i: (reports[i].mean_accuracy, -i))
    return grid[best], reports


def default_grid(seed: int = 0) -> list[Hyperparams]:
    """The stock tuning grid used by the training command."""
    grid = []
    for n_trees in (50, 100, 200):
        for max_depth in (3, 5, None):
            for mss in (2, 5):
                grid.append(Hyperparams(
                    n_trees=n_trees, max_depth=max_depth, min_samples_split=mss, seed=seed,
                ))
    return grid


# ---------------------------------------------------------------------------
# Model bundle and persistence
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ModelBundle:
    """A trained classifier plus everything needed to run it on raw encodings."""

    kind: str
    model: AnyModel
    stats: PreprocessStats
    seed: int
    spec_order: tuple[str, ...] = field(default_factory=lambda: tuple(spec_feature_names()))
    label_map: tuple[str, ...] = LABEL_MAP

    def predict_encodings(self, angles: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Encodings (n, 15, NaN-invalid) -> (labels, probabilities)."""
        X = preprocess.transform_matrix(np.atleast_2d(angles), self.stats)
        probs = self.model.predict_proba(X)
        return np.argmax(probs, axis=1) + 1, probs

    def predict_encoding(self, angles: np.ndarray) -> tuple[int, np.ndarray]:
        labels, probs = self.predict_encodings(angles)
        return int(labels[0]), probs[0]

    def to_json(self) -> str:
        obj: dict = {
            "format_version": MODEL_FORMAT_VERSION,
            "spec_order": list(self.spec_order),
            "preprocess": self.stats.to_dict(),
            "kind": self.kind,
            "label_map": list(self.label_map),
            "seed": self.seed,
            "params": self.model.params.to_dict(),
        }
        if self.kind == "forest":
            obj["trees"] = [r.to_dict() for r in self.model.roots]
        elif self.kind == "tree":
            obj["trees"] = [self.model.root.to_dict()]
        elif self.kind == "logistic":
            obj["weights"] = [
                [float(w) for w in row] + [float(b)]
                for row, b in zip(self.model.weights, self.model.bias)
            ]
        else:
            raise ValueError(f"unknown model kind: {self.kind}")
        return json.dumps(obj, sort_keys=True, separators=(",", ":"))

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.to_json() + "\n", encoding="utf-8")

    @staticmethod
    def from_json(text: str) -> "ModelBundle":
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as exc:
            raise BadModelFile(f"model file is not valid JSON: {exc}") from exc
        if not isinstance(obj, dict):
            raise BadModelFile("model file must contain a JSON object")
        if obj.get("format_version") != MODEL_FORMAT_VERSION:
            raise BadModelFile(f"unsupported format_version: {obj.get('format_version')!r}")
        try:
            kind = obj["kind"]
            stats = PreprocessStats.from_dict(obj["preprocess"])
            seed = int(obj["seed"])
            spec_order = tuple(obj["spec_order"])
            label_map = tuple(obj["label_map"])
            raw_params = obj["params"]
            if kind in ("forest", "tree"):
                params = Hyperparams(seed=seed, **raw_params)
                roots = [node_from_dict(t) for t in obj["trees"]]
                if not roots:
                    raise BadModelFile("model file carries no trees")
                if kind == "tree":
                    model: AnyModel = DecisionTreeModel(roots[0], params)
                else:
                    model = RandomForestModel(roots, params)
            elif kind == "logistic":
                rows = np.asarray(obj["weights"], dtype=float)
                if rows.shape != (N_CLASSES, ENCODING_SIZE + 1):
                    raise BadModelFile(
                        "logistic weights must be 4 rows of 15 coefficients plus a bias")
                model = LogisticModel(rows[:, :-1], rows[:, -1], LogisticParams(**raw_params))
            else:
                raise BadModelFile(f"unknown model kind: {kind!r}")
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, BadModelFile):
                raise
            raise BadModelFile(f"malformed model file: {exc}") from exc
        if len(spec_order) != ENCODING_SIZE:
            raise BadModelFile("spec_order must list 15 feature names")
        return ModelBundle(kind, model, stats, seed, spec_order, label_map)

    @staticmethod
    def load(path: str | Path) -> "ModelBundle":
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as exc:
            raise BadModelFile(f"cannot read model file {path}: {exc}") from exc
        return ModelBundle.from_json(text)


def evaluate(bundle: ModelBundle, ds_test: LabeledDataset) -> Metrics:
    """Run the bundle over raw encodings and score against the labels."""
    if len(ds_test) == 0:
        raise EmptyDataset("cannot evaluate on an empty dataset")
    labels, _ = bundle.predict_encodings(ds_test.features)
    return evaluate_predictions(ds_test.labels, labels)
