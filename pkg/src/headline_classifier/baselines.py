"""Classical comparison models on the same TF-IDF features.

All three are trained directly on sparse columns: the CART tree sweeps
distinct sorted values per feature with the zero run folded in, the
forest bags feature-subsampled trees, and the linear SVM runs the
Pegasos stochastic subgradient recursion with the 1/(lambda*t) step.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy import sparse

from .errors import ConfigError, DimensionError, ModelFormatError
from .vectorize import SparseVector, stack_csr


@dataclass
class TreeNode:
    """Either an internal split (feature/threshold set) or a leaf (label set)."""

    n_samples: int
    counts: tuple[int, int]
    feature: int | None = None
    threshold: float | None = None
    left: "TreeNode | None" = None
    right: "TreeNode | None" = None
    label: int | None = None

    @property
    def is_leaf(self) -> bool:
        return self.feature is None


@dataclass
class DecisionTree:
    root: TreeNode
    n_features: int
    max_depth: int
    min_leaf: int


@dataclass
class Forest:
    trees: list[DecisionTree]
    n_features: int
    features_per_split: int
    seed: int

    def __post_init__(self):
        if len(self.trees) % 2 == 0:
            raise ConfigError(f"forest needs an odd tree count, got {len(self.trees)}")


@dataclass
class LinearSvm:
    w: np.ndarray
    b: float
    lam: float

    def __post_init__(self):
        self.w = np.asarray(self.w, dtype=np.float64)
        if not np.isfinite(self.w).all() or not math.isfinite(self.b):
            raise ValueError("svm weights must be finite")
        if not self.lam > 0:
            raise ValueError(f"regularization strength must be > 0, got {self.lam}")

    @property
    def n_features(self) -> int:
        return int(self.w.shape[0])


# ---------------------------------------------------------------------------
# CART


def _gini(c0: int, c1: int) -> float:
    n = c0 + c1
    if n == 0:
        return 0.0
    p0 = c0 / n
    p1 = c1 / n
    return 1.0 - (p0 * p0 + p1 * p1)


def _column_groups(vals, labels, c1_total, n_node):
    """Distinct sorted values of one column with per-value label counts.

    ``vals``/``labels`` cover the nonzero entries only; the implicit zero
    run is inserted at its sorted position.
    """
    order = np.argsort(vals, kind="stable")
    v = vals[order]
    l1 = labels[order]
    change = np.nonzero(np.diff(v))[0]
    starts = np.concatenate(([0], change + 1))
    ends = np.concatenate((change + 1, [v.shape[0]]))
    pre1 = np.concatenate(([0], np.cumsum(l1)))
    dvals = v[starts]
    g1 = pre1[ends] - pre1[starts]
    gn = ends - starts
    n_zero = n_node - v.shape[0]
    if n_zero > 0:
        z1 = c1_total - int(pre1[-1])
        pos = int(np.searchsorted(dvals, 0.0))
        dvals = np.insert(dvals, pos, 0.0)
        g1 = np.insert(g1, pos, z1)
        gn = np.insert(gn, pos, n_zero)
    return dvals, gn - g1, g1


def _best_split_for_column(dvals, g0, g1, parent_gini, n_node, min_leaf):
    """Best (decrease, threshold) over midpoints between consecutive values."""
    if dvals.shape[0] < 2:
        return None
    cum0 = np.cumsum(g0)[:-1].astype(np.float64)
    cum1 = np.cumsum(g1)[:-1].astype(np.float64)
    left_n = cum0 + cum1
    right_n = n_node - left_n
    valid = (left_n >= min_leaf) & (right_n >= min_leaf)
    if not valid.any():
        return None
    total0 = int(g0.sum())
    total1 = int(g1.sum())
    with np.errstate(invalid="ignore", divide="ignore"):
        gini_left = 1.0 - ((cum0 / left_n) ** 2 + (cum1 / left_n) ** 2)
        r0 = total0 - cum0
        r1 = total1 - cum1
        gini_right = 1.0 - ((r0 / right_n) ** 2 + (r1 / right_n) ** 2)
        decrease = parent_gini - (left_n / n_node) * gini_left - (right_n / n_node) * gini_right
    decrease = np.where(valid, decrease, -np.inf)
    j = int(np.argmax(decrease))
    if not np.isfinite(decrease[j]):
        return None
    threshold = (float(dvals[j]) + float(dvals[j + 1])) / 2.0
    return float(decrease[j]), threshold


def _grow(X, y, node_idx, depth, max_depth, min_leaf, rng, max_features):
    n_node = node_idx.shape[0]
    y_node = y[node_idx]
    c1 = int(y_node.sum())
    c0 = n_node - c1
    label = 0 if c0 >= c1 else 1
    leaf = TreeNode(n_samples=n_node, counts=(c0, c1), label=label)
    if c0 == 0 or c1 == 0 or depth >= max_depth or n_node < 2 * min_leaf:
        return leaf

    sub = X[node_idx].tocsc()
    n_total_features = X.shape[1]
    if max_features is not None and max_features < n_total_features:
        candidates = np.sort(rng.choice(n_total_features, size=max_features, replace=False))
    else:
        candidates = None  # all features

    parent = _gini(c0, c1)
    indptr, indices, data = sub.indptr, sub.indices, sub.data
    best_dec = -np.inf
    best_feature = -1
    best_threshold = 0.0
    feature_iter = candidates if candidates is not None else range(n_total_features)
    for f in feature_iter:
        f = int(f)
        s, e = indptr[f], indptr[f + 1]
        if e == s:
            continue  # all zeros: no distinct pair of values
        dvals, g0, g1 = _column_groups(data[s:e], y_node[indices[s:e]], c1, n_node)
        found = _best_split_for_column(dvals, g0, g1, parent, n_node, min_leaf)
        if found is not None and found[0] > best_dec:
            best_dec, best_threshold = found
            best_feature = f

    if best_feature < 0:
        return leaf

    s, e = indptr[best_feature], indptr[best_feature + 1]
    left_mask = np.full(n_node, 0.0 <= best_threshold, dtype=bool)
    left_mask[indices[s:e]] = data[s:e] <= best_threshold
    left_idx = node_idx[left_mask]
    right_idx = node_idx[~left_mask]
    left = _grow(X, y, left_idx, depth + 1, max_depth, min_leaf, rng, max_features)
    right = _grow(X, y, right_idx, depth + 1, max_depth, min_leaf, rng, max_features)
    return TreeNode(
        n_samples=n_node,
        counts=(c0, c1),
        feature=best_feature,
        threshold=best_threshold,
        left=left,
        right=right,
    )


def _as_csr(features):
    if sparse.issparse(features):
        return features.tocsr()
    if isinstance(features, list):
        return stack_csr(features)
    dense = np.asarray(features, dtype=np.float64)
    return sparse.csr_matrix(dense)


def train_tree(features, labels, max_depth: int = 32, min_leaf: int = 2) -> DecisionTree:
    """Greedy CART with Gini impurity.

    Candidate thresholds are midpoints between consecutive distinct sorted
    values of a column; the first feature (lowest index) reaching the best
    decrease wins ties, and zero-decrease splits on impure nodes are
    allowed.  Leaf label is the majority, ties going to label 0.
    """
    X = _as_csr(features)
    y = np.asarray(labels, dtype=np.int64)
    if X.shape[0] != y.shape[0] or y.shape[0] == 0:
        raise ConfigError("need at least one sample with aligned labels")
    if max_depth < 0 or min_leaf < 1:
        raise ConfigError("max_depth must be >= 0 and min_leaf >= 1")
    root = _grow(
        X, y, np.arange(X.shape[0]), 0, max_depth, min_leaf, rng=None, max_features=None
    )
    return DecisionTree(root=root, n_features=X.shape[1], max_depth=max_depth, min_leaf=min_leaf)


def train_forest(
    features,
    labels,
    n_trees: int = 101,
    max_depth: int = 32,
    seed: int = 0,
    min_leaf: int = 2,
    features_per_split: int | None = None,
    bootstrap: bool = True,
) -> Forest:
    """Bagged CART trees with per-split feature subsampling.

    Each tree draws a seeded bootstrap resample (n draws with replacement)
    and considers ceil(sqrt(V)) random features per split unless
    ``features_per_split`` overrides it.  Prediction is the majority vote,
    which is always defined because the tree count must be odd.
    """
    X = _as_csr(features)
    y = np.asarray(labels, dtype=np.int64)
    n = y.shape[0]
    if n < 2 or X.shape[0] != n:
        raise ConfigError("need at least two samples with aligned labels")
    if n_trees < 1 or n_trees % 2 == 0:
        raise ConfigError(f"n_trees must be odd and >= 1, got {n_trees}")
    n_features = X.shape[1]
    per_split = features_per_split or math.ceil(math.sqrt(n_features))
    trees = []
    for seq in np.random.SeedSequence(seed).spawn(n_trees):
        rng = np.random.default_rng(seq)
        rows = rng.integers(0, n, size=n) if bootstrap else np.arange(n)
        root = _grow(
            X, y, rows, 0, max_depth, min_leaf, rng=rng,
            max_features=per_split if per_split < n_features else None,
        )
        trees.append(
            DecisionTree(root=root, n_features=n_features, max_depth=max_depth, min_leaf=min_leaf)
        )
    return Forest(trees=trees, n_features=n_features, features_per_split=per_split, seed=seed)


# ---------------------------------------------------------------------------
# Pegasos linear SVM


def train_svm(
    features,
    labels,
    lam: float = 1e-4,
    epochs: int = 5,
    seed: int = 0,
) -> LinearSvm:
    """Pegasos stochastic subgradient on hinge loss + (lam/2)||w||^2.

    Step size is 1/(lam*t); one shuffled pass over the data per epoch.
    The intercept is carried as an augmented always-on coordinate, so it
    shares the regularized update.  The weight vector is maintained as
    scale * accumulator, making each update O(nnz).
    """
    X = _as_csr(features)
    y01 = np.asarray(labels, dtype=np.int64)
    n = y01.shape[0]
    if n == 0 or X.shape[0] != n:
        raise ConfigError("need at least one sample with aligned labels")
    if not lam > 0:
        raise ConfigError(f"lambda must be > 0, got {lam}")
    if epochs < 1:
        raise ConfigError(f"epochs must be >= 1, got {epochs}")
    y = np.where(y01 == 1, 1.0, -1.0)
    dim = X.shape[1]
    indptr, indices, data = X.indptr, X.indices, X.data
    u = np.zeros(dim + 1, dtype=np.float64)
    scale = 1.0
    t = 0
    rng = np.random.default_rng(seed)
    for _ in range(epochs):
        for i in rng.permutation(n):
            t += 1
            s, e = indptr[i], indptr[i + 1]
            idx = indices[s:e]
            vals = data[s:e]
            z = scale * (u[idx] @ vals + u[dim])
            violated = y[i] * z < 1.0
            if t > 1:
                scale *= 1.0 - 1.0 / t
            if violated:
                coef = (1.0 / (lam * t)) * y[i] / scale
                u[idx] += coef * vals
                u[dim] += coef
    return LinearSvm(w=scale * u[:dim], b=float(scale * u[dim]), lam=lam)


def svm_decision(model: LinearSvm, x: SparseVector) -> float:
    if x.dim != model.n_features:
        raise DimensionError(f"input dim {x.dim} != svm dim {model.n_features}")
    return float(model.w[x.indices] @ x.values + model.b)


def svm_objective(model: LinearSvm, features, labels) -> float:
    """Mean hinge loss plus (lam/2)||w||^2 over a dataset."""
    X = _as_csr(features)
    y = np.where(np.asarray(labels) == 1, 1.0, -1.0)
    margins = np.asarray(X @ model.w) + model.b
    hinge = np.maximum(0.0, 1.0 - y * margins)
    return float(hinge.mean() + 0.5 * model.lam * float(model.w @ model.w))


# ---------------------------------------------------------------------------
# Prediction


def _vector_value(x: SparseVector, feature: int) -> float:
    pos = int(np.searchsorted(x.indices, feature))
    if pos < x.nnz and int(x.indices[pos]) == feature:
        return float(x.values[pos])
    return 0.0


def _route(root: TreeNode, x: SparseVector) -> TreeNode:
    node = root
    while not node.is_leaf:
        node = node.left if _vector_value(x, node.feature) <= node.threshold else node.right
    return node


def tree_predict(model: DecisionTree, x: SparseVector) -> int:
    if x.dim != model.n_features:
        raise DimensionError(f"input dim {x.dim} != tree dim {model.n_features}")
    return int(_route(model.root, x).label)


def tree_score(model: DecisionTree, x: SparseVector) -> float:
    """Fake-class fraction at the leaf the input routes to."""
    if x.dim != model.n_features:
        raise DimensionError(f"input dim {x.dim} != tree dim {model.n_features}")
    leaf = _route(model.root, x)
    return leaf.counts[1] / max(1, leaf.n_samples)


def forest_predict(model: Forest, x: SparseVector) -> int:
    votes = sum(tree_predict(tree, x) for tree in model.trees)
    return int(votes * 2 > len(model.trees))


def forest_score(model: Forest, x: SparseVector) -> float:
    """Fraction of trees voting fake."""
    return sum(tree_predict(tree, x) for tree in model.trees) / len(model.trees)


def svm_predict(model: LinearSvm, x: SparseVector) -> int:
    """sign(w.x + b) with 0 mapping to the positive class (label 1)."""
    return 1 if svm_decision(model, x) >= 0.0 else 0


def predict_baseline(model, x: SparseVector) -> int:
    if isinstance(model, DecisionTree):
        return tree_predict(model, x)
    if isinstance(model, Forest):
        return forest_predict(model, x)
    if isinstance(model, LinearSvm):
        return svm_predict(model, x)
    raise TypeError(f"not a baseline model: {type(model).__name__}")


# ---------------------------------------------------------------------------
# Serialization


def _node_to_dict(node: TreeNode) -> dict:
    out = {"n": node.n_samples, "counts": list(node.counts)}
    if node.is_leaf:
        out["label"] = node.label
    else:
        out["feature"] = node.feature
        out["threshold"] = node.threshold
        out["left"] = _node_to_dict(node.left)
        out["right"] = _node_to_dict(node.right)
    return out


def _node_from_dict(obj: dict) -> TreeNode:
    counts = (int(obj["counts"][0]), int(obj["counts"][1]))
    if "feature" not in obj:
        return TreeNode(n_samples=int(obj["n"]), counts=counts, label=int(obj["label"]))
    return TreeNode(
        n_samples=int(obj["n"]),
        counts=counts,
        feature=int(obj["feature"]),
        threshold=float(obj["threshold"]),
        left=_node_from_dict(obj["left"]),
        right=_node_from_dict(obj["right"]),
    )


def save_baseline(model, path: str | Path) -> None:
    if isinstance(model, DecisionTree):
        payload = {
            "version": 1,
            "model": "tree",
            "n_features": model.n_features,
            "max_depth": model.max_depth,
            "min_leaf": model.min_leaf,
            "root": _node_to_dict(model.root),
        }
    elif isinstance(model, Forest):
        payload = {
            "version": 1,
            "model": "forest",
            "n_features": model.n_features,
            "features_per_split": model.features_per_split,
            "seed": model.seed,
            "trees": [
                {
                    "max_depth": t.max_depth,
                    "min_leaf": t.min_leaf,
                    "root": _node_to_dict(t.root),
                }
                for t in model.trees
            ],
        }
    elif isinstance(model, LinearSvm):
        payload = {
            "version": 1,
            "model": "svm",
            "n_features": model.n_features,
            "lambda": model.lam,
            "b": model.b,
            "w": model.w.tolist(),
        }
    else:
        raise TypeError(f"not a baseline model: {type(model).__name__}")
    with open(path, "w", encoding="utf-8") as f:
        json.dump(payload, f)


def load_baseline(path: str | Path):
    with open(path, encoding="utf-8") as f:
        payload = json.load(f)
    if payload.get("version") != 1:
        raise ModelFormatError(f"{path}: unsupported model version {payload.get('version')}")
    kind = payload.get("model")
    try:
        if kind == "tree":
            return DecisionTree(
                root=_node_from_dict(payload["root"]),
                n_features=int(payload["n_features"]),
                max_depth=int(payload["max_depth"]),
                min_leaf=int(payload["min_leaf"]),
            )
        if kind == "forest":
            n_features = int(payload["n_features"])
            trees = [
                DecisionTree(
                    root=_node_from_dict(t["root"]),
                    n_features=n_features,
                    max_depth=int(t["max_depth"]),
                    min_leaf=int(t["min_leaf"]),
                )
                for t in payload["trees"]
            ]
            return Forest(
                trees=trees,
                n_features=n_features,
                features_per_split=int(payload["features_per_split"]),
                seed=int(payload["seed"]),
            )
        if kind == "svm":
            return LinearSvm(
                w=np.array(payload["w"], dtype=np.float64),
                b=float(payload["b"]),
                lam=float(payload["lambda"]),
            )
    except (KeyError, TypeError, IndexError) as exc:
        raise ModelFormatError(f"{path}: malformed {kind} model ({exc})") from exc
    raise ModelFormatError(f"{path}: unknown baseline model kind {kind!r}")
