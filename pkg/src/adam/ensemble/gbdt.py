"""Gradient-boosted decision trees for binary classification, from scratch.

Newton boosting on the logistic loss: per round, with current
probabilities p, the gradients are g = p - y and hessians h = p(1 - p).
Each tree greedily maximizes the exact split gain

    gain = 1/2 * [GL^2/(HL + lambda) + GR^2/(HR + lambda) - G^2/(H + lambda)]

over every feature and every midpoint between adjacent distinct sorted
values (no histogram binning). Leaf values are -G/(H + lambda). The
model's raw score is base_score + learning_rate * sum of tree outputs,
mapped through the sigmoid for probabilities.

Every node stores its cover (the hessian mass routed through it), which
downstream Shapley attribution uses as the conditioning weight.

Determinism: split ties resolve to the lowest feature index, then the
lowest threshold; with subsample_fraction = 1 the fit is a pure
function of (X, y, params), and with subsampling it is a pure function
of (X, y, params, seed).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import DegenerateFitError, EmptyInputError

DEFAULT_PARAMS = {
    "n_trees": 60,
    "max_depth": 3,
    "learning_rate": 0.3,
    "l2_lambda": 1.0,
    "min_child_weight": 1.0,
    "subsample_fraction": 1.0,
}

_PROB_CLIP = 1e-15


@dataclass
class TreeNode:
    """One node of a regression tree on the logit scale."""

    cover: float
    value: float = 0.0  # leaf weight before the learning rate
    feature: int = -1  # -1 marks a leaf
    threshold: float = 0.0
    gain: float = 0.0
    left: "TreeNode | None" = None
    right: "TreeNode | None" = None

    @property
    def is_leaf(self) -> bool:
        return self.feature < 0


@dataclass
class GBDTParams:
    n_trees: int = DEFAULT_PARAMS["n_trees"]
    max_depth: int = DEFAULT_PARAMS["max_depth"]
    learning_rate: float = DEFAULT_PARAMS["learning_rate"]
    l2_lambda: float = DEFAULT_PARAMS["l2_lambda"]
    min_child_weight: float = DEFAULT_PARAMS["min_child_weight"]
    subsample_fraction: float = DEFAULT_PARAMS["subsample_fraction"]

    def validate(self) -> None:
        if self.n_trees < 1:
            raise ValueError(f"n_trees must be >= 1, got {self.n_trees}")
        if self.max_depth < 1:
            raise ValueError(f"max_depth must be >= 1, got {self.max_depth}")
        if not 0.0 < self.learning_rate <= 1.0:
            raise ValueError(f"learning_rate must lie in (0, 1], got {self.learning_rate}")
        if self.l2_lambda < 0.0:
            raise ValueError(f"l2_lambda must be >= 0, got {self.l2_lambda}")
        if self.min_child_weight < 0.0:
            raise ValueError(f"min_child_weight must be >= 0, got {self.min_child_weight}")
        if not 0.0 < self.subsample_fraction <= 1.0:
            raise ValueError(
                f"subsample_fraction must lie in (0, 1], got {self.subsample_fraction}")


@dataclass
class GBDTModel:
    trees: list[TreeNode]
    params: GBDTParams
    n_features: int
    base_score: float = 0.0
    seed: int = 0
    loss_history: list[float] = field(default_factory=list)

    def predict_margin(self, X) -> np.ndarray:
        X = _as_matrix(X, self.n_features)
        out = np.full(X.shape[0], self.base_score, dtype=float)
        lr = self.params.learning_rate
        for tree in self.trees:
            out += lr * _tree_predict(tree, X)
        return out

    def predict_proba(self, X) -> np.ndarray:
        return _sigmoid(self.predict_margin(X))

    def predict(self, X, threshold: float = 0.5) -> np.ndarray:
        return (self.predict_proba(X) >= threshold).astype(int)


def _as_matrix(X, n_features: int | None = None) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X.reshape(1, -1)
    if X.ndim != 2:
        raise ValueError(f"expected a 2-d feature matrix, got shape {X.shape}")
    if n_features is not None and X.shape[1] != n_features:
        raise ValueError(f"model expects {n_features} features, got {X.shape[1]}")
    return X


def _sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z, dtype=float)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def _tree_predict(node: TreeNode, X: np.ndarray) -> np.ndarray:
    out = np.empty(X.shape[0], dtype=float)
    for i in range(X.shape[0]):
        cur = node
        while not cur.is_leaf:
            cur = cur.left if X[i, cur.feature] < cur.threshold else cur.right
        out[i] = cur.value
    return out


def log_loss(y: np.ndarray, p: np.ndarray) -> float:
    """Mean negative log-likelihood with probability clipping."""
    p = np.clip(p, _PROB_CLIP, 1.0 - _PROB_CLIP)
    y = np.asarray(y, dtype=float)
    return float(-(y * np.log(p) + (1.0 - y) * np.log(1.0 - p)).mean())


def _best_split(X, g, h, l2_lambda, min_child_weight):
    """Exact greedy search; returns (gain, feature, threshold) or None."""
    g_total = g.sum()
    h_total = h.sum()
    parent = g_total * g_total / (h_total + l2_lambda)
    best_gain = 0.0
    best = None
    for j in range(X.shape[1]):
        order = np.argsort(X[:, j], kind="mergesort")
        xs = X[order, j]
        gl = np.cumsum(g[order])[:-1]
        hl = np.cumsum(h[order])[:-1]
        gr = g_total - gl
        hr = h_total - hl
        valid = xs[1:] != xs[:-1]
        valid &= hl >= min_child_weight
        valid &= hr >= min_child_weight
        if not valid.any():
            continue
        gains = 0.5 * (gl * gl / (hl + l2_lambda)
                       + gr * gr / (hr + l2_lambda) - parent)
        gains[~valid] = -np.inf
        i = int(np.argmax(gains))
        if gains[i] > best_gain:
            best_gain = float(gains[i])
            best = (best_gain, j, float(0.5 * (xs[i] + xs[i + 1])))
    return best


def _build_tree(X, g, h, depth, params) -> TreeNode:
    node = TreeNode(cover=float(h.sum()))
    g_total = float(g.sum())
    denom = node.cover + params.l2_lambda
    node.value = 0.0 if denom == 0.0 else -g_total / denom
    if depth >= params.max_depth or X.shape[0] < 2:
        return node
    found = _best_split(X, g, h, params.l2_lambda, params.min_child_weight)
    if found is None:
        return node
    gain, feature, threshold = found
    mask = X[:, feature] < threshold
    if not mask.any() or mask.all():
        return node
    node.feature = feature
    node.threshold = threshold
    node.gain = gain
    node.left = _build_tree(X[mask], g[mask], h[mask], depth + 1, params)
    node.right = _build_tree(X[~mask], g[~mask], h[~mask], depth + 1, params)
    return node


def fit_gbdt(X, y, params: GBDTParams | dict | None = None, seed: int = 0) -> GBDTModel:
    """Fit the boosted ensemble.

    :param X: (n, d) feature matrix without NaN.
    :param y: binary labels.
    :param params: GBDTParams, a dict of overrides, or None for defaults.
    :param seed: only consulted when subsample_fraction < 1.
    :returns: fitted model with a per-round training log-loss history.
    """
    if isinstance(params, dict):
        params = GBDTParams(**{**DEFAULT_PARAMS, **params})
    elif params is None:
        params = GBDTParams()
    params.validate()
    X = _as_matrix(X)
    y = np.asarray(y, dtype=float).ravel()
    if X.shape[0] == 0:
        raise EmptyInputError("cannot fit on an empty matrix")
    if X.shape[0] != y.size:
        raise ValueError(f"X has {X.shape[0]} rows but y has {y.size}")
    if np.isnan(X).any():
        raise DegenerateFitError("feature matrix contains NaN; impute before fitting")
    if not np.isin(y, (0.0, 1.0)).all():
        raise ValueError("labels must be binary 0/1")

    model = GBDTModel(trees=[], params=params, n_features=X.shape[1], seed=seed)
    margins = np.full(X.shape[0], model.base_score, dtype=float)
    n = X.shape[0]
    for t in range(params.n_trees):
        p = _sigmoid(margins)
        g = p - y
        h = p * (1.0 - p)
        if params.subsample_fraction < 1.0:
            rng = np.random.default_rng([seed, t])
            k = max(1, int(round(params.subsample_fraction * n)))
            rows = np.sort(rng.choice(n, size=k, replace=False))
            tree = _build_tree(X[rows], g[rows], h[rows], 0, params)
        else:
            tree = _build_tree(X, g, h, 0, params)
        model.trees.append(tree)
        margins += params.learning_rate * _tree_predict(tree, X)
        model.loss_history.append(log_loss(y, _sigmoid(margins)))
    return model


def feature_gains(model: GBDTModel) -> np.ndarray:
    """Total split gain accumulated per feature across all trees."""
    gains = np.zeros(model.n_features)

    def walk(node: TreeNode) -> None:
        if node.is_leaf:
            return
        gains[node.feature] += node.gain
        walk(node.left)
        walk(node.right)

    for tree in model.trees:
        walk(tree)
    return gains


# ---------------------------------------------------------------------------
# serialization: trees stored pre-order, floats as 17-significant-digit text

def _f17(value: float) -> str:
    return f"{float(value):.17g}"


def _node_to_list(node: TreeNode, out: list) -> None:
    if node.is_leaf:
        out.append({"cover": _f17(node.cover), "value": _f17(node.value)})
        return
    out.append({"cover": _f17(node.cover), "feature": node.feature,
                "threshold": _f17(node.threshold), "gain": _f17(node.gain)})
    _node_to_list(node.left, out)
    _node_to_list(node.right, out)


def _node_from_list(items: list, pos: int) -> tuple[TreeNode, int]:
    entry = items[pos]
    if "feature" not in entry:
        return TreeNode(cover=float(entry["cover"]), value=float(entry["value"])), pos + 1
    node = TreeNode(cover=float(entry["cover"]), feature=int(entry["feature"]),
                    threshold=float(entry["threshold"]), gain=float(entry["gain"]))
    node.left, pos = _node_from_list(items, pos + 1)
    node.right, pos = _node_from_list(items, pos)
    return node, pos


def model_to_dict(model: GBDTModel) -> dict:
    trees = []
    for tree in model.trees:
        nodes: list = []
        _node_to_list(tree, nodes)
        trees.append(nodes)
    p = model.params
    return {
        "format": "adam-gbdt",
        "version": 1,
        "n_features": model.n_features,
        "base_score": _f17(model.base_score),
        "seed": model.seed,
        "params": {
            "n_trees": p.n_trees,
            "max_depth": p.max_depth,
            "learning_rate": _f17(p.learning_rate),
            "l2_lambda": _f17(p.l2_lambda),
            "min_child_weight": _f17(p.min_child_weight),
            "subsample_fraction": _f17(p.subsample_fraction),
        },
        "loss_history": [_f17(v) for v in model.loss_history],
        "trees": trees,
    }


def model_from_dict(doc: dict) -> GBDTModel:
    from ..errors import FormatError, ModelIntegrityError
    if not isinstance(doc, dict) or doc.get("format") != "adam-gbdt":
        raise FormatError("not an adam-gbdt model document")
    raw = doc["params"]
    params = GBDTParams(n_trees=int(raw["n_trees"]), max_depth=int(raw["max_depth"]),
                        learning_rate=float(raw["learning_rate"]),
                        l2_lambda=float(raw["l2_lambda"]),
                        min_child_weight=float(raw["min_child_weight"]),
                        subsample_fraction=float(raw["subsample_fraction"]))
    trees = []
    for items in doc["trees"]:
        tree, end = _node_from_list(items, 0)
        if end != len(items):
            raise ModelIntegrityError("trailing nodes in serialized tree")
        trees.append(tree)
    model = GBDTModel(trees=trees, params=params, n_features=int(doc["n_features"]),
                      base_score=float(doc["base_score"]), seed=int(doc.get("seed", 0)),
                      loss_history=[float(v) for v in doc.get("loss_history", [])])
    return model
