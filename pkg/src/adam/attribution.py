"""Exact Shapley attribution for the boosted tree ensemble.

Contributions are computed on the margin (log-odds) scale under
path-dependent conditioning: marginalizing a feature at a split sends
weight down both branches in proportion to node cover. Two independent
routes produce the same numbers:

* ``shap_values``: polynomial-time propagation of subset weights along
  each root-to-leaf path (the extend/unwind bookkeeping), linear in the
  number of leaves for each sample.
* ``shap_values_exact``: direct enumeration of feature coalitions with
  factorial Shapley weights. Exponential in the number of distinct
  split features, so it refuses to run past ``MAX_EXACT_FEATURES``.

Both satisfy local accuracy: ``expected_margin(model)`` plus the sum of
per-feature contributions equals ``model.predict_margin(x)`` exactly
(up to floating-point roundoff).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .ensemble.gbdt import GBDTModel, TreeNode
from .errors import ModelIntegrityError, SizeGuardError

MAX_EXACT_FEATURES = 20


@dataclass(frozen=True)
class FlatTree:
    """One tree as parallel arrays; children index into the arrays, -1 at leaves."""

    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray
    cover: np.ndarray


@dataclass(frozen=True)
class Attribution:
    """Per-feature margin contributions for one sample."""

    feature_names: tuple[str, ...]
    contributions: tuple[float, ...]
    base_value: float
    margin: float
    probability: float

    def ranked(self) -> tuple[tuple[str, float], ...]:
        return rank_features(self.feature_names, self.contributions)


def flatten_tree(root: TreeNode) -> FlatTree:
    """Preorder array form of a tree.

    Raises ModelIntegrityError when any node has nonpositive or
    non-finite cover (cover is the conditioning weight, so every
    division below depends on it) or an internal node lacks a child.
    """
    feature: list[int] = []
    threshold: list[float] = []
    left: list[int] = []
    right: list[int] = []
    value: list[float] = []
    cover: list[float] = []

    def visit(node: TreeNode) -> int:
        cov = float(node.cover)
        if not math.isfinite(cov) or cov <= 0.0:
            raise ModelIntegrityError(
                f"tree node cover must be positive and finite, got {cov!r}")
        idx = len(feature)
        if node.is_leaf:
            feature.append(-1)
            threshold.append(0.0)
            left.append(-1)
            right.append(-1)
            value.append(float(node.value))
            cover.append(cov)
            return idx
        if node.left is None or node.right is None:
            raise ModelIntegrityError("internal tree node is missing a child")
        feature.append(int(node.feature))
        threshold.append(float(node.threshold))
        left.append(-1)
        right.append(-1)
        value.append(0.0)
        cover.append(cov)
        left[idx] = visit(node.left)
        right[idx] = visit(node.right)
        return idx

    visit(root)
    return FlatTree(feature=np.asarray(feature, dtype=np.int64),
                    threshold=np.asarray(threshold, dtype=float),
                    left=np.asarray(left, dtype=np.int64),
                    right=np.asarray(right, dtype=np.int64),
                    value=np.asarray(value, dtype=float),
                    cover=np.asarray(cover, dtype=float))


def tree_expected_value(tree: FlatTree) -> float:
    """Cover-weighted mean leaf value (the tree's output on no information)."""
    leaves = tree.feature < 0
    return float(np.dot(tree.value[leaves], tree.cover[leaves]) / tree.cover[0])


def expected_margin(model: GBDTModel) -> float:
    """Margin the ensemble predicts with every feature marginalized out."""
    total = model.base_score
    lr = model.params.learning_rate
    for root in model.trees:
        total += lr * tree_expected_value(flatten_tree(root))
    return float(total)


# ---------------------------------------------------------------------------
# fast route: subset-weight propagation along paths
#
# The path state is four parallel lists, one entry per distinct feature
# encountered from the root. Each entry holds the feature index, the
# fraction of subsets flowing down when the feature is excluded (zero)
# or included (one), and a permutation weight. _extend pushes a feature
# onto the path; _unwind removes one, redistributing its weight; the
# leaf sums, for each path feature, the total weight the path would
# carry without that entry.

def _extend(feat: list, zero: list, one: list, weight: list,
            pz: float, po: float, pi: int) -> None:
    d = len(feat)
    feat.append(pi)
    zero.append(pz)
    one.append(po)
    weight.append(1.0 if d == 0 else 0.0)
    for i in range(d - 1, -1, -1):
        weight[i + 1] += po * weight[i] * (i + 1) / (d + 1)
        weight[i] = pz * weight[i] * (d - i) / (d + 1)


def _unwind(feat: list, zero: list, one: list, weight: list, index: int) -> None:
    last = len(feat) - 1
    o = one[index]
    z = zero[index]
    n = weight[last]
    if o != 0.0:
        for i in range(last - 1, -1, -1):
            t = weight[i]
            weight[i] = n * (last + 1) / ((i + 1) * o)
            n = t - weight[i] * z * (last - i) / (last + 1)
    else:
        for i in range(last - 1, -1, -1):
            weight[i] = weight[i] * (last + 1) / (z * (last - i))
    for i in range(index, last):
        feat[i] = feat[i + 1]
        zero[i] = zero[i + 1]
        one[i] = one[i + 1]
    feat.pop()
    zero.pop()
    one.pop()
    weight.pop()


def _unwound_sum(zero: list, one: list, weight: list, index: int) -> float:
    last = len(weight) - 1
    o = one[index]
    z = zero[index]
    total = 0.0
    if o != 0.0:
        n = weight[last]
        for i in range(last - 1, -1, -1):
            t = n / ((i + 1) * o)
            total += t
            n = weight[i] - t * z * (last - i)
    else:
        for i in range(last - 1, -1, -1):
            total += weight[i] / (z * (last - i))
    return total * (last + 1)


def _tree_shap(tree: FlatTree, x: np.ndarray, phi: np.ndarray, scale: float) -> None:
    def recurse(node: int, feat: list, zero: list, one: list, weight: list,
                pz: float, po: float, pi: int) -> None:
        feat = list(feat)
        zero = list(zero)
        one = list(one)
        weight = list(weight)
        _extend(feat, zero, one, weight, pz, po, pi)
        split = tree.feature[node]
        if split < 0:
            v = tree.value[node] * scale
            for i in range(1, len(feat)):
                w = _unwound_sum(zero, one, weight, i)
                phi[feat[i]] += w * (one[i] - zero[i]) * v
            return
        lo = int(tree.left[node])
        hi = int(tree.right[node])
        hot, cold = (lo, hi) if x[split] < tree.threshold[node] else (hi, lo)
        hot_frac = tree.cover[hot] / tree.cover[node]
        cold_frac = tree.cover[cold] / tree.cover[node]
        iz = 1.0
        io = 1.0
        k = -1
        for i, f in enumerate(feat):
            if f == split:
                k = i
                break
        if k >= 0:
            iz = zero[k]
            io = one[k]
            _unwind(feat, zero, one, weight, k)
        recurse(hot, feat, zero, one, weight, hot_frac * iz, io, int(split))
        recurse(cold, feat, zero, one, weight, cold_frac * iz, 0.0, int(split))

    recurse(0, [], [], [], [], 1.0, 1.0, -1)


def shap_values(model: GBDTModel, X) -> np.ndarray:
    """Per-feature margin contributions for each row of X.

    :returns: array shaped like X (a single sample gives a 1-d vector)
        whose rows sum to ``predict_margin - expected_margin``.
    """
    X = np.asarray(X, dtype=float)
    single = X.ndim == 1
    if single:
        X = X.reshape(1, -1)
    if X.ndim != 2 or X.shape[1] != model.n_features:
        raise ValueError(f"expected samples with {model.n_features} features, "
                         f"got shape {X.shape}")
    flats = [flatten_tree(root) for root in model.trees]
    lr = model.params.learning_rate
    phi = np.zeros((X.shape[0], model.n_features))
    for r in range(X.shape[0]):
        for flat in flats:
            _tree_shap(flat, X[r], phi[r], lr)
    return phi[0] if single else phi


# ---------------------------------------------------------------------------
# slow route: coalition enumeration
#
# Features never split on are null players and take no part; the
# Shapley values of the remaining features are unchanged by dropping
# them, so the enumeration runs over the used features only. Per tree,
# a post-order pass evaluates the conditioned expectation for every
# coalition at once: coalitions containing the split feature follow the
# sample's branch, the rest blend both children by cover.

def _used_features(flats: list[FlatTree]) -> list[int]:
    used: set[int] = set()
    for flat in flats:
        used.update(int(f) for f in flat.feature[flat.feature >= 0])
    return sorted(used)


def _coalition_table(tree: FlatTree, x: np.ndarray, position: dict[int, int],
                     masks: np.ndarray) -> np.ndarray:
    def visit(node: int) -> np.ndarray:
        split = tree.feature[node]
        if split < 0:
            return np.full(masks.size, tree.value[node])
        lo = int(tree.left[node])
        hi = int(tree.right[node])
        left_val = visit(lo)
        right_val = visit(hi)
        hot = left_val if x[split] < tree.threshold[node] else right_val
        wl = tree.cover[lo] / tree.cover[node]
        wr = tree.cover[hi] / tree.cover[node]
        blended = wl * left_val + wr * right_val
        included = (masks >> position[int(split)]) & 1 == 1
        return np.where(included, hot, blended)

    return visit(0)


def coalition_margins(model: GBDTModel, x) -> tuple[list[int], np.ndarray]:
    """Conditioned margin for every coalition of the used features.

    :returns: (used feature indices, margins indexed by coalition
        bitmask over those features). Entry 0 is the no-information
        margin and the full mask reproduces ``predict_margin``.
    """
    x = np.asarray(x, dtype=float).ravel()
    if x.size != model.n_features:
        raise ValueError(f"expected {model.n_features} features, got {x.size}")
    flats = [flatten_tree(root) for root in model.trees]
    used = _used_features(flats)
    if len(used) > MAX_EXACT_FEATURES:
        raise SizeGuardError(
            f"coalition enumeration over {len(used)} features exceeds the "
            f"limit of {MAX_EXACT_FEATURES}")
    position = {f: i for i, f in enumerate(used)}
    masks = np.arange(1 << len(used), dtype=np.int64)
    margins = np.full(masks.size, float(model.base_score))
    lr = model.params.learning_rate
    for flat in flats:
        margins += lr * _coalition_table(flat, x, position, masks)
    return used, margins


def shap_values_exact(model: GBDTModel, x) -> np.ndarray:
    """Shapley values by direct coalition enumeration (cross-check route)."""
    used, margins = coalition_margins(model, x)
    m = len(used)
    masks = np.arange(1 << m, dtype=np.int64)
    sizes = np.zeros(masks.size, dtype=np.int64)
    for b in range(m):
        sizes += (masks >> b) & 1
    fact = [math.factorial(k) for k in range(m + 1)]
    weight_by_size = np.array(
        [fact[s] * fact[m - s - 1] / fact[m] for s in range(m)] or [0.0])
    phi = np.zeros(model.n_features)
    for i, f in enumerate(used):
        bit = 1 << i
        absent = masks[(masks & bit) == 0]
        w = weight_by_size[sizes[absent]]
        phi[f] = float(np.sum(w * (margins[absent | bit] - margins[absent])))
    return phi


def rank_features(names, contributions) -> tuple[tuple[str, float], ...]:
    """(name, contribution) pairs, largest magnitude first, names break ties."""
    names = tuple(names)
    values = tuple(float(v) for v in contributions)
    if len(names) != len(values):
        raise ValueError(f"{len(names)} names but {len(values)} contributions")
    order = sorted(range(len(names)), key=lambda i: (-abs(values[i]), names[i]))
    return tuple((names[i], values[i]) for i in order)


def explain(model: GBDTModel, x, feature_names) -> Attribution:
    """Full attribution record for one sample."""
    x = np.asarray(x, dtype=float).ravel()
    names = tuple(str(n) for n in feature_names)
    if len(names) != model.n_features:
        raise ValueError(f"model has {model.n_features} features but "
                         f"{len(names)} names were given")
    phi = shap_values(model, x)
    margin = float(model.predict_margin(x)[0])
    probability = float(model.predict_proba(x)[0])
    return Attribution(feature_names=names,
                       contributions=tuple(float(v) for v in phi),
                       base_value=expected_margin(model),
                       margin=margin,
                       probability=probability)
