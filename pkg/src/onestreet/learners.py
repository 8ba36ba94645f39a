"""k-nearest neighbours and CART regression trees over solved-game examples.

Outputs come in three shapes (see :mod:`onestreet.representations`): full
strategies, one card's bet distribution, or a sampled bet amount. Errors are
always normalized to [0, 1]: block EMD for distributions, ``|error| / stack``
for bet amounts.

Trees are grown greedily. A node's representative is the componentwise mean
output (renormalized per block) and the split criterion is:

* bet amounts: within-node variance, as in standard CART regression;
* distributions: total block EMD to each child's representative. Since the
  EMD between two histograms is the L1 distance between their cumulative
  sums, the search runs on cumulative outputs.

A split is kept only when it lowers the node's training error, so error never
increases with depth and each depth-limited tree is a truncation of the
deepest one.
"""
from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field

import numpy as np

from .dataset import ExampleSet, as_example_set
from .errors import EmptyModel, EvalError, RepresentationError
from .game import DEFAULT_CONFIG, GameConfig
from .metrics import CARD_WEIGHT, block_emd_rows, pairwise_feature_distance
from .representations import Representation

DEFAULT_MIN_LEAF = 5
DEFAULT_DEPTHS = tuple(range(3, 21))
# per-feature cap on thresholds scored for distribution outputs
DEFAULT_MAX_THRESHOLDS = 64


def _renormalize(y, width):
    blocks = np.clip(y, 0.0, None).reshape(*y.shape[:-1], -1, width)
    return (blocks / blocks.sum(axis=-1, keepdims=True)).reshape(y.shape)


def representative(Y, rep: Representation, cfg: GameConfig = DEFAULT_CONFIG):
    """Mean output, renormalized per block for distribution outputs."""
    if rep.output == "scalar":
        return float(np.mean(Y))
    return _renormalize(np.mean(Y, axis=0), cfg.bet_steps)


def example_errors(pred, Y, rep: Representation, cfg: GameConfig = DEFAULT_CONFIG) -> np.ndarray:
    """Normalized per-example error of predictions against targets."""
    pred = np.asarray(pred, dtype=float)
    Y = np.asarray(Y, dtype=float)
    if rep.output == "scalar":
        return np.abs(pred - Y) / cfg.stack
    return block_emd_rows(Y, np.broadcast_to(pred, Y.shape), cfg.bet_steps)


@dataclass
class Node:
    value: object
    n_samples: int
    error: float  # mean training error of the node's own representative
    depth: int
    feature: int | None = None
    threshold: float | None = None
    left: "Node | None" = None  # x[feature] <= threshold
    right: "Node | None" = None

    @property
    def is_leaf(self) -> bool:
        return self.feature is None

    def to_dict(self) -> dict:
        value = self.value if np.isscalar(self.value) else np.asarray(self.value).tolist()
        out = {"value": value, "samples": self.n_samples, "error": self.error}
        if not self.is_leaf:
            out.update(feature=self.feature, threshold=self.threshold,
                       true=self.left.to_dict(), false=self.right.to_dict())
        return out

    @classmethod
    def from_dict(cls, obj, depth=0) -> "Node":
        value = obj["value"]
        node = cls(value if np.isscalar(value) else np.asarray(value), obj["samples"], obj["error"], depth)
        if "feature" in obj:
            node.feature = obj["feature"]
            node.threshold = obj["threshold"]
            node.left = cls.from_dict(obj["true"], depth + 1)
            node.right = cls.from_dict(obj["false"], depth + 1)
        return node


@dataclass
class DecisionTree:
    rep: Representation
    max_depth: int
    root: Node
    min_leaf: int = DEFAULT_MIN_LEAF
    cfg: GameConfig = DEFAULT_CONFIG
    kind: str = field(default="tree", init=False)

    def nodes(self):
        stack = [self.root]
        while stack:
            node = stack.pop()
            yield node
            if not node.is_leaf:
                stack.extend((node.right, node.left))

    def leaves(self):
        return [n for n in self.nodes() if n.is_leaf]

    @property
    def node_count(self) -> int:
        return sum(1 for _ in self.nodes())

    @property
    def depth(self) -> int:
        return max(n.depth for n in self.nodes())

    def leaf_for(self, x) -> Node:
        node = self.root
        while not node.is_leaf:
            node = node.left if x[node.feature] <= node.threshold else node.right
        return node

    def predict(self, X) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        return np.array([self.leaf_for(x).value for x in X])

    def training_error(self) -> float:
        leaves = self.leaves()
        return sum(n.error * n.n_samples for n in leaves) / sum(n.n_samples for n in leaves)

    def truncated(self, depth: int) -> "DecisionTree":
        """The tree that fitting with ``max_depth=depth`` would have produced."""
        def cut(node):
            copy = Node(node.value, node.n_samples, node.error, node.depth)
            if not node.is_leaf and node.depth < depth:
                copy.feature, copy.threshold = node.feature, node.threshold
                copy.left, copy.right = cut(node.left), cut(node.right)
            return copy
        return DecisionTree(self.rep, depth, cut(self.root), self.min_leaf, self.cfg)

    def to_dict(self) -> dict:
        return {"kind": "tree", "rep": self.rep.name, "max_depth": self.max_depth,
                "min_leaf": self.min_leaf, "config": self.cfg.to_dict(), "root": self.root.to_dict()}

    @classmethod
    def from_dict(cls, obj) -> "DecisionTree":
        return cls(Representation.parse(obj["rep"]), obj["max_depth"], Node.from_dict(obj["root"]),
                   obj.get("min_leaf", DEFAULT_MIN_LEAF), GameConfig(**obj.get("config", {})))

    def to_text(self, precision: int = 4) -> str:
        """Indented listing of the tree, true branch first."""
        lines = []

        def fmt(value):
            if np.isscalar(value):
                return f"{value:.{precision}f}"
            return f"<{np.size(value)}-vector>"

        def walk(node, indent):
            pad = "  " * indent
            stats = f"samples={node.n_samples} error={node.error:.{precision}f} value={fmt(node.value)}"
            if node.is_leaf:
                lines.append(f"{pad}leaf {stats}")
                return
            lines.append(f"{pad}x[{node.feature}] <= {node.threshold:.{precision}f} ({stats})")
            walk(node.left, indent + 1)
            walk(node.right, indent + 1)

        walk(self.root, 0)
        return "\n".join(lines)


def _candidates(xs, min_leaf):
    """Split positions t (left = xs[:t]) between distinct sorted values."""
    n = len(xs)
    t = np.nonzero(xs[1:] > xs[:-1])[0] + 1
    return t[(t >= min_leaf) & (t <= n - min_leaf)]


def _best_scalar_split(X, y, min_leaf):
    best = (np.inf, None, None)
    n = len(y)
    for f in range(X.shape[1]):
        order = np.argsort(X[:, f], kind="stable")
        xs, ys = X[order, f], y[order]
        ts = _candidates(xs, min_leaf)
        if ts.size == 0:
            continue
        s1 = np.cumsum(ys)
        s2 = np.cumsum(ys * ys)
        nl = ts.astype(float)
        nr = n - nl
        sl, sr = s1[ts - 1], s1[-1] - s1[ts - 1]
        ql, qr = s2[ts - 1], s2[-1] - s2[ts - 1]
        sse = (ql - sl * sl / nl) + (qr - sr * sr / nr)
        i = int(np.argmin(sse))
        if sse[i] < best[0]:
            t = ts[i]
            best = (sse[i], f, 0.5 * (xs[t - 1] + xs[t]))
    return best[1], best[2]


def _best_vector_split(X, C, min_leaf, max_thresholds):
    """``C`` holds cumulative outputs; cost is the L1 spread around each side's mean."""
    best = (np.inf, None, None)
    for f in range(X.shape[1]):
        order = np.argsort(X[:, f], kind="stable")
        xs, cs = X[order, f], C[order]
        ts = _candidates(xs, min_leaf)
        if ts.size == 0:
            continue
        if ts.size > max_thresholds:
            ts = ts[np.unique(np.linspace(0, ts.size - 1, max_thresholds).round().astype(int))]
        prefix = np.cumsum(cs, axis=0)
        total = prefix[-1]
        for t in ts:
            mean_l = prefix[t - 1] / t
            mean_r = (total - prefix[t - 1]) / (len(cs) - t)
            cost = np.abs(cs[:t] - mean_l).sum() + np.abs(cs[t:] - mean_r).sum()
            if cost < best[0]:
                best = (cost, f, 0.5 * (xs[t - 1] + xs[t]))
    return best[1], best[2]


def tree_fit(train, rep=None, max_depth: int = 8, min_leaf: int = DEFAULT_MIN_LEAF,
             cfg: GameConfig = DEFAULT_CONFIG, max_thresholds: int = DEFAULT_MAX_THRESHOLDS) -> DecisionTree:
    """Grow a greedy regression tree on an ExampleSet (or a list of LabeledExample)."""
    data = as_example_set(train, rep)
    rep = Representation.parse(rep) if rep is not None else data.rep
    if rep is not data.rep:
        raise RepresentationError(f"examples are {data.rep.name}, asked to fit {rep.name}")
    if len(data) == 0:
        raise EmptyModel("cannot fit a tree to zero examples")
    X = data.X
    Y = data.Y
    scalar = rep.output == "scalar"
    if not scalar:
        width = cfg.bet_steps
        # drop each block's last cumulative entry: it is 1 for every example
        C = np.cumsum(Y.reshape(len(Y), -1, width), axis=-1)[..., :-1].reshape(len(Y), -1)

    def build(idx, depth):
        value = representative(Y[idx], rep, cfg)
        errors = example_errors(value, Y[idx], rep, cfg)
        node = Node(value, len(idx), float(errors.mean()), depth)
        total = errors.sum()
        if depth >= max_depth or len(idx) < 2 * min_leaf or total <= 1e-12:
            return node
        if scalar:
            f, thr = _best_scalar_split(X[idx], Y[idx], min_leaf)
        else:
            f, thr = _best_vector_split(X[idx], C[idx], min_leaf, max_thresholds)
        if f is None:
            return node
        go_left = X[idx, f] <= thr
        li, ri = idx[go_left], idx[~go_left]
        child_total = sum(example_errors(representative(Y[s], rep, cfg), Y[s], rep, cfg).sum() for s in (li, ri))
        if child_total >= total - 1e-12:
            return node
        node.feature, node.threshold = int(f), float(thr)
        node.left = build(li, depth + 1)
        node.right = build(ri, depth + 1)
        return node

    root = build(np.arange(len(X)), 0)
    return DecisionTree(rep, max_depth, root, min_leaf, cfg)


def tree_predict(tree: DecisionTree, x):
    return tree.leaf_for(np.asarray(x, dtype=float)).value


@dataclass
class KnnModel:
    rep: Representation
    k: int
    train: ExampleSet
    cfg: GameConfig = DEFAULT_CONFIG
    card_weight: float = CARD_WEIGHT
    kind: str = field(default="knn", init=False)

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be at least 1")
        if self.train.rep is not self.rep:
            raise RepresentationError(f"examples are {self.train.rep.name}, model is {self.rep.name}")
        # distance ties resolve to the lowest (game id, card)
        order = np.lexsort((self.train.cards, self.train.game_ids))
        self.train = self.train.subset(order)

    def predict(self, X, chunk: int = 512) -> np.ndarray:
        if len(self.train) == 0:
            raise EmptyModel("k-NN model holds no examples")
        X = np.atleast_2d(np.asarray(X, dtype=float))
        k = min(self.k, len(self.train))
        out = []
        for start in range(0, len(X), chunk):
            dist = pairwise_feature_distance(X[start:start + chunk], self.train.X, self.rep,
                                             self.cfg.deck_size, self.card_weight)
            if k == 1:
                nearest = np.argmin(dist, axis=1)[:, None]
            else:
                nearest = np.argsort(dist, axis=1, kind="stable")[:, :k]
            ys = self.train.Y[nearest]
            if self.rep.output == "scalar":
                out.append(ys.mean(axis=1))
            elif k == 1:
                out.append(ys[:, 0])
            else:
                out.append(_renormalize(ys.mean(axis=1), self.cfg.bet_steps))
        return np.concatenate(out)

    def to_dict(self) -> dict:
        t = self.train
        return {"kind": "knn", "rep": self.rep.name, "k": self.k, "card_weight": self.card_weight,
                "config": self.cfg.to_dict(), "X": t.X.tolist(), "Y": t.Y.tolist(),
                "game_ids": t.game_ids.tolist(), "cards": t.cards.tolist()}

    @classmethod
    def from_dict(cls, obj) -> "KnnModel":
        rep = Representation.parse(obj["rep"])
        data = ExampleSet(rep, np.asarray(obj["X"], dtype=float), np.asarray(obj["Y"], dtype=float),
                          np.asarray(obj["game_ids"], dtype=int), np.asarray(obj["cards"], dtype=int))
        return cls(rep, obj["k"], data, GameConfig(**obj.get("config", {})), obj.get("card_weight", CARD_WEIGHT))


def knn_fit(train, rep=None, k: int = 1, cfg: GameConfig = DEFAULT_CONFIG) -> KnnModel:
    data = as_example_set(train, rep)
    return KnnModel(data.rep if rep is None else Representation.parse(rep), k, data, cfg)


def knn_predict(model: KnnModel, x):
    return model.predict(np.asarray(x, dtype=float)[None, :])[0]


def evaluate(model, test) -> float:
    """Mean normalized error of ``model`` on ``test``."""
    data = as_example_set(test, model.rep)
    if data.rep is not model.rep:
        raise RepresentationError(f"model is {model.rep.name}, test examples are {data.rep.name}")
    if len(data) == 0:
        raise EvalError("empty test set")
    return float(example_errors(model.predict(data.X), data.Y, model.rep, model.cfg).mean())


def save_model(model, path, extra=None):
    obj = model.to_dict()
    if extra:
        obj.update(extra)
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=1)


def load_model(path):
    with open(path) as fh:
        obj = json.load(fh)
    kind = obj.get("kind")
    if kind == "tree":
        return DecisionTree.from_dict(obj)
    if kind == "knn":
        return KnnModel.from_dict(obj)
    raise RepresentationError(f"{path}: unknown model kind {kind!r}")


REPORT_FIELDS = ("rep", "model", "param", "train_error", "test_error", "node_count")


@dataclass
class EvalReport:
    rows: list = field(default_factory=list)

    def add(self, rep, model, param, train_error, test_error, node_count=None):
        self.rows.append({"rep": Representation.parse(rep).name, "model": model, "param": param,
                          "train_error": train_error, "test_error": test_error, "node_count": node_count})

    def where(self, **conds) -> list:
        return [r for r in self.rows if all(r[k] == v for k, v in conds.items())]

    def write_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.DictWriter(fh, fieldnames=REPORT_FIELDS)
            w.writeheader()
            for row in self.rows:
                w.writerow({k: ("" if row[k] is None else row[k]) for k in REPORT_FIELDS})

    @classmethod
    def read_csv(cls, path) -> "EvalReport":
        report = cls()
        with open(path, newline="") as fh:
            for row in csv.DictReader(fh):
                report.rows.append({
                    "rep": row["rep"], "model": row["model"], "param": int(row["param"]),
                    "train_error": float(row["train_error"]), "test_error": float(row["test_error"]),
                    "node_count": int(row["node_count"]) if row["node_count"] else None,
                })
        return report


def depth_sweep(train, test, rep=None, depths=DEFAULT_DEPTHS, min_leaf: int = DEFAULT_MIN_LEAF,
                cfg: GameConfig = DEFAULT_CONFIG, max_thresholds: int = DEFAULT_MAX_THRESHOLDS,
                report: EvalReport | None = None) -> EvalReport:
    """One row per depth: training error, test error and node count.

    The deepest tree is grown once; shallower trees are its truncations, which
    is exactly what refitting at each depth would produce.
    """
    train = as_example_set(train, rep)
    test = as_example_set(test, train.rep)
    report = report if report is not None else EvalReport()
    full = tree_fit(train, train.rep, max(depths), min_leaf, cfg, max_thresholds)
    for depth in sorted(depths):
        tree = full.truncated(depth)
        report.add(train.rep, "tree", depth, tree.training_error(), evaluate(tree, test), tree.node_count)
    return report
