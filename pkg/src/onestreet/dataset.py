"""Database of solved games and the learning examples derived from it.

A dataset file is line-delimited JSON. The first line is ``{"manifest": ...}``
with the generation settings; every other line is one game record with the
fields ``id, seed, deal, cdf1, cdf2, pdf1, pdf2, strategy, p2_strategy,
value, nash_conv``. Matrices are flattened row-major, so ``strategy`` is the
hand-major, bet-minor vector.
"""
from __future__ import annotations

import csv
import json
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .deals import RNG_ALGORITHM, MarginalFeatures, game_seed, make_rng, marginals, random_deal
from .equilibrium import DEFAULT_EPSILON, DEFAULT_MAX_ITERATIONS, solve
from .errors import ConvergenceFailure, RepresentationError, SplitError
from .game import DEFAULT_CONFIG, GameConfig
from .representations import Representation

log = logging.getLogger(__name__)

FORMAT_NAME = "onestreet-dataset"
FORMAT_VERSION = 1
DEFAULT_COUNT = 2000
RECORD_FIELDS = ("id", "seed", "deal", "cdf1", "cdf2", "pdf1", "pdf2", "strategy", "p2_strategy",
                 "value", "nash_conv")


@dataclass(frozen=True)
class GameRecord:
    id: int
    seed: int
    deal: np.ndarray
    features: MarginalFeatures
    strategy: np.ndarray
    value: float
    nash_conv: float
    p2_strategy: np.ndarray | None = None

    def to_json(self) -> dict:
        out = {
            "id": self.id,
            "seed": self.seed,
            "deal": self.deal.ravel().tolist(),
            "cdf1": self.features.cdf1.tolist(),
            "cdf2": self.features.cdf2.tolist(),
            "pdf1": self.features.pdf1.tolist(),
            "pdf2": self.features.pdf2.tolist(),
            "strategy": self.strategy.ravel().tolist(),
        }
        if self.p2_strategy is not None:
            out["p2_strategy"] = self.p2_strategy.ravel().tolist()
        out["value"] = self.value
        out["nash_conv"] = self.nash_conv
        return out

    @classmethod
    def from_json(cls, obj: dict, cfg: GameConfig = DEFAULT_CONFIG) -> "GameRecord":
        d, nb = cfg.deck_size, cfg.bet_steps
        arr = lambda key: np.asarray(obj[key], dtype=float)  # noqa: E731
        p2 = obj.get("p2_strategy")
        return cls(
            id=int(obj["id"]),
            seed=int(obj["seed"]),
            deal=arr("deal").reshape(d, d),
            features=MarginalFeatures(arr("cdf1"), arr("cdf2"), arr("pdf1"), arr("pdf2")),
            strategy=arr("strategy").reshape(d, nb),
            value=float(obj["value"]),
            nash_conv=float(obj["nash_conv"]),
            p2_strategy=None if p2 is None else np.asarray(p2, dtype=float).reshape(d, nb),
        )


@dataclass
class Dataset:
    records: list
    manifest: dict = field(default_factory=dict)
    cfg: GameConfig = DEFAULT_CONFIG

    def __len__(self):
        return len(self.records)

    @property
    def master_seed(self) -> int:
        return int(self.manifest.get("master_seed", 0))


def solve_game(index, master_seed, epsilon=DEFAULT_EPSILON, cfg=DEFAULT_CONFIG, method="cfr+",
               max_iterations=DEFAULT_MAX_ITERATIONS):
    """Generate and solve game ``index``; returns ``(record, discarded_deals)``.

    A convergence failure is retried once with ten times the iteration budget.
    """
    seed = game_seed(master_seed, index)
    deal, discarded = random_deal(make_rng(seed), cfg)
    try:
        res = solve(deal, cfg, epsilon, max_iterations, method)
    except ConvergenceFailure:
        log.warning("game %d (seed %d) did not converge; retrying with %d iterations",
                    index, seed, 10 * max_iterations)
        try:
            res = solve(deal, cfg, epsilon, 10 * max_iterations, method)
        except ConvergenceFailure as exc:
            raise ConvergenceFailure(f"game {index} with seed {seed} failed twice: {exc}", exc.result) from exc
    record = GameRecord(index, seed, deal, marginals(deal, cfg), res.s1, res.value, res.nash_conv, res.s2)
    return record, discarded


def _solve_star(args):
    return solve_game(*args)


def build_dataset(count=DEFAULT_COUNT, master_seed=0, epsilon=DEFAULT_EPSILON, cfg=DEFAULT_CONFIG,
                  method="cfr+", max_iterations=DEFAULT_MAX_ITERATIONS, jobs=1) -> Dataset:
    if count < 1:
        raise ValueError("count must be at least 1")
    tasks = [(i, master_seed, epsilon, cfg, method, max_iterations) for i in range(count)]
    if jobs > 1:
        with ProcessPoolExecutor(jobs) as pool:
            results = list(pool.map(_solve_star, tasks, chunksize=max(1, count // (8 * jobs))))
    else:
        results = [solve_game(*t) for t in tasks]
    records = [r for r, _ in results]
    manifest = {
        "format": FORMAT_NAME,
        "format_version": FORMAT_VERSION,
        "count": count,
        "master_seed": master_seed,
        "epsilon": epsilon,
        "method": method,
        "max_iterations": max_iterations,
        "rng": RNG_ALGORITHM,
        "discarded_degenerate": sum(n for _, n in results),
        "config": cfg.to_dict(),
    }
    return Dataset(records, manifest, cfg)


def save_dataset(dataset: Dataset, path, extra_manifest=None):
    manifest = dict(dataset.manifest)
    if extra_manifest:
        manifest.update(extra_manifest)
    with open(path, "w") as fh:
        fh.write(json.dumps({"manifest": manifest}, sort_keys=True) + "\n")
        for rec in dataset.records:
            fh.write(json.dumps(rec.to_json(), separators=(",", ":")) + "\n")


def load_dataset(path) -> Dataset:
    with open(path) as fh:
        head = json.loads(fh.readline())
        if "manifest" not in head:
            raise ValueError(f"{path}: first line is not a dataset manifest")
        manifest = head["manifest"]
        if manifest.get("format") != FORMAT_NAME:
            raise ValueError(f"{path}: not a {FORMAT_NAME} file")
        cfg = GameConfig(**manifest.get("config", {}))
        records = [GameRecord.from_json(json.loads(line), cfg) for line in fh if line.strip()]
    return Dataset(records, manifest, cfg)


@dataclass(frozen=True)
class LabeledExample:
    game_id: int
    card: int | None
    x: np.ndarray
    y: np.ndarray | float


def _sample_bet(block, rng, cfg):
    cum = np.cumsum(block)
    idx = int(np.searchsorted(cum, rng.random() * cum[-1], side="right"))
    return min(idx, cfg.bet_steps - 1) * cfg.bet_increment


def feature_vector(record: GameRecord, rep, card: int | None = None) -> np.ndarray:
    """Input features of ``record`` (and ``card`` for per-card representations)."""
    rep = Representation.parse(rep)
    dist = record.features.cdf if rep.features == "cdf" else record.features.pdf
    if not rep.per_card:
        return dist.copy()
    if card is None:
        raise RepresentationError(f"{rep.name} needs a card")
    return np.append(dist, card if rep.card_feature == "number" else record.features.cdf1[card - 1])


def extract(record: GameRecord, rep, rng=None, master_seed: int = 0, cfg=DEFAULT_CONFIG) -> list:
    """Learning examples for one game under ``rep``.

    Scalar representations sample one bet per card. With ``rng=None`` each
    card gets its own generator derived from ``(master_seed, game id, card)``.
    """
    rep = Representation.parse(rep)
    if not rep.per_card:
        return [LabeledExample(record.id, None, feature_vector(record, rep), record.strategy.ravel().copy())]
    out = []
    for card in range(1, cfg.deck_size + 1):
        x = feature_vector(record, rep, card)
        block = record.strategy[card - 1]
        if rep.output == "block":
            y = block.copy()
        else:
            y = _sample_bet(block, rng if rng is not None else make_rng(master_seed, record.id, card), cfg)
        out.append(LabeledExample(record.id, card, x, y))
    return out


@dataclass(frozen=True)
class ExampleSet:
    """Examples of one representation stacked into arrays."""

    rep: Representation
    X: np.ndarray
    Y: np.ndarray
    game_ids: np.ndarray
    cards: np.ndarray  # 0 for whole-game examples

    def __len__(self):
        return len(self.X)

    def subset(self, mask) -> "ExampleSet":
        return ExampleSet(self.rep, self.X[mask], self.Y[mask], self.game_ids[mask], self.cards[mask])

    def examples(self) -> list:
        return [LabeledExample(int(g), int(c) or None, x, y)
                for g, c, x, y in zip(self.game_ids, self.cards, self.X, self.Y)]

    @classmethod
    def from_examples(cls, examples, rep) -> "ExampleSet":
        rep = Representation.parse(rep)
        if not examples:
            return cls(rep, np.zeros((0, 0)), np.zeros((0,)), np.zeros(0, int), np.zeros(0, int))
        X = np.array([e.x for e in examples], dtype=float)
        n = X.shape[1]
        if any(len(e.x) != n for e in examples):
            raise RepresentationError("examples have differing feature counts")
        Y = np.array([e.y for e in examples], dtype=float)
        return cls(rep, X, Y, np.array([e.game_id for e in examples]),
                   np.array([e.card or 0 for e in examples]))


def build_examples(records, rep, master_seed: int = 0, cfg=DEFAULT_CONFIG) -> ExampleSet:
    rep = Representation.parse(rep)
    examples = [e for rec in records for e in extract(rec, rep, None, master_seed, cfg)]
    return ExampleSet.from_examples(examples, rep)


def as_example_set(data, rep=None) -> ExampleSet:
    if isinstance(data, ExampleSet):
        return data
    if rep is None:
        raise RepresentationError("a representation is needed to stack raw examples")
    return ExampleSet.from_examples(list(data), rep)


def split(items, train_fraction: float = 0.8, seed: int = 0):
    """Seeded game-level split; both sides keep the input order."""
    if not 0 < train_fraction < 1:
        raise SplitError("train fraction must lie strictly between 0 and 1")
    items = list(items)
    n_train = int(round(len(items) * train_fraction))
    if n_train == 0 or n_train == len(items):
        raise SplitError(f"{len(items)} items at fraction {train_fraction} leaves one side empty")
    perm = make_rng(seed).permutation(len(items))
    train_idx = set(perm[:n_train].tolist())
    train = [it for i, it in enumerate(items) if i in train_idx]
    test = [it for i, it in enumerate(items) if i not in train_idx]
    return train, test


def _columns(prefix, n):
    return [f"{prefix}_{i}" for i in range(n)]


def export_records_csv(records, path, cfg=DEFAULT_CONFIG):
    d, nb = cfg.deck_size, cfg.bet_steps
    header = (["id", "seed"] + _columns("deal", d * d) + _columns("cdf1", d) + _columns("cdf2", d)
              + _columns("pdf1", d) + _columns("pdf2", d) + _columns("strategy", d * nb)
              + ["value", "nash_conv"])
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for r in records:
            f = r.features
            w.writerow([r.id, r.seed, *map(repr, r.deal.ravel().tolist()),
                        *map(repr, np.concatenate([f.cdf1, f.cdf2, f.pdf1, f.pdf2]).tolist()),
                        *map(repr, r.strategy.ravel().tolist()), repr(r.value), repr(r.nash_conv)])


def export_examples_csv(examples: ExampleSet, path):
    Y = examples.Y.reshape(len(examples.Y), -1)
    header = ["game_id", "card"] + _columns("x", examples.X.shape[1]) + _columns("y", Y.shape[1])
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for g, c, x, y in zip(examples.game_ids, examples.cards, examples.X, Y):
            w.writerow([int(g), int(c), *map(repr, x.tolist()), *map(repr, y.tolist())])


def read_examples_csv(path, rep) -> ExampleSet:
    rep = Representation.parse(rep)
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    header, body = rows[0], np.array(rows[1:], dtype=float)
    nx = sum(h.startswith("x_") for h in header)
    Y = body[:, 2 + nx:]
    if rep.output == "scalar":
        Y = Y[:, 0]
    return ExampleSet(rep, body[:, 2:2 + nx], Y, body[:, 0].astype(int), body[:, 1].astype(int))
