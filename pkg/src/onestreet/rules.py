"""Readable rule lists from trees, and compliance with two rules of thumb.

Rule of thumb 1 ("80-20"): a hand that beats between 20% and 80% of the
opponent's range should check or bet tiny.

Rule of thumb 2 ("all-in"): a hand that beats at least 95% of the opponent's
range should shove when at least 10% of that range is strong. Strong opponent
hands are those that beat at least ``strong_cut`` of our own range.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dataset import GameRecord, feature_vector
from .errors import NoProbes
from .game import DEFAULT_CONFIG, GameConfig
from .representations import Representation

SMALL_BET = 0.2
BIG_BET = 2.7
STRONG_CUT = 0.8


@dataclass(frozen=True)
class Condition:
    feature: int
    comparator: str  # "<=" on the true branch, ">" on the false branch
    threshold: float

    def holds(self, x) -> bool:
        return x[self.feature] <= self.threshold if self.comparator == "<=" else x[self.feature] > self.threshold

    def render(self, rep: Representation, deck_size: int = 10, precision: int = 4) -> str:
        sym = "≤" if self.comparator == "<=" else ">"
        return f"{describe_feature(self.feature, rep, deck_size)} {sym} {self.threshold:.{precision}f}"


@dataclass(frozen=True)
class StrategyRule:
    conditions: tuple
    action: object
    support: int
    error: float

    def matches(self, x) -> bool:
        return all(c.holds(x) for c in self.conditions)

    def render(self, rep: Representation, cfg: GameConfig = DEFAULT_CONFIG) -> str:
        then = describe_action(self.action, rep, cfg)
        if not self.conditions:
            return f"always {then}"
        cond = " and ".join(c.render(rep, cfg.deck_size) for c in simplify(self.conditions))
        return f"if {cond} then {then}"


def simplify(conditions) -> list:
    """Keep only the tightest bound per (feature, direction), in order of first use."""
    best = {}
    for c in conditions:
        key = (c.feature, c.comparator)
        old = best.get(key)
        if old is None:
            best[key] = c
        elif (c.comparator == "<=") == (c.threshold < old.threshold):
            best[key] = Condition(c.feature, c.comparator, c.threshold)
    order = []
    for c in conditions:
        key = (c.feature, c.comparator)
        if key not in order:
            order.append(key)
    return [best[k] for k in order]


def describe_feature(index: int, rep: Representation, deck_size: int = 10) -> str:
    rep = Representation.parse(rep)
    if index < 2 * deck_size:
        who = "you hold" if index < deck_size else "opponent holds"
        card = index % deck_size + 1
        if rep.features == "cdf":
            return f"probability {who} ≤ card {card}"
        return f"probability {who} card {card}"
    if rep.card_feature == "number":
        return "your card"
    return "your hand's strength percentile"


def describe_action(action, rep: Representation, cfg: GameConfig = DEFAULT_CONFIG) -> str:
    if rep.output == "scalar":
        return f"bet {float(action):.2f}"
    action = np.asarray(action, dtype=float)
    if rep.output == "block":
        parts = [f"{cfg.amounts[b]:.1f} pr {action[b]:.3f}" for b in range(cfg.bet_steps) if action[b] >= 5e-4]
        return "bet " + ", ".join(parts)
    means = action.reshape(cfg.deck_size, cfg.bet_steps) @ cfg.amounts
    return "bet on average " + ", ".join(f"{m:.2f}" for m in means) + " with cards 1.." + str(cfg.deck_size)


def extract_rules(tree) -> list:
    """One rule per leaf, depth-first with the true (≤) branch first."""
    rules = []

    def walk(node, path):
        if node.is_leaf:
            rules.append(StrategyRule(tuple(path), node.value, node.n_samples, node.error))
            return
        walk(node.left, path + [Condition(node.feature, "<=", node.threshold)])
        walk(node.right, path + [Condition(node.feature, ">", node.threshold)])

    walk(tree.root, [])
    return rules


def render_rules(rules, rep, cfg: GameConfig = DEFAULT_CONFIG, sep: str = "\n") -> str:
    """The rules as an if / else-if / else decision list."""
    rep = Representation.parse(rep)
    if len(rules) == 1:
        return rules[0].render(rep, cfg)
    out = []
    for i, rule in enumerate(rules):
        text = rule.render(rep, cfg)
        if i == len(rules) - 1:
            text = "else " + describe_action(rule.action, rep, cfg)
        elif i > 0:
            text = "else " + text
        out.append(text)
    return sep.join(out)


def rules_predict(rules, x):
    x = np.asarray(x, dtype=float)
    for rule in rules:
        if rule.matches(x):
            return rule.action
    raise ValueError("no rule matches; rule list does not partition the feature space")


def rules_to_json(rules, rep, cfg: GameConfig = DEFAULT_CONFIG) -> list:
    rep = Representation.parse(rep)
    return [
        {
            "conditions": [{"feature": c.feature, "description": describe_feature(c.feature, rep, cfg.deck_size),
                            "comparator": c.comparator, "threshold": c.threshold} for c in r.conditions],
            "action": float(r.action) if np.isscalar(r.action) else np.asarray(r.action).tolist(),
            "text": r.render(rep, cfg),
            "support": r.support,
            "error": r.error,
        }
        for r in rules
    ]


def percentile_interval(rule: StrategyRule, feature: int = 20):
    """The ``(low, high]`` range a rule allows for one feature."""
    lo, hi = -np.inf, np.inf
    for c in rule.conditions:
        if c.feature != feature:
            continue
        if c.comparator == "<=":
            hi = min(hi, c.threshold)
        else:
            lo = max(lo, c.threshold)
    return lo, hi


# ---------------------------------------------------------------- compliance

def equilibrium_bet(record: GameRecord, card: int, cfg: GameConfig = DEFAULT_CONFIG) -> float:
    """Expected bet of the stored equilibrium strategy with ``card``."""
    return float(record.strategy[card - 1] @ cfg.amounts)


def model_bet_function(model, cfg: GameConfig | None = None):
    """Wrap a fitted learner as ``f(record, card) -> expected bet``."""
    cfg = cfg or model.cfg
    rep = model.rep

    def bet(record, card):
        x = feature_vector(record, rep, card if rep.per_card else None)
        pred = model.predict(x[None, :])[0]
        if rep.output == "scalar":
            return float(pred)
        pred = np.asarray(pred, dtype=float)
        if rep.output == "full":
            pred = pred.reshape(cfg.deck_size, cfg.bet_steps)[card - 1]
        return float(pred @ cfg.amounts)

    return bet


def as_bet_function(model, cfg: GameConfig = DEFAULT_CONFIG):
    if model is None or model == "equilibrium":
        return lambda record, card: equilibrium_bet(record, card, cfg)
    if hasattr(model, "predict") and hasattr(model, "rep"):
        return model_bet_function(model, cfg)
    if callable(model):
        return model
    raise TypeError(f"cannot turn {model!r} into a bet function")


def opponent_view(record: GameRecord, card: int, basis: str = "conditional"):
    """Opponent's hand distribution as seen with ``card``, and the share we beat."""
    i = card - 1
    if basis == "conditional":
        q = record.deal[i] / record.deal[i].sum()
    elif basis == "unconditional":
        q = record.features.pdf2
    else:
        raise ValueError(f"unknown basis {basis!r}")
    return q, float(q[:i].sum())


def opponent_strength(record: GameRecord) -> np.ndarray:
    """For each opponent card, the share of our range it beats (nan if never held)."""
    p = record.deal
    col = p.sum(axis=0)
    below = np.array([p[:j, j].sum() for j in range(len(col))])
    with np.errstate(invalid="ignore", divide="ignore"):
        return np.where(col > 0, below / np.where(col > 0, col, 1), np.nan)


def _probes(probe_games, qualifies):
    for record in probe_games:
        pdf1 = record.deal.sum(axis=1)
        for card in range(1, len(pdf1) + 1):
            if pdf1[card - 1] > 0 and qualifies(record, card):
                yield record, card


def _compliance(bet, probes, ok):
    hits = [ok(bet(record, card)) for record, card in probes]
    if not hits:
        raise NoProbes("no (game, card) pair satisfies the rule's precondition")
    return float(np.mean(hits))


def check_80_20(model, probe_games, basis: str = "conditional", low: float = 0.2, high: float = 0.8,
                small_bet: float = SMALL_BET, cfg: GameConfig = DEFAULT_CONFIG) -> float:
    """Share of mid-strength probes (beat fraction in [low, high]) that bet at most ``small_bet``."""
    bet = as_bet_function(model, cfg)

    def qualifies(record, card):
        _, w = opponent_view(record, card, basis)
        return low <= w <= high

    return _compliance(bet, _probes(probe_games, qualifies), lambda b: b <= small_bet + 1e-9)


def check_all_in(model, probe_games, basis: str = "conditional", beat: float = 0.95,
                 strong_cut: float = STRONG_CUT, min_strong: float = 0.1, big_bet: float = BIG_BET,
                 cfg: GameConfig = DEFAULT_CONFIG) -> float:
    """Share of near-nut probes facing at least ``min_strong`` strong hands that bet ``big_bet`` or more."""
    bet = as_bet_function(model, cfg)

    def qualifies(record, card):
        q, w = opponent_view(record, card, basis)
        strong = np.nan_to_num(opponent_strength(record)) >= strong_cut
        return w >= beat and q[strong].sum() >= min_strong

    return _compliance(bet, _probes(probe_games, qualifies), lambda b: b >= big_bet - 1e-9)


@dataclass(frozen=True)
class ComplianceReport:
    rule: str
    basis: str
    compliance: float | None
    probes: int


def compliance_report(model, probe_games, cfg: GameConfig = DEFAULT_CONFIG) -> list:
    """Both rules under both opponent-distribution bases; ``None`` where no probe qualifies."""
    out = []
    for rule, check in (("80-20", check_80_20), ("all-in", check_all_in)):
        for basis in ("conditional", "unconditional"):
            counted = []

            def counting(record, card, _bet=as_bet_function(model, cfg)):
                counted.append(card)
                return _bet(record, card)

            try:
                value = check(counting, probe_games, basis=basis, cfg=cfg)
            except NoProbes:
                value = None
            out.append(ComplianceReport(rule, basis, value, len(counted)))
    return out
