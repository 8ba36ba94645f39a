"""The one-street poker game: configuration, payoffs and exact expectations.

Player 1 and player 2 each ante and receive one private card from a deck of
``deck_size`` ranks (no two players share a card). Player 1 bets one of
``bet_steps`` sizes on the grid ``0, inc, 2*inc, ..., stack``; player 2 then
calls or folds. A fold forfeits player 2's ante, a call goes to showdown for
``bet + ante``.

Strategies are plain numpy arrays:

* player 1: ``sigma[h, b]`` = Pr(bet index b | card h+1), rows sum to one.
* player 2: ``tau[c, b]`` = Pr(call | card c+1, facing bet index b).

A deal is a ``deck_size x deck_size`` matrix ``p[i, j]`` = Pr(P1 holds i+1 and
P2 holds j+1) with an all-zero diagonal.
"""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ConfigMismatch, IllegalShowdown, InvalidConfig, InvalidDistribution, InvalidStrategy

TOL = 1e-9

CALL = "call"
FOLD = "fold"


@dataclass(frozen=True)
class GameConfig:
    deck_size: int = 10
    bet_steps: int = 31
    bet_increment: float = 0.1
    ante: float = 0.5
    stack: float = 3.0

    def __post_init__(self):
        if self.deck_size < 2 or self.bet_steps < 2:
            raise InvalidConfig("deck_size and bet_steps must both be >= 2")
        if min(self.bet_increment, self.ante, self.stack) <= 0:
            raise InvalidConfig("bet_increment, ante and stack must be positive")
        if abs(self.bet_increment * (self.bet_steps - 1) - self.stack) > TOL:
            raise InvalidConfig(
                f"bet grid must end at the stack: {self.bet_increment} * "
                f"({self.bet_steps} - 1) != {self.stack}"
            )

    @property
    def amounts(self) -> np.ndarray:
        """Bet amounts in dollars, indexed by bet index."""
        return np.arange(self.bet_steps) * self.bet_increment

    @property
    def max_payoff(self) -> float:
        return self.stack + self.ante

    def amount(self, bet_index: int) -> float:
        check_bet(bet_index, self)
        return bet_index * self.bet_increment

    def bet_index(self, amount: float) -> int:
        """Nearest grid index for a dollar amount."""
        idx = int(round(amount / self.bet_increment))
        check_bet(idx, self)
        return idx

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


DEFAULT_CONFIG = GameConfig()

_CONFIG_KEYS = {
    "deck_size": int,
    "bet_steps": int,
    "bet_increment": float,
    "ante": float,
    "stack": float,
}
_CAMEL = {"deckSize": "deck_size", "betSteps": "bet_steps", "betIncrement": "bet_increment"}


def parse_config(text: str) -> GameConfig:
    """Parse ``key = value`` lines into a GameConfig. ``#`` starts a comment."""
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise InvalidConfig(f"line {lineno}: expected key=value, got {raw!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        key = _CAMEL.get(key, key.replace("-", "_"))
        if key not in _CONFIG_KEYS:
            raise InvalidConfig(f"line {lineno}: unknown key {key!r}")
        try:
            values[key] = _CONFIG_KEYS[key](value)
        except ValueError:
            raise InvalidConfig(f"line {lineno}: bad value for {key}: {value!r}") from None
    return GameConfig(**values)


def load_config(path) -> GameConfig:
    return parse_config(Path(path).read_text())


def check_card(rank: int, cfg: GameConfig = DEFAULT_CONFIG):
    if not 1 <= rank <= cfg.deck_size:
        raise ValueError(f"card rank {rank} outside [1, {cfg.deck_size}]")


def check_bet(index: int, cfg: GameConfig = DEFAULT_CONFIG):
    if not 0 <= index < cfg.bet_steps:
        raise ValueError(f"bet index {index} outside [0, {cfg.bet_steps - 1}]")


def payoff(h1: int, h2: int, bet: int, p2_action: str, cfg: GameConfig = DEFAULT_CONFIG) -> float:
    """Player 1's net winnings for one terminal history.

    ``h1``/``h2`` are card ranks (1 = weakest) and ``bet`` a bet index.
    """
    check_card(h1, cfg)
    check_card(h2, cfg)
    check_bet(bet, cfg)
    if h1 == h2:
        raise IllegalShowdown(f"both players hold card {h1}")
    if p2_action == FOLD:
        return cfg.ante
    if p2_action != CALL:
        raise ValueError(f"unknown player 2 action {p2_action!r}")
    sign = 1.0 if h1 > h2 else -1.0
    return sign * (cfg.amount(bet) + cfg.ante)


def showdown_sign(cfg: GameConfig = DEFAULT_CONFIG) -> np.ndarray:
    """``S[i, j] = sign(i - j)``: +1 where player 1's card wins."""
    r = np.arange(cfg.deck_size)
    return np.sign(r[:, None] - r[None, :]).astype(float)


def check_deal(p, cfg: GameConfig = DEFAULT_CONFIG) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    d = cfg.deck_size
    if p.shape != (d, d):
        raise ConfigMismatch(f"deal has shape {p.shape}, expected {(d, d)}")
    if not np.all(np.isfinite(p)) or np.any(p < 0):
        raise InvalidDistribution("deal has negative or non-finite entries")
    if np.any(np.diag(p) != 0):
        raise InvalidDistribution("deal must have a zero diagonal")
    if abs(p.sum() - 1.0) > TOL:
        raise InvalidDistribution(f"deal sums to {p.sum()!r}, not 1")
    return p


def check_strategy_p1(sigma, cfg: GameConfig = DEFAULT_CONFIG, tol: float = TOL) -> np.ndarray:
    sigma = np.asarray(sigma, dtype=float)
    shape = (cfg.deck_size, cfg.bet_steps)
    if sigma.shape != shape:
        raise ConfigMismatch(f"player 1 strategy has shape {sigma.shape}, expected {shape}")
    if np.any(sigma < -tol) or np.any(sigma > 1 + tol):
        raise InvalidStrategy("player 1 probabilities must lie in [0, 1]")
    if np.any(np.abs(sigma.sum(axis=1) - 1) > tol):
        raise InvalidStrategy("every player 1 row must sum to 1")
    return sigma


def check_strategy_p2(tau, cfg: GameConfig = DEFAULT_CONFIG, tol: float = TOL) -> np.ndarray:
    tau = np.asarray(tau, dtype=float)
    shape = (cfg.deck_size, cfg.bet_steps)
    if tau.shape != shape:
        raise ConfigMismatch(f"player 2 strategy has shape {tau.shape}, expected {shape}")
    if np.any(tau < -tol) or np.any(tau > 1 + tol):
        raise InvalidStrategy("player 2 call probabilities must lie in [0, 1]")
    return tau


def pure_p1(bets, cfg: GameConfig = DEFAULT_CONFIG) -> np.ndarray:
    """Player 1 strategy betting ``bets[h]`` (an index) with card h+1."""
    sigma = np.zeros((cfg.deck_size, cfg.bet_steps))
    sigma[np.arange(cfg.deck_size), np.asarray(bets)] = 1.0
    return sigma


def always_check(cfg: GameConfig = DEFAULT_CONFIG) -> np.ndarray:
    return pure_p1(np.zeros(cfg.deck_size, dtype=int), cfg)


def always_call(cfg: GameConfig = DEFAULT_CONFIG) -> np.ndarray:
    return np.ones((cfg.deck_size, cfg.bet_steps))


def always_fold(cfg: GameConfig = DEFAULT_CONFIG) -> np.ndarray:
    return np.zeros((cfg.deck_size, cfg.bet_steps))


def p1_action_values(deal, tau, cfg: GameConfig = DEFAULT_CONFIG) -> np.ndarray:
    """Reach-weighted value of each (P1 card, bet index) against ``tau``.

    ``v[h, b] = sum_c p[h, c] * (tau[c, b] * payoff_call + (1 - tau[c, b]) * ante)``.
    """
    p = np.asarray(deal, dtype=float)
    win = (p * showdown_sign(cfg)) @ tau
    return cfg.ante * p.sum(axis=1)[:, None] + win * (cfg.amounts + cfg.ante) - cfg.ante * (p @ tau)


def p2_response_values(deal, sigma, cfg: GameConfig = DEFAULT_CONFIG):
    """Player 1's reach-weighted winnings at each P2 information set (card c, bet b).

    Returns ``(if_call, if_fold)``, both shaped ``(deck_size, bet_steps)``.
    """
    p = np.asarray(deal, dtype=float)
    if_call = ((p * showdown_sign(cfg)).T @ sigma) * (cfg.amounts + cfg.ante)
    if_fold = cfg.ante * (p.T @ sigma)
    return if_call, if_fold


def expected_value(deal, s1, s2, cfg: GameConfig = DEFAULT_CONFIG) -> float:
    """Player 1's exact expected net winnings under the profile ``(s1, s2)``."""
    deal = check_deal(deal, cfg)
    s1 = check_strategy_p1(s1, cfg)
    s2 = check_strategy_p2(s2, cfg)
    return float(np.sum(s1 * p1_action_values(deal, s2, cfg)))


def simulate(deal, s1, s2, cfg: GameConfig = DEFAULT_CONFIG, n: int = 1_000_000, rng=None):
    """Monte-Carlo estimate of player 1's winnings; returns ``(mean, standard_error)``."""
    deal = check_deal(deal, cfg)
    rng = np.random.default_rng(rng)
    d = cfg.deck_size
    cells = rng.choice(d * d, size=n, p=deal.ravel())
    h, c = np.divmod(cells, d)
    # inverse-cdf sampling of each hand's bet
    cum = np.cumsum(s1, axis=1)
    bets = (rng.random(n)[:, None] > cum[h]).sum(axis=1)
    bets = np.minimum(bets, cfg.bet_steps - 1)
    calls = rng.random(n) < s2[c, bets]
    sign = np.where(h > c, 1.0, -1.0)
    wins = np.where(calls, sign * (cfg.amounts[bets] + cfg.ante), cfg.ante)
    return float(wins.mean()), float(wins.std(ddof=1) / np.sqrt(n))


def format_strategy(sigma, cfg: GameConfig = DEFAULT_CONFIG, reachable=None, min_prob: float = 5e-4):
    """Render a player 1 strategy as ``Card k: Bet x pr y, ...`` lines."""
    lines = []
    for h in range(cfg.deck_size):
        if reachable is not None and not reachable[h]:
            lines.append(f"Card {h + 1}: unreachable")
            continue
        parts = [
            f"{cfg.amounts[b]:.1f} pr {sigma[h, b]:.3f}"
            for b in range(cfg.bet_steps)
            if sigma[h, b] >= min_prob
        ]
        lines.append(f"Card {h + 1}: Bet " + ", ".join(parts))
    return "\n".join(lines)
