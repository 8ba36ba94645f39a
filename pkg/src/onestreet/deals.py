"""Random private-information distributions and their marginal features."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateDeal, DimensionError, InvalidDistribution
from .game import DEFAULT_CONFIG, GameConfig, check_deal

TOL = 1e-9

# The generator algorithm is part of the dataset contract: PCG64 seeded from
# numpy's SeedSequence, which is portable across platforms.
RNG_ALGORITHM = "numpy.PCG64(SeedSequence)"


def game_seed(master_seed: int, index: int) -> int:
    """Deterministic 64-bit seed for game ``index`` of a dataset."""
    ss = np.random.SeedSequence([master_seed, index])
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def make_rng(*key: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(list(key))))


def sample_simplex(n: int, rng) -> np.ndarray:
    """Uniform point on the (n-1)-simplex from normalized exponential draws.

    ``rng`` only needs a ``random(size)`` method returning uniforms in [0, 1).
    Exact zeros are redrawn since ``-log(0)`` is infinite.
    """
    if n < 1:
        raise ValueError("dimension must be at least 1")
    u = np.asarray(rng.random(n), dtype=float)
    while np.any(u == 0.0):
        zero = u == 0.0
        u[zero] = rng.random(int(zero.sum()))
    a = -np.log(u)
    total = a.sum()
    if total == 0.0:
        # every draw was exactly 1.0
        return np.full(n, 1.0 / n)
    return a / total


def make_joint(x1, x2) -> np.ndarray:
    """Joint deal from independent marginals, excluding equal cards and renormalizing."""
    x1 = np.asarray(x1, dtype=float)
    x2 = np.asarray(x2, dtype=float)
    if x1.shape != x2.shape or x1.ndim != 1:
        raise DimensionError(f"marginals must be equal-length vectors, got {x1.shape} and {x2.shape}")
    for x in (x1, x2):
        check_pdf(x)
    p = np.outer(x1, x2)
    np.fill_diagonal(p, 0.0)
    total = p.sum()
    if total <= 0.0:
        raise DegenerateDeal("all probability mass lies on equal cards")
    return p / total


def check_pdf(pdf, tol: float = TOL) -> np.ndarray:
    pdf = np.asarray(pdf, dtype=float)
    if not np.all(np.isfinite(pdf)) or np.any(pdf < 0):
        raise InvalidDistribution("probabilities must be finite and non-negative")
    if abs(pdf.sum() - 1.0) > tol:
        raise InvalidDistribution(f"probabilities sum to {pdf.sum()!r}, not 1")
    return pdf


def cdf_to_pdf(cdf) -> np.ndarray:
    cdf = np.asarray(cdf, dtype=float)
    pdf = np.diff(cdf, prepend=0.0)
    if np.any(pdf < -TOL):
        raise InvalidDistribution("cdf must be non-decreasing and start at or above 0")
    return pdf


def pdf_to_cdf(pdf) -> np.ndarray:
    pdf = np.asarray(pdf, dtype=float)
    if np.any(pdf < -TOL):
        raise InvalidDistribution("pdf entries must be non-negative")
    return np.cumsum(pdf)


@dataclass(frozen=True)
class MarginalFeatures:
    cdf1: np.ndarray
    cdf2: np.ndarray
    pdf1: np.ndarray
    pdf2: np.ndarray

    @property
    def cdf(self) -> np.ndarray:
        """The 20-value learning input: player 1 cdf followed by player 2 cdf."""
        return np.concatenate([self.cdf1, self.cdf2])

    @property
    def pdf(self) -> np.ndarray:
        return np.concatenate([self.pdf1, self.pdf2])


def marginals(deal, cfg: GameConfig = DEFAULT_CONFIG) -> MarginalFeatures:
    deal = check_deal(deal, cfg)
    pdf1 = deal.sum(axis=1)
    pdf2 = deal.sum(axis=0)
    cdf1, cdf2 = np.cumsum(pdf1), np.cumsum(pdf2)
    # pin the top of each cdf so it is exactly 1
    cdf1[-1] = cdf2[-1] = 1.0
    return MarginalFeatures(cdf1, cdf2, pdf1, pdf2)


def random_deal(rng, cfg: GameConfig = DEFAULT_CONFIG):
    """Sample a non-degenerate deal; returns ``(deal, discarded_count)``."""
    discarded = 0
    while True:
        x1 = sample_simplex(cfg.deck_size, rng)
        x2 = sample_simplex(cfg.deck_size, rng)
        try:
            return make_joint(x1, x2), discarded
        except DegenerateDeal:
            discarded += 1


def point_mass(card: int, cfg: GameConfig = DEFAULT_CONFIG) -> np.ndarray:
    x = np.zeros(cfg.deck_size)
    x[card - 1] = 1.0
    return x


def uniform_deal(cfg: GameConfig = DEFAULT_CONFIG) -> np.ndarray:
    u = np.full(cfg.deck_size, 1.0 / cfg.deck_size)
    return make_joint(u, u)


def polar(low: int = 1, high: int = 10, cfg: GameConfig = DEFAULT_CONFIG) -> np.ndarray:
    """Half the mass on ``low``, half on ``high``."""
    return 0.5 * point_mass(low, cfg) + 0.5 * point_mass(high, cfg)


def p1_polar_deal(cfg: GameConfig = DEFAULT_CONFIG) -> np.ndarray:
    """P1 holds the weakest or strongest card, P2 always holds the middle card."""
    return make_joint(polar(1, cfg.deck_size, cfg), point_mass(cfg.deck_size // 2, cfg))


def p2_polar_deal(cfg: GameConfig = DEFAULT_CONFIG) -> np.ndarray:
    return make_joint(point_mass(cfg.deck_size // 2, cfg), polar(1, cfg.deck_size, cfg))
