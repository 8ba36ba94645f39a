"""Earth mover's distances between games and between strategies.

Every distance here is a 1-D EMD between histograms over ordered bins,
normalized by its largest possible value (a point mass moved from the first
bin to the last), then averaged over the blocks it is made of: players for
game inputs, hands for strategies.
"""
from __future__ import annotations

import numpy as np
from scipy.spatial.distance import cdist

from .errors import DimensionError, InvalidDistribution, InvalidStrategy, RepresentationError
from .representations import Representation

# share of the card term in per-card feature distances
CARD_WEIGHT = 1.0 / 3.0


def _block_emd(p, q, width):
    """Normalized EMD per block of ``width`` bins along the last axis, averaged over blocks.

    Returns ``(distance, final_deltas)``; the final running difference of each
    block is zero for proper distributions and is handed back for checks.
    """
    delta = np.cumsum((p - q).reshape(*p.shape[:-1], -1, width), axis=-1)
    per_block = np.abs(delta).sum(axis=-1) / (width - 1)
    return per_block.mean(axis=-1), delta[..., -1]


def emd_1d(p, q) -> float:
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if p.ndim != 1 or p.shape != q.shape:
        raise DimensionError(f"histograms must be equal-length vectors, got {p.shape} and {q.shape}")
    if p.size < 2:
        raise DimensionError("histograms need at least two bins")
    dist, _ = _block_emd(p, q, p.size)
    return float(dist)


def _cdf_blocks_to_pdf(x, deck_size):
    x = np.asarray(x, dtype=float)
    blocks = x.reshape(*x.shape[:-1], -1, deck_size)
    pdf = np.diff(blocks, axis=-1, prepend=0.0)
    if np.any(pdf < -1e-9):
        raise InvalidDistribution("cdf values must be non-decreasing within each player")
    return pdf.reshape(x.shape)


def input_distance(x, x_hat, deck_size: int = 10, n_players: int = 2) -> float:
    """Distance between two games given as concatenated per-player cdf vectors."""
    x = np.asarray(x, dtype=float)
    x_hat = np.asarray(x_hat, dtype=float)
    if x.shape != (n_players * deck_size,) or x_hat.shape != x.shape:
        raise DimensionError(f"expected two {n_players * deck_size}-value cdf vectors")
    dist, final = _block_emd(_cdf_blocks_to_pdf(x, deck_size), _cdf_blocks_to_pdf(x_hat, deck_size), deck_size)
    if np.any(np.abs(final) > 1e-6):
        raise InvalidDistribution("each player's cdf must end at 1")
    return float(dist)


def output_distance(y, y_hat, deck_size: int = 10, bet_steps: int = 31) -> float:
    """Distance between two full player 1 strategies (hand-major flattening)."""
    y = np.asarray(y, dtype=float).ravel()
    y_hat = np.asarray(y_hat, dtype=float).ravel()
    if y.shape != (deck_size * bet_steps,) or y_hat.shape != y.shape:
        raise DimensionError(f"expected two {deck_size * bet_steps}-value strategy vectors")
    for v in (y, y_hat):
        if np.any(np.abs(v.reshape(deck_size, bet_steps).sum(axis=1) - 1) > 1e-6):
            raise InvalidStrategy("every hand's bet distribution must sum to 1")
    dist, _ = _block_emd(y, y_hat, bet_steps)
    return float(dist)


def _card_scale(rep: Representation, deck_size: int) -> float:
    return float(deck_size - 1) if rep.card_feature == "number" else 1.0


def to_cdf_features(x, rep: Representation, deck_size: int = 10) -> np.ndarray:
    """The 2*deck_size distribution features of ``x`` expressed as cdfs."""
    x = np.asarray(x, dtype=float)
    dist = x[..., : 2 * deck_size]
    if rep.features == "cdf":
        return dist
    blocks = dist.reshape(*dist.shape[:-1], 2, deck_size)
    return np.cumsum(blocks, axis=-1).reshape(dist.shape)


def feature_distance(f, f_hat, rep, deck_size: int = 10, card_weight: float = CARD_WEIGHT) -> float:
    """Distance between two feature vectors of the same representation.

    The distribution part uses :func:`input_distance` (pdf features are first
    accumulated into cdfs). Per-card representations mix in the normalized
    gap between the 21st features with weight ``card_weight``.
    """
    rep = Representation.parse(rep)
    f = np.asarray(f, dtype=float)
    f_hat = np.asarray(f_hat, dtype=float)
    n = rep.n_features(deck_size)
    if f.shape != (n,) or f_hat.shape != (n,):
        raise RepresentationError(f"{rep.name} expects {n} features, got {f.shape} and {f_hat.shape}")
    dist = input_distance(to_cdf_features(f, rep, deck_size), to_cdf_features(f_hat, rep, deck_size), deck_size)
    if not rep.per_card:
        return dist
    card = abs(f[-1] - f_hat[-1]) / _card_scale(rep, deck_size)
    return (1 - card_weight) * dist + card_weight * card


def pairwise_feature_distance(a, b, rep, deck_size: int = 10, card_weight: float = CARD_WEIGHT) -> np.ndarray:
    """All-pairs :func:`feature_distance` between the rows of ``a`` and ``b``.

    Uses the closed form of the input distance: the running difference of two
    pdfs is the difference of their cdfs, so the distance is an L1 norm.
    """
    rep = Representation.parse(rep)
    a = np.atleast_2d(np.asarray(a, dtype=float))
    b = np.atleast_2d(np.asarray(b, dtype=float))
    n = rep.n_features(deck_size)
    if a.shape[1] != n or b.shape[1] != n:
        raise RepresentationError(f"{rep.name} expects {n} features")
    ca = to_cdf_features(a, rep, deck_size)
    cb = to_cdf_features(b, rep, deck_size)
    dist = cdist(ca, cb, "cityblock") / (2 * (deck_size - 1))
    if not rep.per_card:
        return dist
    card = np.abs(a[:, -1:] - b[:, -1][None, :]) / _card_scale(rep, deck_size)
    return (1 - card_weight) * dist + card_weight * card


def block_emd_rows(y, y_hat, width: int) -> np.ndarray:
    """Row-wise normalized block EMD for 2-D arrays of stacked outputs."""
    y = np.asarray(y, dtype=float)
    y_hat = np.asarray(y_hat, dtype=float)
    dist, _ = _block_emd(y, y_hat, width)
    return dist
