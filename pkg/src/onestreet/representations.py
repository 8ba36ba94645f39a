"""The ten ways of turning a solved game into learning examples.

=====  =========  ===============  ==============================
rep    features   feature 21       output
=====  =========  ===============  ==============================
R1     cdf        (none)           full strategy (deck x bets)
R2     pdf        (none)           full strategy
R3     cdf        card number      that card's bet distribution
R4     pdf        card number      that card's bet distribution
R5     cdf        card's P1 cdf    that card's bet distribution
R6     pdf        card's P1 cdf    that card's bet distribution
R7     cdf        card number      one sampled bet amount
R8     pdf        card number      one sampled bet amount
R9     cdf        card's P1 cdf    one sampled bet amount
R10    pdf        card's P1 cdf    one sampled bet amount
=====  =========  ===============  ==============================
"""
from __future__ import annotations

import enum

from .errors import RepresentationError


class Representation(enum.Enum):
    R1 = (1, "cdf", None, "full")
    R2 = (2, "pdf", None, "full")
    R3 = (3, "cdf", "number", "block")
    R4 = (4, "pdf", "number", "block")
    R5 = (5, "cdf", "cdf", "block")
    R6 = (6, "pdf", "cdf", "block")
    R7 = (7, "cdf", "number", "scalar")
    R8 = (8, "pdf", "number", "scalar")
    R9 = (9, "cdf", "cdf", "scalar")
    R10 = (10, "pdf", "cdf", "scalar")

    def __init__(self, number, features, card_feature, output):
        self.number = number
        self.features = features
        self.card_feature = card_feature
        self.output = output

    @property
    def per_card(self) -> bool:
        return self.card_feature is not None

    def n_features(self, deck_size: int = 10) -> int:
        return 2 * deck_size + (1 if self.per_card else 0)

    def output_size(self, deck_size: int = 10, bet_steps: int = 31) -> int:
        return {"full": deck_size * bet_steps, "block": bet_steps, "scalar": 1}[self.output]

    def describe(self) -> str:
        card = {None: "no card feature", "number": "card number", "cdf": "card's cdf value"}
        out = {"full": "full strategy vector", "block": "per-card bet distribution",
               "scalar": "sampled bet size"}
        return f"{self.name}: {self.features} features, {card[self.card_feature]}, {out[self.output]}"

    @classmethod
    def parse(cls, value) -> "Representation":
        if isinstance(value, cls):
            return value
        text = str(value).strip().upper()
        if not text.startswith("R"):
            text = "R" + text
        try:
            return cls[text]
        except KeyError:
            raise RepresentationError(f"unknown representation {value!r}; expected r1..r10") from None


ALL_REPS = tuple(Representation)
