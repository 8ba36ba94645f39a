"""Earth mover's distances between games and between strategies.

Run: python demos/02_distances.py
"""
import numpy as np

from onestreet.deals import marginals, p1_polar_deal, p2_polar_deal, uniform_deal
from onestreet.metrics import emd_1d, input_distance, output_distance

# One histogram against another: moving all mass across the full range costs 1.
print(emd_1d([1, 0, 0, 0], [0, 0, 0, 1]), emd_1d([1, 0, 0, 0], [0, 1, 0, 0]))

# Games are compared through each player's cdf over the ten cards.
games = {"uniform": uniform_deal(), "p1 polar": p1_polar_deal(), "p2 polar": p2_polar_deal()}
feats = {k: marginals(v).cdf for k, v in games.items()}
names = list(games)
for a in names:
    print(f"{a:>9}", " ".join(f"{input_distance(feats[a], feats[b]):.4f}" for b in names))

# Strategies are compared hand by hand. Moving one hand's check to an all-in
# costs one tenth; moving every hand by one bet step costs 1/30.
check = np.zeros((10, 31))
check[:, 0] = 1
one_shove = check.copy()
one_shove[0] = 0
one_shove[0, 30] = 1
min_bet = np.zeros((10, 31))
min_bet[:, 1] = 1
print(output_distance(check, one_shove), output_distance(check, min_bet))
