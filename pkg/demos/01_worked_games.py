"""Solve the three textbook deals and check what the solutions guarantee.

Run: python demos/01_worked_games.py
"""
import numpy as np

from onestreet.deals import make_joint, p1_polar_deal, p2_polar_deal, uniform_deal
from onestreet.equilibrium import best_response_p2, solve
from onestreet.game import expected_value, format_strategy, simulate

# Both players dealt uniformly (no two equal cards). The LP backend is exact;
# CFR+ is the default and stops once NashConv drops below epsilon.
deal = uniform_deal()
exact = solve(deal, method="lp", epsilon=1e-8)
approx = solve(deal, epsilon=1e-4)
print("uniform deal")
print(format_strategy(exact.s1))
print(f"value {exact.value:.6f} (LP), {approx.value:.6f} (CFR+, {approx.iterations} iterations)\n")

# P1 holds 1 or 10, P2 always holds 5. The weak hand bluffs all-in three times
# in four, which leaves P2 indifferent between calling and folding.
res = solve(p1_polar_deal(), method="lp")
print("player 1 polar")
print(format_strategy(res.s1, reachable=p1_polar_deal().sum(axis=1) > 0))
print(f"value {res.value:.6f}\n")

# P2 polar: P1's 5 beats half of P2's range and loses to the other half,
# so any bet only gets called by the 10. Checking is best.
res = solve(p2_polar_deal(), method="lp")
print("player 2 polar")
print(format_strategy(res.s1, reachable=p2_polar_deal().sum(axis=1) > 0))
print(f"value {res.value:.6f}\n")

# Any deal given by two marginals: here a lopsided one.
x1 = np.array([0.09, 0.19, 0.14, 0.08, 0.1, 0.1, 0.1, 0.05, 0.1, 0.05])
x2 = np.full(10, 0.1)
deal = make_joint(x1, x2)
res = solve(deal, epsilon=1e-5)
print("lopsided deal")
print(format_strategy(res.s1))

# The exact value agrees with play-by-play simulation, and player 1's
# strategy keeps at least value - NashConv against every P2 response.
mean, se = simulate(deal, res.s1, res.s2, n=400_000, rng=0)
_, floor = best_response_p2(deal, res.s1)
print(f"exact {expected_value(deal, res.s1, res.s2):.5f}, simulated {mean:.5f} +- {se:.5f}, "
      f"guaranteed {floor:.5f}")
