"""Equilibrium computation and exact best-response oracles.

Two backends sit behind :func:`solve`:

``"cfr+"``
    Alternating CFR+ self-play (regret matching with floored regrets),
    averaging iterate ``t`` with weight ``t**2``. Deterministic. The loop is
    compiled with numba when available and falls back to numpy otherwise.
``"lp"``
    The sequence-form linear programs for both players, solved with HiGHS
    through :func:`scipy.optimize.linprog`; exact up to solver tolerance.

Both are certified the same way: the returned profile's NashConv is computed
exactly with :func:`best_response_p1` and :func:`best_response_p2`.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.optimize import linprog

from .errors import ConvergenceFailure
from .game import (
    DEFAULT_CONFIG,
    GameConfig,
    check_deal,
    check_strategy_p1,
    check_strategy_p2,
    p1_action_values,
    p2_response_values,
    showdown_sign,
)

DEFAULT_EPSILON = 1e-4
DEFAULT_MAX_ITERATIONS = 100_000
METHODS = ("cfr+", "lp")
# iterate weights t**2 converge markedly faster here than linear ones
AVERAGING_POWER = 2.0

# absolute slack used when comparing reach-weighted action values
_TIE = 1e-12


@dataclass(frozen=True)
class EquilibriumResult:
    s1: np.ndarray
    s2: np.ndarray
    value: float
    nash_conv: float
    iterations: int
    method: str = "cfr+"


def best_response_p2(deal, s1, cfg: GameConfig = DEFAULT_CONFIG):
    """Pure best response of player 2 to ``s1``.

    Player 2 calls wherever calling costs player 1 at least as much as folding
    (ties go to call, which also covers unreachable information sets).
    Returns ``(tau, value_for_p1)``.
    """
    deal = check_deal(deal, cfg)
    s1 = check_strategy_p1(s1, cfg)
    if_call, if_fold = p2_response_values(deal, s1, cfg)
    tau = (if_call <= if_fold + _TIE).astype(float)
    return tau, float(np.minimum(if_call, if_fold).sum())


def best_response_p1(deal, s2, cfg: GameConfig = DEFAULT_CONFIG):
    """Pure best response of player 1 to ``s2``; ties go to the smaller bet.

    Returns ``(sigma, value_for_p1)``.
    """
    deal = check_deal(deal, cfg)
    s2 = check_strategy_p2(s2, cfg)
    v = p1_action_values(deal, s2, cfg)
    best = v.max(axis=1, keepdims=True)
    bets = np.argmax(v >= best - _TIE, axis=1)
    sigma = np.zeros_like(v)
    sigma[np.arange(cfg.deck_size), bets] = 1.0
    return sigma, float(best.sum())


def nash_conv(deal, s1, s2, cfg: GameConfig = DEFAULT_CONFIG) -> float:
    """Total gain available to the two best-responding players (zero at equilibrium)."""
    _, hi = best_response_p1(deal, s2, cfg)
    _, lo = best_response_p2(deal, s1, cfg)
    return max(0.0, hi - lo)


def canonicalize(deal, s1, s2, cfg: GameConfig = DEFAULT_CONFIG):
    """Fix the rows of hands a player can never hold: P1 checks, P2 calls."""
    deal = np.asarray(deal, dtype=float)
    s1 = np.array(s1, dtype=float)
    s2 = np.array(s2, dtype=float)
    dead1 = deal.sum(axis=1) == 0
    dead2 = deal.sum(axis=0) == 0
    s1[dead1] = 0.0
    s1[dead1, 0] = 1.0
    s2[dead2] = 1.0
    return s1, s2


def _regret_match(regrets):
    pos = np.maximum(regrets, 0.0)
    total = pos.sum(axis=-1, keepdims=True)
    uniform = 1.0 / regrets.shape[-1]
    return np.where(total > 0, pos / np.where(total > 0, total, 1.0), uniform)


def _result(deal, s1, s2, cfg, iterations, method):
    s1, s2 = canonicalize(deal, s1, s2, cfg)
    value = float(np.sum(s1 * p1_action_values(deal, s2, cfg)))
    return EquilibriumResult(s1, s2, value, nash_conv(deal, s1, s2, cfg), iterations, method)


def _cfr_plus_numpy(deal, win, stakes, ante, r1, r2, sum1, sum2, t0, n, power):
    base = ante * deal.sum(axis=1)[:, None]
    for t in range(t0 + 1, t0 + n + 1):
        sigma = _regret_match(r1)

        # player 2 minimizes player 1's winnings
        lose_if_call = -(win.T @ sigma) * stakes
        lose_if_fold = -ante * (deal.T @ sigma)
        tau = _regret_match(r2)[..., 0]
        ev2 = tau * lose_if_call + (1 - tau) * lose_if_fold
        r2[..., 0] = np.maximum(r2[..., 0] + lose_if_call - ev2, 0.0)
        r2[..., 1] = np.maximum(r2[..., 1] + lose_if_fold - ev2, 0.0)
        tau = _regret_match(r2)[..., 0]

        w = float(t) ** power
        sum1 += w * sigma
        sum2 += w * tau

        v1 = base + (win @ tau) * stakes - ante * (deal @ tau)
        ev1 = (sigma * v1).sum(axis=1, keepdims=True)
        r1[...] = np.maximum(r1 + v1 - ev1, 0.0)


def _make_kernel():
    try:
        import numba
    except ImportError:  # pragma: no cover
        return None

    @numba.njit(cache=True)
    def kernel(deal, win, stakes, ante, r1, r2, sum1, sum2, t0, n, power):
        d, nb = r1.shape
        sigma = np.empty((d, nb))
        tau = np.empty((d, nb))
        for t in range(t0 + 1, t0 + n + 1):
            for h in range(d):
                s = 0.0
                for b in range(nb):
                    if r1[h, b] > 0:
                        s += r1[h, b]
                for b in range(nb):
                    sigma[h, b] = (r1[h, b] / s if r1[h, b] > 0 else 0.0) if s > 0 else 1.0 / nb
            w = float(t) ** power
            for c in range(d):
                for b in range(nb):
                    call = 0.0
                    fold = 0.0
                    for h in range(d):
                        call -= win[h, c] * sigma[h, b]
                        fold -= deal[h, c] * sigma[h, b]
                    call *= stakes[b]
                    fold *= ante
                    pc = max(r2[c, b, 0], 0.0)
                    pf = max(r2[c, b, 1], 0.0)
                    p = pc / (pc + pf) if pc + pf > 0 else 0.5
                    ev = p * call + (1 - p) * fold
                    r2[c, b, 0] = max(r2[c, b, 0] + call - ev, 0.0)
                    r2[c, b, 1] = max(r2[c, b, 1] + fold - ev, 0.0)
                    pc = r2[c, b, 0]
                    pf = r2[c, b, 1]
                    tau[c, b] = pc / (pc + pf) if pc + pf > 0 else 0.5
                    sum2[c, b] += w * tau[c, b]
            for h in range(d):
                base = 0.0
                for c in range(d):
                    base += deal[h, c]
                base *= ante
                ev = 0.0
                for b in range(nb):
                    sum1[h, b] += w * sigma[h, b]
                    wins = 0.0
                    folds = 0.0
                    for c in range(d):
                        wins += win[h, c] * tau[c, b]
                        folds += deal[h, c] * tau[c, b]
                    v = base + wins * stakes[b] - ante * folds
                    ev += sigma[h, b] * v
                    # add the action value now, subtract the hand's ev below
                    r1[h, b] += v
                for b in range(nb):
                    r1[h, b] = max(r1[h, b] - ev, 0.0)

    return kernel


_kernel = _make_kernel()


def solve_cfr(deal, cfg: GameConfig = DEFAULT_CONFIG, epsilon=DEFAULT_EPSILON,
              max_iterations=DEFAULT_MAX_ITERATIONS, check_every=25, power=AVERAGING_POWER,
              use_numba=True) -> EquilibriumResult:
    """Alternating CFR+ with iterate weights ``t**power``.

    The averaged profile is certified after every ``max(check_every, t // 10)``
    iterations and returned as soon as its NashConv is at most ``epsilon``.
    """
    deal = check_deal(deal, cfg)
    d, nb = cfg.deck_size, cfg.bet_steps
    win = deal * showdown_sign(cfg)
    stakes = cfg.amounts + cfg.ante
    run = _kernel if (use_numba and _kernel is not None) else _cfr_plus_numpy

    r1 = np.zeros((d, nb))
    r2 = np.zeros((d, nb, 2))  # [..., 0] call, [..., 1] fold
    sum1 = np.zeros((d, nb))
    sum2 = np.zeros((d, nb))
    weight = 0.0
    best = None
    t = 0
    while t < max_iterations:
        # certify at least every tenth of the iterations run so far
        n = min(max(check_every, t // 10), max_iterations - t)
        run(deal, win, stakes, float(cfg.ante), r1, r2, sum1, sum2, t, n, float(power))
        weight += sum(float(s) ** power for s in range(t + 1, t + n + 1))
        t += n
        res = _result(deal, sum1 / sum1.sum(axis=1, keepdims=True), sum2 / weight, cfg, t, "cfr+")
        if best is None or res.nash_conv < best.nash_conv:
            best = res
        if res.nash_conv <= epsilon:
            return res

    raise ConvergenceFailure(
        f"CFR+ reached NashConv {best.nash_conv:.3g} > {epsilon:.3g} "
        f"after {max_iterations} iterations",
        best,
    )


def _lp_p1(deal, cfg):
    """Player 1's maximin LP. Variables: sigma (d*B) then one value per P2 infoset."""
    d, nb = cfg.deck_size, cfg.bet_steps
    n = d * nb
    stakes = sp.diags(cfg.amounts + cfg.ante)
    eye_b = sp.identity(nb)
    # v[c, b] <= winnings if P2 calls, v[c, b] <= winnings if P2 folds
    call = -sp.kron(sp.csr_matrix((deal * showdown_sign(cfg)).T), stakes)
    fold = -sp.kron(sp.csr_matrix(deal.T * cfg.ante), eye_b)
    a_ub = sp.vstack([sp.hstack([call, sp.identity(n)]), sp.hstack([fold, sp.identity(n)])]).tocsr()
    a_eq = sp.hstack([sp.kron(sp.identity(d), np.ones((1, nb))), sp.csr_matrix((d, n))]).tocsr()
    c = np.concatenate([np.zeros(n), -np.ones(n)])
    bounds = [(0, None)] * n + [(None, None)] * n
    res = linprog(c, A_ub=a_ub, b_ub=np.zeros(2 * n), A_eq=a_eq, b_eq=np.ones(d),
                  bounds=bounds, method="highs")
    return res, res.x[:n].reshape(d, nb) if res.status == 0 else None


def _lp_p2(deal, cfg):
    """Player 2's minimax LP. Variables: tau (d*B) then one bound per P1 hand."""
    d, nb = cfg.deck_size, cfg.bet_steps
    n = d * nb
    stakes = sp.diags(cfg.amounts + cfg.ante)
    gain = sp.kron(sp.csr_matrix(deal * showdown_sign(cfg)), stakes) - sp.kron(
        sp.csr_matrix(deal * cfg.ante), sp.identity(nb)
    )
    bound = -sp.kron(sp.identity(d), np.ones((nb, 1)))
    a_ub = sp.hstack([gain, bound]).tocsr()
    b_ub = -cfg.ante * np.repeat(deal.sum(axis=1), nb)
    c = np.concatenate([np.zeros(n), np.ones(d)])
    bounds = [(0, 1)] * n + [(None, None)] * d
    res = linprog(c, A_ub=a_ub, b_ub=b_ub, bounds=bounds, method="highs")
    return res, res.x[:n].reshape(d, nb) if res.status == 0 else None


def solve_lp(deal, cfg: GameConfig = DEFAULT_CONFIG, epsilon=DEFAULT_EPSILON) -> EquilibriumResult:
    deal = check_deal(deal, cfg)
    res1, sigma = _lp_p1(deal, cfg)
    res2, tau = _lp_p2(deal, cfg)
    if sigma is None or tau is None:
        raise ConvergenceFailure(f"LP solve failed: {res1.message} / {res2.message}")
    sigma = np.clip(sigma, 0.0, None)
    sigma /= sigma.sum(axis=1, keepdims=True)
    tau = np.clip(tau, 0.0, 1.0)
    res = _result(deal, sigma, tau, cfg, int(res1.nit + res2.nit), "lp")
    if res.nash_conv > epsilon:
        raise ConvergenceFailure(f"LP profile has NashConv {res.nash_conv:.3g} > {epsilon:.3g}", res)
    return res


def solve(deal, cfg: GameConfig = DEFAULT_CONFIG, epsilon: float = DEFAULT_EPSILON,
          max_iterations: int = DEFAULT_MAX_ITERATIONS, method: str = "cfr+") -> EquilibriumResult:
    """Compute a profile whose NashConv is at most ``epsilon``.

    Raises ConvergenceFailure (carrying the best profile found) otherwise.
    """
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    if method == "cfr+":
        return solve_cfr(deal, cfg, epsilon, max_iterations)
    if method == "lp":
        return solve_lp(deal, cfg, epsilon)
    raise ValueError(f"unknown method {method!r}; expected one of {METHODS}")
