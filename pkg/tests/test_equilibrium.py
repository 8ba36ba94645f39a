import itertools

import numpy as np
import pytest
from scipy.optimize import linprog

from onestreet.deals import make_joint, p1_polar_deal, p2_polar_deal, point_mass, sample_simplex, uniform_deal
from onestreet.equilibrium import (
    best_response_p1,
    best_response_p2,
    canonicalize,
    nash_conv,
    solve,
    solve_cfr,
)
from onestreet.errors import ConvergenceFailure
from onestreet.game import (
    CALL,
    FOLD,
    always_call,
    always_check,
    always_fold,
    expected_value,
    payoff,
    showdown_sign,
)


def matrix_game_value(deal, cfg):
    """Value of the normal-form game over all pure strategies, by a textbook LP."""
    d, nb = cfg.deck_size, cfg.bet_steps
    p1_pure = list(itertools.product(range(nb), repeat=d))
    p2_pure = list(itertools.product((0, 1), repeat=d * nb))
    m = np.zeros((len(p1_pure), len(p2_pure)))
    for a, bets in enumerate(p1_pure):
        for b, calls in enumerate(p2_pure):
            v = 0.0
            for i in range(d):
                for j in range(d):
                    if deal[i, j] > 0:
                        act = CALL if calls[j * nb + bets[i]] else FOLD
                        v += deal[i, j] * payoff(i + 1, j + 1, bets[i], act, cfg)
            m[a, b] = v
    # max v s.t. x^T M >= v, sum x = 1
    n1 = len(p1_pure)
    c = np.r_[np.zeros(n1), -1.0]
    a_ub = np.hstack([-m.T, np.ones((m.shape[1], 1))])
    res = linprog(c, A_ub=a_ub, b_ub=np.zeros(m.shape[1]), A_eq=np.r_[np.ones(n1), 0.0][None, :],
                  b_eq=[1.0], bounds=[(0, None)] * n1 + [(None, None)], method="highs")
    return -res.fun


@pytest.mark.parametrize("seed", [0, 1, 2])
@pytest.mark.parametrize("method", ["cfr+", "lp"])
def test_value_matches_brute_force_matrix_game(tiny_cfg, seed, method):
    r = np.random.default_rng(seed)
    deal = make_joint(sample_simplex(3, r), sample_simplex(3, r))
    oracle = matrix_game_value(deal, tiny_cfg)
    eps = 1e-6 if method == "cfr+" else 1e-9
    res = solve(deal, tiny_cfg, epsilon=eps, method=method)
    # the profile's value is within NashConv of the game value
    assert res.nash_conv <= eps
    assert res.value == pytest.approx(oracle, abs=eps + 1e-9)


def test_best_response_p2_beats_every_pure_response(tiny_cfg, rng):
    deal = make_joint(sample_simplex(3, rng), sample_simplex(3, rng))
    s1 = rng.random((3, 3))
    s1 /= s1.sum(axis=1, keepdims=True)
    tau, value = best_response_p2(deal, s1, tiny_cfg)
    assert expected_value(deal, s1, tau, tiny_cfg) == pytest.approx(value, abs=1e-12)
    for calls in itertools.product((0.0, 1.0), repeat=9):
        assert expected_value(deal, s1, np.reshape(calls, (3, 3)), tiny_cfg) >= value - 1e-12


def test_best_response_p1_beats_every_pure_strategy(tiny_cfg, rng):
    deal = make_joint(sample_simplex(3, rng), sample_simplex(3, rng))
    tau = rng.random((3, 3))
    sigma, value = best_response_p1(deal, tau, tiny_cfg)
    assert expected_value(deal, sigma, tau, tiny_cfg) == pytest.approx(value, abs=1e-12)
    for bets in itertools.product(range(3), repeat=3):
        s = np.eye(3)[list(bets)]
        assert expected_value(deal, s, tau, tiny_cfg) <= value + 1e-12


def test_best_response_tie_breaks():
    deal = uniform_deal()
    # P2 always calls: P1 with card 1 loses more by betting, so it checks
    sigma, _ = best_response_p1(deal, always_call())
    assert sigma[0, 0] == 1.0
    # against always-check every bet is met by identical values at P2: ties go to call
    tau, _ = best_response_p2(deal, always_check())
    assert tau[:, 1:].all()


def test_nash_conv_positive_for_naive_profile():
    assert nash_conv(uniform_deal(), always_check(), always_call()) > 0.01


def test_canonicalize_unreachable_rows():
    deal = p1_polar_deal()
    s1 = np.full((10, 31), 1 / 31)
    s2 = np.zeros((10, 31))
    c1, c2 = canonicalize(deal, s1, s2)
    assert c1[4, 0] == 1.0 and c1[4, 1:].sum() == 0.0
    assert np.allclose(c1[0], 1 / 31)
    assert c2[0].all() and not c2[4].any()


def test_p2_polar_game_lp():
    res = solve(p2_polar_deal(), method="lp")
    assert res.s1[4, 0] == pytest.approx(1.0, abs=1e-9)
    assert res.value == pytest.approx(0.0, abs=1e-9)


def test_p1_polar_game_lp():
    res = solve(p1_polar_deal(), method="lp")
    assert res.value == pytest.approx(0.375, abs=1e-9)
    assert res.s1[0, 30] == pytest.approx(0.75, abs=1e-6)
    assert res.s1[9, 30] == pytest.approx(1.0, abs=1e-6)


def test_cfr_and_lp_values_agree_on_random_games(rng):
    for _ in range(3):
        deal = make_joint(sample_simplex(10, rng), sample_simplex(10, rng))
        a = solve(deal, epsilon=1e-5)
        b = solve(deal, epsilon=1e-5, method="lp")
        # each value is within NashConv of the game value
        assert abs(a.value - b.value) <= 2e-5


def test_numba_and_numpy_kernels_agree():
    deal = p1_polar_deal()
    with pytest.raises(ConvergenceFailure) as fast:
        solve_cfr(deal, epsilon=1e-14, max_iterations=400)
    with pytest.raises(ConvergenceFailure) as slow:
        solve_cfr(deal, epsilon=1e-14, max_iterations=400, use_numba=False)
    assert np.allclose(fast.value.result.s1, slow.value.result.s1, atol=1e-9)
    assert np.allclose(fast.value.result.s2, slow.value.result.s2, atol=1e-9)


def test_convergence_failure_carries_best_profile():
    with pytest.raises(ConvergenceFailure) as info:
        solve(uniform_deal(), epsilon=1e-9, max_iterations=50)
    best = info.value.result
    assert best is not None and best.nash_conv > 1e-9


def test_solve_rejects_bad_arguments():
    with pytest.raises(ValueError):
        solve(uniform_deal(), epsilon=0)
    with pytest.raises(ValueError):
        solve(uniform_deal(), method="simplex")


def test_p2_best_response_to_polar_shoves_calls():
    s1 = always_check()
    s1[:, 0] = 0
    s1[:, 30] = 1
    tau, value = best_response_p2(p1_polar_deal(), s1)
    assert tau[4, 30] == 1.0
    assert value == pytest.approx(0.0, abs=1e-12)


def test_p2_best_response_to_checking_calls_everywhere(rng):
    deal = make_joint(sample_simplex(10, rng), sample_simplex(10, rng))
    tau, value = best_response_p2(deal, always_check())
    assert tau.all()
    assert value == pytest.approx(float((deal * showdown_sign()).sum() * 0.5), abs=1e-12)


def test_p1_best_response_examples():
    sigma, value = best_response_p1(uniform_deal(), always_fold())
    assert sigma[:, 0].all() and value == pytest.approx(0.5)
    nuts = make_joint(point_mass(10), np.r_[np.full(9, 1 / 9), 0.0])
    sigma, value = best_response_p1(nuts, always_call())
    assert sigma[9, 30] == 1.0 and value == pytest.approx(3.5)
    # P1 always holds 5 against a polar P2 that best-responds: betting never pays
    s1 = np.full((10, 31), 1 / 31)
    tau, _ = best_response_p2(p2_polar_deal(), s1)
    assert best_response_p1(p2_polar_deal(), tau)[1] <= 1e-12


def test_polar_equilibrium_by_indifference():
    s1 = always_check()
    s1[0] = 0
    s1[0, 0], s1[0, 30] = 0.25, 0.75
    s1[9] = 0
    s1[9, 30] = 1.0
    # P2 with card 5 calls a bet b with pr 1 / (b + 1): card 1 is indifferent
    # between checking and shoving, and card 10 gains nothing by betting less
    s2 = always_call()
    s2[4] = 1.0 / (np.arange(31) * 0.1 + 1.0)
    assert nash_conv(p1_polar_deal(), s1, s2) == pytest.approx(0.0, abs=1e-12)
    assert expected_value(p1_polar_deal(), s1, s2) == pytest.approx(0.375)


def test_solver_certificate_on_many_random_deals(rng):
    for _ in range(100):
        deal = make_joint(sample_simplex(10, rng), sample_simplex(10, rng))
        res = solve(deal)
        assert 0.0 <= res.nash_conv <= 1e-4
        _, lo = best_response_p2(deal, res.s1)
        _, hi = best_response_p1(deal, res.s2)
        assert lo - 1e-12 <= res.value <= hi + 1e-12
        assert np.allclose(res.s1.sum(axis=1), 1.0) and (res.s1 >= 0).all()
        assert ((res.s2 >= 0) & (res.s2 <= 1)).all()
