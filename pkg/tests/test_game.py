import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from onestreet.deals import make_joint, p1_polar_deal, sample_simplex, uniform_deal
from onestreet.errors import ConfigMismatch, IllegalShowdown, InvalidConfig, InvalidDistribution, InvalidStrategy
from onestreet.game import (
    CALL,
    DEFAULT_CONFIG,
    FOLD,
    GameConfig,
    always_call,
    always_check,
    always_fold,
    check_deal,
    check_strategy_p1,
    expected_value,
    format_strategy,
    parse_config,
    payoff,
    pure_p1,
    simulate,
)

cfg = DEFAULT_CONFIG


def test_default_config():
    assert (cfg.deck_size, cfg.bet_steps, cfg.ante, cfg.stack) == (10, 31, 0.5, 3.0)
    assert cfg.amounts[0] == 0.0
    assert cfg.amounts[-1] == pytest.approx(3.0)
    assert cfg.max_payoff == 3.5
    assert cfg.bet_index(0.4) == 4


def test_config_rejects_grid_not_ending_at_stack():
    with pytest.raises(InvalidConfig):
        GameConfig(bet_steps=30)
    with pytest.raises(InvalidConfig):
        GameConfig(deck_size=1)


def test_parse_config_accepts_comments_and_camel_case():
    c = parse_config("# tiny\ndeckSize = 4\nbet_steps=7\nbetIncrement=0.5\n")
    assert (c.deck_size, c.bet_steps, c.bet_increment, c.stack) == (4, 7, 0.5, 3.0)
    with pytest.raises(InvalidConfig):
        parse_config("colour = red")


def test_payoff_worked_example():
    # P1 holds 4, P2 holds 9, P1 bets 0.4 and P2 calls: P1 loses bet plus ante
    assert payoff(4, 9, 4, CALL) == pytest.approx(-0.9)
    assert payoff(9, 4, 4, CALL) == pytest.approx(0.9)
    assert payoff(4, 9, 4, FOLD) == 0.5
    assert payoff(10, 1, 30, CALL) == pytest.approx(3.5)


def test_payoff_rejects_equal_cards_and_bad_inputs():
    with pytest.raises(IllegalShowdown):
        payoff(3, 3, 0, CALL)
    with pytest.raises(ValueError):
        payoff(11, 3, 0, CALL)
    with pytest.raises(ValueError):
        payoff(2, 3, 31, CALL)
    with pytest.raises(ValueError):
        payoff(2, 3, 1, "raise")


@given(h1=st.integers(1, 10), h2=st.integers(1, 10), b=st.integers(0, 30))
def test_payoff_bounded_and_fold_independent_of_cards(h1, h2, b):
    if h1 == h2:
        return
    assert abs(payoff(h1, h2, b, CALL)) <= cfg.max_payoff + 1e-12
    assert payoff(h1, h2, b, FOLD) == cfg.ante
    assert payoff(h1, h2, b, CALL) == -payoff(h2, h1, b, CALL)


def test_check_deal_validation():
    with pytest.raises(ConfigMismatch):
        check_deal(np.zeros((9, 9)))
    bad = uniform_deal()
    bad[0, 0] = 0.01
    with pytest.raises(InvalidDistribution):
        check_deal(bad)
    with pytest.raises(InvalidDistribution):
        check_deal(uniform_deal() * 2)


def test_check_strategy_validation():
    s = always_check()
    s[0, 1] = 0.5
    with pytest.raises(InvalidStrategy):
        check_strategy_p1(s)


def _loop_value(deal, s1, s2):
    """Expected value by summing over every terminal history."""
    total = 0.0
    d = cfg.deck_size
    for i in range(d):
        for j in range(d):
            if deal[i, j] == 0:
                continue
            for b in range(cfg.bet_steps):
                if s1[i, b] == 0:
                    continue
                reach = deal[i, j] * s1[i, b]
                total += reach * (s2[j, b] * payoff(i + 1, j + 1, b, CALL)
                                  + (1 - s2[j, b]) * payoff(i + 1, j + 1, b, FOLD))
    return total


def test_expected_value_matches_history_loop(rng):
    deal = make_joint(sample_simplex(10, rng), sample_simplex(10, rng))
    s1 = rng.random((10, 31)) ** 4
    s1 /= s1.sum(axis=1, keepdims=True)
    s2 = rng.random((10, 31))
    assert expected_value(deal, s1, s2) == pytest.approx(_loop_value(deal, s1, s2), abs=1e-12)


def test_fixed_profiles():
    u = uniform_deal()
    # everybody checks and P2 calls: zero-sum showdown for the antes
    assert expected_value(u, always_check(), always_call()) == pytest.approx(0.0, abs=1e-15)
    # P2 always folds: P1 collects the ante whatever they bet
    assert expected_value(u, pure_p1([30] * 10), always_fold()) == pytest.approx(0.5)


@settings(max_examples=25, deadline=None)
@given(a=st.floats(0, 1), seed=st.integers(0, 2**31))
def test_value_is_linear_in_p2_strategy(a, seed):
    r = np.random.default_rng(seed)
    deal = make_joint(sample_simplex(10, r), sample_simplex(10, r))
    s1 = r.random((10, 31))
    s1 /= s1.sum(axis=1, keepdims=True)
    t1, t2 = r.random((10, 31)), r.random((10, 31))
    mixed = expected_value(deal, s1, a * t1 + (1 - a) * t2)
    parts = a * expected_value(deal, s1, t1) + (1 - a) * expected_value(deal, s1, t2)
    assert mixed == pytest.approx(parts, abs=1e-12)


def test_simulation_agrees_with_exact_value():
    deal = p1_polar_deal()
    s1 = np.zeros((10, 31))
    s1[0, 0], s1[0, 30], s1[9, 30] = 0.25, 0.75, 1.0
    s1[1:9, 0] = 1.0
    s2 = np.full((10, 31), 0.5)
    exact = expected_value(deal, s1, s2)
    mean, se = simulate(deal, s1, s2, n=200_000, rng=7)
    assert abs(mean - exact) < 5 * se


def test_format_strategy():
    s = always_check()
    s[0] = 0
    s[0, 0], s[0, 30] = 0.25, 0.75
    text = format_strategy(s, reachable=np.r_[True, [False] * 8, True])
    lines = text.splitlines()
    assert lines[0] == "Card 1: Bet 0.0 pr 0.250, 3.0 pr 0.750"
    assert lines[1] == "Card 2: unreachable"
    assert lines[9] == "Card 10: Bet 0.0 pr 1.000"
