import logging
import math
import random

import pytest

from fdsmab import bandit
from fdsmab.bandit import (
    Policy, StrategyConfig, apply_both_fail_bonus, boltzmann_probabilities, export_ratings,
    import_ratings, load_ratings, q_value, save_ratings, select_from, ucb_scores,
    update_branch_rating,
)
from fdsmab.choices import Choice


def test_first_update_takes_local_rating():
    c = Choice(0, 1)
    cfg = StrategyConfig()
    update_branch_rating(c, True, 1.5, 0, cfg)
    assert c.left_rating == 1.5
    update_branch_rating(c, True, 0.0, 0, cfg)
    assert c.left_rating == 0.75


def test_alpha_constant_after_length():
    cfg = StrategyConfig(rating_average_length=3)
    c = Choice(0, 1)
    for x in (1.0, 2.0, 1.5):
        update_branch_rating(c, False, x, 0, cfg)
    before = c.right_rating
    update_branch_rating(c, False, 0.0, 0, cfg)
    assert c.right_rating == pytest.approx(before * (1 - 1 / 3))
    assert c.right_count == 3


def test_freeze_ratings_blocks_updates():
    c = Choice(0, 1)
    update_branch_rating(c, True, 1.5, 0, StrategyConfig(freeze_ratings=True))
    assert c.left_rating == 0.3 and c.left_count == 0


def test_depth_average_comparison_divides():
    cfg = StrategyConfig(rating_average_comparison=True)
    avg = bandit.DepthAverages()
    c = Choice(0, 1)
    update_branch_rating(c, True, 1.5, 2, cfg, avg)
    assert c.left_rating == 1.5  # seeded mean 1
    assert avg.get(2) == pytest.approx(1.25)


@pytest.mark.parametrize("factor, before, after", [
    (0.9, (0.4, 0.5), (0.36, 0.45)), (1.0, (0.4, 0.5), (0.4, 0.5)), (0.9, (0.0, 0.0), (0.0, 0.0)),
])
def test_both_fail_bonus(factor, before, after):
    c = Choice(0, 1)
    c.left_rating, c.right_rating = before
    apply_both_fail_bonus(c, StrategyConfig(both_fail_reward_factor=factor))
    assert (c.left_rating, c.right_rating) == pytest.approx(after)


@pytest.mark.parametrize("ratings, q", [((0, 0), 0.0), ((1, 1), -2.0), ((0.3, 0.3), -0.6)])
def test_q_value(ratings, q):
    c = Choice(0, 1)
    c.left_rating, c.right_rating = ratings
    assert q_value(c) == pytest.approx(q)


def test_boltzmann_uniform_on_equal_q():
    assert boltzmann_probabilities([-0.6] * 4) == pytest.approx([0.25] * 4)


def test_boltzmann_worked_value():
    p = boltzmann_probabilities([0.0, -2.0], 1.0)
    assert p[0] == pytest.approx(math.exp(0) / (math.exp(0) + math.exp(-2)))
    assert p[0] == pytest.approx(0.8808, abs=1e-4)


def test_ucb_worked_scores_and_pick():
    s = ucb_scores([-1.0, -1.2], [4, 1], 5)
    assert s[0] == pytest.approx(-0.103, abs=1e-3)
    assert s[1] == pytest.approx(0.594, abs=1e-3)
    a, b = Choice(0, 1), Choice(1, 1)
    a.left_rating, a.right_rating, a.left_count, a.right_count = 0.5, 0.5, 2, 2
    b.left_rating, b.right_rating, b.left_count = 0.6, 0.6, 1
    pick, exploratory = select_from([a, b], 5, random.Random(0), StrategyConfig(policy="ucb1"))
    assert pick is b and not exploratory


def test_greedy_picks_lowest_rating():
    cs = [Choice(v, 1) for v in range(3)]
    cs[1].left_rating = 0.1
    pick, exploratory = select_from(cs, 1, random.Random(0), StrategyConfig(policy="greedy"))
    assert pick is cs[1] and not exploratory


def test_hybrid_exploration_rate():
    cs = [Choice(v, 1) for v in range(5)]
    rng = random.Random(3)
    cfg = StrategyConfig(policy="b-greedy", epsilon=0.25)
    n = sum(select_from(cs, 1, rng, cfg)[1] for _ in range(4000))
    assert 0.22 < n / 4000 < 0.28


def test_hybrid_never_explores_at_zero_epsilon():
    cs = [Choice(v, 1) for v in range(5)]
    cfg = StrategyConfig(policy="t-greedy", epsilon=0.0)
    assert not any(select_from(cs, 1, random.Random(s), cfg)[1] for s in range(200))


def test_config_validation():
    with pytest.raises(ValueError):
        StrategyConfig(epsilon=1.5)
    with pytest.raises(ValueError):
        StrategyConfig(tau=0)
    with pytest.raises(ValueError):
        StrategyConfig(initial_rating=3.0)
    assert Policy("u-greedy").is_hybrid and not Policy("ucb1").is_hybrid


def _pool():
    pool = [Choice(v, p) for v in range(2) for p in (3, 6)]
    for i, c in enumerate(pool):
        c.left_rating, c.right_rating = 0.1 * i + 0.01, 1.0 / 3 + i
        c.left_count, c.right_count = i, 2 * i
    pool[1].left_le = False
    return pool


def test_export_import_roundtrip(tmp_path):
    table = export_ratings(_pool())
    path = tmp_path / "r.json"
    save_ratings(table, path)
    fresh = [Choice(v, p) for v in range(2) for p in (3, 6)]
    assert import_ratings(fresh, load_ratings(path)) == 0
    assert export_ratings(fresh) == table


def test_import_partial_overlay_and_unknown_keys(caplog):
    table = export_ratings(_pool())
    table["9:9"] = [0.1, 0.1, 1, 1]
    bigger = [Choice(v, p) for v in range(3) for p in (3, 6)]
    with caplog.at_level(logging.INFO):
        assert import_ratings(bigger, table) == 1
    assert "not present" in caplog.text
    assert [c.rating for c in bigger if c.var == 2] == [0.6, 0.6]


def test_malformed_rating_file(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(OSError):
        load_ratings(bad)
