import numpy as np
import pytest

from lphedge.amm_math import amounts_from_price_uniform, final_amounts_concentrated
from lphedge.pool_sim import (
    RangedSimPool,
    SimPool,
    move_price_to,
    simulate_concentrated_exit,
    swap_exact_a_in,
    walk_price,
)

from conftest import BTC_ENTRY, BTC_LOWER, BTC_UPPER, ETH_A, ETH_B, ETH_ENTRY


def test_swap_exact_a_in():
    db, pool = swap_exact_a_in(SimPool(10, 40), 10)
    assert db == 20
    assert (pool.reserve_a, pool.reserve_b) == (20, 20)
    db, _ = swap_exact_a_in(SimPool(1, 1), 1)
    assert db == 0.5
    pool = SimPool(ETH_A, ETH_B)
    k0 = pool.kappa
    db, _ = swap_exact_a_in(pool, 14.378)
    assert db > 0
    assert pool.reserve_a * pool.reserve_b == pytest.approx(k0, rel=1e-12)


def test_move_price_to():
    pool = move_price_to(SimPool(10, 40), 1)
    assert pool.reserve_a == pytest.approx(20, rel=1e-14)
    assert pool.reserve_b == pytest.approx(20, rel=1e-14)
    pool = SimPool(10, 40).move_price_to(4)
    assert (pool.reserve_a, pool.reserve_b) == (10, 40)
    pool = SimPool(10, 40).move_price_to(16)
    assert pool.reserve_a == pytest.approx(5, rel=1e-14)
    assert pool.reserve_b == pytest.approx(80, rel=1e-14)
    assert pool.reserve_a * pool.reserve_b == pytest.approx(400, rel=1e-14)


def test_kappa_conserved_over_random_swaps():
    rng = np.random.default_rng(7)
    pool = SimPool(ETH_A, ETH_B)
    k0 = pool.kappa
    for _ in range(10_000):
        if rng.random() < 0.5:
            pool.swap_exact_a_in(pool.reserve_a * rng.uniform(1e-4, 0.1))
        else:
            pool.swap_exact_b_in(pool.reserve_b * rng.uniform(1e-4, 0.1))
    assert abs(pool.reserve_a * pool.reserve_b - k0) / k0 <= 1e-9


def test_uniform_oracle_equivalence():
    kappa = ETH_A * ETH_B
    for p in np.geomspace(ETH_ENTRY / 4, 4 * ETH_ENTRY, 512):
        pool = SimPool(ETH_A, ETH_B).move_price_to(p)
        a, b = amounts_from_price_uniform(kappa, p)
        assert abs(pool.reserve_a - a) <= 1e-10 * a
        assert abs(pool.reserve_b - b) <= 1e-10 * b


def test_ranged_pool_invariant(btc_position):
    pool = RangedSimPool.from_position(btc_position)
    assert pool.invariant_gap() <= 1e-12
    assert pool.price == pytest.approx(BTC_ENTRY, rel=1e-12)
    pool.swap_a_in(0.5)
    assert pool.invariant_gap() <= 1e-12
    pool.swap_b_in(10_000)
    assert pool.invariant_gap() <= 1e-12


def test_ranged_pool_exhausts_at_bounds(btc_position):
    pool = RangedSimPool.from_position(btc_position)
    pool.swap_a_in(1e6)
    assert pool.reserve_b == 0.0 and not pool.active
    assert pool.price == pytest.approx(BTC_LOWER, rel=1e-12)
    pool.swap_b_in(1e12)
    assert pool.reserve_a == 0.0
    assert pool.price == pytest.approx(BTC_UPPER, rel=1e-12)


def test_exit_at_entry_returns_initial_amounts(toy_position):
    for steps in (1, 10, 1000):
        a, b = simulate_concentrated_exit(toy_position, 2.25, steps)
        assert a == pytest.approx(toy_position.amount_a_init, rel=1e-14)
        assert b == pytest.approx(toy_position.amount_b_init, rel=1e-14)


@pytest.mark.parametrize("final,expected", [(9.0, (0.0, 10.0)), (0.25, (5.0, 0.0))])
def test_exit_outside_range(toy_position, final, expected):
    a, b = simulate_concentrated_exit(toy_position, final, 10_000)
    assert a == pytest.approx(expected[0], abs=1e-6)
    assert b == pytest.approx(expected[1], abs=1e-6)


def test_concentrated_oracle_equivalence(btc_position):
    L = btc_position.sqrt_kappa
    for p in np.geomspace(0.5 * BTC_LOWER, 2 * BTC_UPPER, 24):
        sim = simulate_concentrated_exit(btc_position, p, 10_000)
        closed = final_amounts_concentrated(L, BTC_LOWER, BTC_UPPER, p)
        inside = BTC_LOWER < p < BTC_UPPER
        for s, c in zip(sim, closed):
            if inside:
                assert abs(s - c) <= 1e-5 * c
            else:
                assert abs(s - c) <= 1e-9 * max(max(closed), 1.0)


def test_exit_converges_with_steps(btc_position):
    target = 30_000.0
    closed = btc_position.final_amounts(target)
    errors = []
    for steps in (1, 10, 100, 1000, 10_000):
        sim = simulate_concentrated_exit(btc_position, target, steps)
        errors.append(abs(sim[0] - closed[0]) / closed[0])
    assert all(e1 > e2 for e1, e2 in zip(errors, errors[1:]))


@pytest.mark.parametrize("detour", [10_000.0, 30_000.0, 60_000.0])
def test_path_independence(btc_position, detour):
    final = 25_000.0
    direct = simulate_concentrated_exit(btc_position, final, 10_000)
    pool = RangedSimPool.from_position(btc_position)
    walk_price(pool, BTC_ENTRY, detour, 10_000)
    walk_price(pool, detour, final, 10_000)
    for x, y in zip(direct, (pool.reserve_a, pool.reserve_b)):
        assert x == pytest.approx(y, rel=1e-6)
