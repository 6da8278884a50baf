"""Exit criteria, one test each. A PASS/FAIL line per criterion is printed in the terminal summary."""
import time

import numpy as np
import pytest

from lphedge.amm_math import (
    amounts_from_price_uniform,
    final_amounts_concentrated,
    il_uniform,
    lp_pnl_uniform,
    single_sided_liquidity,
    tick_to_price,
)
from lphedge.hedger import (
    HedgeProblem,
    PnlCurve,
    PriceGrid,
    SolverConfig,
    evaluate_strategy,
    gradient,
    make_problem,
    solve,
    write_report,
)
from lphedge.options import CALL, OptionQuote, OptionsChain, payoff_vanilla, synthetic_chain
from lphedge.pool_sim import SimPool, simulate_concentrated_exit

from conftest import (
    ACCEPTANCE_LINES,
    BTC_A,
    BTC_B,
    BTC_ENTRY,
    BTC_LOWER,
    BTC_UPPER,
    ETH_A,
    ETH_B,
    ETH_ENTRY,
)
from test_hedger import away_from_zero, central_difference, random_instance


def record(number, ok, detail, started):
    status = "PASS" if ok else "FAIL"
    ACCEPTANCE_LINES.append(f"[{status}] criterion {number:>2}: {detail} ({time.perf_counter() - started:.2f}s)")
    assert ok, detail


def test_criterion_01_closed_form_spot_checks():
    t = time.perf_counter()
    # sqrt(2) - 1 and 2 sqrt(2) / 3 - 1 at 50 digits (mpmath)
    checks = [
        lp_pnl_uniform(3) == 1.0,
        il_uniform(3) == -0.2,
        abs(lp_pnl_uniform(1) - 0.41421356237309504880) <= 1e-9,
        abs(il_uniform(1) - (-0.05719095841793663413)) <= 1e-9,
    ]
    record(1, all(checks), f"lp_pnl(3)={lp_pnl_uniform(3)!r} il(3)={il_uniform(3)!r} "
                           f"lp_pnl(1)={lp_pnl_uniform(1):.12f} il(1)={il_uniform(1):.12f}", t)


def test_criterion_02_tick_conversion():
    t = time.perf_counter()
    lo, hi = tick_to_price(51960, 8, 6), tick_to_price(59940, 8, 6)
    ok = abs(lo - 18050.17) <= 0.01 and abs(hi - 40089.53) <= 0.01
    record(2, ok, f"tick 51960 -> {lo:.4f}, tick 59940 -> {hi:.4f} (tol 0.01)", t)


def test_criterion_03_uniform_oracle():
    t = time.perf_counter()
    kappa = ETH_A * ETH_B
    worst = 0.0
    for p in np.geomspace(ETH_ENTRY / 4, 4 * ETH_ENTRY, 512):
        pool = SimPool(ETH_A, ETH_B).move_price_to(p)
        a, b = amounts_from_price_uniform(kappa, p)
        worst = max(worst, abs(pool.reserve_a - a) / a, abs(pool.reserve_b - b) / b)
    record(3, worst <= 1e-10, f"max relative reserve error {worst:.3e} <= 1e-10 over 512 prices", t)


def _rel(sim, closed):
    if sim == closed:
        return 0.0
    return abs(sim - closed) / abs(closed) if closed else float("inf")


def test_criterion_04_concentrated_oracle(btc_position):
    t = time.perf_counter()
    L = btc_position.sqrt_kappa
    worst = 0.0
    for p in np.geomspace(0.5 * BTC_LOWER, 2 * BTC_UPPER, 64):
        sim = simulate_concentrated_exit(btc_position, p, 10_000)
        closed = final_amounts_concentrated(L, BTC_LOWER, BTC_UPPER, p)
        worst = max(worst, *(_rel(s, c) for s, c in zip(sim, closed)))
    jump = 0.0
    for bound in (BTC_LOWER, BTC_UPPER):
        at = btc_position.final_amounts(bound)
        scale = max(at)
        for side in (np.nextafter(bound, 0), np.nextafter(bound, np.inf)):
            near = btc_position.final_amounts(side)
            jump = max(jump, *(abs(x - y) / scale for x, y in zip(near, at)))
    ok = worst <= 1e-5 and jump <= 1e-10
    record(4, ok, f"max relative sim error {worst:.3e} <= 1e-5; boundary jump {jump:.3e} <= 1e-10", t)


def test_criterion_05_deposit_consistency():
    t = time.perf_counter()
    from_a, from_b = single_sided_liquidity(BTC_ENTRY, BTC_LOWER, BTC_UPPER, BTC_A, BTC_B)
    gap = abs(from_a - from_b) / max(from_a, from_b)
    record(5, gap <= 0.005, f"liquidity from a {from_a:.2f}, from b {from_b:.2f}, gap {gap:.4%} <= 0.5%", t)


def test_criterion_06_gradient_finite_differences():
    t = time.perf_counter()
    rng = np.random.default_rng(2024)
    worst = 0.0
    for _ in range(20):
        problem = random_instance(rng, int(rng.integers(1, 11)), int(rng.integers(2, 51)))
        theta = away_from_zero(rng, problem.size)
        fd = central_difference(problem, theta, h=1e-6)
        worst = max(worst, np.max(np.abs(gradient(theta, problem) - fd)) / max(np.max(np.abs(fd)), 1e-300))
    record(6, worst <= 1e-5, f"max relative gradient error {worst:.3e} <= 1e-5 over 20 instances", t)


def test_criterion_07_exact_recovery():
    t = time.perf_counter()
    q = OptionQuote(CALL, 1000.0, 10.0, 12.0, __import__("datetime").date(2030, 1, 1), "X")
    chain = OptionsChain("t", "X", 1000.0, (q,))
    grid = PriceGrid.geometric(1000.0)
    target = payoff_vanilla(CALL, "long", grid.points, q.strike, q.ask) / 5000.0
    result = solve(HedgeProblem(PnlCurve(grid.points, target, "target", 5000.0), chain, 0.0))
    ok = result.max_abs_residual <= 1e-3 and result.nonzero_count == 1
    record(7, ok, f"max_abs_residual {result.max_abs_residual:.3e} <= 1e-3, legs {result.nonzero_count} == 1", t)


@pytest.fixture(scope="module")
def paper_scale_runs(tmp_path_factory):
    from lphedge.amm_math import ConcentratedPosition, UniformPosition

    out = tmp_path_factory.mktemp("reports")
    positions = {
        "uniform": UniformPosition.from_deposit(ETH_ENTRY, ETH_A, ETH_B),
        "concentrated": ConcentratedPosition.from_deposit(BTC_ENTRY, BTC_LOWER, BTC_UPPER, BTC_A, BTC_B),
    }
    config = SolverConfig()
    runs = {}
    for name, position in positions.items():
        started = time.perf_counter()
        grid = PriceGrid.geometric(position.entry_price)
        chain = synthetic_chain(position.entry_price)
        results = {}
        for lam in (1e-4, 0.0, 1e6):
            problem = make_problem(position, grid, chain, lam)
            results[lam] = (problem, solve(problem, config))
        problem, result = results[1e-4]
        strategy = evaluate_strategy(position, result.legs, grid)
        reports = []
        for i in range(2):
            # the repeat solves from scratch
            res = result if i == 0 else solve(problem, config)
            path = out / f"{name}_{i}.json"
            write_report(res, problem, config, path)
            reports.append(path.read_bytes())
        runs[name] = dict(results=results, strategy=strategy, reports=reports,
                          seconds=time.perf_counter() - started)
    return runs


def test_criterion_08_paper_scale_hedge(paper_scale_runs):
    t = time.perf_counter()
    parts, ok = [], True
    for name, run in paper_scale_runs.items():
        worst = float(np.max(np.abs(run["strategy"].values)))
        ok &= worst <= 0.01
        parts.append(f"{name} max|pnl+payoff| {worst:.4f} ({run['results'][1e-4][1].nonzero_count} legs, "
                     f"{run['seconds']:.1f}s)")
    record(8, ok, "; ".join(parts) + " <= 0.01", t)


def test_criterion_09_sparsity(paper_scale_runs):
    t = time.perf_counter()
    parts, ok = [], True
    for name, run in paper_scale_runs.items():
        dense = run["results"][0.0][1].nonzero_count
        empty = run["results"][1e6][1].nonzero_count
        ok &= empty == 0 and dense > 0 and empty <= dense
        parts.append(f"{name} legs at lambda=1e6: {empty}, at lambda=0: {dense}")
    record(9, ok, "; ".join(parts), t)


def test_criterion_10_determinism(paper_scale_runs):
    t = time.perf_counter()
    same = {name: run["reports"][0] == run["reports"][1] for name, run in paper_scale_runs.items()}
    record(10, all(same.values()), f"byte-identical repeat reports: {same}", t)
