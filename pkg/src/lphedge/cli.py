"""Command-line entry point: ``lphedge {curve,hedge,simulate,synth-chain}``."""
from __future__ import annotations

import argparse
import datetime as dt
import sys
from pathlib import Path

import numpy as np

from . import hedger
from .amm_math import UniformPosition
from .config import load_config
from .errors import ChainDataError, ConfigError, DepositConsistencyError, DimensionError, DomainError
from .options import dump_chain, load_chain, synthetic_chain
from .pool_sim import SimPool, simulate_concentrated_exit

METRICS = ("lp_pnl", "il", "pool_value")


def _grid(args, position):
    return hedger.PriceGrid.geometric(
        position.entry_price, args.grid_min_factor, args.grid_max_factor, args.grid_count
    )


def _out_dir(args):
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_curve(args):
    position = load_config(args.config).to_position()
    grid = _grid(args, position)
    values = getattr(position, args.metric)(grid.points)
    normalizer = None if args.metric == "pool_value" else position.initial_value
    curve = hedger.PnlCurve(grid.points, values, args.metric, normalizer)
    path = _out_dir(args) / f"{args.metric}.txt"
    curve.write(path)
    print(f"wrote {path}")


def cmd_hedge(args):
    position = load_config(args.config).to_position()
    chain = load_chain(args.chain)
    if args.expiry:
        chain = chain.with_expiries(args.expiry)
        if not len(chain):
            raise ChainDataError("no quotes left after expiry filter")
    grid = _grid(args, position)
    config = hedger.SolverConfig(
        learning_rate=args.learning_rate,
        epochs=args.epochs,
        batch_size=args.batch_size,
        seed=args.seed,
        prune_threshold=args.prune_threshold,
    )
    problem = hedger.make_problem(position, grid, chain, args.lam)
    result = hedger.solve(problem, config)
    strategy = hedger.evaluate_strategy(position, result.legs, grid)

    out = _out_dir(args)
    hedger.write_report(result, problem, config, out / "report.json")
    problem.target.write(out / "target.txt")
    strategy.write(out / "strategy.txt")
    print(f"legs: {result.nonzero_count}")
    print(f"max_abs_residual: {result.max_abs_residual:.6g}")
    print(f"rms_residual: {result.rms_residual:.6g}")
    print(f"wrote {out / 'report.json'}")


def _simulate_uniform(position: UniformPosition, target, steps):
    pool = SimPool(position.amount_a_init, position.amount_b_init)
    for p in np.geomspace(pool.price, target, steps + 1)[1:]:
        pool.move_price_to(float(p))
    return pool.reserve_a, pool.reserve_b


def cmd_simulate(args):
    position = load_config(args.config).to_position()
    target = args.target_price
    if not target > 0:
        raise DomainError("target price must be positive")
    closed_a, closed_b = position.final_amounts(target)
    value = target * closed_a + closed_b
    print(f"target_price {target:.12g}")
    print(f"closed_form amount_a {closed_a:.12g} amount_b {closed_b:.12g}")
    print(f"{'steps':>8} {'sim_amount_a':>20} {'sim_amount_b':>20} {'deviation':>12}")
    for steps in args.steps:
        if steps < 1:
            raise DomainError("steps must be >= 1")
        if isinstance(position, UniformPosition):
            sim_a, sim_b = _simulate_uniform(position, target, steps)
        else:
            sim_a, sim_b = simulate_concentrated_exit(position, target, steps)
        # value-weighted so that exhausted tokens do not divide by zero
        deviation = (target * abs(sim_a - closed_a) + abs(sim_b - closed_b)) / value
        print(f"{steps:>8d} {sim_a:>20.12g} {sim_b:>20.12g} {deviation:>12.3e}")


def cmd_synth_chain(args):
    chain = synthetic_chain(
        args.spot, args.min_factor, args.max_factor, args.step, args.premium, underlying=args.underlying
    )
    Path(args.out).parent.mkdir(parents=True, exist_ok=True)
    dump_chain(chain, args.out, args.form)
    print(f"wrote {len(chain)} quotes to {args.out}")


def _date(text):
    try:
        return dt.date.fromisoformat(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an ISO date: {text!r}") from None


def build_parser():
    parser = argparse.ArgumentParser(prog="lphedge", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", required=True, help="position config (TOML)")

    grid = argparse.ArgumentParser(add_help=False)
    grid.add_argument("--grid-min-factor", type=float, default=hedger.DEFAULT_MIN_FACTOR)
    grid.add_argument("--grid-max-factor", type=float, default=hedger.DEFAULT_MAX_FACTOR)
    grid.add_argument("--grid-count", type=int, default=hedger.DEFAULT_GRID_COUNT)
    grid.add_argument("--out", default="out", help="output directory")

    p = sub.add_parser("curve", parents=[common, grid], help="write an LP PNL, IL or pool value curve")
    p.add_argument("--metric", choices=METRICS, default="lp_pnl")
    p.set_defaults(func=cmd_curve)

    defaults = hedger.SolverConfig()
    p = sub.add_parser("hedge", parents=[common, grid], help="solve for a hedging options portfolio")
    p.add_argument("--chain", required=True, help="options chain snapshot")
    p.add_argument("--lambda", dest="lam", type=float, default=hedger.DEFAULT_LAMBDA)
    p.add_argument("--seed", type=int, default=defaults.seed)
    p.add_argument("--epochs", type=int, default=defaults.epochs)
    p.add_argument("--learning-rate", type=float, default=defaults.learning_rate)
    p.add_argument("--batch-size", type=int, default=defaults.batch_size)
    p.add_argument("--prune-threshold", type=float, default=defaults.prune_threshold)
    p.add_argument("--expiry", type=_date, action="append", help="keep only this expiry (repeatable)")
    p.set_defaults(func=cmd_hedge)

    p = sub.add_parser("simulate", parents=[common], help="compare the swap simulator with the closed form")
    p.add_argument("--target-price", type=float, required=True)
    p.add_argument("--steps", type=int, nargs="+", default=[10_000])
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("synth-chain", help="write a synthetic zero-spread options chain")
    p.add_argument("--spot", type=float, required=True)
    p.add_argument("--min-factor", type=float, default=0.2)
    p.add_argument("--max-factor", type=float, default=4.0)
    p.add_argument("--step", type=float, default=0.02)
    p.add_argument("--premium", type=float, default=0.0)
    p.add_argument("--underlying", default="SYN")
    p.add_argument("--form", choices=("lines", "array"), default="lines")
    p.add_argument("--out", required=True, help="output chain file")
    p.set_defaults(func=cmd_synth_chain)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except (ConfigError, ChainDataError, DomainError, DepositConsistencyError, DimensionError) as exc:
        print(f"lphedge {args.command}: error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
