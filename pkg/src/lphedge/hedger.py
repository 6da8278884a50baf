"""Sparse option portfolios that offset an LP position's value change.

The regression target at each grid price is the negated LP PNL. Option
payoffs are divided by the position's initial value so residuals, PNL and
the L1 weight all live in fraction-of-investment units.
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .errors import ChainDataError, DimensionError, DomainError
from .options import OptionsChain, PortfolioLeg, portfolio_payoff

DEFAULT_MIN_FACTOR = 0.1
DEFAULT_MAX_FACTOR = 4.0
DEFAULT_GRID_COUNT = 512
DEFAULT_LAMBDA = 1e-4


def fmt(x):
    """Round to 12 significant digits for stable text output."""
    return float(f"{float(x):.12g}")


@dataclass(frozen=True)
class PriceGrid:
    points: np.ndarray
    min_factor: float = DEFAULT_MIN_FACTOR
    max_factor: float = DEFAULT_MAX_FACTOR
    count: int = DEFAULT_GRID_COUNT
    spacing: str = "geometric"

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 1 or len(pts) < 2:
            raise DomainError("price grid needs at least two points")
        if np.any(pts <= 0) or np.any(np.diff(pts) <= 0):
            raise DomainError("price grid must be positive and strictly increasing")
        object.__setattr__(self, "points", pts)

    @classmethod
    def geometric(cls, center, min_factor=DEFAULT_MIN_FACTOR, max_factor=DEFAULT_MAX_FACTOR,
                  count=DEFAULT_GRID_COUNT):
        """``count`` log-spaced prices over ``[min_factor * center, max_factor * center]``."""
        if not (center > 0 and 0 < min_factor < max_factor) or count < 2:
            raise DomainError("grid needs center > 0, 0 < min_factor < max_factor and count >= 2")
        pts = np.geomspace(min_factor * center, max_factor * center, int(count))
        return cls(pts, float(min_factor), float(max_factor), int(count))

    def __len__(self):
        return len(self.points)


@dataclass(frozen=True)
class PnlCurve:
    prices: np.ndarray
    values: np.ndarray
    label: str = ""
    normalizer: Optional[float] = None

    def __post_init__(self):
        prices = np.asarray(self.prices, dtype=float)
        values = np.asarray(self.values, dtype=float)
        if prices.shape != values.shape or prices.ndim != 1:
            raise DimensionError("prices and values must be 1-d and the same length")
        if np.any(np.diff(prices) <= 0):
            raise DomainError("curve prices must be strictly increasing")
        object.__setattr__(self, "prices", prices)
        object.__setattr__(self, "values", values)

    def __len__(self):
        return len(self.prices)

    def to_text(self):
        lines = [f"# {self.label}" if self.label else "# curve"]
        if self.normalizer is not None:
            lines.append(f"# normalizer {self.normalizer:.12g}")
        lines += [f"{p:.12g} {v:.12g}" for p, v in zip(self.prices, self.values)]
        return "\n".join(lines) + "\n"

    def write(self, path):
        Path(path).write_text(self.to_text(), encoding="utf-8")

    @classmethod
    def read(cls, path):
        label, normalizer, rows = "", None, []
        for line in Path(path).read_text(encoding="utf-8").splitlines():
            if line.startswith("# normalizer "):
                normalizer = float(line.split()[-1])
            elif line.startswith("# "):
                label = line[2:]
            elif line.strip():
                rows.append([float(x) for x in line.split()])
        arr = np.array(rows, dtype=float).reshape(-1, 2)
        return cls(arr[:, 0], arr[:, 1], label, normalizer)


@dataclass
class SolverConfig:
    learning_rate: float = 0.05
    epochs: int = 2000
    batch_size: int = 32
    seed: int = 42
    prune_threshold: float = 1e-4

    def __post_init__(self):
        if not self.learning_rate > 0:
            raise DomainError("learning_rate must be positive")
        if self.epochs < 1 or self.batch_size < 1:
            raise DomainError("epochs and batch_size must be positive")
        if not self.prune_threshold >= 0:
            raise DomainError("prune_threshold must be nonnegative")


class HedgeProblem:
    """Regression instance: fit ``theta`` so normalized option payoffs track ``target``."""

    def __init__(self, target: PnlCurve, chain: OptionsChain, lam=DEFAULT_LAMBDA, normalizer=None):
        if normalizer is None:
            normalizer = target.normalizer
        if normalizer is None or not normalizer > 0:
            raise DomainError("normalizer (initial investment) must be positive")
        if not lam >= 0:
            raise DomainError("lambda must be nonnegative")
        self.target = target
        self.chain = chain
        self.lam = float(lam)
        self.normalizer = float(normalizer)
        prices = target.prices
        quotes = chain.quotes
        self.intrinsic = (
            np.column_stack([q.intrinsic(prices) for q in quotes]) / self.normalizer
            if quotes else np.zeros((len(prices), 0))
        )
        self.ask = np.array([np.nan if q.ask is None else q.ask for q in quotes]) / self.normalizer
        self.bid = np.array([np.nan if q.bid is None else q.bid for q in quotes]) / self.normalizer
        # contracts with no ask can only be sold, with no bid only bought
        self.can_long = ~np.isnan(self.ask)
        self.can_short = ~np.isnan(self.bid)

    @property
    def size(self):
        return self.intrinsic.shape[1]

    def _check(self, theta):
        theta = np.asarray(theta, dtype=float)
        if theta.shape != (self.size,):
            raise DimensionError(f"theta has shape {theta.shape}, expected ({self.size},)")
        return theta

    def premium(self, theta):
        """Normalized premium per contract on the side each theta trades (ask at zero)."""
        long_side = (theta > 0) | ((theta == 0) & self.can_long)
        return np.nan_to_num(np.where(long_side, self.ask, self.bid))

    def payoff_columns(self, theta, rows=slice(None)):
        return self.intrinsic[rows] - self.premium(theta)

    def normalized_payoff(self, theta, rows=slice(None)):
        theta = self._check(theta)
        return self.payoff_columns(theta, rows) @ theta

    def residual(self, theta, rows=slice(None)):
        """Normalized option payoff plus LP PNL."""
        return self.normalized_payoff(theta, rows) - self.target.values[rows]


def cost(theta, problem: HedgeProblem):
    """Half the squared residual summed over the grid plus ``lambda * sum |theta|``."""
    theta = problem._check(theta)
    r = problem.residual(theta)
    return 0.5 * float(r @ r) + problem.lam * float(np.abs(theta).sum())


def gradient(theta, problem: HedgeProblem):
    """Gradient of the smooth (squared-residual) part of :func:`cost`."""
    theta = problem._check(theta)
    return problem.payoff_columns(theta).T @ problem.residual(theta)


def soft_threshold(x, t):
    return np.sign(x) * np.maximum(np.abs(x) - t, 0.0)


@dataclass
class HedgeResult:
    legs: list
    theta: np.ndarray
    residual_curve: PnlCurve
    max_abs_residual: float
    rms_residual: float
    nonzero_count: int
    cost_history: list = field(default_factory=list)
    final_learning_rate: float = 0.0


def _residual_stats(r):
    return float(np.max(np.abs(r))), float(np.sqrt(np.mean(r * r)))


def solve(problem: HedgeProblem, config: Optional[SolverConfig] = None) -> HedgeResult:
    """Mini-batch proximal SGD on the hedging cost.

    Coordinates are rescaled by their payoff-column norms before stepping.
    After each epoch the L1 term is applied as a soft threshold; an epoch that
    raises the full-grid cost is undone and the learning rate halved.
    """
    config = config or SolverConfig()
    if problem.size == 0:
        raise ChainDataError("cannot hedge with an empty options chain")
    n, m = problem.intrinsic.shape
    lam = problem.lam

    norms = np.linalg.norm(problem.payoff_columns(np.zeros(m)), axis=0)
    tradable = (norms > 0) & (problem.can_long | problem.can_short)
    scale = np.where(tradable, 1.0 / np.where(norms > 0, norms, 1.0), 0.0)
    lo = np.where(problem.can_short, -np.inf, 0.0)
    hi = np.where(problem.can_long, np.inf, 0.0)

    rng = np.random.default_rng(config.seed)
    w = np.zeros(m)
    lr = config.learning_rate
    best = cost(w * scale, problem)
    history = [best]
    for epoch in range(1, config.epochs + 1):
        step = lr / math.sqrt(epoch)
        saved = w.copy()
        order = rng.permutation(n)
        for start in range(0, n, config.batch_size):
            rows = order[start:start + config.batch_size]
            theta = w * scale
            cols = problem.payoff_columns(theta, rows)
            r = cols @ theta - problem.target.values[rows]
            # batch sum rescaled to estimate the full-grid gradient
            g = scale * (cols.T @ r) * (n / len(rows))
            w = np.clip(w - step * g, lo, hi)
        w = soft_threshold(w, step * lam * scale)
        current = cost(w * scale, problem)
        if current > best:
            w = saved
            lr *= 0.5
        else:
            best = current
        history.append(best)
        if lr < 1e-12 * config.learning_rate:
            break

    theta = w * scale
    theta[np.abs(theta) < config.prune_threshold] = 0.0
    r = problem.residual(theta)
    max_abs, rms = _residual_stats(r)
    legs = [PortfolioLeg(q, float(t)) for q, t in zip(problem.chain.quotes, theta) if t != 0]
    curve = PnlCurve(problem.target.prices, r, "residual", problem.normalizer)
    return HedgeResult(legs, theta, curve, max_abs, rms, len(legs), history, lr)


def build_target(position, grid: PriceGrid) -> PnlCurve:
    """Negated LP PNL of ``position`` at each grid price."""
    values = -np.asarray(position.lp_pnl(grid.points), dtype=float)
    return PnlCurve(grid.points, values, "target", position.initial_value)


def make_problem(position, grid: PriceGrid, chain: OptionsChain, lam=DEFAULT_LAMBDA):
    return HedgeProblem(build_target(position, grid), chain, lam, position.initial_value)


def evaluate_strategy(position, legs: Sequence[PortfolioLeg], grid: PriceGrid) -> PnlCurve:
    """LP PNL plus normalized option payoff at each grid price."""
    p = grid.points
    values = np.asarray(position.lp_pnl(p)) + np.asarray(portfolio_payoff(legs, p)) / position.initial_value
    return PnlCurve(p, values, "strategy", position.initial_value)


def rounding_report(result: HedgeResult, problem: HedgeProblem):
    """Residuals if every theta were rounded to whole contracts. Nothing is modified."""
    rounded = np.round(result.theta)
    max_abs, rms = _residual_stats(problem.residual(rounded))
    return {
        "nonzero_count": int(np.count_nonzero(rounded)),
        "max_abs_residual": fmt(max_abs),
        "rms_residual": fmt(rms),
    }


def report_dict(result: HedgeResult, problem: HedgeProblem, config: SolverConfig):
    legs = [
        {
            "contract": leg.quote.contract_id,
            "kind": leg.quote.kind,
            "strike": fmt(leg.quote.strike),
            "expiry": leg.quote.expiry.isoformat(),
            "theta": fmt(leg.theta),
            "side": leg.side,
            "premium": fmt(leg.premium),
        }
        for leg in result.legs
    ]
    return {
        "underlying": problem.chain.underlying,
        "chain_timestamp": problem.chain.timestamp,
        "normalizer": fmt(problem.normalizer),
        "lambda": problem.lam,
        "grid": {
            "count": len(problem.target),
            "min_price": fmt(problem.target.prices[0]),
            "max_price": fmt(problem.target.prices[-1]),
        },
        "solver": asdict(config),
        "nonzero_count": result.nonzero_count,
        "max_abs_residual": fmt(result.max_abs_residual),
        "rms_residual": fmt(result.rms_residual),
        "integer_rounding": rounding_report(result, problem),
        "legs": legs,
    }


def write_report(result: HedgeResult, problem: HedgeProblem, config: SolverConfig, path):
    text = json.dumps(report_dict(result, problem, config), indent=2) + "\n"
    Path(path).write_text(text, encoding="utf-8")
