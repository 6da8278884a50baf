"""Closed-form LP position PNL and sparse option hedges for AMM liquidity."""
from .amm_math import (
    ConcentratedPosition,
    TokenPair,
    UniformPosition,
    delta_from_prices,
    il_uniform,
    lp_pnl_uniform,
    tick_to_price,
)
from .hedger import PriceGrid, SolverConfig, evaluate_strategy, make_problem, solve
from .options import OptionQuote, OptionsChain, PortfolioLeg, load_chain

__version__ = "0.1.0"
