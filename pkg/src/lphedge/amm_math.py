"""Closed-form valuation of constant-product LP positions.

Prices are quoted in token b per token a, and token b is the numeraire, so
its own price is always 1 and never stored. Scalar inputs give ``float``
results; numpy arrays are evaluated elementwise.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DepositConsistencyError, DomainError

MAX_TICK = 887272
TICK_BASE = 1.0001

# relative mismatch allowed between b/a and the quoted entry price
UNIFORM_PRICE_TOLERANCE = 0.005
# relative disagreement allowed between the two single-sided liquidity estimates
LIQUIDITY_TOLERANCE = 0.01


def _out(x):
    x = np.asarray(x, dtype=float)
    return float(x) if x.ndim == 0 else x


def _positive(name, value):
    arr = np.asarray(value, dtype=float)
    if not np.all(np.isfinite(arr)) or np.any(arr <= 0):
        raise DomainError(f"{name} must be positive and finite, got {value!r}")
    return arr


def _nonnegative(name, value):
    arr = np.asarray(value, dtype=float)
    if not np.all(np.isfinite(arr)) or np.any(arr < 0):
        raise DomainError(f"{name} must be nonnegative and finite, got {value!r}")
    return arr


def _delta(delta):
    d = np.asarray(delta, dtype=float)
    if not np.all(np.isfinite(d)) or np.any(d <= -1):
        raise DomainError(f"price change must be > -1, got {delta!r}")
    return d


def delta_from_prices(entry, final):
    """Relative price move ``final / entry - 1``."""
    entry = _positive("entry price", entry)
    final = _positive("final price", final)
    return _out(final / entry - 1.0)


def amounts_from_price_uniform(kappa, price):
    """Reserves ``(a, b)`` of a constant-product pool with invariant ``kappa`` at ``price``."""
    kappa = _positive("kappa", kappa)
    price = _positive("price", price)
    return _out(np.sqrt(kappa / price)), _out(np.sqrt(kappa * price))


def lp_pnl_uniform(delta):
    """LP value change as a fraction of the initial deposit: sqrt(delta + 1) - 1."""
    d = _delta(delta)
    # same value, without cancellation near delta = 0
    return _out(d / (np.sqrt(d + 1.0) + 1.0))


def il_uniform(delta):
    """Impermanent loss against holding: 2 sqrt(delta + 1) / (delta + 2) - 1."""
    d = _delta(delta)
    # rewritten as -(sqrt(delta + 1) - 1)**2 / (delta + 2): never positive, no cancellation
    s = d / (np.sqrt(d + 1.0) + 1.0)
    return _out(-(s * s) / (d + 2.0))


def _check_range(lower, upper):
    lower = float(_positive("lower price", lower))
    upper = float(_positive("upper price", upper))
    if lower >= upper:
        raise DomainError(f"lower price {lower} must be below upper price {upper}")
    return lower, upper


def final_amounts_concentrated(sqrt_kappa, lower, upper, price):
    """Token amounts held by a ranged position of liquidity ``sqrt_kappa`` at ``price``.

    Below the range everything is token a, above it everything is token b.
    """
    sqrt_kappa = float(_positive("liquidity", sqrt_kappa))
    lower, upper = _check_range(lower, upper)
    p = _positive("final price", price)
    sl, su = np.sqrt(lower), np.sqrt(upper)
    sp = np.sqrt(np.clip(p, lower, upper))
    amount_a = np.where(p >= upper, 0.0, sqrt_kappa * (su - sp) / (sp * su))
    amount_b = np.where(p <= lower, 0.0, sqrt_kappa * (sp - sl))
    return _out(amount_a), _out(amount_b)


def single_sided_liquidity(entry_price, lower, upper, amount_a, amount_b):
    """Liquidity implied separately by each deposited token.

    Returns ``(from_a, from_b)``; an entry is ``None`` when that token does not
    take part at the entry price.
    """
    entry = float(_positive("entry price", entry_price))
    lower, upper = _check_range(lower, upper)
    amount_a = float(_nonnegative("amount_a", amount_a))
    amount_b = float(_nonnegative("amount_b", amount_b))
    sl, su, se = np.sqrt(lower), np.sqrt(upper), np.sqrt(entry)
    from_a = from_b = None
    if entry <= lower:
        from_a = amount_a * sl * su / (su - sl)
    elif entry >= upper:
        from_b = amount_b / (su - sl)
    else:
        from_a = amount_a * se * su / (su - se)
        from_b = amount_b / (se - sl)
    return (
        None if from_a is None else float(from_a),
        None if from_b is None else float(from_b),
    )


def liquidity_from_deposit(entry_price, lower, upper, amount_a, amount_b):
    """Liquidity (sqrt kappa) minted by depositing ``amount_a`` and ``amount_b``.

    For an interior entry price both tokens imply a liquidity; the smaller one
    is used, as the protocol does when minting, and estimates that disagree by
    more than 1% are rejected.
    """
    from_a, from_b = single_sided_liquidity(entry_price, lower, upper, amount_a, amount_b)
    if from_b is None:
        if amount_b > 0:
            raise DepositConsistencyError("entry price at or below range: deposit must be token a only")
        if from_a <= 0:
            raise DomainError("zero deposit")
        return float(from_a)
    if from_a is None:
        if amount_a > 0:
            raise DepositConsistencyError("entry price at or above range: deposit must be token b only")
        if from_b <= 0:
            raise DomainError("zero deposit")
        return float(from_b)
    if from_a <= 0 or from_b <= 0:
        raise DomainError("interior entry price requires both tokens to be deposited")
    gap = abs(from_a - from_b) / max(from_a, from_b)
    if gap > LIQUIDITY_TOLERANCE:
        raise DepositConsistencyError(
            f"token a implies liquidity {from_a:.6g}, token b implies {from_b:.6g} "
            f"({gap:.2%} apart)"
        )
    return float(min(from_a, from_b))


def final_pool_value(price, amount_a, amount_b):
    """Value of pool holdings in token b."""
    price = _positive("price", price)
    amount_a = _nonnegative("amount_a", amount_a)
    amount_b = _nonnegative("amount_b", amount_b)
    return _out(price * amount_a + amount_b)


def value_if_held(entry_price, price, amount_a_init, amount_b_init):
    """Value in token b of the initial deposit had it been kept outside the pool."""
    _positive("entry price", entry_price)
    return final_pool_value(price, amount_a_init, amount_b_init)


def tick_to_price(tick, decimals_a, decimals_b):
    """Human-readable price of a tick, adjusted for the tokens' decimals."""
    if int(tick) != tick or abs(int(tick)) > MAX_TICK:
        raise DomainError(f"tick must be an integer with |tick| <= {MAX_TICK}, got {tick!r}")
    for d in (decimals_a, decimals_b):
        if int(d) != d or not 0 <= d <= 36:
            raise DomainError(f"token decimals must be an integer in [0, 36], got {d!r}")
    return TICK_BASE ** int(tick) * 10.0 ** (int(decimals_a) - int(decimals_b))


@dataclass(frozen=True)
class TokenPair:
    symbol_a: str
    symbol_b: str
    decimals_a: int = 18
    decimals_b: int = 18

    def __post_init__(self):
        for d in (self.decimals_a, self.decimals_b):
            if not isinstance(d, int) or not 0 <= d <= 36:
                raise DomainError(f"token decimals must be an integer in [0, 36], got {d!r}")

    def tick_to_price(self, tick):
        return tick_to_price(tick, self.decimals_a, self.decimals_b)


@dataclass(frozen=True)
class UniformPosition:
    """Liquidity deposited into a full-range constant-product pool."""

    entry_price: float
    amount_a_init: float
    amount_b_init: float
    kappa: float

    def __post_init__(self):
        _positive("entry price", self.entry_price)
        _positive("amount_a", self.amount_a_init)
        _positive("amount_b", self.amount_b_init)
        _positive("kappa", self.kappa)
        product = self.amount_a_init * self.amount_b_init
        if abs(product - self.kappa) > 1e-12 * product:
            raise DomainError(f"kappa {self.kappa} != amount_a * amount_b = {product}")
        implied = self.amount_b_init / self.amount_a_init
        if abs(implied - self.entry_price) / self.entry_price > UNIFORM_PRICE_TOLERANCE:
            raise DepositConsistencyError(
                f"deposit ratio b/a = {implied:.6g} does not match entry price {self.entry_price}"
            )

    @classmethod
    def from_deposit(cls, entry_price, amount_a, amount_b):
        return cls(float(entry_price), float(amount_a), float(amount_b), float(amount_a) * float(amount_b))

    @property
    def initial_value(self):
        return self.entry_price * self.amount_a_init + self.amount_b_init

    def final_amounts(self, price):
        return amounts_from_price_uniform(self.kappa, price)

    def pool_value(self, price):
        return final_pool_value(price, *self.final_amounts(price))

    def lp_pnl(self, price):
        return lp_pnl_uniform(delta_from_prices(self.entry_price, price))

    def il(self, price):
        return il_uniform(delta_from_prices(self.entry_price, price))


@dataclass(frozen=True)
class ConcentratedPosition:
    """Liquidity ``sqrt_kappa`` active only while the price is inside ``[lower_price, upper_price]``."""

    entry_price: float
    lower_price: float
    upper_price: float
    amount_a_init: float
    amount_b_init: float
    sqrt_kappa: float

    def __post_init__(self):
        _positive("entry price", self.entry_price)
        _check_range(self.lower_price, self.upper_price)
        _nonnegative("amount_a", self.amount_a_init)
        _nonnegative("amount_b", self.amount_b_init)
        _positive("liquidity", self.sqrt_kappa)
        if self.amount_a_init <= 0 and self.amount_b_init <= 0:
            raise DomainError("zero deposit")
        if self.lower_price < self.entry_price < self.upper_price and (
            self.amount_a_init <= 0 or self.amount_b_init <= 0
        ):
            raise DomainError("interior entry price requires both tokens to be deposited")

    @classmethod
    def from_deposit(cls, entry_price, lower_price, upper_price, amount_a, amount_b):
        sqrt_kappa = liquidity_from_deposit(entry_price, lower_price, upper_price, amount_a, amount_b)
        return cls(
            float(entry_price), float(lower_price), float(upper_price),
            float(amount_a), float(amount_b), sqrt_kappa,
        )

    @property
    def initial_value(self):
        return self.entry_price * self.amount_a_init + self.amount_b_init

    def final_amounts(self, price):
        return final_amounts_concentrated(self.sqrt_kappa, self.lower_price, self.upper_price, price)

    def pool_value(self, price):
        return final_pool_value(price, *self.final_amounts(price))

    def lp_pnl(self, price):
        return lp_pnl_concentrated(self, price)

    def il(self, price):
        return il_concentrated(self, price)


def lp_pnl_concentrated(position: ConcentratedPosition, price):
    """Pool value at ``price`` over the initial deposit value, minus one."""
    return _out(position.pool_value(price) / position.initial_value - 1.0)


def il_concentrated(position: ConcentratedPosition, price):
    """Pool value at ``price`` over the value of holding the deposit, minus one."""
    held = value_if_held(position.entry_price, price, position.amount_a_init, position.amount_b_init)
    return _out(position.pool_value(price) / held - 1.0)
