"""Fee-free constant-product swap engine used as a brute-force oracle.

Pools here never evaluate the closed-form amount formulas: every state change
is a swap that preserves the pool invariant, and amounts are read back off the
reserves.
"""
from __future__ import annotations

import math

import numpy as np

from .amm_math import ConcentratedPosition
from .errors import DomainError


class SimPool:
    """Full-range pool holding ``reserve_a * reserve_b == kappa``."""

    def __init__(self, reserve_a, reserve_b):
        if not (reserve_a > 0 and reserve_b > 0):
            raise DomainError("reserves must be positive")
        self.reserve_a = float(reserve_a)
        self.reserve_b = float(reserve_b)
        self.kappa = self.reserve_a * self.reserve_b

    def __repr__(self):
        return f"SimPool(reserve_a={self.reserve_a!r}, reserve_b={self.reserve_b!r})"

    @property
    def price(self):
        return self.reserve_b / self.reserve_a

    def swap_exact_a_in(self, da):
        """Sell ``da`` of token a into the pool; returns token b paid out."""
        if not da > 0:
            raise DomainError("swap input must be positive")
        new_a = self.reserve_a + da
        new_b = self.kappa / new_a
        db = self.reserve_b - new_b
        self.reserve_a, self.reserve_b = new_a, new_b
        return db

    def swap_exact_b_in(self, db):
        """Sell ``db`` of token b into the pool; returns token a paid out."""
        if not db > 0:
            raise DomainError("swap input must be positive")
        new_b = self.reserve_b + db
        new_a = self.kappa / new_b
        da = self.reserve_a - new_a
        self.reserve_a, self.reserve_b = new_a, new_b
        return da

    def move_price_to(self, target):
        """Execute the one swap that brings the spot price to ``target``."""
        if not target > 0:
            raise DomainError("target price must be positive")
        # reserve_a at the target follows from a^2 * p = kappa
        needed_a = math.sqrt(self.kappa / target)
        if needed_a > self.reserve_a:
            self.swap_exact_a_in(needed_a - self.reserve_a)
        elif needed_a < self.reserve_a:
            self.swap_exact_b_in(self.kappa / needed_a - self.reserve_b)
        return self


def swap_exact_a_in(pool: SimPool, da):
    db = pool.swap_exact_a_in(da)
    return db, pool


def move_price_to(pool: SimPool, target):
    return pool.move_price_to(target)


class RangedSimPool:
    """Single-position concentrated-liquidity pool.

    Real reserves ``a, b`` sit on the shifted curve
    ``(a + L / sqrt(p_u)) * (b + L * sqrt(p_l)) = L**2``. Once a reserve is
    exhausted the price is pinned at that range bound and the position stops
    trading.
    """

    def __init__(self, sqrt_kappa, lower, upper, reserve_a, reserve_b):
        if not lower < upper:
            raise DomainError("lower price must be below upper price")
        self.sqrt_kappa = float(sqrt_kappa)
        self.lower = float(lower)
        self.upper = float(upper)
        self.offset_a = self.sqrt_kappa / math.sqrt(self.upper)
        self.offset_b = self.sqrt_kappa * math.sqrt(self.lower)
        self.reserve_a = float(reserve_a)
        self.reserve_b = float(reserve_b)

    @classmethod
    def from_position(cls, position: ConcentratedPosition):
        """Seed real reserves from the position's liquidity at its entry price."""
        L = position.sqrt_kappa
        sp = math.sqrt(min(max(position.entry_price, position.lower_price), position.upper_price))
        # virtual reserves at a price p are (L / sqrt p, L * sqrt p)
        reserve_a = L / sp - L / math.sqrt(position.upper_price)
        reserve_b = L * sp - L * math.sqrt(position.lower_price)
        return cls(L, position.lower_price, position.upper_price, max(reserve_a, 0.0), max(reserve_b, 0.0))

    @property
    def virtual_a(self):
        return self.reserve_a + self.offset_a

    @property
    def virtual_b(self):
        return self.reserve_b + self.offset_b

    @property
    def price(self):
        return self.virtual_b / self.virtual_a

    @property
    def active(self):
        return self.reserve_a > 0 and self.reserve_b > 0

    def invariant_gap(self):
        L2 = self.sqrt_kappa ** 2
        return abs(self.virtual_a * self.virtual_b - L2) / L2

    def swap_a_in(self, da):
        """Sell up to ``da`` of token a; stops when token b runs out. Returns b paid out."""
        L2 = self.sqrt_kappa ** 2
        new_va = self.virtual_a + da
        new_vb = L2 / new_va
        if new_vb <= self.offset_b:
            # range exhausted: take every b and land exactly on the lower bound
            out = self.reserve_b
            self.reserve_b = 0.0
            self.reserve_a = L2 / self.offset_b - self.offset_a
            return out
        out = self.virtual_b - new_vb
        self.reserve_a = new_va - self.offset_a
        self.reserve_b = new_vb - self.offset_b
        return out

    def swap_b_in(self, db):
        """Sell up to ``db`` of token b; stops when token a runs out. Returns a paid out."""
        L2 = self.sqrt_kappa ** 2
        new_vb = self.virtual_b + db
        new_va = L2 / new_vb
        if new_va <= self.offset_a:
            out = self.reserve_a
            self.reserve_a = 0.0
            self.reserve_b = L2 / self.offset_a - self.offset_b
            return out
        out = self.virtual_a - new_va
        self.reserve_a = new_va - self.offset_a
        self.reserve_b = new_vb - self.offset_b
        return out

    def nudge_toward(self, target):
        """One arbitrage trade sized from the local curve to move the price toward ``target``.

        The trade size is first order in the log-price move, so the landing
        price misses ``target`` by a second-order amount.
        """
        p = self.price
        if target < p and self.reserve_b > 0:
            # d(virtual_a) / virtual_a = -d(p) / (2 p) along the curve
            self.swap_a_in(0.5 * self.virtual_a * (p / target - 1.0))
        elif target > p and self.reserve_a > 0:
            self.swap_b_in(0.5 * self.virtual_b * (target / p - 1.0))


def walk_price(pool: RangedSimPool, start, stop, steps):
    """Arbitrage the pool along ``steps`` geometric increments from ``start`` to ``stop``."""
    if steps < 1:
        raise DomainError("steps must be >= 1")
    if stop == start:
        return pool
    for target in np.geomspace(start, stop, steps + 1)[1:]:
        pool.nudge_toward(float(target))
    return pool


def simulate_concentrated_exit(position: ConcentratedPosition, final_price, steps):
    """Token amounts left after the market walks from entry to ``final_price``.

    Returns ``(amount_a, amount_b)``.
    """
    if not final_price > 0:
        raise DomainError("final price must be positive")
    pool = RangedSimPool.from_position(position)
    walk_price(pool, position.entry_price, final_price, steps)
    return pool.reserve_a, pool.reserve_b
