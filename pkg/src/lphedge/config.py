"""Position config files (TOML).

Example::

    schema_version = 1
    kind = "concentrated"

    [pair]
    symbol_a = "WBTC"
    symbol_b = "USDC"
    decimals_a = 8
    decimals_b = 6

    [position]
    entry_price = 23776.0     # token b per token a
    amount_a = 19.94          # token a units
    amount_b = 265132.51      # token b units
    lower_tick = 51960
    upper_tick = 59940

``entry_tick`` may replace ``entry_price``, and ``lower_price`` /
``upper_price`` may replace the tick bounds. Ticks are converted with the
pair's decimals.
"""
from __future__ import annotations

import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import tomli_w

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .amm_math import ConcentratedPosition, TokenPair, UniformPosition
from .errors import ConfigError, DepositConsistencyError, DomainError

SCHEMA_VERSION = 1
KINDS = ("uniform", "concentrated")
PAIR_KEYS = ("symbol_a", "symbol_b", "decimals_a", "decimals_b")
POSITION_KEYS = (
    "entry_price", "entry_tick", "amount_a", "amount_b",
    "lower_tick", "upper_tick", "lower_price", "upper_price",
)


@dataclass(frozen=True)
class PositionConfig:
    kind: str
    pair: TokenPair
    amount_a: float
    amount_b: float
    entry_price: Optional[float] = None
    entry_tick: Optional[int] = None
    lower_tick: Optional[int] = None
    upper_tick: Optional[int] = None
    lower_price: Optional[float] = None
    upper_price: Optional[float] = None

    def resolved_entry_price(self):
        if self.entry_tick is not None:
            return self.pair.tick_to_price(self.entry_tick)
        return self.entry_price

    def resolved_range(self):
        if self.lower_tick is not None:
            return self.pair.tick_to_price(self.lower_tick), self.pair.tick_to_price(self.upper_tick)
        return self.lower_price, self.upper_price

    def to_position(self):
        entry = self.resolved_entry_price()
        try:
            if self.kind == "uniform":
                return UniformPosition.from_deposit(entry, self.amount_a, self.amount_b)
            lower, upper = self.resolved_range()
            return ConcentratedPosition.from_deposit(entry, lower, upper, self.amount_a, self.amount_b)
        except (DomainError, DepositConsistencyError) as exc:
            raise ConfigError("position", str(exc)) from None

    def to_dict(self):
        pos = {k: getattr(self, k) for k in POSITION_KEYS if getattr(self, k) is not None}
        return {
            "schema_version": SCHEMA_VERSION,
            "kind": self.kind,
            "pair": {k: getattr(self.pair, k) for k in PAIR_KEYS},
            "position": pos,
        }


def _number(table, key, prefix, integer=False):
    value = table.get(key)
    if value is None:
        return None
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{prefix}.{key}", f"expected a number, got {value!r}")
    if integer:
        if not isinstance(value, int):
            raise ConfigError(f"{prefix}.{key}", f"expected an integer, got {value!r}")
        return value
    return float(value)


def _reject_unknown(table, allowed, prefix):
    for key in table:
        if key not in allowed:
            raise ConfigError(f"{prefix}{key}", "unknown field")


def config_from_dict(data) -> PositionConfig:
    _reject_unknown(data, ("schema_version", "kind", "pair", "position"), "")
    if data.get("schema_version") != SCHEMA_VERSION:
        raise ConfigError("schema_version", f"expected {SCHEMA_VERSION}, got {data.get('schema_version')!r}")
    kind = data.get("kind")
    if kind not in KINDS:
        raise ConfigError("kind", f"must be one of {KINDS}, got {kind!r}")

    pair_t = data.get("pair")
    if not isinstance(pair_t, dict):
        raise ConfigError("pair", "missing [pair] table")
    _reject_unknown(pair_t, PAIR_KEYS, "pair.")
    for key in ("symbol_a", "symbol_b"):
        if not isinstance(pair_t.get(key), str):
            raise ConfigError(f"pair.{key}", "expected a token symbol string")
    try:
        pair = TokenPair(
            pair_t["symbol_a"], pair_t["symbol_b"],
            pair_t.get("decimals_a", 18), pair_t.get("decimals_b", 18),
        )
    except DomainError as exc:
        raise ConfigError("pair.decimals", str(exc)) from None

    pos = data.get("position")
    if not isinstance(pos, dict):
        raise ConfigError("position", "missing [position] table")
    _reject_unknown(pos, POSITION_KEYS, "position.")
    values = {
        k: _number(pos, k, "position", integer=k.endswith("_tick"))
        for k in POSITION_KEYS
    }
    for key in ("amount_a", "amount_b"):
        if values[key] is None:
            raise ConfigError(f"position.{key}", "required")
    if (values["entry_price"] is None) == (values["entry_tick"] is None):
        raise ConfigError("position.entry_price", "give exactly one of entry_price or entry_tick")

    has_ticks = values["lower_tick"] is not None or values["upper_tick"] is not None
    has_prices = values["lower_price"] is not None or values["upper_price"] is not None
    if kind == "uniform" and (has_ticks or has_prices):
        raise ConfigError("position.lower_tick" if has_ticks else "position.lower_price",
                          "uniform positions take no price range")
    if kind == "concentrated":
        if has_ticks == has_prices:
            raise ConfigError("position.lower_tick", "give the range as ticks or as prices, not both or neither")
        lo, hi = ("lower_tick", "upper_tick") if has_ticks else ("lower_price", "upper_price")
        for key in (lo, hi):
            if values[key] is None:
                raise ConfigError(f"position.{key}", "required")

    cfg = PositionConfig(kind=kind, pair=pair, **values)
    for key in ("entry_tick", "lower_tick", "upper_tick"):
        if getattr(cfg, key) is not None:
            try:
                pair.tick_to_price(getattr(cfg, key))
            except DomainError as exc:
                raise ConfigError(f"position.{key}", str(exc)) from None
    return cfg


def load_config(path) -> PositionConfig:
    path = Path(path)
    try:
        with path.open("rb") as fh:
            data = tomllib.load(fh)
    except OSError as exc:
        raise ConfigError("config", f"cannot read {path}: {exc.strerror}") from None
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError("config", f"{path}: {exc}") from None
    return config_from_dict(data)


def dump_config(cfg: PositionConfig, path):
    Path(path).write_text(tomli_w.dumps(cfg.to_dict()), encoding="utf-8")
