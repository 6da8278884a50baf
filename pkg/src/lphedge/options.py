"""European option quotes, signed portfolio legs and chain snapshots.

All premiums and payoffs are in token b (the quote token). A leg with
positive ``theta`` is long and pays the ask; negative ``theta`` is short and
receives the bid.
"""
from __future__ import annotations

import datetime as dt
import json
from dataclasses import dataclass, field, replace
from decimal import Decimal, InvalidOperation
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .errors import ChainDataError, ChainSchemaError, DomainError, EmptyChainError

CALL = "call"
PUT = "put"
LONG = "long"
SHORT = "short"

HEADER_FIELDS = ("timestamp", "underlying", "spot", "premium_denomination")
QUOTE_FIELDS = ("kind", "strike", "expiry", "bid", "ask")
DENOMINATIONS = ("quote", "underlying")


def _scalar_or_array(x):
    return float(x) if np.ndim(x) == 0 else x


def payoff_vanilla(kind, side, price, strike, premium):
    """Expiry payoff of one option contract net of its premium."""
    if kind not in (CALL, PUT):
        raise DomainError(f"unknown option kind {kind!r}")
    if side not in (LONG, SHORT):
        raise DomainError(f"unknown side {side!r}")
    if not strike > 0:
        raise DomainError("strike must be positive")
    if not premium >= 0:
        raise DomainError("premium must be nonnegative")
    p = np.asarray(price, dtype=float)
    if np.any(p <= 0):
        raise DomainError("price must be positive")
    intrinsic = np.maximum(p - strike, 0.0) if kind == CALL else np.maximum(strike - p, 0.0)
    value = intrinsic - premium if side == LONG else premium - intrinsic
    return _scalar_or_array(value)


@dataclass(frozen=True)
class OptionQuote:
    kind: str
    strike: float
    bid: Optional[float]
    ask: Optional[float]
    expiry: dt.date
    underlying: str = ""

    def __post_init__(self):
        if self.kind not in (CALL, PUT):
            raise DomainError(f"unknown option kind {self.kind!r}")
        if not self.strike > 0:
            raise DomainError("strike must be positive")
        for name in ("bid", "ask"):
            v = getattr(self, name)
            if v is not None and not v >= 0:
                raise DomainError(f"{name} must be nonnegative")
        if self.bid is not None and self.ask is not None and self.bid > self.ask:
            raise DomainError(f"bid {self.bid} above ask {self.ask}")

    @property
    def contract_id(self):
        strike = f"{self.strike:.12g}"
        return f"{self.underlying}-{self.expiry:%d%b%y}-{strike}-{self.kind[0].upper()}".upper()

    def intrinsic(self, price):
        p = np.asarray(price, dtype=float)
        if self.kind == CALL:
            return np.maximum(p - self.strike, 0.0)
        return np.maximum(self.strike - p, 0.0)

    def premium(self, side):
        """Executable premium for ``side``: the ask when buying, the bid when selling."""
        value = self.ask if side == LONG else self.bid
        if value is None:
            which = "ask" if side == LONG else "bid"
            raise ChainDataError(f"{self.contract_id} has no {which} to go {side}")
        return value


@dataclass(frozen=True)
class PortfolioLeg:
    quote: OptionQuote
    theta: float

    @property
    def side(self):
        return LONG if self.theta > 0 else SHORT

    @property
    def premium(self):
        return self.quote.premium(self.side)


def leg_payoff(leg: PortfolioLeg, price):
    """``|theta|`` contracts of the leg's option on the side given by the sign of theta."""
    if leg.theta == 0:
        return _scalar_or_array(np.zeros_like(np.asarray(price, dtype=float)))
    q = leg.quote
    per_contract = payoff_vanilla(q.kind, leg.side, price, q.strike, leg.premium)
    return _scalar_or_array(abs(leg.theta) * np.asarray(per_contract))


def portfolio_payoff(legs: Sequence[PortfolioLeg], price):
    total = np.zeros_like(np.asarray(price, dtype=float))
    for leg in legs:
        total = total + leg_payoff(leg, price)
    return _scalar_or_array(total)


@dataclass(frozen=True)
class OptionsChain:
    timestamp: str
    underlying: str
    spot: float
    quotes: tuple = field(default_factory=tuple)

    def __post_init__(self):
        if not self.spot > 0:
            raise DomainError("spot must be positive")
        for i, q in enumerate(self.quotes):
            if q.underlying != self.underlying:
                raise ChainSchemaError(f"underlying {q.underlying!r} != chain {self.underlying!r}", i)

    def __len__(self):
        return len(self.quotes)

    def with_expiries(self, expiries):
        """Sub-chain restricted to the given expiry dates."""
        keep = set(expiries)
        return replace(self, quotes=tuple(q for q in self.quotes if q.expiry in keep))


def _decimal(value, name, index):
    if value is None:
        return None
    if not isinstance(value, str):
        raise ChainSchemaError(f"{name} must be a decimal string, got {value!r}", index)
    try:
        d = Decimal(value)
    except InvalidOperation:
        raise ChainSchemaError(f"{name} is not a decimal number: {value!r}", index) from None
    if not d.is_finite():
        raise ChainSchemaError(f"{name} must be finite", index)
    return d


def _check_fields(record, expected, index):
    if not isinstance(record, dict):
        raise ChainSchemaError("expected an object", index)
    keys = tuple(record)
    unknown = [k for k in keys if k not in expected]
    if unknown:
        raise ChainSchemaError(f"unknown field(s) {unknown}", index)
    if keys != expected:
        raise ChainSchemaError(f"fields must be exactly {list(expected)} in that order, got {list(keys)}", index)


def _read_records(text):
    stripped = text.lstrip()
    if stripped.startswith("["):
        try:
            records = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ChainDataError(f"cannot parse snapshot: {exc}") from None
        if not isinstance(records, list):
            raise ChainDataError("array-form snapshot must be a JSON array")
        return records
    records = []
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip():
            continue
        try:
            records.append(json.loads(line))
        except json.JSONDecodeError as exc:
            raise ChainDataError(f"cannot parse snapshot line {lineno}: {exc}") from None
    return records


def parse_chain(text):
    records = _read_records(text)
    if not records:
        raise ChainDataError("snapshot has no header")
    header = records[0]
    if not isinstance(header, dict):
        raise ChainDataError("snapshot header must be an object")
    try:
        _check_fields(header, HEADER_FIELDS, None)
    except ChainSchemaError as exc:
        raise ChainSchemaError(f"header: {exc}") from None
    if header["premium_denomination"] not in DENOMINATIONS:
        raise ChainSchemaError(f"premium_denomination must be one of {DENOMINATIONS}")
    spot = _decimal(header["spot"], "spot", None)
    if spot is None or spot <= 0:
        raise ChainSchemaError("spot must be a positive decimal string")
    underlying = header["underlying"]
    in_underlying = header["premium_denomination"] == "underlying"

    quotes = []
    for i, rec in enumerate(records[1:]):
        _check_fields(rec, QUOTE_FIELDS, i)
        if rec["kind"] not in (CALL, PUT):
            raise ChainSchemaError(f"kind must be 'call' or 'put', got {rec['kind']!r}", i)
        try:
            expiry = dt.date.fromisoformat(rec["expiry"])
        except (TypeError, ValueError):
            raise ChainSchemaError(f"expiry is not an ISO-8601 date: {rec['expiry']!r}", i) from None
        strike = _decimal(rec["strike"], "strike", i)
        if strike is None or strike <= 0:
            raise ChainSchemaError("strike must be a positive decimal string", i)
        bid = _decimal(rec["bid"], "bid", i)
        ask = _decimal(rec["ask"], "ask", i)
        for name, v in (("bid", bid), ("ask", ask)):
            if v is not None and v < 0:
                raise ChainSchemaError(f"{name} must be nonnegative", i)
        if bid is not None and ask is not None and bid > ask:
            raise ChainSchemaError(f"bid {bid} exceeds ask {ask}", i)
        if in_underlying:
            bid = None if bid is None else bid * spot
            ask = None if ask is None else ask * spot
        quotes.append(OptionQuote(
            kind=rec["kind"],
            strike=float(strike),
            bid=None if bid is None else float(bid),
            ask=None if ask is None else float(ask),
            expiry=expiry,
            underlying=underlying,
        ))
    if not quotes:
        raise EmptyChainError("options chain has no quotes")
    return OptionsChain(str(header["timestamp"]), underlying, float(spot), tuple(quotes))


def load_chain(path):
    """Read a chain snapshot in line-delimited or array form."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ChainDataError(f"cannot read chain file {path}: {exc.strerror}") from None
    return parse_chain(text)


def _num(x):
    return None if x is None else repr(float(x))


def chain_records(chain: OptionsChain):
    header = {
        "timestamp": chain.timestamp,
        "underlying": chain.underlying,
        "spot": _num(chain.spot),
        "premium_denomination": "quote",
    }
    records = [header]
    for q in chain.quotes:
        records.append({
            "kind": q.kind,
            "strike": _num(q.strike),
            "expiry": q.expiry.isoformat(),
            "bid": _num(q.bid),
            "ask": _num(q.ask),
        })
    return records


def dump_chain(chain: OptionsChain, path, form="lines"):
    """Write ``chain`` with premiums in quote-token units. ``form`` is ``"lines"`` or ``"array"``."""
    records = chain_records(chain)
    if form == "lines":
        text = "".join(json.dumps(r) + "\n" for r in records)
    elif form == "array":
        text = json.dumps(records, indent=1) + "\n"
    else:
        raise ValueError(f"unknown form {form!r}")
    Path(path).write_text(text, encoding="utf-8")


def synthetic_chain(spot, lo=0.2, hi=4.0, step=0.02, premium=0.0,
                    expiry=dt.date(2030, 1, 1), underlying="SYN", timestamp="1970-01-01T00:00:00Z"):
    """Calls and puts at strikes ``spot * m`` for ``m`` in ``lo, lo + step, ..., hi``."""
    n = int(round((hi - lo) / step))
    quotes = []
    for i in range(n + 1):
        k = spot * round(lo + i * step, 10)
        for kind in (CALL, PUT):
            quotes.append(OptionQuote(kind, k, premium, premium, expiry, underlying))
    return OptionsChain(timestamp, underlying, float(spot), tuple(quotes))
