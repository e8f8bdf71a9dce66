# -*- coding: utf-8 -*-

"""
Sign-of-measure long/short strategy on an index fund against buy-and-hold.

A positive (hawkish) measure opens a short position, a negative (dovish) one a long position and a zero
measure keeps the previous position (Flat before the first signal). Positions are taken at the close of the
signal date, or of the next trading day when the market is closed. No fees, no leverage.

Mark to market between anchor date a and day t, anchor value V:
    Long   V * P(t) / P(a)
    Short  V * (2 - P(t) / P(a))
    Flat   V
The short convention decides where the anchor sits: per-signal re-anchors at every signal, per-position only
when the position changes.
"""

import datetime
from collections.abc import Sequence
from dataclasses import dataclass, field
from enum import Enum, IntEnum
from pathlib import Path
from typing import Optional, Union

import pandas as pd

from hawkdove.core import HawkdoveError, InputError
from hawkdove.core.artifacts import read_csv_frame
from hawkdove.core.logger import module_logger
from hawkdove.measure import MeasurePoint

mlogger = module_logger(__name__)

INITIAL_VALUE = 100.0


class BacktestError(HawkdoveError):
    pass


class PriceDataError(InputError, BacktestError):
    pass


class Position(IntEnum):
    Short = -1
    Flat = 0
    Long = 1

    @classmethod
    def from_measure(cls, value: float, previous: "Position") -> "Position":
        if value > 0:
            return cls.Short
        if value < 0:
            return cls.Long
        return previous


class ShortConvention(Enum):
    PER_SIGNAL = "per-signal"
    PER_POSITION = "per-position"


class PriceSeries:
    """Adjusted closing prices of one symbol, strictly increasing dates, all positive."""

    def __init__(self, symbol: str, prices: pd.Series):
        prices = pd.Series(prices, dtype=float)
        prices.index = pd.DatetimeIndex(prices.index)
        if not prices.index.is_monotonic_increasing or prices.index.has_duplicates:
            raise BacktestError("%s: price dates must be strictly increasing" % symbol)
        if prices.isna().any() or (prices <= 0).any():
            raise BacktestError("%s: prices must be positive" % symbol)
        self.symbol = symbol
        self._prices = prices.rename(symbol)

    @classmethod
    def from_pairs(cls, symbol: str, observations: Sequence[tuple[datetime.date, float]]) -> "PriceSeries":
        index = pd.DatetimeIndex([pd.Timestamp(d) for d, _ in observations])
        return cls(symbol, pd.Series([p for _, p in observations], index=index))

    @property
    def prices(self) -> pd.Series:
        return self._prices

    @property
    def first_date(self) -> datetime.date:
        return self._prices.index[0].date()

    @property
    def last_date(self) -> datetime.date:
        return self._prices.index[-1].date()

    def trading_day_on_or_after(self, d: datetime.date) -> Optional[datetime.date]:
        pos = self._prices.index.searchsorted(pd.Timestamp(d), side="left")
        return self._prices.index[pos].date() if pos < len(self._prices) else None

    def window(self, start: datetime.date, end: datetime.date) -> pd.Series:
        return self._prices.loc[pd.Timestamp(start):pd.Timestamp(end)]

    def __len__(self):
        return len(self._prices)

    def __repr__(self):
        return f"{self.__class__.__name__}({self.symbol}, n={len(self)})"


def load_price_csv(path: Union[str, Path], symbol: Optional[str] = None) -> PriceSeries:
    """{date, adjusted_close} CSV."""
    path = Path(path)
    try:
        frame = read_csv_frame(path)
    except (OSError, pd.errors.ParserError, UnicodeDecodeError) as e:
        raise PriceDataError("Unreadable price file %s: %s" % (path, e)) from e
    missing = [c for c in ("date", "adjusted_close") if c not in frame.columns]
    if missing:
        raise PriceDataError("%s: missing columns %s" % (path, ", ".join(missing)))
    try:
        index = pd.DatetimeIndex(pd.to_datetime(frame["date"], format="%Y-%m-%d"))
        prices = pd.to_numeric(frame["adjusted_close"])
    except ValueError as e:
        raise PriceDataError("%s: %s" % (path, e)) from None
    try:
        return PriceSeries(symbol or path.stem.upper(), pd.Series(prices.to_numpy(), index=index).sort_index())
    except BacktestError as e:
        raise PriceDataError("%s: %s" % (path, e)) from None


@dataclass(frozen=True)
class LedgerEntry:
    date: datetime.date
    position: Position
    portfolio_value: float
    signal_value: Optional[float] = None
    error: Optional[str] = None


@dataclass(frozen=True)
class BacktestLedger:
    name: str
    entries: tuple[LedgerEntry, ...]
    daily: pd.Series = field(repr=False, compare=False)
    convention: Optional[ShortConvention] = None
    initial_value: float = INITIAL_VALUE

    @property
    def start(self) -> datetime.date:
        return self.entries[0].date

    @property
    def end(self) -> datetime.date:
        return self.entries[-1].date

    @property
    def terminated(self) -> Optional[str]:
        return self.entries[-1].error

    @property
    def final_value(self) -> float:
        return self.entries[-1].portfolio_value

    @property
    def final_return_pct(self) -> float:
        return self.final_value / self.initial_value * 100.0 - 100.0

    def frame(self) -> pd.DataFrame:
        return pd.DataFrame([{
            "date": e.date.isoformat(),
            "position": e.position.name,
            "portfolio_value": e.portfolio_value,
            "signal_value": "" if e.signal_value is None else e.signal_value,
            "error": e.error or "",
        } for e in self.entries], columns=["date", "position", "portfolio_value", "signal_value", "error"])

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "start": self.start,
            "end": self.end,
            "initial_value": self.initial_value,
            "final_value": self.final_value,
            "final_return_pct": self.final_return_pct,
            "short_convention": self.convention.value if self.convention else None,
            "entries": len(self.entries),
            "terminated": self.terminated,
        }


def _mark(anchor_value: float, anchor_price: float, price: float, position: Position) -> float:
    if position is Position.Long:
        return anchor_value * price / anchor_price
    if position is Position.Short:
        return anchor_value * (2.0 - price / anchor_price)
    return anchor_value


def _executions(signals: Sequence[MeasurePoint], prices: PriceSeries, end: datetime.date) \
        -> dict[datetime.date, float]:
    executions: dict[datetime.date, float] = {}
    for point in sorted(signals, key=lambda p: p.release_date):
        if not point.defined:
            continue
        day = prices.trading_day_on_or_after(point.release_date)
        if day is None or day > end:
            mlogger.warning("Signal %s on %s falls after the evaluation end %s, ignored",
                            point.doc_id, point.release_date, end)
            continue
        if day != point.release_date:
            mlogger.debug("Signal %s on %s executes on %s", point.doc_id, point.release_date, day)
        # Several signals on one execution day: the last one wins.
        executions[day] = point.value
    return executions


def run_strategy(signals: Sequence[MeasurePoint], prices: PriceSeries, end: Optional[datetime.date] = None,
                 convention: ShortConvention = ShortConvention.PER_SIGNAL) -> BacktestLedger:
    """
    Runs the strategy from the first signal to end (last price date when None). The ledger has one entry per
    execution day plus the last trading day on or before end; a wiped-out short ends the ledger with an error
    entry.
    """
    defined = [p for p in signals if p.defined]
    if not defined:
        raise BacktestError("No signals to trade on")
    first = min(p.release_date for p in defined)
    end = end or prices.last_date
    if first < prices.first_date or end > prices.last_date:
        raise BacktestError("Prices cover %s..%s, strategy needs %s..%s"
                            % (prices.first_date, prices.last_date, first, end))

    executions = _executions(defined, prices, end)
    if not executions:
        raise BacktestError("No signal executes on or before %s" % end)
    start = min(executions)

    entries = []
    daily = {}
    position = Position.Flat
    anchor_value = value = INITIAL_VALUE
    anchor_price = None
    for ts, price in prices.window(start, end).items():
        day = ts.date()
        if anchor_price is not None:
            value = _mark(anchor_value, anchor_price, price, position)
        if value <= 0:
            mlogger.error("Short position wiped out on %s", day)
            entries.append(LedgerEntry(day, position, 0.0, None, "short position wiped out"))
            daily[ts] = 0.0
            break
        daily[ts] = value

        if day in executions:
            signal = executions[day]
            new_position = Position.from_measure(signal, position)
            if convention is ShortConvention.PER_SIGNAL or new_position is not position or anchor_price is None:
                anchor_value, anchor_price = value, price
            position = new_position
            entries.append(LedgerEntry(day, position, value, signal))
    else:
        # last trading day on or before end
        if entries[-1].date != day:
            entries.append(LedgerEntry(day, position, value))

    ledger = BacktestLedger("strategy", tuple(entries), pd.Series(daily, name="strategy", dtype=float), convention)
    mlogger.info("Strategy %s..%s: %.2f%% (%s)", ledger.start, ledger.end, ledger.final_return_pct,
                 convention.value)
    return ledger


def buy_and_hold(prices: PriceSeries, start: datetime.date, end: datetime.date) -> BacktestLedger:
    """Always long from the close of start (or the next trading day) to end: value(t) = 100 * P(t) / P(start)."""
    if start > end:
        raise BacktestError("Start %s after end %s" % (start, end))
    if start < prices.first_date or end > prices.last_date:
        raise BacktestError("Prices cover %s..%s, buy-and-hold needs %s..%s"
                            % (prices.first_date, prices.last_date, start, end))

    window = prices.window(start, end)
    if window.empty:
        raise BacktestError("No trading day between %s and %s" % (start, end))
    values = INITIAL_VALUE * window / window.iloc[0]
    entries = tuple(LedgerEntry(ts.date(), Position.Long, float(v)) for ts, v in values.items())
    return BacktestLedger("buy_and_hold", entries, values.rename("buy_and_hold"))


def compare(ledger_a: BacktestLedger, ledger_b: BacktestLedger) -> float:
    """Excess return of a over b in percentage points."""
    if ledger_a.start != ledger_b.start or ledger_a.end != ledger_b.end:
        raise BacktestError("Ledgers cover different periods: %s..%s vs %s..%s"
                            % (ledger_a.start, ledger_a.end, ledger_b.start, ledger_b.end))
    return ledger_a.final_return_pct - ledger_b.final_return_pct


def value_paths(*ledgers: BacktestLedger) -> pd.DataFrame:
    """Daily portfolio values of several ledgers side by side, one column per ledger."""
    frame = pd.concat([ledger.daily.rename(ledger.name) for ledger in ledgers], axis=1)
    frame.index = [ts.date().isoformat() for ts in frame.index]
    return frame.rename_axis("date").reset_index()
