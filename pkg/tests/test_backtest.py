# -*- coding: utf-8 -*-

import datetime

import pandas as pd
import pytest

from hawkdove.backtest import (BacktestError, buy_and_hold, compare, load_price_csv, Position, PriceDataError,
                               PriceSeries, run_strategy, ShortConvention, value_paths)
from hawkdove.corpus import DocumentKind
from hawkdove.measure import MeasurePoint

MONDAY = datetime.date(2021, 1, 4)


def _signal(day: datetime.date, value: float) -> MeasurePoint:
    # value in tenths: +2 -> 0.2
    tenths = round(value * 10)
    return MeasurePoint(f"s-{day}", DocumentKind.MeetingMinutes, day, max(tenths, 0), max(-tenths, 0), 10)


def _prices(values, start: datetime.date = MONDAY) -> PriceSeries:
    days = pd.bdate_range(start, periods=len(values))
    return PriceSeries("QQQ", pd.Series(values, index=days, dtype=float))


def _day(i: int) -> datetime.date:
    return pd.bdate_range(MONDAY, periods=i + 1)[-1].date()


class TestStrategy:
    def test_hawkish_then_dovish(self):
        prices = _prices([100.0, 110.0, 99.0])
        ledger = run_strategy([_signal(_day(0), 0.2), _signal(_day(1), -0.3)], prices)
        assert [e.position for e in ledger.entries] == [Position.Short, Position.Long, Position.Long]
        assert ledger.entries[1].portfolio_value == pytest.approx(90.0)
        assert ledger.final_value == pytest.approx(81.0)
        assert ledger.final_return_pct == pytest.approx(-19.0)

    def test_flat_prices(self):
        prices = _prices([42.0] * 6)
        signals = [_signal(_day(i), v) for i, v in enumerate([0.3, -0.2, 0.1, -0.5])]
        assert run_strategy(signals, prices).final_value == pytest.approx(100.0)

    def test_long_doubling(self):
        ledger = run_strategy([_signal(_day(0), -0.4)], _prices([50.0, 70.0, 100.0]))
        assert ledger.final_value == pytest.approx(200.0)

    def test_always_dovish_matches_buy_and_hold(self):
        prices = _prices([100.0, 103.0, 98.0, 105.0, 111.0, 107.0])
        signals = [_signal(_day(i), -0.1 * (i + 1)) for i in (0, 2, 3)]
        ledger = run_strategy(signals, prices)
        hold = buy_and_hold(prices, ledger.start, ledger.end)
        assert compare(ledger, hold) == pytest.approx(0.0, abs=1e-9)
        assert list(ledger.daily) == pytest.approx(list(hold.daily))

    def test_weekend_signal_executes_next_trading_day(self):
        prices = _prices([100.0, 101.0, 102.0, 103.0, 104.0, 105.0, 106.0])
        saturday = datetime.date(2021, 1, 9)
        ledger = run_strategy([_signal(saturday, -0.2)], prices)
        assert ledger.start == datetime.date(2021, 1, 11)
        assert ledger.final_value == pytest.approx(100.0 * 106.0 / 105.0)

    def test_zero_measure_keeps_position(self):
        prices = _prices([100.0, 90.0, 120.0])
        ledger = run_strategy([_signal(_day(0), -0.2), _signal(_day(1), 0.0)], prices)
        assert ledger.entries[1].position is Position.Long
        assert ledger.final_value == pytest.approx(120.0)

    def test_flat_before_first_signal(self):
        assert Position.from_measure(0.0, Position.Flat) is Position.Flat

    def test_short_wipeout(self):
        prices = _prices([100.0, 150.0, 250.0, 260.0])
        ledger = run_strategy([_signal(_day(0), 0.5)], prices)
        assert ledger.terminated == "short position wiped out"
        assert ledger.final_value == 0.0
        assert ledger.end == _day(2)
        with pytest.raises(BacktestError):
            compare(ledger, buy_and_hold(prices, ledger.start, prices.last_date))

    def test_explicit_end(self):
        prices = _prices([100.0, 110.0, 120.0, 130.0])
        ledger = run_strategy([_signal(_day(0), -0.1), _signal(_day(3), 0.1)], prices, end=_day(2))
        assert ledger.end == _day(2)
        assert ledger.final_value == pytest.approx(120.0)

    def test_end_on_weekend_closes_on_last_trading_day(self):
        prices = _prices([100.0, 100.0, 120.0, 150.0, 200.0, 210.0, 220.0])
        saturday = datetime.date(2021, 1, 9)
        ledger = run_strategy([_signal(_day(0), -0.2)], prices, end=saturday)
        assert ledger.end == datetime.date(2021, 1, 8)
        assert ledger.final_value == pytest.approx(200.0)
        assert ledger.final_value == pytest.approx(ledger.daily.iloc[-1])
        hold = buy_and_hold(prices, MONDAY, saturday)
        assert compare(ledger, hold) == pytest.approx(0.0, abs=1e-9)

    def test_short_to_weekend_end(self):
        prices = _prices([100.0, 90.0, 80.0, 85.0, 95.0, 70.0])
        ledger = run_strategy([_signal(_day(0), 0.3)], prices, end=datetime.date(2021, 1, 10))
        assert [e.date for e in ledger.entries] == [MONDAY, datetime.date(2021, 1, 8)]
        assert ledger.entries[-1].position is Position.Short
        assert ledger.final_value == pytest.approx(105.0)

    def test_coverage(self):
        prices = _prices([100.0, 101.0])
        with pytest.raises(BacktestError):
            run_strategy([_signal(MONDAY - datetime.timedelta(days=3), 0.2)], prices)
        with pytest.raises(BacktestError):
            run_strategy([], prices)

    def test_redundant_short_under_per_position(self):
        prices = _prices([100.0, 110.0, 99.0])
        single = run_strategy([_signal(_day(0), 0.2)], prices, convention=ShortConvention.PER_POSITION)
        repeated = run_strategy([_signal(_day(0), 0.2), _signal(_day(1), 0.5)], prices,
                                convention=ShortConvention.PER_POSITION)
        assert single.final_value == pytest.approx(101.0)
        assert repeated.final_value == pytest.approx(single.final_value)

    def test_redundant_short_re_anchors_per_signal(self):
        prices = _prices([100.0, 110.0, 99.0])
        repeated = run_strategy([_signal(_day(0), 0.2), _signal(_day(1), 0.5)], prices)
        assert repeated.convention is ShortConvention.PER_SIGNAL
        assert repeated.final_value == pytest.approx(99.0)

    def test_redundant_long_signals_are_harmless(self):
        prices = _prices([100.0, 110.0, 99.0, 120.0])
        single = run_strategy([_signal(_day(0), -0.2)], prices)
        repeated = run_strategy([_signal(_day(0), -0.2), _signal(_day(2), -0.6)], prices)
        assert repeated.final_value == pytest.approx(single.final_value)

    def test_frame(self):
        ledger = run_strategy([_signal(_day(0), 0.2), _signal(_day(1), -0.3)], _prices([100.0, 110.0, 99.0]))
        frame = ledger.frame()
        assert list(frame.columns) == ["date", "position", "portfolio_value", "signal_value", "error"]
        assert list(frame["position"]) == ["Short", "Long", "Long"]
        assert frame.loc[2, "signal_value"] == ""


class TestBuyAndHold:
    def test_halving(self):
        prices = _prices([80.0, 60.0, 40.0])
        ledger = buy_and_hold(prices, prices.first_date, prices.last_date)
        assert ledger.final_value == pytest.approx(50.0)
        assert ledger.final_return_pct == pytest.approx(-50.0)

    def test_doubling_from_weekend_start(self):
        prices = _prices([10.0, 11.0, 12.0, 13.0, 14.0, 15.0, 30.0])
        ledger = buy_and_hold(prices, datetime.date(2021, 1, 9), prices.last_date)
        assert ledger.start == datetime.date(2021, 1, 11)
        assert ledger.final_value == pytest.approx(200.0)

    def test_coverage(self):
        prices = _prices([10.0, 11.0])
        with pytest.raises(BacktestError):
            buy_and_hold(prices, prices.first_date, prices.last_date + datetime.timedelta(days=5))
        with pytest.raises(BacktestError):
            buy_and_hold(prices, prices.last_date, prices.first_date)

    def test_compare(self):
        prices = _prices([100.0, 105.0, 95.0])
        hold = buy_and_hold(prices, prices.first_date, prices.last_date)
        assert compare(hold, hold) == 0.0
        shorter = buy_and_hold(prices, prices.first_date, _day(1))
        with pytest.raises(BacktestError, match="different periods"):
            compare(hold, shorter)

    def test_value_paths(self):
        prices = _prices([100.0, 110.0, 99.0])
        strategy = run_strategy([_signal(_day(0), 0.2)], prices)
        hold = buy_and_hold(prices, strategy.start, strategy.end)
        frame = value_paths(strategy, hold)
        assert list(frame.columns) == ["date", "strategy", "buy_and_hold"]
        assert list(frame["date"]) == ["2021-01-04", "2021-01-05", "2021-01-06"]
        assert frame.loc[2, "buy_and_hold"] == pytest.approx(99.0)


class TestPriceFile:
    def test_load(self, write_csv):
        path = write_csv("qqq.csv", [{"date": "2021-01-05", "adjusted_close": "310.5"},
                                     {"date": "2021-01-04", "adjusted_close": "309.1"}])
        prices = load_price_csv(path)
        assert prices.symbol == "QQQ"
        assert prices.first_date == datetime.date(2021, 1, 4)
        assert prices.prices.iloc[-1] == 310.5

    def test_missing_column(self, write_csv):
        path = write_csv("qqq.csv", [{"date": "2021-01-04", "close": "1"}])
        with pytest.raises(PriceDataError, match="adjusted_close"):
            load_price_csv(path)

    def test_non_positive(self, write_csv):
        path = write_csv("qqq.csv", [{"date": "2021-01-04", "adjusted_close": "0"}])
        with pytest.raises(PriceDataError):
            load_price_csv(path)

    def test_unreadable(self, tmp_path):
        with pytest.raises(PriceDataError):
            load_price_csv(tmp_path / "absent.csv")
