# -*- coding: utf-8 -*-

"""
Validation of the measure against economic data:
    - year-over-year CPI/PPI change and its correlation with the measure (Pearson r, two-sided p),
    - release delay statistics,
    - the treasury regression  yield(t, T) = alpha_T + beta_T * measure(t) + e(t, T).

Student-t probabilities come from the regularized incomplete beta function:
    P(|T| > t) = I_x(df/2, 1/2)  with  x = df / (df + t**2)
"""

import datetime
import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Optional, Union

import numpy as np
import pandas as pd
from scipy.special import betainc

from hawkdove.core import HawkdoveError, InputError
from hawkdove.core.artifacts import read_csv_frame
from hawkdove.core.logger import module_logger
from hawkdove.measure import MeasurePoint

mlogger = module_logger(__name__)

YIELD_PREFIX = "yield_"
DEFAULT_MAX_YIELD_LAG_DAYS = 5
MIN_YOY_OBSERVATIONS = 13


class EconometricsError(HawkdoveError):
    pass


class EconDataError(InputError, EconometricsError):
    pass


class Frequency(Enum):
    Monthly = "monthly"
    Daily = "daily"


class AlignMode(Enum):
    # Earliest observation on or after the release date.
    NEXT = "next"
    # Latest observation on or before the release date.
    SAME_MONTH = "same-month"


class Significance(Enum):
    NONE = ""
    TEN = "*"
    FIVE = "**"
    ONE = "***"

    @classmethod
    def from_p(cls, p: float) -> "Significance":
        if p < 0.01:
            return cls.ONE
        if p < 0.05:
            return cls.FIVE
        if p < 0.10:
            return cls.TEN
        return cls.NONE


@dataclass(frozen=True)
class ChairPeriod:
    name: str
    start: datetime.date
    end: Optional[datetime.date] = None

    @property
    def label(self) -> str:
        end = self.end.year if self.end else "present"
        return f"{self.name} ({self.start.year}-{end})"

    def __contains__(self, d: datetime.date) -> bool:
        return self.start <= d and (self.end is None or d <= self.end)


CHAIR_PERIODS = (
    ChairPeriod("Greenspan", datetime.date(1996, 1, 1), datetime.date(2006, 1, 31)),
    ChairPeriod("Bernanke", datetime.date(2006, 2, 1), datetime.date(2014, 1, 31)),
    ChairPeriod("Yellen", datetime.date(2014, 2, 1), datetime.date(2018, 2, 4)),
    ChairPeriod("Powell", datetime.date(2018, 2, 5)),
)


# Series

class EconSeries:
    """
    Named, date-ordered observations without gaps in the values themselves.
    Dates are held as a pandas DatetimeIndex.
    """

    def __init__(self, name: str, values: pd.Series, frequency: Frequency = Frequency.Monthly):
        values = pd.Series(values, dtype=float)
        values.index = pd.DatetimeIndex(values.index)
        if not values.index.is_monotonic_increasing or values.index.has_duplicates:
            raise EconometricsError("%s: observation dates must be strictly increasing" % name)
        if values.isna().any():
            raise EconometricsError("%s: missing values among stored observations" % name)
        self.name = name
        self.frequency = frequency
        self._values = values.rename(name)

    @classmethod
    def from_pairs(cls, name: str, observations: Iterable[tuple[datetime.date, float]],
                   frequency: Frequency = Frequency.Monthly) -> "EconSeries":
        observations = list(observations)
        index = pd.DatetimeIndex([pd.Timestamp(d) for d, _ in observations])
        return cls(name, pd.Series([v for _, v in observations], index=index), frequency)

    @property
    def values(self) -> pd.Series:
        return self._values

    @property
    def observations(self) -> list[tuple[datetime.date, float]]:
        return [(ts.date(), float(v)) for ts, v in self._values.items()]

    def __len__(self):
        return len(self._values)

    def __repr__(self):
        return f"{self.__class__.__name__}({self.name}, {self.frequency.value}, n={len(self)})"


def _read_dated_frame(path: Path) -> pd.DataFrame:
    try:
        frame = read_csv_frame(path)
    except (OSError, pd.errors.ParserError, UnicodeDecodeError) as e:
        raise EconDataError("Unreadable data file %s: %s" % (path, e)) from e
    if "date" not in frame.columns:
        raise EconDataError("%s: missing column date" % path)
    try:
        frame.index = pd.DatetimeIndex(pd.to_datetime(frame.pop("date"), format="%Y-%m-%d"))
    except ValueError as e:
        raise EconDataError("%s: malformed date: %s" % (path, e)) from None
    return frame.sort_index()


def _numeric(frame: pd.DataFrame, column: str, path: Path) -> pd.Series:
    # FRED marks missing observations with "." and treasury exports leave them empty.
    raw = frame[column].str.strip().replace({".": "", "ND": ""})
    values = pd.to_numeric(raw.replace("", np.nan), errors="coerce")
    bad = values.isna() & (raw != "")
    if bad.any():
        raise EconDataError("%s: non-numeric %s on %s" % (path, column, bad.idxmax().date()))
    return values


def load_econ_csv(path: Union[str, Path], name: Optional[str] = None, column: str = "value") -> EconSeries:
    """Monthly {date, value} CSV, such as a raw CPI or PPI index export."""
    path = Path(path)
    frame = _read_dated_frame(path)
    if column not in frame.columns:
        raise EconDataError("%s: missing column %s" % (path, column))
    values = _numeric(frame, column, path)
    dropped = int(values.isna().sum())
    if dropped:
        mlogger.warning("%s: %d empty observations skipped", path, dropped)
    return EconSeries(name or path.stem, values.dropna(), Frequency.Monthly)


def load_treasury_csv(path: Union[str, Path]) -> dict[str, EconSeries]:
    """
    Daily {date, yield_3m, yield_1y, yield_10y, ...} CSV in percent. Returns one series per maturity,
    keyed by the column suffix ("3m"); empty cells are dropped per maturity.
    """
    path = Path(path)
    frame = _read_dated_frame(path)
    columns = [c for c in frame.columns if c.startswith(YIELD_PREFIX)]
    if not columns:
        raise EconDataError("%s: no %s* columns" % (path, YIELD_PREFIX))

    result = {}
    for column in columns:
        maturity = column[len(YIELD_PREFIX):]
        result[maturity] = EconSeries(maturity, _numeric(frame, column, path).dropna(), Frequency.Daily)
    return result


def yoy_percent_change(series: EconSeries) -> EconSeries:
    """
    out(t) = 100 * (x(t) / x(t - 12 months) - 1). The first 12 months have no prior value and are dropped;
    later dates whose prior observation is missing are skipped with a warning.
    """
    if series.frequency is not Frequency.Monthly:
        raise EconometricsError("%s: year-over-year change needs a monthly series" % series.name)
    if len(series) < MIN_YOY_OBSERVATIONS:
        raise EconometricsError("%s: %d observations, need at least %d"
                                % (series.name, len(series), MIN_YOY_OBSERVATIONS))

    values = series.values
    first = values.index[0]
    prior_index = values.index - pd.DateOffset(months=12)
    prior = values.reindex(prior_index)
    prior.index = values.index

    skipped = values.index[prior.isna().to_numpy() & (prior_index >= first)]
    for ts in skipped:
        mlogger.warning("%s: no observation 12 months before %s, skipped", series.name, ts.date())
    if (prior <= 0).any():
        raise EconometricsError("%s: non-positive index level" % series.name)

    change = (100.0 * (values / prior - 1.0)).dropna()
    return EconSeries(f"{series.name}_yoy", change, Frequency.Monthly)


# Alignment

def _measure_frame(series: Sequence[MeasurePoint]) -> pd.DataFrame:
    points = [p for p in series if p.defined]
    return pd.DataFrame({
        "date": pd.DatetimeIndex([pd.Timestamp(p.release_date) for p in points]),
        "measure": [p.value for p in points],
    }).sort_values("date", kind="stable")


def _align(series: Sequence[MeasurePoint], other: EconSeries, direction: str,
           tolerance: Optional[pd.Timedelta], what: str) -> pd.DataFrame:
    left = _measure_frame(series)
    right = other.values.rename("value").rename_axis("obs_date").reset_index()
    right["obs_date"] = right["obs_date"].astype(left["date"].dtype)
    merged = pd.merge_asof(left, right.assign(date=right["obs_date"]), on="date", direction=direction,
                           tolerance=tolerance, allow_exact_matches=True)

    unmatched = merged["value"].isna()
    for ts in merged.loc[unmatched, "date"]:
        mlogger.warning("No %s observation for the release on %s, dropped", what, ts.date())
    return merged.loc[~unmatched].reset_index(drop=True)


def align_next_release(series: Sequence[MeasurePoint], econ: EconSeries, mode: AlignMode = AlignMode.NEXT) \
        -> pd.DataFrame:
    """
    Pairs every measure point with an observation of the monthly series. Frame columns:
    date, measure, obs_date, value.
    """
    if not series or not len(econ):
        raise EconometricsError("Alignment needs a non-empty measure series and %s series" % econ.name)
    direction = "forward" if mode is AlignMode.NEXT else "backward"
    return _align(series, econ, direction, None, econ.name)


def align_yield(series: Sequence[MeasurePoint], treasury: EconSeries,
                max_lag_days: int = DEFAULT_MAX_YIELD_LAG_DAYS) -> pd.DataFrame:
    """
    Pairs every measure point with the yield on its release date, or the next trading day within
    max_lag_days; shifted pairs are flagged in column "shifted".
    """
    if not series or not len(treasury):
        return pd.DataFrame(columns=["date", "measure", "obs_date", "value", "shifted"])
    aligned = _align(series, treasury, "forward", pd.Timedelta(days=max_lag_days), f"{treasury.name} yield")
    aligned["shifted"] = aligned["obs_date"] != aligned["date"]
    shifted = int(aligned["shifted"].sum())
    if shifted:
        mlogger.warning("%d releases on non-trading days paired with a later %s yield", shifted, treasury.name)
    return aligned


# Statistics

def two_sided_t_p(t: float, df: float) -> float:
    if math.isinf(t):
        return 0.0
    return float(betainc(df / 2.0, 0.5, df / (df + t * t)))


def student_t_cdf(t: float, df: float) -> float:
    if df <= 0:
        raise EconometricsError("Degrees of freedom must be positive: %s" % df)
    tail = 0.5 * two_sided_t_p(t, df)
    return 1.0 - tail if t > 0 else tail


def _as_array(values, what: str) -> np.ndarray:
    a = np.asarray(values, dtype=float)
    if a.ndim != 1:
        raise EconometricsError("%s must be one-dimensional" % what)
    if not np.isfinite(a).all():
        raise EconometricsError("%s contains non-finite values" % what)
    return a


@dataclass(frozen=True)
class CorrelationResult:
    r: float
    p_value: float
    n: int
    avg_delay_days: float = 0.0

    def cell(self) -> str:
        return f"{self.r:.2f}({self.p_value:.1e})"

    def as_dict(self) -> dict:
        return {"r": self.r, "p_value": self.p_value, "n": self.n, "avg_delay_days": self.avg_delay_days}


def pearson(x: Sequence[float], y: Sequence[float], avg_delay_days: float = 0.0) -> CorrelationResult:
    x = _as_array(x, "x")
    y = _as_array(y, "y")
    if len(x) != len(y):
        raise EconometricsError("Length mismatch: %d vs %d" % (len(x), len(y)))
    n = len(x)
    if n < 3:
        raise EconometricsError("Correlation needs at least 3 pairs, got %d" % n)

    xm = x - x.mean()
    ym = y - y.mean()
    sxx = float(np.dot(xm, xm))
    syy = float(np.dot(ym, ym))
    if sxx == 0.0 or syy == 0.0:
        raise EconometricsError("Correlation undefined for a constant variable")

    r = float(np.dot(xm, ym) / math.sqrt(sxx * syy))
    r = max(-1.0, min(1.0, r))
    df = n - 2
    if abs(r) == 1.0:
        p = 0.0
    else:
        t = r * math.sqrt(df / (1.0 - r * r))
        p = two_sided_t_p(t, df)
    return CorrelationResult(r, p, n, avg_delay_days)


def delay_stats(series: Iterable[MeasurePoint]) -> float:
    """Mean days from meeting to release over the points that have a meeting date; 0 when none do."""
    delays = [p.delay_days for p in series if p.meeting_date is not None]
    return float(np.mean(delays)) if delays else 0.0


@dataclass(frozen=True)
class RegressionResult:
    alpha: float
    beta: float
    se_alpha: float
    se_beta: float
    t_alpha: float
    t_beta: float
    p_alpha: float
    p_beta: float
    n: int
    r_squared: float
    residuals: np.ndarray = field(repr=False, compare=False)

    @property
    def stars_alpha(self) -> Significance:
        return Significance.from_p(self.p_alpha)

    @property
    def stars_beta(self) -> Significance:
        return Significance.from_p(self.p_beta)

    def as_dict(self) -> dict:
        return {
            "alpha": self.alpha, "beta": self.beta,
            "se_alpha": self.se_alpha, "se_beta": self.se_beta,
            "t_alpha": self.t_alpha, "t_beta": self.t_beta,
            "p_alpha": self.p_alpha, "p_beta": self.p_beta,
            "stars_alpha": self.stars_alpha.value, "stars_beta": self.stars_beta.value,
            "n": self.n, "r_squared": self.r_squared,
        }


def _t_and_p(coef: float, se: float, df: int) -> tuple[float, float]:
    if se == 0.0:
        # Noiseless fit.
        if coef == 0.0:
            return math.nan, 1.0
        return math.copysign(math.inf, coef), 0.0
    t = coef / se
    return t, two_sided_t_p(t, df)


def simple_ols(x: Sequence[float], y: Sequence[float]) -> RegressionResult:
    x = _as_array(x, "x")
    y = _as_array(y, "y")
    if len(x) != len(y):
        raise EconometricsError("Length mismatch: %d vs %d" % (len(x), len(y)))
    n = len(x)
    if n < 3:
        raise EconometricsError("Regression needs at least 3 observations, got %d" % n)

    x_bar = x.mean()
    y_bar = y.mean()
    xm = x - x_bar
    sxx = float(np.dot(xm, xm))
    if sxx == 0.0:
        raise EconometricsError("Regression undefined for a constant regressor")

    beta = float(np.dot(xm, y - y_bar) / sxx)
    alpha = float(y_bar - beta * x_bar)
    residuals = y - (alpha + beta * x)
    rss = float(np.dot(residuals, residuals))
    df = n - 2
    sigma = math.sqrt(rss / df)
    se_beta = sigma / math.sqrt(sxx)
    se_alpha = sigma * math.sqrt(1.0 / n + x_bar * x_bar / sxx)
    t_alpha, p_alpha = _t_and_p(alpha, se_alpha, df)
    t_beta, p_beta = _t_and_p(beta, se_beta, df)

    ym = y - y_bar
    tss = float(np.dot(ym, ym))
    r_squared = 1.0 - rss / tss if tss > 0.0 else 0.0

    return RegressionResult(alpha, beta, se_alpha, se_beta, t_alpha, t_beta, p_alpha, p_beta, n, r_squared,
                            residuals)


# Report tables

@dataclass(frozen=True)
class CorrelationRow:
    sample: str
    results: dict[str, CorrelationResult]
    avg_delay_days: float


def correlate(series: Sequence[MeasurePoint], econ: dict[str, EconSeries], mode: AlignMode = AlignMode.NEXT,
              sample: str = "Full Sample") -> CorrelationRow:
    """Correlates one measure series with every (already year-over-year) econ series."""
    delay = delay_stats(series)
    results = {}
    for name, e in econ.items():
        aligned = align_next_release(series, e, mode)
        results[name] = pearson(aligned["measure"], aligned["value"], delay)
        mlogger.info("%s vs %s: r=%.4f p=%.3g n=%d", sample, name, results[name].r, results[name].p_value,
                     results[name].n)
    return CorrelationRow(sample, results, delay)


def chair_rows(series: Sequence[MeasurePoint], econ: dict[str, EconSeries], mode: AlignMode = AlignMode.NEXT,
               periods: Sequence[ChairPeriod] = CHAIR_PERIODS) -> list[CorrelationRow]:
    rows = []
    for period in periods:
        sub = [p for p in series if p.release_date in period]
        try:
            rows.append(correlate(sub, econ, mode, period.label))
        except EconometricsError as e:
            mlogger.warning("Skipping %s: %s", period.label, e)
    return rows


def correlation_table(rows: Iterable[CorrelationRow]) -> pd.DataFrame:
    """One row per sample; "r(p)" cells per econ series plus numeric columns and the average delay."""
    records = []
    for row in rows:
        rec = {"sample": row.sample}
        for name, res in row.results.items():
            rec[name] = res.cell()
        rec["avg_delay_days"] = round(row.avg_delay_days, 2)
        for name, res in row.results.items():
            rec[f"{name}_r"] = res.r
            rec[f"{name}_p"] = res.p_value
            rec[f"{name}_n"] = res.n
        records.append(rec)
    return pd.DataFrame(records)


def regress_yields(series: Sequence[MeasurePoint], treasury: dict[str, EconSeries], maturities: Sequence[str],
                   max_lag_days: int = DEFAULT_MAX_YIELD_LAG_DAYS) -> dict[str, RegressionResult]:
    results = {}
    for maturity in maturities:
        if maturity not in treasury:
            raise EconDataError("No %s%s column in the treasury data" % (YIELD_PREFIX, maturity))
        aligned = align_yield(series, treasury[maturity], max_lag_days)
        results[maturity] = simple_ols(aligned["measure"], aligned["value"])
    return results


def regression_table(panels: dict[str, dict[str, RegressionResult]]) -> pd.DataFrame:
    """One row per (panel, maturity) with starred coefficients and the raw statistics."""
    records = []
    for panel, by_maturity in panels.items():
        for maturity, res in by_maturity.items():
            records.append({
                "panel": panel,
                "maturity": maturity,
                "alpha_starred": f"{res.alpha:.2f}{res.stars_alpha.value}",
                "beta_starred": f"{res.beta:.2f}{res.stars_beta.value}",
                **{k: v for k, v in res.as_dict().items() if k not in ("stars_alpha", "stars_beta")},
            })
    return pd.DataFrame(records)
