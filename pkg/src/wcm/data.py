"""Price-series ingestion, market-index detrending, log returns, and
rolling-window SIX estimation.

The input is a CSV with a ``date`` column (ISO-8601, strictly increasing) and
one strictly positive price column per asset; one column may be designated as
the market index.  Estimation runs on log returns.  The ``rank`` estimator
applies the rank-based SIX to each window; the ``lognormal`` estimator
computes sample correlations of log returns and maps them through the
Gaussian-copula arcsine identity.
"""

from __future__ import annotations

import csv
import datetime as dt
import json
import math
import warnings
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .errors import DimensionError, DomainError
from .indices import (
    _column_ranks,
    _pearson_on_ranks,
    gaussian_spearman,
    six_bounds,
)
from .weights import WeightVector, as_weight_vector

__all__ = [
    "PriceSeries",
    "LoadReport",
    "WindowSix",
    "RollingSixSeries",
    "load_prices",
    "detrend_by_index",
    "log_returns",
    "rolling_windows",
    "rolling_six",
]

DEFAULT_WINDOW = 84  # "four months" of observations at ~21 trading days/month


@dataclass(frozen=True)
class LoadReport:
    rows_read: int
    rows_kept: int
    dropped: tuple[tuple[str, str], ...]  # (date string, reason)

    @property
    def rows_dropped(self) -> int:
        return len(self.dropped)


@dataclass(frozen=True)
class PriceSeries:
    """Dated multi-asset price table with an optional aligned market index."""

    dates: tuple[dt.date, ...]
    tickers: tuple[str, ...]
    prices: np.ndarray
    market_index: np.ndarray | None = None
    load_report: LoadReport | None = None

    def __post_init__(self) -> None:
        prices = np.asarray(self.prices, dtype=float)
        if prices.ndim != 2 or prices.shape != (len(self.dates), len(self.tickers)):
            raise DimensionError(
                f"prices shape {prices.shape} does not match "
                f"{len(self.dates)} dates x {len(self.tickers)} tickers"
            )
        if np.any(prices <= 0.0) or not np.all(np.isfinite(prices)):
            raise DomainError("prices must be finite and strictly positive")
        for a, b in zip(self.dates, self.dates[1:]):
            if not a < b:
                raise DomainError(f"dates must be strictly increasing ({a} then {b})")
        if self.market_index is not None:
            idx = np.asarray(self.market_index, dtype=float)
            if idx.shape != (len(self.dates),):
                raise DimensionError("market index must align with the dates")
            if np.any(idx <= 0.0) or not np.all(np.isfinite(idx)):
                raise DomainError("market index must be finite and strictly positive")
            object.__setattr__(self, "market_index", idx)
        object.__setattr__(self, "prices", prices)

    @property
    def n(self) -> int:
        return len(self.dates)

    @property
    def d(self) -> int:
        return len(self.tickers)


def _parse_date(text: str) -> dt.date:
    try:
        return dt.date.fromisoformat(text.strip())
    except ValueError as exc:
        raise DomainError(f"malformed date {text!r}: {exc}") from exc


def _parse_price(text: str) -> float | None:
    text = text.strip()
    if not text:
        return None
    try:
        value = float(text)
    except ValueError:
        return None
    if not math.isfinite(value) or value <= 0.0:
        return None
    return value


def load_prices(path, index_column: str | None = None) -> PriceSeries:
    """Read a price CSV (header ``date,<ticker>,...``) into a PriceSeries.

    Rows with missing cells or non-positive prices are dropped and counted in
    the load report.  Duplicate dates and out-of-order dates are errors, not
    silently repaired.
    """
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DomainError(f"{path}: empty file") from None
        if not header or header[0].strip().lower() != "date":
            raise DomainError(f"{path}: first column must be 'date', got {header[:1]!r}")
        tickers = [h.strip() for h in header[1:]]
        if len(tickers) < 1:
            raise DomainError(f"{path}: no price columns")
        if index_column is not None and index_column not in tickers:
            raise DomainError(f"{path}: index column {index_column!r} not in {tickers}")
        rows: list[tuple[dt.date, list[float]]] = []
        dropped: list[tuple[str, str]] = []
        rows_read = 0
        for record in reader:
            if not record or all(not cell.strip() for cell in record):
                continue
            rows_read += 1
            date_text = record[0]
            date = _parse_date(date_text)
            cells = record[1:]
            if len(cells) != len(tickers):
                dropped.append((date_text, "wrong number of cells"))
                continue
            prices = [_parse_price(c) for c in cells]
            if any(p is None for p in prices):
                dropped.append((date_text, "missing or non-positive price"))
                continue
            rows.append((date, prices))  # type: ignore[arg-type]
    if not rows:
        raise DomainError(f"{path}: no usable rows")
    seen = set()
    for date, _ in rows:
        if date in seen:
            raise DomainError(f"{path}: duplicate date {date}")
        seen.add(date)
    dates = [date for date, _ in rows]
    if dates != sorted(dates):
        raise DomainError(f"{path}: dates are not sorted; refusing to reorder")
    table = np.array([p for _, p in rows])
    report = LoadReport(rows_read=rows_read, rows_kept=len(rows), dropped=tuple(dropped))
    market_index = None
    if index_column is not None:
        pos = tickers.index(index_column)
        market_index = table[:, pos]
        table = np.delete(table, pos, axis=1)
        tickers = tickers[:pos] + tickers[pos + 1:]
    return PriceSeries(
        dates=tuple(dates),
        tickers=tuple(tickers),
        prices=table,
        market_index=market_index,
        load_report=report,
    )


def detrend_by_index(p: PriceSeries) -> PriceSeries:
    """Divide every price by the market index on the same date."""
    if p.market_index is None:
        raise DomainError("no market index attached to this series")
    return PriceSeries(
        dates=p.dates,
        tickers=p.tickers,
        prices=p.prices / p.market_index[:, None],
        market_index=p.market_index,
        load_report=p.load_report,
    )


def log_returns(p: PriceSeries) -> np.ndarray:
    """Row ``t`` is ``ln(P_{t+1} / P_t)`` per ticker; shape ``(n-1, d)``."""
    if p.n < 2:
        raise DimensionError("need at least 2 price rows for returns")
    logs = np.log(p.prices)
    return np.diff(logs, axis=0)


def rolling_windows(n: int, window: int, step: int) -> list[tuple[int, int]]:
    """Half-open index ranges ``[start, start + window)`` advancing by ``step``:
    exactly ``floor((n - window) / step) + 1`` of them."""
    if window < 1 or step < 1:
        raise DomainError("window and step must be >= 1")
    if window > n:
        raise DimensionError(f"window {window} exceeds series length {n}")
    return [(s, s + window) for s in range(0, n - window + 1, step)]


@dataclass(frozen=True)
class WindowSix:
    end_date: dt.date
    six: float
    estimator: str
    n_window: int
    n_pairs: int
    within_bounds: bool


@dataclass(frozen=True)
class RollingSixSeries:
    """Per-window SIX values; windows index return rows, and each window is
    stamped with the price date of its last return."""

    weights: tuple[float, ...]
    window: int
    step: int
    estimator: str
    entries: tuple[WindowSix, ...]
    skipped: tuple[tuple[dt.date, str], ...] = field(default_factory=tuple)

    def to_csv(self, path_or_buf) -> None:
        if hasattr(path_or_buf, "write"):
            self._write_csv(path_or_buf)
        else:
            with open(path_or_buf, "w", newline="") as fh:
                self._write_csv(fh)

    def _write_csv(self, fh) -> None:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["end_date", "six", "estimator", "n_window"])
        for entry in self.entries:
            writer.writerow(
                [entry.end_date.isoformat(), repr(entry.six), entry.estimator, entry.n_window]
            )

    def to_json_dict(self) -> dict:
        return {
            "weights": list(self.weights),
            "window": self.window,
            "step": self.step,
            "estimator": self.estimator,
            "entries": [
                {
                    "end_date": e.end_date.isoformat(),
                    "six": e.six,
                    "estimator": e.estimator,
                    "n_window": e.n_window,
                    "n_pairs": e.n_pairs,
                    "within_bounds": e.within_bounds,
                }
                for e in self.entries
            ],
            "skipped": [[d.isoformat(), reason] for d, reason in self.skipped],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), sort_keys=True)


def _window_pair_rhos(
    block: np.ndarray, estimator: str
) -> tuple[tuple[tuple[int, int], ...], tuple[float, ...], tuple[tuple[int, int], ...]]:
    """Pairwise rhos of one window; pairs touching a constant column are
    reported separately as skipped rather than poisoning the whole window."""
    d = block.shape[1]
    constant = [bool(np.ptp(block[:, k]) == 0.0) for k in range(d)]
    pairs: list[tuple[int, int]] = []
    rhos: list[float] = []
    skipped: list[tuple[int, int]] = []
    if estimator == "rank":
        ranks = _column_ranks(block)
        for i in range(d):
            for j in range(i + 1, d):
                if constant[i] or constant[j]:
                    skipped.append((i, j))
                    continue
                pairs.append((i, j))
                rhos.append(_pearson_on_ranks(ranks[:, i], ranks[:, j]))
    elif estimator == "lognormal":
        for i in range(d):
            for j in range(i + 1, d):
                if constant[i] or constant[j]:
                    skipped.append((i, j))
                    continue
                corr = float(np.corrcoef(block[:, i], block[:, j])[0, 1])
                pairs.append((i, j))
                rhos.append(gaussian_spearman(min(1.0, max(-1.0, corr))))
    else:
        raise DomainError(f"estimator must be 'rank' or 'lognormal', got {estimator!r}")
    return tuple(pairs), tuple(rhos), tuple(skipped)


def rolling_six(
    p: PriceSeries,
    w: "WeightVector | Iterable[float] | None" = None,
    window: int = DEFAULT_WINDOW,
    step: int = 1,
    estimator: str = "rank",
) -> RollingSixSeries:
    """SIX per rolling window of log returns.

    Pairs whose columns are constant inside a window are dropped from the
    weighted average (the remaining pair weights are renormalized); a window
    with no valid pair left is skipped.  Values outside the sharp bounds get
    ``within_bounds=False`` (sampling noise, flagged not fatal).
    """
    wv = as_weight_vector(w if w is not None else (1.0,) * p.d)
    if wv.d != p.d:
        raise DimensionError(f"weights have d={wv.d} but series has {p.d} tickers")
    returns = log_returns(p)
    lower, upper = six_bounds(wv)
    entries: list[WindowSix] = []
    skipped: list[tuple[dt.date, str]] = []
    windows_with_dropped_pairs = 0
    for start, stop in rolling_windows(len(returns), window, step):
        end_date = p.dates[stop]  # return row t uses prices t and t+1
        block = returns[start:stop]
        pairs, rhos, dropped_pairs = _window_pair_rhos(block, estimator)
        if dropped_pairs:
            windows_with_dropped_pairs += 1
        if not pairs:
            skipped.append((end_date, "no valid pairs (constant columns)"))
            continue
        terms = [wv.values[i] * wv.values[j] for i, j in pairs]
        value = math.fsum(t * r for t, r in zip(terms, rhos)) / math.fsum(terms)
        entries.append(
            WindowSix(
                end_date=end_date,
                six=value,
                estimator=estimator,
                n_window=len(block),
                n_pairs=len(pairs),
                within_bounds=(lower - 1e-12) <= value <= (upper + 1e-12),
            )
        )
    if skipped:
        warnings.warn(
            f"skipped {len(skipped)} of {len(skipped) + len(entries)} windows "
            "(constant columns)",
            stacklevel=2,
        )
    elif windows_with_dropped_pairs:
        warnings.warn(
            f"dropped constant-column pairs in {windows_with_dropped_pairs} windows",
            stacklevel=2,
        )
    return RollingSixSeries(
        weights=wv.values,
        window=window,
        step=step,
        estimator=estimator,
        entries=tuple(entries),
        skipped=tuple(skipped),
    )
