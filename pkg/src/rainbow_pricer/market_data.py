"""Closing-price ingestion and log-return summary statistics.

CSV contract: UTF-8, header ``date,close``, ISO-8601 dates, ``.`` decimal
separator. Returns are per observed trading day; calendar gaps are not
adjusted.
"""

from __future__ import annotations

import csv
import io
import logging
import math
from dataclasses import dataclass
from datetime import date

import numpy as np

logger = logging.getLogger(__name__)

__all__ = [
    "PriceSeries",
    "ReturnSeries",
    "SummaryStats",
    "load_price_csv",
    "parse_price_csv",
    "log_returns",
    "summary_stats",
    "align",
]


@dataclass(frozen=True)
class PriceSeries:
    """Daily closes for one asset, strictly increasing in date."""

    asset_id: str
    dates: tuple[date, ...]
    closes: tuple[float, ...]

    def __post_init__(self) -> None:
        if len(self.dates) != len(self.closes):
            raise ValueError("dates and closes must have equal length")
        if len(self.dates) < 2:
            raise ValueError("price series needs at least 2 observations")
        for i in range(1, len(self.dates)):
            if self.dates[i] <= self.dates[i - 1]:
                raise ValueError(f"dates not strictly increasing at index {i}")
        for i, c in enumerate(self.closes):
            if not (c > 0.0) or not math.isfinite(c):
                raise ValueError(f"non-positive close at index {i}: {c!r}")

    def __len__(self) -> int:
        return len(self.dates)


@dataclass(frozen=True)
class ReturnSeries:
    """Log returns x_t = ln(S_t / S_{t-1}), dated by the later close."""

    asset_id: str
    values: tuple[float, ...]

    def __len__(self) -> int:
        return len(self.values)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.values, dtype=float)


@dataclass(frozen=True)
class SummaryStats:
    """Raw central-moment sample summaries (kurtosis of a normal is 3)."""

    n: int
    mean: float
    sd: float
    skewness: float
    kurtosis: float


def parse_price_csv(text: str, asset_id: str, source: str = "<string>") -> PriceSeries:
    """Parse ``date,close`` CSV text into a PriceSeries sorted by date.

    Rows are validated line by line so errors can name the offending
    line number (header is line 1); ``source`` labels the error messages.
    """
    rows: list[tuple[date, float]] = []
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise ValueError(f"{source}: empty file") from None
    if [h.strip().lower() for h in header] != ["date", "close"]:
        raise ValueError(f"{source}: expected header 'date,close', got {header!r}")
    for lineno, row in enumerate(reader, start=2):
        if not row or (len(row) == 1 and not row[0].strip()):
            continue
        if len(row) != 2:
            raise ValueError(f"{source}:{lineno}: expected 2 fields, got {len(row)}")
        try:
            d = date.fromisoformat(row[0].strip())
        except ValueError:
            raise ValueError(f"{source}:{lineno}: bad date {row[0]!r}") from None
        try:
            c = float(row[1])
        except ValueError:
            raise ValueError(f"{source}:{lineno}: bad close {row[1]!r}") from None
        if not (c > 0.0) or not math.isfinite(c):
            raise ValueError(f"{source}:{lineno}: non-positive close {row[1]!r}")
        rows.append((d, c))
    if len(rows) < 2:
        raise ValueError(f"{source}: need at least 2 data rows, got {len(rows)}")
    rows.sort(key=lambda r: r[0])
    for i in range(1, len(rows)):
        if rows[i][0] == rows[i - 1][0]:
            raise ValueError(f"{source}: duplicate date {rows[i][0].isoformat()}")
    return PriceSeries(
        asset_id=asset_id,
        dates=tuple(r[0] for r in rows),
        closes=tuple(r[1] for r in rows),
    )


def load_price_csv(path, asset_id: str) -> PriceSeries:
    """Read and parse a ``date,close`` CSV file into a PriceSeries."""
    with open(path, newline="", encoding="utf-8") as fh:
        return parse_price_csv(fh.read(), asset_id, source=str(path))


def log_returns(p: PriceSeries) -> ReturnSeries:
    """x[i] = ln(closes[i+1] / closes[i]); length is len(p) - 1."""
    closes = np.asarray(p.closes, dtype=float)
    vals = np.diff(np.log(closes))
    return ReturnSeries(asset_id=p.asset_id, values=tuple(float(v) for v in vals))


def summary_stats(r: ReturnSeries | np.ndarray) -> SummaryStats:
    """Sample mean, sd, skewness m3/m2^1.5 and raw kurtosis m4/m2^2."""
    x = r.as_array() if isinstance(r, ReturnSeries) else np.asarray(r, dtype=float)
    n = x.size
    if n < 4:
        raise ValueError(f"need at least 4 observations, got {n}")
    mean = float(np.mean(x))
    d = x - mean
    m2 = float(np.mean(d**2))
    if m2 == 0.0:
        raise ValueError("degenerate sample: zero variance")
    m3 = float(np.mean(d**3))
    m4 = float(np.mean(d**4))
    return SummaryStats(
        n=n,
        mean=mean,
        sd=math.sqrt(m2),
        skewness=m3 / m2**1.5,
        kurtosis=m4 / m2**2,
    )


def align(a: PriceSeries, b: PriceSeries) -> tuple[PriceSeries, PriceSeries]:
    """Inner-join two price series on date; unmatched dates are dropped."""
    common = sorted(set(a.dates) & set(b.dates))
    if len(common) < 2:
        raise ValueError("fewer than 2 common dates between series")
    dropped = (len(a) - len(common)) + (len(b) - len(common))
    if dropped:
        logger.info("align(%s, %s): dropped %d unmatched dates", a.asset_id, b.asset_id, dropped)
    amap = dict(zip(a.dates, a.closes))
    bmap = dict(zip(b.dates, b.closes))
    return (
        PriceSeries(a.asset_id, tuple(common), tuple(amap[d] for d in common)),
        PriceSeries(b.asset_id, tuple(common), tuple(bmap[d] for d in common)),
    )
