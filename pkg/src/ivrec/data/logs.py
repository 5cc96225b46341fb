"""Interaction log schemas, TSV round-trip, and chronological splitting."""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass

from ..errors import ConfigError, DataFormatError

log = logging.getLogger(__name__)

REC_HEADER = ("user_id", "item_id", "click", "timestamp", "impression_id")
SEARCH_HEADER = ("user_id", "query_id", "item_id", "click", "timestamp")

SECONDS_PER_DAY = 86400


@dataclass(frozen=True)
class RecInteraction:
    user_id: str
    item_id: str
    click: int
    timestamp: int
    impression_id: str


@dataclass(frozen=True)
class SearchInteraction:
    user_id: str
    query_id: str
    item_id: str
    click: int
    timestamp: int


def _parse_click(raw: str, path, lineno: int) -> int:
    if raw not in ("0", "1"):
        raise DataFormatError(f"click must be 0 or 1, got {raw!r}", path, lineno)
    return int(raw)


def _parse_ts(raw: str, path, lineno: int) -> int:
    try:
        return int(raw)
    except ValueError:
        raise DataFormatError(f"timestamp must be integer epoch seconds, got {raw!r}",
                              path, lineno) from None


def load_logs(path, kind: str):
    """Load a rec or search log, sorted by timestamp (then impression_id)."""
    if kind == "rec":
        return load_rec_log(path)
    if kind == "search":
        return load_search_log(path)
    raise ConfigError(f"unknown log kind {kind!r}")


def _read_rows(path, header):
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh, delimiter="\t")
        try:
            first = next(reader)
        except StopIteration:
            raise DataFormatError("missing header line", path, 1) from None
        if tuple(first) != header:
            raise DataFormatError(f"bad header {first!r}, expected {list(header)}", path, 1)
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise DataFormatError(f"expected {len(header)} fields, got {len(row)}",
                                      path, lineno)
            if any(field == "" for field in row):
                raise DataFormatError("empty field", path, lineno)
            yield lineno, row


def load_rec_log(path) -> list[RecInteraction]:
    rows = []
    for lineno, row in _read_rows(path, REC_HEADER):
        rows.append(RecInteraction(
            user_id=row[0], item_id=row[1],
            click=_parse_click(row[2], path, lineno),
            timestamp=_parse_ts(row[3], path, lineno),
            impression_id=row[4],
        ))
    rows.sort(key=lambda r: (r.timestamp, r.impression_id))
    log.info("loaded %d recommendation rows from %s", len(rows), path)
    return rows


def load_search_log(path) -> list[SearchInteraction]:
    rows = []
    for lineno, row in _read_rows(path, SEARCH_HEADER):
        rows.append(SearchInteraction(
            user_id=row[0], query_id=row[1], item_id=row[2],
            click=_parse_click(row[3], path, lineno),
            timestamp=_parse_ts(row[4], path, lineno),
        ))
    rows.sort(key=lambda r: r.timestamp)
    log.info("loaded %d search rows from %s", len(rows), path)
    return rows


def save_rec_log(rows, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write("\t".join(REC_HEADER) + "\n")
        for r in rows:
            fh.write(f"{r.user_id}\t{r.item_id}\t{r.click}\t{r.timestamp}\t{r.impression_id}\n")


def save_search_log(rows, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write("\t".join(SEARCH_HEADER) + "\n")
        for r in rows:
            fh.write(f"{r.user_id}\t{r.query_id}\t{r.item_id}\t{r.click}\t{r.timestamp}\n")


def chronological_split(rows: list[RecInteraction], train_days: int, val_days: int,
                        test_days: int):
    """Partition a rec log into (train, val, test) by whole days from the start.

    Days are counted from the earliest timestamp.  Every row lands in
    exactly one split; days beyond train+val+test fall into test (with a
    warning) so the partition stays exhaustive.  A log spanning fewer
    days than requested raises, naming the available span.
    """
    for name, v in (("train_days", train_days), ("val_days", val_days),
                    ("test_days", test_days)):
        if v < 0:
            raise ConfigError(f"{name} must be >= 0, got {v}")
    rows = sorted(rows, key=lambda r: (r.timestamp, r.impression_id))
    if not rows:
        return [], [], []
    origin = rows[0].timestamp
    span_days = (rows[-1].timestamp - origin) // SECONDS_PER_DAY + 1
    need = train_days + val_days + test_days
    if span_days < need:
        raise ConfigError(
            f"log spans {span_days} day(s) but the split needs {need}"
        )
    if span_days > need:
        log.warning("log spans %d days; the last %d day(s) all fall into the test split",
                    span_days, span_days - need + test_days)
    train, val, test = [], [], []
    val_start = train_days
    test_start = train_days + val_days
    for r in rows:
        day = (r.timestamp - origin) // SECONDS_PER_DAY
        if day < val_start:
            train.append(r)
        elif day < test_start:
            val.append(r)
        else:
            test.append(r)
    if not val:
        log.warning("validation split is empty")
    if not test:
        log.warning("test split is empty")
    return train, val, test
