"""Corpus ingestion and splitting.

Three heterogeneous CSV sources are unified into labeled headline
records: the million-headlines dump supplies the real class, the other
two supply the fake class.  Only the headline/title column is read;
all other columns are ignored.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

import numpy as np

from .errors import ConfigError, SchemaError, StratificationError

REAL = 0
FAKE = 1

LABEL_NAMES = {REAL: "real", FAKE: "fake"}


class Source(str, Enum):
    MILLION = "million"
    FAKEREAL = "fakereal"
    GETTINGREAL = "gettingreal"


# Candidate headline columns per source.  The million-headlines dump is
# published with the column named `headline_text`; `headline` is accepted
# first so trimmed-down files keep working.
_HEADLINE_COLUMNS = {
    Source.MILLION: ("headline", "headline_text"),
    Source.FAKEREAL: ("title",),
    Source.GETTINGREAL: ("title",),
}

_SOURCE_LABEL = {
    Source.MILLION: REAL,
    Source.FAKEREAL: FAKE,
    Source.GETTINGREAL: FAKE,
}


@dataclass(frozen=True)
class HeadlineRecord:
    id: int
    text: str
    label: int
    source: Source

    def __post_init__(self):
        if not self.text.strip():
            raise ValueError(f"record {self.id}: headline text is empty")
        if self.label not in (REAL, FAKE):
            raise ValueError(f"record {self.id}: label must be 0 or 1, got {self.label}")


@dataclass
class IngestStats:
    """Per-file ingestion accounting."""

    rows: int = 0
    kept: int = 0
    skipped_empty: int = 0
    malformed: int = 0
    non_english: int = 0
    row_errors: list[str] = field(default_factory=list)


@dataclass
class IngestResult:
    records: list[HeadlineRecord]
    stats: IngestStats


@dataclass
class Corpus:
    records: list[HeadlineRecord]
    split_seed: int = 42
    train_fraction: float = 0.8

    def __post_init__(self):
        ids = [r.id for r in self.records]
        if len(set(ids)) != len(ids):
            raise ValueError("corpus record ids are not unique")

    def __len__(self) -> int:
        return len(self.records)

    def labels(self) -> np.ndarray:
        return np.array([r.label for r in self.records], dtype=np.int64)


def _normalize_header(cell: str) -> str:
    return cell.lstrip("﻿").strip().lower()


def ingest(path: str | Path, source: Source, id_start: int = 0) -> IngestResult:
    """Read one source CSV into labeled headline records.

    Rows with an empty or missing headline are skipped and counted;
    unparseable rows are collected as row errors without aborting.
    Raises SchemaError when the expected headline column is absent.
    """
    label = _SOURCE_LABEL[source]
    candidates = _HEADLINE_COLUMNS[source]
    stats = IngestStats()
    records: list[HeadlineRecord] = []

    with open(path, encoding="utf-8", errors="replace", newline="") as f:
        reader = csv.reader(f)
        try:
            header = next(reader, None)
        except csv.Error as exc:
            raise SchemaError(f"{path}: cannot parse header row: {exc}") from exc
        if header is None:
            raise SchemaError(f"{path}: file is empty, a header row is required")
        header = [_normalize_header(c) for c in header]
        col = next((header.index(c) for c in candidates if c in header), None)
        if col is None:
            raise SchemaError(
                f"{path}: missing headline column "
                f"{' or '.join(repr(c) for c in candidates)} (schema {source.value})"
            )
        lang_col = header.index("language") if "language" in header else None

        while True:
            try:
                row = next(reader)
            except StopIteration:
                break
            except csv.Error as exc:
                stats.rows += 1
                stats.malformed += 1
                stats.row_errors.append(f"line {reader.line_num}: {exc}")
                continue
            stats.rows += 1
            if len(row) <= col:
                if not any(cell.strip() for cell in row):
                    stats.skipped_empty += 1
                else:
                    stats.malformed += 1
                    stats.row_errors.append(
                        f"line {reader.line_num}: {len(row)} fields, "
                        f"headline column is #{col + 1}"
                    )
                continue
            text = row[col].strip()
            if not text:
                stats.skipped_empty += 1
                continue
            if lang_col is not None and lang_col < len(row):
                lang = row[lang_col].strip().lower()
                if lang and lang not in ("english", "en"):
                    stats.non_english += 1
            records.append(
                HeadlineRecord(id=id_start + len(records), text=text, label=label, source=source)
            )
            stats.kept += 1

    return IngestResult(records=records, stats=stats)


def dedupe(records: list[HeadlineRecord]) -> tuple[list[HeadlineRecord], int]:
    """Drop exact duplicates (whitespace-normalized, case-folded text + label).

    The first occurrence wins; returns the kept records and the number removed.
    """
    seen: set[tuple[str, int]] = set()
    kept: list[HeadlineRecord] = []
    for r in records:
        key = (" ".join(r.text.split()).casefold(), r.label)
        if key in seen:
            continue
        seen.add(key)
        kept.append(r)
    return kept, len(records) - len(kept)


def split(
    corpus: Corpus,
    train_fraction: float | None = None,
    seed: int | None = None,
) -> tuple[list[int], list[int]]:
    """Deterministic stratified train/test split over record positions.

    Per label the train share is round(fraction * n), clamped so both
    sides keep at least one record; index lists come back sorted.
    """
    fraction = corpus.train_fraction if train_fraction is None else train_fraction
    seed = corpus.split_seed if seed is None else seed
    if not 0.0 < fraction < 1.0:
        raise ConfigError(f"train fraction must be in (0, 1), got {fraction}")
    if not corpus.records:
        raise ConfigError("cannot split an empty corpus")

    rng = np.random.default_rng(seed)
    train: list[int] = []
    test: list[int] = []
    for label in (REAL, FAKE):
        idx = [i for i, r in enumerate(corpus.records) if r.label == label]
        if not idx:
            continue
        if len(idx) < 2:
            raise StratificationError(
                f"label {label} has {len(idx)} record(s); need at least 2 to stratify"
            )
        n_train = int(round(fraction * len(idx)))
        n_train = min(max(n_train, 1), len(idx) - 1)
        order = rng.permutation(len(idx))
        chosen = set(order[:n_train].tolist())
        for j, i in enumerate(idx):
            (train if j in chosen else test).append(i)
    return sorted(train), sorted(test)


def write_jsonl(records: list[HeadlineRecord], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        for r in records:
            f.write(
                json.dumps(
                    {"id": r.id, "text": r.text, "label": r.label, "source": r.source.value},
                    ensure_ascii=False,
                )
                + "\n"
            )


def read_jsonl(path: str | Path) -> list[HeadlineRecord]:
    records = []
    with open(path, encoding="utf-8") as f:
        for line in f:
            if not line.strip():
                continue
            obj = json.loads(line)
            records.append(
                HeadlineRecord(
                    id=int(obj["id"]),
                    text=obj["text"],
                    label=int(obj["label"]),
                    source=Source(obj["source"]),
                )
            )
    return records
