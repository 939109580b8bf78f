"""Deterministic synthetic corpus with keyword-disjoint classes.

Every real headline draws from the real keyword pool and every fake one
from the fake pool, so any single class keyword separates the classes.
Useful for demos and for end-to-end gates that cannot ship real data.
"""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

from .corpus import FAKE, REAL

REAL_KEYWORDS = (
    "council", "budget", "market", "economy", "drought", "weather",
    "election", "minister", "senate", "hospital", "school", "teacher",
    "farmer", "harvest", "police", "court", "verdict", "railway",
    "highway", "airport", "exports", "tourism", "cricket", "festival",
    "mayor", "library", "bridge", "harbour", "wildfire", "pension",
)

FAKE_KEYWORDS = (
    "aliens", "miracle", "hoax", "secret", "celebrity", "shocking",
    "conspiracy", "illuminati", "psychic", "bigfoot", "vampire", "zombie",
    "scandal", "busted", "coverup", "clone", "prophecy", "asteroid",
    "ghost", "ufo", "mermaid", "telepathy", "astrology", "chemtrails",
    "immortal", "haunted", "miraculous", "doomsday", "unmasked", "wicked",
)

FILLER_WORDS = (
    "new", "report", "today", "plan", "city", "world", "national",
    "annual", "update", "latest", "week", "group",
)


def generate_headlines(n: int = 2000, seed: int = 1234) -> list[tuple[str, int]]:
    """Balanced (text, label) pairs; texts are unique so dedupe keeps all n."""
    rng = np.random.default_rng(seed)
    seen: set[str] = set()
    rows: list[tuple[str, int]] = []
    for i in range(n):
        label = FAKE if i % 2 else REAL
        pool = FAKE_KEYWORDS if label == FAKE else REAL_KEYWORDS
        while True:
            k = int(rng.integers(2, 4))
            f = int(rng.integers(1, 4))
            words = list(rng.choice(pool, size=k, replace=False))
            words += list(rng.choice(FILLER_WORDS, size=f, replace=False))
            order = rng.permutation(len(words))
            text = " ".join(words[j] for j in order)
            if text not in seen:
                break
        seen.add(text)
        rows.append((text, label))
    return rows


def write_source_csvs(
    rows: list[tuple[str, int]],
    million_path: str | Path,
    fakereal_path: str | Path,
) -> tuple[int, int]:
    """Write real rows in the million-headlines schema, fake rows in the
    fake-and-real schema; returns the (real, fake) row counts."""
    real_rows = [text for text, label in rows if label == REAL]
    fake_rows = [text for text, label in rows if label == FAKE]
    with open(million_path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["publish_date", "headline"])
        for i, text in enumerate(real_rows):
            writer.writerow([20140101 + i, text])
    with open(fakereal_path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["title", "text", "subject", "date"])
        for i, text in enumerate(fake_rows):
            writer.writerow([text, "", "News", f"2014-{1 + i % 12:02d}-01"])
    return len(real_rows), len(fake_rows)
