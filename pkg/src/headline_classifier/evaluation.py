"""Confusion-matrix accounting and the multi-model comparison report.

The positive class is Fake (label 1).  Accuracy is (TP + TN) over the
total count; report rows are sorted by accuracy, best first, and each
row carries its gap to the best model.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Sequence

from .vectorize import SparseVector


@dataclass(frozen=True)
class ConfusionMatrix:
    tp: int
    fp: int
    tn: int
    fn: int

    def __post_init__(self):
        if min(self.tp, self.fp, self.tn, self.fn) < 0:
            raise ValueError("confusion counts must be nonnegative")

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn


@dataclass(frozen=True)
class ModelResult:
    name: str
    matrix: ConfusionMatrix
    accuracy: float
    delta_vs_best: float


@dataclass(frozen=True)
class EvalReport:
    test_size: int
    rows: tuple[ModelResult, ...]

    def to_dict(self, config: dict | None = None) -> dict:
        out = {
            "test_size": self.test_size,
            "rows": [
                {
                    "model": r.name,
                    "tp": r.matrix.tp,
                    "fp": r.matrix.fp,
                    "tn": r.matrix.tn,
                    "fn": r.matrix.fn,
                    "accuracy": r.accuracy,
                    "delta_vs_best": r.delta_vs_best,
                }
                for r in self.rows
            ],
        }
        if config is not None:
            out["config"] = config
        return out

    def to_text_table(self) -> str:
        width = max(len("Models"), max((len(r.name) for r in self.rows), default=0))
        lines = [f"{'Models'.ljust(width)}  ACC"]
        for r in self.rows:
            lines.append(f"{r.name.ljust(width)}  {r.accuracy:.4f}")
        return "\n".join(lines) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["model", "tp", "fp", "tn", "fn", "accuracy", "delta_vs_best"])
        for r in self.rows:
            writer.writerow(
                [
                    r.name,
                    r.matrix.tp,
                    r.matrix.fp,
                    r.matrix.tn,
                    r.matrix.fn,
                    repr(r.accuracy),
                    repr(r.delta_vs_best),
                ]
            )
        return buf.getvalue()


def confusion(predictions: Sequence[int], truths: Sequence[int]) -> ConfusionMatrix:
    """Count TP/FP/TN/FN with Fake (1) as the positive class."""
    if len(predictions) != len(truths):
        raise ValueError(
            f"length mismatch: {len(predictions)} predictions vs {len(truths)} truths"
        )
    if len(predictions) == 0:
        raise ValueError("cannot build a confusion matrix from zero samples")
    tp = fp = tn = fn = 0
    for p, t in zip(predictions, truths):
        if p == 1 and t == 1:
            tp += 1
        elif p == 1 and t == 0:
            fp += 1
        elif p == 0 and t == 0:
            tn += 1
        else:
            fn += 1
    return ConfusionMatrix(tp=tp, fp=fp, tn=tn, fn=fn)


def accuracy(matrix: ConfusionMatrix) -> float:
    """(TP + TN) / (TP + FP + TN + FN)."""
    if matrix.total == 0:
        raise ValueError("confusion matrix is empty")
    return (matrix.tp + matrix.tn) / matrix.total


def compare(
    models: Sequence[tuple[str, Callable[[SparseVector], int]]],
    features: Sequence[SparseVector],
    labels: Sequence[int],
) -> EvalReport:
    """Evaluate every model on the same test set.

    ``models`` pairs a display name with a predict(x) -> 0|1 callable.
    Rows are sorted by accuracy descending (name breaks ties).
    """
    if len(features) == 0:
        raise ValueError("cannot evaluate on an empty test set")
    if len(features) != len(labels):
        raise ValueError("features and labels lengths differ")
    scored = []
    for name, predictor in models:
        preds = [predictor(x) for x in features]
        cm = confusion(preds, list(labels))
        scored.append((name, cm, accuracy(cm)))
    scored.sort(key=lambda row: (-row[2], row[0]))
    best = scored[0][2] if scored else 0.0
    rows = tuple(
        ModelResult(name=name, matrix=cm, accuracy=acc, delta_vs_best=best - acc)
        for name, cm, acc in scored
    )
    return EvalReport(test_size=len(features), rows=rows)


def write_report(
    report: EvalReport,
    json_path: str | Path,
    csv_path: str | Path | None = None,
    text_path: str | Path | None = None,
    config: dict | None = None,
) -> None:
    with open(json_path, "w", encoding="utf-8") as f:
        json.dump(report.to_dict(config), f, indent=2)
        f.write("\n")
    if csv_path is not None:
        with open(csv_path, "w", encoding="utf-8", newline="") as f:
            f.write(report.to_csv())
    if text_path is not None:
        with open(text_path, "w", encoding="utf-8") as f:
            f.write(report.to_text_table())
