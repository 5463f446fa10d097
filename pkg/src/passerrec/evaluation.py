"""Metrics, the training-fraction x budget experiment grid, and report emission."""

from __future__ import annotations

import csv
import io
import json
import logging
import os
import time
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .bilstm import BiLstmClassifier
from .data import split
from .features import ReviewFeaturizer

__all__ = [
    "DEFAULT_FRACTIONS",
    "DEFAULT_BUDGETS",
    "PAPER_REFERENCE",
    "ConfusionCounts",
    "MetricReport",
    "RunRecord",
    "confusion",
    "metrics",
    "evaluate_scores",
    "run_experiment",
    "compare_table",
    "format_table",
    "emit_report",
    "read_report_csv",
]

logger = logging.getLogger(__name__)

DEFAULT_FRACTIONS = (0.4, 0.5, 0.6, 0.7, 0.8, 0.9)
DEFAULT_BUDGETS = (10, 15, 20, 25, 30)
METRIC_NAMES = ("precision", "recall", "f1", "mse")
CSV_HEADER = ("dataset", "method", "train_fraction", "budget", "seed", "metric", "value")

# Published dataset-1 figures for the proposed method, as fractions. Context only.
PAPER_REFERENCE = {"f1": 0.9072, "mse": 0.0122, "precision": 0.9352, "recall": 0.9254}
REFERENCE_LABEL = "paper-reported, not reproduced"


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int
    fp: int
    fn: int
    tn: int

    @property
    def total(self):
        return self.tp + self.fp + self.fn + self.tn


@dataclass(frozen=True)
class MetricReport:
    precision: float
    recall: float
    f1: float
    mse: float

    def as_dict(self):
        return {name: getattr(self, name) for name in METRIC_NAMES}


@dataclass
class RunRecord:
    dataset_id: str
    method: str
    train_fraction: float
    budget: int
    seed: int
    metrics: Optional[MetricReport]
    wall_time_seconds: float = 0.0
    error: Optional[str] = None
    extra: dict = field(default_factory=dict)

    @property
    def key(self):
        return (self.dataset_id, self.train_fraction, self.budget, self.seed)


def _check_scores(scores, labels):
    scores = np.asarray(scores, dtype=float)
    labels = np.asarray(labels)
    if scores.shape != labels.shape or scores.ndim != 1:
        raise ValueError("scores and labels must be 1-d and of equal length")
    if scores.size == 0:
        raise ValueError("no scores to evaluate")
    return scores, labels


def confusion(scores, labels, threshold=0.5) -> ConfusionCounts:
    """Tally predictions; a score equal to ``threshold`` counts as positive."""
    scores, labels = _check_scores(scores, labels)
    pred = scores >= threshold
    pos = labels == 1
    return ConfusionCounts(int(np.sum(pred & pos)), int(np.sum(pred & ~pos)),
                           int(np.sum(~pred & pos)), int(np.sum(~pred & ~pos)))


def _ratio(num, den):
    return num / den if den else 0.0


def metrics(counts: ConfusionCounts, scores, labels) -> MetricReport:
    """Precision, recall, F1 from ``counts``; MSE of raw scores against labels.

    Any ratio with a zero denominator is reported as 0.
    """
    scores, labels = _check_scores(scores, labels)
    tp, fp, fn = counts.tp, counts.fp, counts.fn
    mse = float(np.mean((scores - labels) ** 2))
    return MetricReport(_ratio(tp, tp + fp), _ratio(tp, tp + fn), _ratio(2 * tp, 2 * tp + fp + fn), mse)


def evaluate_scores(scores, labels, threshold=0.5) -> MetricReport:
    return metrics(confusion(scores, labels, threshold), scores, labels)


def _derived_seed(*parts):
    return int(np.random.SeedSequence([int(p) for p in parts]).generate_state(1)[0])


def _fraction_key(fraction):
    return int(round(fraction * 1000))


def run_experiment(examples, fractions=DEFAULT_FRACTIONS, budgets=DEFAULT_BUDGETS, seeds=(0,),
                   methods=("passer",), budget_scale=10, featurizer_params=None,
                   classifier_params=None, dataset_id="dataset", threshold=0.5):
    """Train and score one model per (method, fraction, budget, seed).

    For each (fraction, seed) the examples are split once and the featurizer
    is fitted on the training part only; every budget and method reuses that
    split. A budget level ``b`` means ``b * budget_scale`` optimizer
    iterations. Method ``"majority"`` scores every test example with the
    training majority label.

    Failures are caught per run and recorded in ``RunRecord.error``.
    """
    if not examples:
        raise ValueError("no examples to run on")
    featurizer_params = dict(featurizer_params or {})
    classifier_params = dict(classifier_params or {})
    records = []
    for seed_index, seed in enumerate(seeds):
        for fraction in fractions:
            split_seed = _derived_seed(seed, _fraction_key(fraction), seed_index)
            try:
                data = split(examples, fraction, split_seed)
                featurizer = ReviewFeaturizer(**{**featurizer_params, "seed": split_seed})
                X_train = featurizer.fit_transform([e.record for e in data.train])
                X_test = featurizer.transform([e.record for e in data.test])
                y_train = np.array([e.label for e in data.train])
                y_test = np.array([e.label for e in data.test])
                prepared = None
            except Exception as exc:  # noqa: BLE001 - recorded, grid continues
                prepared = f"{type(exc).__name__}: {exc}"
            for budget in budgets:
                for method in methods:
                    record = RunRecord(dataset_id, method, fraction, budget, seed, None)
                    records.append(record)
                    if prepared is not None:
                        record.error = prepared
                        continue
                    start = time.perf_counter()
                    try:
                        scores = _fit_score(method, X_train, y_train, X_test, budget * budget_scale,
                                            _derived_seed(seed, _fraction_key(fraction), budget,
                                                          seed_index),
                                            classifier_params, threshold)
                        record.metrics = evaluate_scores(scores, y_test, threshold)
                    except Exception as exc:  # noqa: BLE001
                        record.error = f"{type(exc).__name__}: {exc}"
                        logger.warning("run %s failed: %s", record.key, record.error)
                    record.wall_time_seconds = time.perf_counter() - start
    return records


def _fit_score(method, X_train, y_train, X_test, max_iter, seed, classifier_params, threshold):
    if method == "majority":
        majority = int(np.mean(y_train) >= 0.5)
        return np.full(len(X_test), float(majority))
    clf = BiLstmClassifier(**{**classifier_params, "optimizer": method, "max_iter": max_iter,
                              "seed": seed, "threshold": threshold})
    clf.fit(X_train, y_train)
    return clf.decision_function(X_test)


def compare_table(records_by_method):
    """Best-over-grid metrics per method plus the published reference row.

    Higher is better for precision/recall/F1, lower for MSE. Every method
    must cover the same grid points.
    """
    if not records_by_method:
        raise ValueError("no methods to compare")
    grids = {m: sorted({r.key for r in recs}) for m, recs in records_by_method.items()}
    first = next(iter(grids.values()))
    if any(g != first for g in grids.values()):
        raise ValueError("methods were not run on the same grid")
    rows = []
    for method, recs in records_by_method.items():
        scored = [r.metrics for r in recs if r.metrics is not None]
        if not scored:
            raise ValueError(f"method {method!r} has no successful runs")
        row = {"method": method}
        for name in METRIC_NAMES:
            values = [getattr(m, name) for m in scored]
            row[name] = min(values) if name == "mse" else max(values)
        rows.append(row)
    rows.append({"method": REFERENCE_LABEL, **PAPER_REFERENCE})
    return rows


def format_table(rows):
    lines = [f"{'method':<32}" + "".join(f"{n:>12}" for n in METRIC_NAMES)]
    for row in rows:
        lines.append(f"{row['method']:<32}" + "".join(f"{row[n]:>12.4f}" for n in METRIC_NAMES))
    return "\n".join(lines) + "\n"


def _rows(records):
    keyed = []
    for r in records:
        if r.metrics is None:
            continue
        for name, value in r.metrics.as_dict().items():
            key = (r.dataset_id, r.method, float(r.train_fraction), int(r.budget), int(r.seed), name)
            keyed.append((key, float(value)))
    keyed.sort()
    return [(d, m, repr(f), str(b), str(s), name, repr(v)) for (d, m, f, b, s, name), v in keyed]


def emit_report(records, directory, formats=("csv", "json"), stem="report"):
    """Write long-format metric rows; returns the written paths.

    Rows are sorted, so identical records always give identical bytes.
    """
    records = list(records)
    if not records:
        raise ValueError("no records to report")
    os.makedirs(directory, exist_ok=True)
    rows = _rows(records)
    paths = []
    if "csv" in formats:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        writer.writerows(rows)
        paths.append(_write(os.path.join(directory, f"{stem}.csv"), buf.getvalue()))
    if "json" in formats:
        objs = []
        for row in rows:
            obj = dict(zip(CSV_HEADER, row))
            obj["train_fraction"] = float(obj["train_fraction"])
            obj["budget"], obj["seed"] = int(obj["budget"]), int(obj["seed"])
            obj["value"] = float(f"{float(obj['value']):.6g}")
            objs.append(obj)
        paths.append(_write(os.path.join(directory, f"{stem}.json"),
                            json.dumps(objs, indent=1) + "\n"))
    return paths


def _write(path, text):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
    return path


def read_report_csv(path):
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != CSV_HEADER:
            raise ValueError(f"unexpected header in {path}")
        return [dict(row, value=float(row["value"])) for row in reader]
