"""Training-run data model, CSV/JSON ingestion and per-epoch correctness counts.

Accuracies are percentages in [0, 100]; epochs are 0-based internally.
"""
from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping

import numpy as np
import pandas as pd


class IngestionError(ValueError):
    """Raised when an input file violates its schema."""


@dataclass(frozen=True)
class EpochRecord:
    epoch: int
    train_acc: float
    test_acc: float | None = None

    def __post_init__(self):
        if self.epoch < 0:
            raise ValueError(f"negative epoch {self.epoch}")
        _check_percent(self.train_acc, "train_acc")
        if self.test_acc is not None:
            _check_percent(self.test_acc, "test_acc")


def _check_percent(value, name):
    if not (isinstance(value, (int, float)) and math.isfinite(value) and 0.0 <= value <= 100.0):
        raise ValueError(f"accuracy out of range: {name}={value!r}")


@dataclass(frozen=True)
class TrainingRun:
    records: tuple[EpochRecord, ...]
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "records", tuple(self.records))
        if len(self.records) < 2:
            raise ValueError("a training run needs at least 2 epochs")
        for i, rec in enumerate(self.records):
            if rec.epoch != i:
                raise ValueError(f"non-contiguous epochs: expected {i}, got {rec.epoch}")

    @classmethod
    def from_arrays(cls, train_acc, test_acc=None, metadata=None) -> "TrainingRun":
        train_acc = [float(v) for v in train_acc]
        if test_acc is None:
            test = [None] * len(train_acc)
        else:
            test = [float(v) for v in test_acc]
            if len(test) != len(train_acc):
                raise ValueError("train_acc and test_acc lengths differ")
        recs = [EpochRecord(i, a, t) for i, (a, t) in enumerate(zip(train_acc, test))]
        return cls(tuple(recs), dict(metadata or {}))

    @property
    def n_epochs(self) -> int:
        return len(self.records)

    @property
    def train_acc(self) -> np.ndarray:
        return np.array([r.train_acc for r in self.records], dtype=float)

    @property
    def has_test_acc(self) -> bool:
        return all(r.test_acc is not None for r in self.records)

    @property
    def test_acc(self) -> np.ndarray | None:
        if not self.has_test_acc:
            return None
        return np.array([r.test_acc for r in self.records], dtype=float)


@dataclass(frozen=True)
class SampleLedger:
    """Observed (and optionally true) label per sample id."""

    sample_ids: tuple[str, ...]
    observed: np.ndarray
    true: np.ndarray | None
    class_count: int

    def __post_init__(self):
        object.__setattr__(self, "sample_ids", tuple(str(s) for s in self.sample_ids))
        obs = np.asarray(self.observed, dtype=np.int64)
        object.__setattr__(self, "observed", obs)
        if self.class_count < 2:
            raise ValueError("class_count must be >= 2")
        if len(self.sample_ids) < 1:
            raise ValueError("ledger must contain at least one sample")
        if len(set(self.sample_ids)) != len(self.sample_ids):
            raise ValueError("duplicate sample ids in ledger")
        if obs.shape != (len(self.sample_ids),):
            raise ValueError("observed labels do not match sample ids")
        _check_labels(obs, self.class_count)
        if self.true is not None:
            tr = np.asarray(self.true, dtype=np.int64)
            if tr.shape != obs.shape:
                raise ValueError("true labels do not match sample ids")
            _check_labels(tr, self.class_count)
            object.__setattr__(self, "true", tr)

    @property
    def size(self) -> int:
        return len(self.sample_ids)

    @property
    def has_truth(self) -> bool:
        return self.true is not None

    @property
    def clean_mask(self) -> np.ndarray:
        if self.true is None:
            raise ValueError("ledger has no true labels")
        return self.observed == self.true

    @property
    def n_clean(self) -> int:
        return int(self.clean_mask.sum())

    @property
    def n_noisy(self) -> int:
        return self.size - self.n_clean

    def index_of(self) -> dict[str, int]:
        return {sid: i for i, sid in enumerate(self.sample_ids)}


def _check_labels(labels, c):
    if labels.size and (labels.min() < 0 or labels.max() >= c):
        raise ValueError(f"label out of range [0, {c})")


@dataclass(frozen=True)
class PredictionTrace:
    """Per-epoch correctness (prediction == observed label) of every sample.

    ``correct[e, j]`` refers to ``sample_ids[j]``.
    """

    sample_ids: tuple[str, ...]
    correct: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "sample_ids", tuple(str(s) for s in self.sample_ids))
        corr = np.asarray(self.correct, dtype=bool)
        if corr.ndim != 2 or corr.shape[1] != len(self.sample_ids):
            raise ValueError("correctness matrix must be (epochs, samples)")
        object.__setattr__(self, "correct", corr)

    @classmethod
    def from_sets(cls, per_epoch: Mapping[int, Iterable[str]], sample_ids=None) -> "PredictionTrace":
        epochs = sorted(per_epoch)
        if epochs != list(range(len(epochs))):
            raise ValueError("trace epochs must be contiguous from 0")
        sets = [set(map(str, per_epoch[e])) for e in epochs]
        if sample_ids is None:
            sample_ids = sorted(set().union(*sets)) if sets else []
        ids = tuple(map(str, sample_ids))
        pos = {sid: j for j, sid in enumerate(ids)}
        corr = np.zeros((len(epochs), len(ids)), dtype=bool)
        for e, s in enumerate(sets):
            for sid in s:
                if sid not in pos:
                    raise ValueError(f"unknown sample_id {sid!r} in trace")
                corr[e, pos[sid]] = True
        return cls(ids, corr)

    @property
    def n_epochs(self) -> int:
        return self.correct.shape[0]

    def correct_ids(self, epoch: int) -> set[str]:
        return {self.sample_ids[j] for j in np.flatnonzero(self.correct[epoch])}


@dataclass(frozen=True)
class EpochCounts:
    """Correctly predicted samples per epoch: total, clean and noisy."""

    s: np.ndarray
    s_clean: np.ndarray
    s_noisy: np.ndarray

    def __len__(self):
        return len(self.s)


def derive_counts(trace: PredictionTrace, ledger: SampleLedger) -> EpochCounts:
    if not ledger.has_truth:
        raise ValueError("derive_counts needs true labels in the ledger")
    index = ledger.index_of()
    try:
        cols = np.fromiter((index[s] for s in trace.sample_ids), dtype=np.int64,
                           count=len(trace.sample_ids))
    except KeyError as exc:
        raise ValueError(f"trace references unknown sample_id {exc.args[0]!r}") from None
    clean = ledger.clean_mask[cols]
    corr = trace.correct
    s = corr.sum(axis=1, dtype=np.int64)
    s_clean = corr[:, clean].sum(axis=1, dtype=np.int64)
    return EpochCounts(s, s_clean, s - s_clean)


def training_accuracy_from_counts(counts, D: int) -> np.ndarray:
    """Percent training accuracy ``100 * S / D``; ``counts`` is EpochCounts or an S sequence."""
    if D < 1:
        raise ValueError("D must be >= 1")
    s = counts.s if isinstance(counts, EpochCounts) else np.asarray(counts)
    return 100.0 * np.asarray(s, dtype=float) / D


# --- ingestion --------------------------------------------------------------

def _parse_float(text, line, col):
    try:
        v = float(text)
    except (TypeError, ValueError):
        raise IngestionError(f"line {line}: malformed row, cannot parse {col}={text!r}") from None
    if not math.isfinite(v):
        raise IngestionError(f"line {line}: malformed row, non-finite {col}")
    return v


def _parse_int(text, line, col):
    try:
        return int(str(text).strip())
    except (TypeError, ValueError):
        raise IngestionError(f"line {line}: malformed row, cannot parse {col}={text!r}") from None


def _build_run(rows, source, rescale, metadata):
    """rows: list of (line, epoch, train, test-or-None)."""
    if len(rows) < 2:
        raise IngestionError(f"{source}: a training run needs at least 2 epochs, got {len(rows)}")
    base = rows[0][1]
    if base not in (0, 1):
        raise IngestionError(f"line {rows[0][0]}: non-contiguous epochs, first epoch is {base}")
    for k, (line, ep, _, _) in enumerate(rows):
        if ep != base + k:
            raise IngestionError(f"line {line}: non-contiguous epochs, expected {base + k}, got {ep}")
    has_test = [r[3] is not None for r in rows]
    if any(has_test) and not all(has_test):
        line = rows[has_test.index(False)][0]
        raise IngestionError(f"line {line}: malformed row, test_acc missing")

    scale = 1.0
    if all(r[2] <= 1.0 for r in rows) and all(r[3] is None or r[3] <= 1.0 for r in rows):
        if not rescale:
            raise IngestionError(
                f"{source}: accuracies look fractional (all <= 1); pass rescale=True "
                "(--rescale) to convert them to percent")
        scale = 100.0
    for line, _, tr, te in rows:
        for name, v in (("train_acc", tr), ("test_acc", te)):
            if v is not None and not 0.0 <= v * scale <= 100.0:
                raise IngestionError(f"line {line}: accuracy out of range, {name}={v}")

    records = tuple(EpochRecord(k, tr * scale, None if te is None else te * scale)
                    for k, (_, _, tr, te) in enumerate(rows))
    meta = dict(metadata)
    meta["epoch_base"] = base
    if scale != 1.0:
        meta["rescaled_from_fraction"] = True
    meta.setdefault("source", str(source))
    return TrainingRun(records, meta)


def load_run(path, format: str | None = None, rescale: bool = False) -> TrainingRun:
    """Load an epochs file (``epoch,train_acc[,test_acc]`` CSV or JSON).

    1-based epochs are shifted to 0-based and the original base is stored
    in ``metadata['epoch_base']``.
    """
    path = Path(path)
    fmt = (format or path.suffix.lstrip(".")).lower()
    if fmt == "csv":
        rows = []
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header is None:
                raise IngestionError(f"{path}: empty file")
            header = [h.strip() for h in header]
            if header not in (["epoch", "train_acc"], ["epoch", "train_acc", "test_acc"]):
                raise IngestionError(f"line 1: bad header {header}; expected epoch,train_acc[,test_acc]")
            for line, row in enumerate(reader, start=2):
                if not row or all(not c.strip() for c in row):
                    continue
                if len(row) != len(header):
                    raise IngestionError(f"line {line}: malformed row, expected {len(header)} fields")
                ep = _parse_int(row[0], line, "epoch")
                tr = _parse_float(row[1], line, "train_acc")
                te = _parse_float(row[2], line, "test_acc") if len(row) == 3 and row[2].strip() else None
                rows.append((line, ep, tr, te))
        return _build_run(rows, path, rescale, {})
    if fmt == "json":
        with open(path, encoding="utf-8") as fh:
            try:
                doc = json.load(fh)
            except json.JSONDecodeError as exc:
                raise IngestionError(f"line {exc.lineno}: malformed JSON ({exc.msg})") from None
        meta = {}
        if isinstance(doc, dict):
            meta = dict(doc.get("metadata") or {})
            doc = doc.get("records")
        if not isinstance(doc, list):
            raise IngestionError(f"{path}: expected a list of epoch records")
        rows = []
        for k, rec in enumerate(doc, start=1):
            if not isinstance(rec, dict) or "epoch" not in rec or "train_acc" not in rec:
                raise IngestionError(f"record {k}: malformed row, needs epoch and train_acc")
            ep = _parse_int(rec["epoch"], k, "epoch")
            tr = _parse_float(rec["train_acc"], k, "train_acc")
            te = rec.get("test_acc")
            te = None if te is None else _parse_float(te, k, "test_acc")
            rows.append((k, ep, tr, te))
        return _build_run(rows, path, rescale, meta)
    raise IngestionError(f"unsupported format {fmt!r}")


def write_run(run: TrainingRun, path) -> None:
    """Write the canonical epochs CSV; epochs go back to the source base."""
    base = int(run.metadata.get("epoch_base", 0))
    with_test = run.has_test_acc
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["epoch", "train_acc", "test_acc"] if with_test else ["epoch", "train_acc"])
        for r in run.records:
            row = [r.epoch + base, repr(float(r.train_acc))]
            if with_test:
                row.append(repr(float(r.test_acc)))
            w.writerow(row)


def load_ledger(path, class_count: int | None = None) -> SampleLedger:
    """Ledger CSV ``sample_id,observed_label[,true_label]``."""
    df = pd.read_csv(path, dtype={"sample_id": str}, keep_default_na=False)
    cols = list(df.columns)
    if cols[:2] != ["sample_id", "observed_label"] or cols[2:] not in ([], ["true_label"]):
        raise IngestionError(f"line 1: bad header {cols}; expected sample_id,observed_label[,true_label]")
    try:
        obs = df["observed_label"].astype(np.int64).to_numpy()
        true = df["true_label"].astype(np.int64).to_numpy() if "true_label" in df else None
    except (TypeError, ValueError) as exc:
        raise IngestionError(f"{path}: malformed label column ({exc})") from None
    if class_count is None:
        top = obs.max() if true is None else max(obs.max(), true.max())
        class_count = max(2, int(top) + 1)
    try:
        return SampleLedger(tuple(df["sample_id"]), obs, true, class_count)
    except ValueError as exc:
        raise IngestionError(f"{path}: {exc}") from None


def write_ledger(ledger: SampleLedger, path) -> None:
    data = {"sample_id": list(ledger.sample_ids), "observed_label": ledger.observed}
    if ledger.true is not None:
        data["true_label"] = ledger.true
    pd.DataFrame(data).to_csv(path, index=False, lineterminator="\n")


def load_trace(path, ledger: SampleLedger | None = None) -> PredictionTrace:
    """Trace CSV ``epoch,sample_id,correct`` or ``epoch,sample_id,predicted_label``.

    The predicted-label variant is reduced to correctness against the
    ledger's observed labels. Samples absent at an epoch count as incorrect.
    """
    df = pd.read_csv(path, dtype={"sample_id": str})
    cols = list(df.columns)
    if cols not in (["epoch", "sample_id", "correct"], ["epoch", "sample_id", "predicted_label"]):
        raise IngestionError(f"line 1: bad header {cols}; expected epoch,sample_id,correct|predicted_label")
    if df.isna().any().any():
        bad = int(np.flatnonzero(df.isna().any(axis=1).to_numpy())[0]) + 2
        raise IngestionError(f"line {bad}: malformed row")
    epochs = df["epoch"].to_numpy(dtype=np.int64)
    base = int(epochs.min()) if epochs.size else 0
    epochs = epochs - base
    n_epochs = int(epochs.max()) + 1 if epochs.size else 0
    if base not in (0, 1) or len(np.unique(epochs)) != n_epochs:
        raise IngestionError(f"{path}: non-contiguous epochs in trace")

    if ledger is not None:
        ids = ledger.sample_ids
        index = ledger.index_of()
        cols_idx = df["sample_id"].map(index)
        if cols_idx.isna().any():
            line = int(np.flatnonzero(cols_idx.isna().to_numpy())[0]) + 2
            raise IngestionError(f"line {line}: unknown sample_id {df['sample_id'].iloc[line - 2]!r}")
        cols_idx = cols_idx.to_numpy(dtype=np.int64)
    else:
        codes, uniq = pd.factorize(df["sample_id"], sort=True)
        ids, cols_idx = tuple(uniq), codes

    if "correct" in df:
        vals = df["correct"].to_numpy()
        if not np.isin(vals, (0, 1)).all():
            line = int(np.flatnonzero(~np.isin(vals, (0, 1)))[0]) + 2
            raise IngestionError(f"line {line}: correct must be 0 or 1")
        flags = vals.astype(bool)
    else:
        if ledger is None:
            raise IngestionError("predicted_label traces need a ledger to reduce to correctness")
        flags = df["predicted_label"].to_numpy(dtype=np.int64) == ledger.observed[cols_idx]

    corr = np.zeros((n_epochs, len(ids)), dtype=bool)
    corr[epochs, cols_idx] = flags
    return PredictionTrace(ids, corr)


def write_trace(trace: PredictionTrace, path) -> None:
    E, D = trace.correct.shape
    pd.DataFrame({
        "epoch": np.repeat(np.arange(E), D),
        "sample_id": np.tile(np.asarray(trace.sample_ids, dtype=object), E),
        "correct": trace.correct.reshape(-1).astype(np.int8),
    }).to_csv(path, index=False, lineterminator="\n")
