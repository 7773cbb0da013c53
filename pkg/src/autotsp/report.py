"""End-to-end analysis of a run and its JSON report / plot CSVs."""
from __future__ import annotations

import csv
import hashlib
import json
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .baselines import mota_point, nha_point, standard_point
from .memorization import (MemorizationStages, RecallCurves, compute_label_recall,
                           label_precision_recall, memorization_stages)
from .regions import literal_combination
from .stoppoint import ACCUMULATE, OVERWRITE, Hyperparams, TspResult, find_tsp
from .traininglog import EpochCounts, PredictionTrace, SampleLedger, TrainingRun, derive_counts

SCHEMA_VERSION = 1


def file_digest(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def _num(x):
    if x is None:
        return None
    return float(x)


def _pct(x):
    return None if x is None else 100.0 * x


@dataclass
class Analysis:
    run: TrainingRun
    hyperparams: Hyperparams
    tsp: TspResult
    alt_tsp: TspResult
    counts: EpochCounts | None = None
    ledger: SampleLedger | None = None
    curves: RecallCurves | None = None
    stages: MemorizationStages | None = None
    tau: float | None = None
    digests: dict | None = None
    warnings: list | None = None

    @property
    def fallback_used(self) -> bool:
        return self.tsp.fallback is not None

    def _stop_row(self, epoch):
        row = {"epoch": epoch, "found": epoch is not None}
        if epoch is None:
            return row
        rec = self.run.records[epoch]
        row["train_acc"] = rec.train_acc
        if rec.test_acc is not None:
            row["test_acc"] = rec.test_acc
        if self.counts is not None and self.ledger is not None and self.ledger.n_clean >= 1:
            lp, lr = label_precision_recall(self.counts, epoch, self.ledger.n_clean)
            row["lp"] = _pct(lp)
            row["lr"] = _pct(lr)
        return row

    def report(self) -> dict:
        tsp, region = self.tsp, self.tsp.region
        hp = self.hyperparams.to_dict()
        reductions = [{"source": p.source, "beta": p.beta, "epoch": p.epoch, "found": p.found}
                      for p in region.contributing]
        region_block = {"lo": region.lo, "hi": region.hi, "fallback": region.fallback,
                        "reductions": reductions, "interval_mode": self.hyperparams.interval_mode}
        literal = literal_combination(region)
        if literal is not None:
            region_block["literal_formula"] = {"lo": literal[0], "hi": literal[1]}
            region_block["literal_formula_differs"] = literal != (region.lo, region.hi)

        autotsp = {
            "e_tsp": tsp.e_tsp,
            "stop_rule": tsp.stop_rule,
            "region": {"lo": region.lo, "hi": region.hi},
            "segments": [{"start": s, "end": e, "sum": float(v)} for s, e, v in tsp.segments],
            "fallback": tsp.fallback,
            "hyperparams": hp,
            "alternative_init_mode": {"init_mode": self.alt_tsp.hyperparams.init_mode,
                                      "e_tsp": self.alt_tsp.e_tsp,
                                      "differs": self.alt_tsp.e_tsp != tsp.e_tsp},
        }

        E = self.run.n_epochs
        baselines = {"AUTOTSP": self._stop_row(tsp.e_tsp),
                     "STANDARD": self._stop_row(standard_point(E).epoch)}
        test = self.run.test_acc
        if test is not None:
            baselines["MOTA"] = self._stop_row(mota_point(test).epoch)
        if self.tau is not None:
            nha = nha_point(self.run.train_acc, self.tau)
            baselines["NHA"] = dict(self._stop_row(nha.epoch), tau=self.tau)

        rep = {
            "schema_version": SCHEMA_VERSION,
            "inputs": self.digests or {},
            "run": {"n_epochs": E, "epoch_base": int(self.run.metadata.get("epoch_base", 0))},
            "autotsp": autotsp,
            "region": region_block,
            "baselines": baselines,
            "warnings": list(self.warnings or []),
        }
        if self.stages is not None:
            rep["memorization"] = {
                "e_mem": self.stages.e_mem,
                "e_sm": self.stages.e_sm,
                "e_sm_rule": f"first epoch after e_mem starting {self.stages.window} "
                             "consecutive strict ratio decreases (heuristic reading)",
                "esm_window": self.stages.window,
                "D_clean": self.ledger.n_clean,
                "D_noisy": self.ledger.n_noisy,
            }
        return rep

    def report_json(self) -> str:
        return dumps(self.report())

    def write_plots(self, out_dir) -> list[Path]:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        written = []
        for (source, beta), isums in sorted(self.tsp.region.interval_sums.items()):
            p = out / f"intervals_{source}_beta{beta}.csv"
            with open(p, "w", newline="") as fh:
                w = csv.writer(fh, lineterminator="\n")
                w.writerow(["representative_epoch", "interval_sum", "z_score"])
                z = isums.standardized
                for k, (ep, s) in enumerate(zip(isums.epochs, isums.sums)):
                    w.writerow([int(ep), repr(float(s)), "" if z is None else repr(float(z[k]))])
            written.append(p)
        p = out / "autotsp_trace.csv"
        mtr, comp = self.tsp.max_trace, self.tsp.compensation
        y = self.run.train_acc
        with open(p, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["epoch", "train_acc", "running_max", "mt", "c_raw", "c", "deficit"])
            w.writerow([0, repr(float(y[0])), repr(float(mtr.running_max[0])), "", "", "", ""])
            for k, e in enumerate(comp.epochs):
                w.writerow([int(e), repr(float(y[e])), repr(float(mtr.running_max[e])),
                            repr(float(mtr.mt[k])), repr(float(comp.c_raw[k])),
                            repr(float(comp.c[k])), repr(float(comp.deficit[k]))])
        written.append(p)
        if self.curves is not None:
            p = out / "memorization.csv"
            with open(p, "w", newline="") as fh:
                w = csv.writer(fh, lineterminator="\n")
                w.writerow(["epoch", "lr_clean", "lr_noisy", "ratio", "stage"])
                for e in range(len(self.curves)):
                    w.writerow([e, repr(float(self.curves.lr_clean[e])),
                                repr(float(self.curves.lr_noisy[e])),
                                repr(float(self.curves.ratio[e])), self.stages.labels[e]])
            written.append(p)
        return written


def dumps(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2, default=_json_default) + "\n"


def _json_default(o):
    if isinstance(o, np.integer):
        return int(o)
    if isinstance(o, np.floating):
        return float(o)
    raise TypeError(f"not JSON serializable: {type(o).__name__}")


def analyze(run: TrainingRun, hp: Hyperparams | None = None, ledger: SampleLedger | None = None,
            trace: PredictionTrace | None = None, tau: float | None = None, esm_window: int = 5,
            digests: dict | None = None) -> Analysis:
    hp = hp or Hyperparams()
    tsp = find_tsp(run, hp)
    other = OVERWRITE if hp.init_mode == ACCUMULATE else ACCUMULATE
    alt = find_tsp(run, replace(hp, init_mode=other))
    warnings = []
    if tsp.fallback:
        warnings.append(tsp.fallback)
    counts = curves = stages = None
    if trace is not None and ledger is not None and ledger.has_truth:
        if trace.n_epochs != run.n_epochs:
            raise ValueError(f"trace has {trace.n_epochs} epochs, run has {run.n_epochs}")
        counts = derive_counts(trace, ledger)
        if ledger.n_clean >= 1 and ledger.n_noisy >= 1:
            curves = compute_label_recall(counts, ledger.n_clean, ledger.n_noisy)
            stages = memorization_stages(curves, esm_window)
        else:
            warnings.append("ledger has no noisy (or no clean) samples; memorization analysis skipped")
    elif trace is not None or ledger is not None:
        warnings.append("ground-truth diagnostics need both a trace and a ledger with true labels")
    return Analysis(run, hp, tsp, alt, counts, ledger, curves, stages, tau, digests, warnings)
