"""Ground-truth memorization diagnostics: label recall, e_mem / e_sm, LP and LR."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .traininglog import EpochCounts

PM, MM, SM = "PM", "MM", "SM"


@dataclass(frozen=True)
class RecallCurves:
    lr_clean: np.ndarray
    lr_noisy: np.ndarray
    ratio: np.ndarray

    def __len__(self):
        return len(self.ratio)


@dataclass(frozen=True)
class MemorizationStages:
    e_mem: int
    e_sm: int
    labels: tuple[str, ...]
    window: int


def compute_label_recall(counts: EpochCounts, D_clean: int, D_noisy: int) -> RecallCurves:
    """Per-epoch clean/noisy label recall and their ratio.

    The noisy recall in the ratio's denominator is floored at one sample
    (``1 / D_noisy``).
    """
    if D_clean < 1 or D_noisy < 1:
        raise ValueError("label recall needs at least one clean and one noisy sample")
    lr_clean = np.asarray(counts.s_clean, dtype=float) / D_clean
    lr_noisy = np.asarray(counts.s_noisy, dtype=float) / D_noisy
    ratio = lr_clean / np.maximum(lr_noisy, 1.0 / D_noisy)
    return RecallCurves(lr_clean, lr_noisy, ratio)


def locate_e_mem(curves) -> int:
    """Earliest epoch of the maximum recall ratio."""
    ratio = curves.ratio if isinstance(curves, RecallCurves) else np.asarray(curves, dtype=float)
    return int(np.argmax(ratio))


def locate_e_sm(curves, e_mem: int, window: int = 5) -> int:
    """First epoch ``t > e_mem`` from which the ratio falls strictly for ``window`` consecutive epochs.

    A fall at ``t`` means ``ratio[t] < ratio[t-1]``. Returns ``E - 1`` when
    no such run exists.
    """
    if window < 1:
        raise ValueError("window must be >= 1")
    ratio = curves.ratio if isinstance(curves, RecallCurves) else np.asarray(curves, dtype=float)
    E = len(ratio)
    falls = np.zeros(E, dtype=bool)
    falls[1:] = ratio[1:] < ratio[:-1]
    for t in range(e_mem + 1, E - window + 1):
        if falls[t:t + window].all():
            return t
    return E - 1


def memorization_stages(curves: RecallCurves, window: int = 5) -> MemorizationStages:
    e_mem = locate_e_mem(curves)
    e_sm = locate_e_sm(curves, e_mem, window)
    labels = tuple(PM if e < e_mem else MM if e < e_sm else SM for e in range(len(curves)))
    return MemorizationStages(e_mem, e_sm, labels, window)


def label_precision_recall(counts: EpochCounts, epoch: int, D_clean: int):
    """``(LP, LR)`` at ``epoch`` as fractions; LP is None when nothing is correct."""
    s = int(counts.s[epoch])
    s_clean = int(counts.s_clean[epoch])
    lp = s_clean / s if s >= 1 else None
    lr = s_clean / D_clean if D_clean >= 1 else None
    return lp, lr
