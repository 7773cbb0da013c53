"""Reference stop points: noise-heuristic accuracy, test-accuracy oracle, no early stopping."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

NHA, MOTA, STANDARD = "NHA", "MOTA", "STANDARD"


@dataclass(frozen=True)
class BaselineResult:
    method: str
    epoch: int | None
    found: bool


def nha_point(y_f, tau: float) -> BaselineResult:
    """First epoch where training accuracy reaches ``100 * (1 - tau)`` percent."""
    if not 0.0 <= tau < 1.0:
        raise ValueError("tau must be in [0, 1)")
    threshold = 100.0 - 100.0 * tau
    hits = np.flatnonzero(np.asarray(y_f, dtype=float) >= threshold)
    if hits.size == 0:
        return BaselineResult(NHA, None, False)
    return BaselineResult(NHA, int(hits[0]), True)


def mota_point(test_acc) -> BaselineResult:
    if test_acc is None or len(test_acc) == 0:
        return BaselineResult(MOTA, None, False)
    return BaselineResult(MOTA, int(np.argmax(np.asarray(test_acc, dtype=float))), True)


def standard_point(E: int) -> BaselineResult:
    if E < 1:
        raise ValueError("E must be >= 1")
    return BaselineResult(STANDARD, E - 1, True)
