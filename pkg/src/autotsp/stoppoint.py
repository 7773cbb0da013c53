"""Stop-point selection: running-max increments, small-learning compensation and segment sums."""
from __future__ import annotations

from dataclasses import dataclass, field, asdict

import numpy as np

from .regions import COMPACTED, DEFAULT_BETAS, StopRegion, stop_region
from .traininglog import TrainingRun

ARGMAX_SEGMENT = "argmax_segment"
LAST_NONZERO = "last_nonzero"
ACCUMULATE = "accumulate"
OVERWRITE = "overwrite"


@dataclass(frozen=True)
class Hyperparams:
    beta_set: tuple[int, ...] = DEFAULT_BETAS
    theta1: float = 0.5
    theta2: float = 0.5
    stop_rule: str = ARGMAX_SEGMENT
    init_mode: str = ACCUMULATE
    interval_mode: str = COMPACTED

    def __post_init__(self):
        object.__setattr__(self, "beta_set", tuple(sorted(set(int(b) for b in self.beta_set))))
        if not self.beta_set or min(self.beta_set) < 2:
            raise ValueError("beta values must be >= 2")
        if self.theta1 < 0 or self.theta2 < 0:
            raise ValueError("thresholds must be >= 0")
        if self.stop_rule not in (ARGMAX_SEGMENT, LAST_NONZERO):
            raise ValueError(f"unknown stop rule {self.stop_rule!r}")
        if self.init_mode not in (ACCUMULATE, OVERWRITE):
            raise ValueError(f"unknown init mode {self.init_mode!r}")

    def to_dict(self):
        d = asdict(self)
        d["beta_set"] = list(self.beta_set)
        return d


@dataclass(frozen=True)
class MaxTrace:
    running_max: np.ndarray
    mt: np.ndarray  # epochs 1..E-1


@dataclass(frozen=True)
class CompensationTrace:
    """Compensated increments ``c`` for ``epochs``.

    ``c_raw`` is ``c`` before the theta2 guard; ``deficit`` is the carried
    deficit after each epoch.
    """
    epochs: np.ndarray
    c: np.ndarray
    c_raw: np.ndarray
    deficit: np.ndarray


@dataclass(frozen=True)
class TspResult:
    e_tsp: int
    region: StopRegion
    segments: list
    stop_rule: str
    hyperparams: Hyperparams
    fallback: str | None = None
    max_trace: MaxTrace | None = field(default=None, repr=False)
    compensation: CompensationTrace | None = field(default=None, repr=False)


class RunTooShortError(ValueError):
    pass


def running_max_rate(y_f) -> MaxTrace:
    y = np.asarray(y_f, dtype=float)
    if y.size < 2:
        raise ValueError("need at least 2 epochs")
    rm = np.maximum.accumulate(y)
    return MaxTrace(rm, np.diff(rm))


def compensation_trace(mt, theta1=0.5, theta2=0.5, init_mode=ACCUMULATE, start_epoch=1):
    """Offset small-learning epochs against the increments that follow them.

    An epoch with ``mt <= theta1`` is small-learning: its magnitude becomes a
    deficit and ``c = 0``. Otherwise ``c = max(mt + deficit, 0)``; a
    non-positive sum carries forward as the new deficit. Finally ``c = 0``
    wherever ``mt < theta2``. ``overwrite`` keeps only the latest
    small-learning magnitude as deficit and clears it on every large epoch.
    """
    if theta1 < 0 or theta2 < 0:
        raise ValueError("thresholds must be >= 0")
    if init_mode not in (ACCUMULATE, OVERWRITE):
        raise ValueError(f"unknown init mode {init_mode!r}")
    # vectorized over leading axes; time runs along the last axis
    mt = np.asarray(mt, dtype=float)
    n = mt.shape[-1]
    c_raw, deficit = np.zeros_like(mt), np.zeros_like(mt)
    d = np.zeros(mt.shape[:-1])
    for i in range(n):
        m = mt[..., i]
        sle = m <= theta1
        s = m + d
        gain = ~sle & (s > 0)
        c_raw[..., i] = np.where(gain, s, 0.0)
        if init_mode == ACCUMULATE:
            d = np.where(sle, d - m, np.where(gain, 0.0, s))
        else:
            d = np.where(sle, -m, 0.0)
        deficit[..., i] = d
    c = np.where(mt < theta2, 0.0, c_raw)
    epochs = np.arange(start_epoch, start_epoch + n)
    return CompensationTrace(epochs, c, c_raw, deficit)


def segment_sums(c, region) -> list[tuple[int, int, float]]:
    """Maximal runs of positive ``c`` inside ``[region.lo, region.hi]`` as ``(start, end, sum)``.

    A bare array is indexed by epoch directly.
    """
    if isinstance(c, CompensationTrace):
        epochs, vals = c.epochs, c.c
    else:
        vals = np.asarray(c, dtype=float)
        epochs = np.arange(vals.size)
    lo, hi = (region.lo, region.hi) if isinstance(region, StopRegion) else region
    segs = []
    start, total, prev = None, 0.0, None
    for e, v in zip(epochs.tolist(), vals.tolist()):
        if e < lo or e > hi:
            continue
        if v > 0:
            if start is None:
                start, total = e, 0.0
            total += v
            prev = e
        elif start is not None:
            segs.append((start, prev, total))
            start = None
    if start is not None:
        segs.append((start, prev, total))
    return segs


def min_run_length(beta_set) -> int:
    return 2 * min(beta_set) + 1


def find_tsp(run, hp: Hyperparams | None = None) -> TspResult:
    """Locate the training stop point from the training-accuracy trajectory alone."""
    hp = hp or Hyperparams()
    y = run.train_acc if isinstance(run, TrainingRun) else np.asarray(run, dtype=float)
    need = min_run_length(hp.beta_set)
    if y.size < need:
        raise RunTooShortError(
            f"run has {y.size} epochs; at least {need} are needed for beta={min(hp.beta_set)}")
    region = stop_region(y, hp.beta_set, hp.interval_mode)
    mtr = running_max_rate(y)
    comp = compensation_trace(mtr.mt, hp.theta1, hp.theta2, hp.init_mode)
    segs = segment_sums(comp, region)
    fallback = "no stop region reduction found; using [1, E-1]" if region.fallback else None

    if hp.stop_rule == ARGMAX_SEGMENT:
        if segs:
            best = max(range(len(segs)), key=lambda k: (segs[k][2], -k))
            e_tsp = segs[best][1]
        else:
            e_tsp = None
    else:
        inside = (comp.epochs >= region.lo) & (comp.epochs <= region.hi) & (comp.c > 0)
        e_tsp = int(comp.epochs[inside][-1]) if inside.any() else None
    if e_tsp is None:
        e_tsp = region.lo
        fallback = "no positive compensation in region" if fallback is None else (
            fallback + "; no positive compensation in region")
    return TspResult(int(e_tsp), region, segs, hp.stop_rule, hp, fallback, mtr, comp)
