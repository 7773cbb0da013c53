"""Positive/negative rate-of-change event lists, standardized interval sums and the stop region."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

POSITIVE, NEGATIVE = "positive", "negative"
PROCE, NROCE = "PROCE", "NROCE"
COMPACTED, DENSE = "compacted", "dense"

DEFAULT_BETAS = (5, 6, 7)


@dataclass(frozen=True)
class CompactedEvents:
    kind: str
    epochs: np.ndarray
    magnitudes: np.ndarray
    n_epochs: int

    def __len__(self):
        return len(self.epochs)

    @property
    def source(self) -> str:
        return PROCE if self.kind == POSITIVE else NROCE


@dataclass(frozen=True)
class IntervalSums:
    beta: int
    epochs: np.ndarray
    sums: np.ndarray
    standardized: np.ndarray | None
    last_epoch: int

    @property
    def degenerate(self) -> bool:
        return self.standardized is None


@dataclass(frozen=True)
class ReductionPoint:
    source: str
    beta: int
    epoch: int
    found: bool


@dataclass(frozen=True)
class StopRegion:
    lo: int
    hi: int
    contributing: tuple[ReductionPoint, ...] = ()
    fallback: bool = False
    interval_sums: dict = field(default_factory=dict, compare=False, repr=False)

    def __contains__(self, epoch):
        return self.lo <= epoch <= self.hi


def decompose_rates(y_f):
    """Split epoch-to-epoch changes into PROCE and NROCE; zero changes go to neither."""
    y = np.asarray(y_f, dtype=float)
    if y.size < 2:
        raise ValueError("need at least 2 epochs")
    delta = np.diff(y)
    ep = np.arange(1, y.size)
    pos, neg = delta > 0, delta < 0
    return (CompactedEvents(POSITIVE, ep[pos], delta[pos], y.size),
            CompactedEvents(NEGATIVE, ep[neg], -delta[neg], y.size))


def standardize(x):
    """Population z-scores; None when fewer than two values or (numerically) constant."""
    x = np.asarray(x, dtype=float)
    if x.size < 2:
        return None
    mu = x.mean()
    sd = x.std()
    if sd <= 1e-12 * max(1.0, np.abs(x).max()):
        return None
    return (x - mu) / sd


def interval_sums(events: CompactedEvents, beta: int, mode: str = COMPACTED) -> IntervalSums:
    """Sum magnitudes over consecutive blocks of ``beta`` entries.

    ``compacted`` blocks run over the event list; ``dense`` blocks run over
    epochs ``1..E-1`` with zero magnitude where no event occurred. Each block
    is labelled by its first entry's epoch. Trailing partial blocks are
    dropped.
    """
    if beta < 2:
        raise ValueError("beta must be >= 2")
    if mode == COMPACTED:
        ep, mag = events.epochs, events.magnitudes
    elif mode == DENSE:
        ep = np.arange(1, events.n_epochs)
        mag = np.zeros(ep.size)
        mag[events.epochs - 1] = events.magnitudes
    else:
        raise ValueError(f"unknown interval mode {mode!r}")
    n_blocks = len(ep) // beta
    sums = mag[:n_blocks * beta].reshape(n_blocks, beta).sum(axis=1)
    rep = ep[:n_blocks * beta:beta]
    std = standardize(sums) if n_blocks >= 2 else None
    return IntervalSums(beta, np.asarray(rep, dtype=int), sums, std, events.n_epochs - 1)


def find_reduction_epoch(sums: IntervalSums, source: str = "") -> ReductionPoint:
    if sums.degenerate:
        return ReductionPoint(source, sums.beta, sums.last_epoch, False)
    below = np.flatnonzero(sums.standardized < 0)
    if below.size == 0:
        return ReductionPoint(source, sums.beta, sums.last_epoch, False)
    return ReductionPoint(source, sums.beta, int(sums.epochs[below[0]]), True)


def stop_region(y_f, beta_set=DEFAULT_BETAS, mode: str = COMPACTED) -> StopRegion:
    """Bracket the first standardized reductions of PROCE and NROCE over all ``beta``.

    ``lo``/``hi`` are the min/max over every reduction found; with none
    found the region is ``[1, E-1]`` and ``fallback`` is set.
    """
    betas = sorted(set(int(b) for b in beta_set))
    if not betas:
        raise ValueError("beta_set must be nonempty")
    proce, nroce = decompose_rates(y_f)
    last = proce.n_epochs - 1
    points, tables = [], {}
    for events in (proce, nroce):
        for b in betas:
            isums = interval_sums(events, b, mode)
            tables[(events.source, b)] = isums
            points.append(find_reduction_epoch(isums, events.source))
    found = [p for p in points if p.found]
    if not found:
        return StopRegion(1, last, tuple(points), True, tables)
    lo = min(p.epoch for p in found)
    hi = max(p.epoch for p in found)
    return StopRegion(lo, hi, tuple(points), False, tables)


def literal_combination(region: StopRegion):
    """Bounds from ``[min(min NROCE, max PROCE), max(max NROCE, max PROCE)]``.

    Returns None unless both sources produced a reduction.
    """
    n = [p.epoch for p in region.contributing if p.found and p.source == NROCE]
    p = [q.epoch for q in region.contributing if q.found and q.source == PROCE]
    if not n or not p:
        return None
    return min(min(n), max(p)), max(max(n), max(p))
