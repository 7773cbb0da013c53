"""Label-noise transition matrices and seeded label corruption."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .traininglog import SampleLedger

SYMMETRIC = "symmetric"
ASYMMETRIC = "asymmetric"


@dataclass(frozen=True)
class NoiseSpec:
    kind: str
    tau: float
    class_count: int

    def __post_init__(self):
        if self.kind not in (SYMMETRIC, ASYMMETRIC):
            raise ValueError(f"unknown noise kind {self.kind!r}")
        if not 0.0 <= self.tau < 1.0:
            raise ValueError("tau must be in [0, 1)")
        if self.class_count < 2:
            raise ValueError("class_count must be >= 2")


def build_transition_matrix(spec: NoiseSpec) -> np.ndarray:
    """Row-stochastic ``c x c`` matrix; row i is the distribution of the observed label given true label i.

    Asymmetric noise moves mass ``tau`` to the following class, wrapping
    ``c - 1 -> 0``.
    """
    c, tau = spec.class_count, float(spec.tau)
    if spec.kind == SYMMETRIC:
        N = np.full((c, c), tau / (c - 1))
    else:
        N = np.zeros((c, c))
        N[np.arange(c), (np.arange(c) + 1) % c] = tau
    np.fill_diagonal(N, 1.0 - tau)
    return N


def corrupt_labels(true_labels, spec: NoiseSpec, seed: int, sample_ids=None):
    """Flip each label independently with probability ``tau``.

    A flipped label takes a target drawn from the off-diagonal part of its
    transition row. Returns ``(observed, ledger)``.
    """
    y = np.asarray(true_labels, dtype=np.int64)
    c = spec.class_count
    if y.size and (y.min() < 0 or y.max() >= c):
        raise ValueError(f"label out of range [0, {c})")
    rng = np.random.default_rng(seed)
    flip = rng.random(y.size) < spec.tau
    observed = y.copy()
    if spec.kind == SYMMETRIC:
        # uniform over the c-1 other classes
        shift = rng.integers(1, c, size=y.size)
        observed[flip] = (y[flip] + shift[flip]) % c
    else:
        observed[flip] = (y[flip] + 1) % c
    if sample_ids is None:
        sample_ids = [str(i) for i in range(y.size)]
    ledger = SampleLedger(tuple(sample_ids), observed, y, c)
    return observed, ledger
