"""Seeded synthetic noisy-label training dynamics.

Each sample gets an onset epoch (clean samples early, noisy samples late);
before the onset it is predicted correctly only by chance, afterwards with
probability ``retention``. The proxy test accuracy rises with clean recall
and falls with noisy recall.
"""
from __future__ import annotations

from dataclasses import dataclass, field, asdict

import numpy as np
from scipy.stats import truncnorm

from .memorization import compute_label_recall, locate_e_mem, locate_e_sm
from .noise import NoiseSpec, corrupt_labels
from .traininglog import (PredictionTrace, SampleLedger, TrainingRun, derive_counts,
                          training_accuracy_from_counts)


@dataclass(frozen=True)
class SimConfig:
    D: int = 1000
    noise: NoiseSpec = field(default_factory=lambda: NoiseSpec("symmetric", 0.5, 10))
    E: int = 200
    clean_onset: tuple[float, float] = (25.0, 10.0)
    noisy_onset: tuple[float, float] = (110.0, 25.0)
    retention: float = 0.98
    background: float = 0.02
    proxy: tuple[float, float, float] = (90.0, 60.0, 8.0)  # a, b, base
    esm_window: int = 5

    def __post_init__(self):
        if self.D < 10:
            raise ValueError("D must be >= 10")
        if self.E < 20:
            raise ValueError("E must be >= 20")
        if not self.clean_onset[0] < self.noisy_onset[0]:
            raise ValueError("clean onset mean must precede noisy onset mean")
        if self.clean_onset[1] <= 0 or self.noisy_onset[1] <= 0:
            raise ValueError("onset spreads must be positive")
        for name in ("retention", "background"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ValueError(f"{name} must be a probability")

    def to_dict(self):
        d = asdict(self)
        d["clean_onset"] = list(self.clean_onset)
        d["noisy_onset"] = list(self.noisy_onset)
        d["proxy"] = list(self.proxy)
        return d

    @classmethod
    def from_dict(cls, d):
        d = dict(d)
        if isinstance(d.get("noise"), dict):
            d["noise"] = NoiseSpec(**d["noise"])
        for k in ("clean_onset", "noisy_onset", "proxy"):
            if k in d:
                d[k] = tuple(float(v) for v in d[k])
        return cls(**d)


@dataclass(frozen=True)
class SimRun:
    run: TrainingRun
    trace: PredictionTrace
    ledger: SampleLedger
    truth: dict
    onsets: np.ndarray = field(repr=False)

    @property
    def clean(self) -> bool:
        return self.truth["clean"]


def _onsets(rng, mean, spread, E, size):
    lo, hi = (0 - mean) / spread, (E - 1 - mean) / spread
    return truncnorm.rvs(lo, hi, loc=mean, scale=spread, size=size, random_state=rng)


def simulate_run(cfg: SimConfig | None = None, seed: int = 0) -> SimRun:
    cfg = cfg or SimConfig()
    rng = np.random.default_rng(seed)
    c = cfg.noise.class_count
    true = rng.integers(0, c, size=cfg.D)
    ids = [str(i) for i in range(cfg.D)]
    _, ledger = corrupt_labels(true, cfg.noise, seed=int(rng.integers(2**63)), sample_ids=ids)
    clean = ledger.clean_mask

    onset = np.empty(cfg.D)
    onset[clean] = _onsets(rng, *cfg.clean_onset, cfg.E, int(clean.sum()))
    onset[~clean] = _onsets(rng, *cfg.noisy_onset, cfg.E, int((~clean).sum()))

    learned = np.arange(cfg.E)[:, None] >= onset[None, :]
    p = np.where(learned, cfg.retention, cfg.background)
    correct = rng.random((cfg.E, cfg.D)) < p
    trace = PredictionTrace(tuple(ids), correct)

    counts = derive_counts(trace, ledger)
    train_acc = training_accuracy_from_counts(counts, cfg.D)
    d_clean, d_noisy = ledger.n_clean, ledger.n_noisy
    a, b, base = cfg.proxy
    lr_clean = counts.s_clean / max(d_clean, 1)
    lr_noisy = counts.s_noisy / max(d_noisy, 1)
    proxy = np.clip(base + a * lr_clean - b * lr_noisy, 0.0, 100.0)

    truth = {"seed": int(seed), "mota_sim": int(np.argmax(proxy)),
             "clean": d_noisy == 0 or d_clean == 0, "e_mem_sim": None, "e_sm_sim": None}
    if not truth["clean"]:
        curves = compute_label_recall(counts, d_clean, d_noisy)
        e_mem = locate_e_mem(curves)
        truth["e_mem_sim"] = e_mem
        truth["e_sm_sim"] = locate_e_sm(curves, e_mem, cfg.esm_window)

    run = TrainingRun.from_arrays(train_acc, proxy, metadata={
        "source": "simulator", "seed": int(seed), "noise": asdict(cfg.noise)})
    return SimRun(run, trace, ledger, truth, onset)


def default_battery(n: int = 100, E: int = 200, start_seed: int = 0):
    """``(config, seed)`` pairs cycling tau in {0.2, 0.5} and both noise kinds."""
    combos = [(tau, kind) for tau in (0.2, 0.5) for kind in ("symmetric", "asymmetric")]
    out = []
    for k in range(n):
        tau, kind = combos[k % len(combos)]
        out.append((SimConfig(noise=NoiseSpec(kind, tau, 10), E=E), start_seed + k))
    return out
