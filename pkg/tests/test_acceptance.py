"""Exit criteria: oracle equivalence, invariants and simulator behaviour."""
import itertools
import time

import numpy as np
import pytest

from acceptance_log import DETAILS, record
from autotsp.noise import NoiseSpec, build_transition_matrix, corrupt_labels
from autotsp.regions import decompose_rates, interval_sums, stop_region
from autotsp.report import analyze
from autotsp.sim import SimConfig, default_battery, simulate_run
from autotsp.stoppoint import Hyperparams, compensation_trace, find_tsp
from autotsp.baselines import nha_point
from oracles import compensation_reference, first_crossing

SUITE_START = time.perf_counter()
E = 200


def random_curve(rng, n=E):
    """Accuracy-like curves of several shapes, clipped to [0, 100]."""
    kind = rng.integers(4)
    t = np.arange(n)
    if kind == 0:
        y = rng.uniform(0, 100) + np.cumsum(rng.normal(0, rng.uniform(0.1, 5), n))
    elif kind == 1:
        mid, width, top = rng.uniform(5, 80), rng.uniform(2, 30), rng.uniform(30, 100)
        y = top / (1 + np.exp(-(t - mid) / width)) + rng.normal(0, rng.uniform(0, 2), n)
    elif kind == 2:
        y = np.cumsum(rng.choice([0.0, 0.0, 0.5, 1.0, -0.5], size=n)) + rng.uniform(0, 20)
    else:
        y = rng.uniform(0, 100, n)
    y = np.clip(y, 0, 100)
    if rng.random() < 0.5:
        y = np.round(y, 1)
    return y


@pytest.fixture(scope="module")
def random_curves():
    rng = np.random.default_rng(20201)
    return [random_curve(rng) for _ in range(1000)]


@pytest.fixture(scope="module")
def battery():
    return [(cfg, simulate_run(cfg, seed)) for cfg, seed in default_battery(100, E=E)]


def test_c1_compensation_oracle():
    grid = (0.0, 0.1, 0.4, 0.6, 1.0, 3.0)
    t0 = time.perf_counter()
    cases = mismatches = 0
    for n in range(1, 9):
        seqs = np.array(list(itertools.product(grid, repeat=n)))
        ct = compensation_trace(seqs, 0.5, 0.5)
        for row, c_row in zip(seqs.tolist(), ct.c.tolist()):
            ref, _, _ = compensation_reference(row, 0.5, 0.5)
            if any(abs(a - b) > 1e-12 for a, b in zip(ref, c_row)):
                mismatches += 1
        cases += len(seqs)
    elapsed = time.perf_counter() - t0
    ok = mismatches == 0 and cases >= 6 ** 8 and elapsed < 60
    record("C1 compensation oracle", ok,
           f"{cases} sequences, {mismatches} mismatches, {elapsed:.1f}s (limit 60s)")
    assert ok


def test_c2_decomposition_identity(random_curves):
    worst = 0.0
    for y in random_curves:
        p, n = decompose_rates(y)
        pos, neg = np.zeros(len(y)), np.zeros(len(y))
        pos[p.epochs] = p.magnitudes
        neg[n.epochs] = n.magnitudes
        rec = y[0] + np.cumsum(pos) - np.cumsum(neg)
        worst = max(worst, float(np.abs(rec - y).max()))
    ok = worst <= 1e-9
    record("C2 decomposition identity", ok, f"1000 curves E=200, max error {worst:.2e} (tol 1e-9)")
    assert ok


def test_c3_standardization(random_curves, battery):
    max_mu = max_var = 0.0
    nondegen = degen = 0
    curves = list(random_curves) + [sim.run.train_acc for _, sim in battery]
    for y in curves:
        for events in decompose_rates(y):
            for beta in (3, 4, 5, 6, 7):
                s = interval_sums(events, beta)
                if s.degenerate:
                    degen += 1
                    continue
                nondegen += 1
                max_mu = max(max_mu, abs(float(s.standardized.mean())))
                max_var = max(max_var, abs(float(s.standardized.var()) - 1.0))
    flagged = 0
    constant_inputs = [np.full(E, 40.0), np.linspace(0, 99.5, E), np.linspace(90, 10, E),
                       np.tile([10.0, 12.0], E // 2), np.zeros(12)]
    for y in constant_inputs:
        for events in decompose_rates(y):
            for beta in (2, 3, 5, 7):
                flagged += interval_sums(events, beta).degenerate
    expect_flagged = len(constant_inputs) * 2 * 4
    ok = max_mu < 1e-9 and max_var < 1e-9 and flagged == expect_flagged
    record("C3 standardization", ok,
           f"{nondegen} non-degenerate tables: max|mean| {max_mu:.1e}, max|var-1| {max_var:.1e}; "
           f"constant inputs flagged {flagged}/{expect_flagged}")
    assert ok


def test_c4_containment(random_curves, battery):
    total = inside = 0
    for y in list(random_curves) + [sim.run.train_acc for _, sim in battery]:
        for rule in ("argmax_segment", "last_nonzero"):
            res = find_tsp(y, Hyperparams(stop_rule=rule))
            total += 1
            inside += res.region.lo <= res.e_tsp <= res.region.hi
    ok = inside == total
    record("C4 containment", ok, f"{inside}/{total} runs with region.lo <= e_tsp <= region.hi")
    assert ok


def behaviour(battery):
    rows = []
    for cfg, sim in battery:
        res = find_tsp(sim.run)
        proxy = sim.run.test_acc
        m = sim.truth["mota_sim"]
        rows.append((cfg, sim, res.e_tsp, m, proxy[res.e_tsp], proxy[m]))
    return rows


def test_c5_simulator_behaviour(battery):
    rows = behaviour(battery)
    good = [r[4] >= 0.95 * r[5] for r in rows]
    dist = [abs(r[2] - r[3]) for r in rows]
    frac, med = float(np.mean(good)), float(np.median(dist))
    for (cfg, sim, e_tsp, m, pt, pm), g in zip(rows, good):
        DETAILS.append(f"C5 seed={sim.truth['seed']:3d} {cfg.noise.kind:10s} tau={cfg.noise.tau} "
                       f"e_tsp={e_tsp:3d} mota={m:3d} proxy(e_tsp)={pt:6.2f} "
                       f"proxy(mota)={pm:6.2f} {'ok' if g else 'miss'}")
    ok = frac >= 0.80 and med <= 15
    record("C5 simulator behaviour", ok,
           f"proxy(e_tsp) >= 0.95 proxy(mota) in {frac:.0%} (need >= 80%), "
           f"median |e_tsp - mota| = {med:.1f} (need <= 15)")
    assert ok


def test_c6_beta_sensitivity(battery):
    overlap = 0
    for _, sim in battery:
        a = stop_region(sim.run.train_acc, (3, 4, 5))
        b = stop_region(sim.run.train_acc, (5, 6, 7))
        overlap += max(a.lo, b.lo) <= min(a.hi, b.hi)
    ok = overlap >= 0.9 * len(battery)
    record("C6 beta sensitivity", ok, f"regions overlap in {overlap}/{len(battery)} (need >= 90%)")
    assert ok


def test_c7_theta_sensitivity(battery):
    close = 0
    for _, sim in battery:
        base = find_tsp(sim.run, Hyperparams(theta1=0.5)).e_tsp
        close += all(abs(find_tsp(sim.run, Hyperparams(theta1=t)).e_tsp - base) <= 20
                     for t in (0.2, 0.8))
    ok = close >= 0.8 * len(battery)
    record("C7 theta sensitivity", ok,
           f"theta1 in {{0.2, 0.8}} within 20 epochs of theta1=0.5 in {close}/{len(battery)} "
           "(need >= 80%)")
    assert ok


def test_c8_nha(battery):
    checked = correct = 0
    for cfg, sim in battery:
        tau = cfg.noise.tau
        y = sim.run.train_acc
        r = nha_point(y, tau)
        expect = first_crossing(y.tolist(), 100 - 100 * tau)
        checked += 1
        correct += (r.epoch if r.found else None) == expect
    ok = correct == checked
    record("C8 NHA correctness", ok, f"{correct}/{checked} runs match linear-scan first crossing")
    assert ok


def test_c9_noise_model():
    worst_row = 0.0
    for kind in ("symmetric", "asymmetric"):
        for c in (2, 3, 10, 100):
            for tau in np.linspace(0, 0.95, 20):
                N = build_transition_matrix(NoiseSpec(kind, float(tau), c))
                assert (N >= 0).all()
                worst_row = max(worst_row, float(np.abs(N.sum(axis=1) - 1).max()))
    n = 100_000
    y = np.random.default_rng(99).integers(0, 10, n)
    rates = []
    within = True
    for kind in ("symmetric", "asymmetric"):
        for tau in (0.2, 0.4, 0.5):
            obs, _ = corrupt_labels(y, NoiseSpec(kind, tau, 10), seed=int(tau * 100))
            rate = float(np.mean(obs != y))
            bound = 3 * np.sqrt(tau * (1 - tau) / n)
            within &= abs(rate - tau) <= bound
            rates.append(f"{kind[:3]} {tau}: {rate:.4f}")
    ok = worst_row <= 1e-12 and within
    record("C9 noise model", ok, f"max row-sum error {worst_row:.1e}; flip rates " + ", ".join(rates))
    assert ok


def test_c10_performance():
    sim = simulate_run(SimConfig(D=50_000, E=200), seed=7)
    t0 = time.perf_counter()
    result = analyze(sim.run, Hyperparams(), sim.ledger, sim.trace, tau=0.5)
    result.report_json()
    elapsed = time.perf_counter() - t0
    ok = elapsed < 1.0
    record("C10a analyze performance", ok, f"200 epochs x 50,000 samples analyzed in {elapsed:.3f}s (limit 1s)")
    assert ok


def test_c10_suite_duration():
    elapsed = time.perf_counter() - SUITE_START
    ok = elapsed < 600
    record("C10b acceptance suite duration", ok, f"{elapsed:.1f}s (limit 600s)")
    assert ok
