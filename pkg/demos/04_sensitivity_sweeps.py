"""
Sensitivity sweeps
==================

Rerun the stop-point search over a seeded battery while varying the
interval sizes, the small-learning threshold, the stop rule and the
simulated dataset size.
"""
import dataclasses

import numpy as np

from autotsp import Hyperparams, find_tsp, simulate_run
from autotsp.sim import default_battery


def score(hp=Hyperparams(), D=None, n=40):
    hits, gaps = [], []
    for cfg, seed in default_battery(n):
        if D is not None:
            cfg = dataclasses.replace(cfg, D=D)
        sim = simulate_run(cfg, seed)
        e = find_tsp(sim.run, hp).e_tsp
        proxy, m = sim.run.test_acc, sim.truth["mota_sim"]
        hits.append(proxy[e] >= 0.95 * proxy[m])
        gaps.append(abs(e - m))
    return f"within 95% of best: {np.mean(hits):4.0%}   median gap: {np.median(gaps):5.1f}"


print("beta {5,6,7}        ", score())
print("beta {3,4,5}        ", score(Hyperparams(beta_set=(3, 4, 5))))
for t in (0.2, 0.8):
    print(f"theta1={t}         ", score(Hyperparams(theta1=t)))
print("last non-zero       ", score(Hyperparams(stop_rule="last_nonzero")))
print("overwrite deficit   ", score(Hyperparams(init_mode="overwrite")))
print("D=50,000            ", score(D=50_000, n=20))
