"""
Finding the stop point from training accuracy alone
===================================================

The stop region comes from standardized interval sums of the positive and
negative accuracy changes; the stop point is picked inside it from the
small-learning compensation trace.
"""
from autotsp import Hyperparams, analyze, find_tsp, simulate_run
from autotsp.sim import SimConfig

# A CIFAR-sized sample count keeps epoch-to-epoch jitter small.
sim = simulate_run(SimConfig(D=50_000), seed=4)
res = find_tsp(sim.run)

for p in res.region.contributing:
    print(f"{p.source} beta={p.beta}: reduction at {p.epoch if p.found else '-'}")
print(f"stop region [{res.region.lo}, {res.region.hi}]")
print("segments (start, end, sum):", [(s, e, round(v, 2)) for s, e, v in res.segments])
print(f"e_tsp={res.e_tsp}  proxy test acc {sim.run.test_acc[res.e_tsp]:.2f}  "
      f"(best {sim.run.test_acc.max():.2f} at {sim.truth['mota_sim']})")

# The full report adds baselines and label precision/recall at each stop point.
report = analyze(sim.run, Hyperparams(), sim.ledger, sim.trace, tau=0.5).report()
for name, row in sorted(report["baselines"].items()):
    print(f"{name:9s} epoch={row['epoch']}  test={row['test_acc']:.2f}  "
          f"LP={row['lp']:.2f}  LR={row['lr']:.2f}")
