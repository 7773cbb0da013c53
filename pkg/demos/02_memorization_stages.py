"""
Memorization stages on a simulated run
======================================

With ground truth (which samples are noisy) the clean/noisy label recall
splits training into pre-, mild- and severe-memorization stages.
"""
from autotsp import compute_label_recall, derive_counts, memorization_stages, simulate_run

sim = simulate_run(seed=3)
counts = derive_counts(sim.trace, sim.ledger)
curves = compute_label_recall(counts, sim.ledger.n_clean, sim.ledger.n_noisy)
stages = memorization_stages(curves)

print(f"e_mem={stages.e_mem}  e_sm={stages.e_sm}  best proxy test epoch={sim.truth['mota_sim']}")
for e in range(0, sim.run.n_epochs, 20):
    print(f"epoch {e:3d}  train={sim.run.train_acc[e]:5.1f}  "
          f"lr_clean={curves.lr_clean[e]:.3f}  lr_noisy={curves.lr_noisy[e]:.3f}  "
          f"stage={stages.labels[e]}")
