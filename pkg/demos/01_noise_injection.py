"""
Injecting label noise
=====================

Build symmetric and asymmetric transition matrices and corrupt a clean
label vector with them.
"""
import numpy as np

from autotsp import NoiseSpec, build_transition_matrix, corrupt_labels

# Symmetric noise spreads tau evenly over the other classes.
print(np.round(build_transition_matrix(NoiseSpec("symmetric", 0.5, 4)), 3))

# Asymmetric noise sends tau to the following class (the last class wraps to 0).
print(build_transition_matrix(NoiseSpec("asymmetric", 0.4, 4)))

# Corrupt 100k labels; the ledger keeps both observed and true labels.
y = np.random.default_rng(0).integers(0, 10, 100_000)
for kind in ("symmetric", "asymmetric"):
    observed, ledger = corrupt_labels(y, NoiseSpec(kind, 0.2, 10), seed=1)
    print(f"{kind:10s} flipped {np.mean(observed != y):.4f}  "
          f"clean={ledger.n_clean} noisy={ledger.n_noisy}")
