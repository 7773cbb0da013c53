"""Training stop point identification for noisy-label training runs.

Works from the per-epoch training accuracy alone; optional per-sample
ledgers enable ground-truth memorization diagnostics.
"""
from .baselines import BaselineResult, mota_point, nha_point, standard_point
from .memorization import (MemorizationStages, RecallCurves, compute_label_recall,
                           label_precision_recall, locate_e_mem, locate_e_sm,
                           memorization_stages)
from .noise import NoiseSpec, build_transition_matrix, corrupt_labels
from .regions import (CompactedEvents, IntervalSums, ReductionPoint, StopRegion,
                      decompose_rates, find_reduction_epoch, interval_sums, stop_region)
from .report import Analysis, analyze
from .sim import SimConfig, SimRun, simulate_run
from .stoppoint import (CompensationTrace, Hyperparams, MaxTrace, RunTooShortError, TspResult,
                        compensation_trace, find_tsp, running_max_rate, segment_sums)
from .traininglog import (EpochCounts, EpochRecord, IngestionError, PredictionTrace,
                          SampleLedger, TrainingRun, derive_counts, load_ledger, load_run,
                          load_trace, training_accuracy_from_counts, write_ledger, write_run,
                          write_trace)

__version__ = "0.1.0"
