"""
Checking formulas against simulated queues
===========================================

Simulate a long sample path, read overlap samples off disjoint windows and
compare the empirical tail with the analytic one inside a DKW band.
"""

# %%
import numpy as np

from overlapq import (ExplicitBatch, LogNormal, PairBatch, QueueModel, Uniform,
                      compare_curves, default_grid, direct_sample_overlap, estimate_tail,
                      overlaps_from_trajectory, reduction_suite, simulate_trajectory, tail_curve)
from overlapq.validation import report_lines

model = QueueModel(Uniform(0.2, 1.8), ExplicitBatch((0.3, 0.3, 0.4)), LogNormal(-0.2, 0.6))
query = PairBatch("last", 2)
grid = default_grid(model, query, steps=41)

log = simulate_trajectory(model, 3 * 10**6, seed=1)
samples = overlaps_from_trajectory(log, query)
sim = estimate_tail(samples, grid, delta=0.01)
analytic = tail_curve(model, query, grid)
report = compare_curves(analytic, sim)
print(analytic.method, report.verdict, f"max dev {report.max_abs_deviation:.2e}",
      f"eps {report.epsilon:.2e}")

# %%
# Direct sampling of a single window is a second, independent oracle.
direct = estimate_tail(direct_sample_overlap(model, query, 10**6, seed=2), grid)
print("trajectory vs direct:", f"{np.max(np.abs(direct.values - sim.values)):.2e}")

# %%
# The first rows of a trajectory dump (one row per customer).
log.to_csv("trajectory.csv")
with open("trajectory.csv") as fh:
    print("".join(fh.readlines()[:4]))

# %%
# Reduction identities: batch formulas collapse to individual ones for
# single arrivals, two-member tuples collapse to pairs, and so on.
for line in report_lines(reduction_suite(n_samples=100_000)):
    print(line)
