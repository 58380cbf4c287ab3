"""
Batch overlaps: first and last to leave
========================================

A batch counts as present either until its first member leaves (all still
there) or until its last member leaves (anyone still there). The size of a
batch is random, so both rely on min/max of a random-size vector.
"""

# %%
import math

import numpy as np

from overlapq import (Deterministic, DeterministicBatch, ExplicitBatch, Exponential, PairBatch,
                      QueueModel, min_max_tail, tail_curve)

# Min and max of B i.i.d. draws, B in {1, 2}: with G-bar(t) = 1/2 the tails
# are 0.375 and 0.625.
b = ExplicitBatch((0.5, 0.5))
g = Exponential(math.log(2.0))
print(min_max_tail(b, g, "min", 1.0), min_max_tail(b, g, "max", 1.0))

# %%
# Batches of two in M^B/M/inf: P(O > 0) is 1/3 (first) and 2/3 (last).
mb = QueueModel(Exponential(1.0), DeterministicBatch(2), Exponential(1.0))
grid = np.linspace(0.0, 2.0, 5)
for mode in ("first", "last"):
    closed = tail_curve(mb, PairBatch(mode, 1), grid, "closed")
    quad = tail_curve(mb, PairBatch(mode, 1), grid, "quadrature")
    print(mode, np.round(closed.values, 6), "max |closed - quad| =",
          f"{np.max(np.abs(closed.values - quad.values)):.1e}")

# %%
# Deterministic service time 1: the tail is 1 - exp(-(1 - t)) below t = 1 and
# jumps to zero there, whatever the batch law.
det = QueueModel(Exponential(1.0), ExplicitBatch((0.2, 0.3, 0.5)), Deterministic(1.0))
t = np.array([0.0, 0.5, 0.99, 1.0, 1.2])
print(tail_curve(det, PairBatch("last", 1), t).values)
print(1 - np.exp(-(1 - t[:3])))
