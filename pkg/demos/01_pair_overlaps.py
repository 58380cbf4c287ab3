"""
Overlap of two customers in an infinite-server queue
=====================================================

Two customers, ``lag`` batches apart, overlap for
``O = (min(D_1, D_2) - A_2)^+``. This script evaluates the tail
``P(O > t)`` three ways and shows how it decays with the lag.
"""

# %%
# M/M/inf with unit rates: the tail is exp(-2t) (1/2)^k.
import numpy as np

from overlapq import (DeterministicBatch, Exponential, LogNormal, PairIndividual, QueueModel,
                      Uniform, overlap_mean, tail_curve)

mm = QueueModel(Exponential(1.0), DeterministicBatch(1), Exponential(1.0))
grid = np.linspace(0.0, 3.0, 7)
for method in ("closed", "quadrature", "mc"):
    curve = tail_curve(mm, PairIndividual(1), grid, method, n_samples=200_000)
    print(f"{curve.method:>16}:", np.round(curve.values, 5))
print(f"{'exp(-2t)/2':>16}:", np.round(np.exp(-2 * grid) / 2, 5))

# %%
# Lag decay at t = 0: each extra batch in between halves the overlap chance.
for k in range(1, 6):
    print(k, tail_curve(mm, PairIndividual(k), [0.0]).values[0])

# %%
# Lag zero: the same customer (tail = service tail) or two customers of one
# batch (tail = service tail squared).
print(tail_curve(mm, PairIndividual(0, same_customer=True), grid).values)
print(tail_curve(mm, PairIndividual(0), grid).values)

# %%
# Non-exponential laws fall back to quadrature against the k-fold density of
# the inter-arrival times (here built by grid convolution of a uniform law).
general = QueueModel(Uniform(0.0, 2.0), DeterministicBatch(1), LogNormal(0.0, 0.5))
quad = tail_curve(general, PairIndividual(2), grid)
print(quad.method, np.round(quad.values, 6))

# %%
# Mean overlap time is the integral of the tail: 1/4 for the M/M/inf pair.
print(overlap_mean(mm, PairIndividual(1)))
