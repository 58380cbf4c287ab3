"""Trajectory and direct sampling of overlap times.

Two independent sampling routes serve as empirical oracles:

* ``simulate_trajectory`` + ``overlaps_from_trajectory`` build one long
  GI^B/GI/inf sample path and read overlap samples off non-overlapping
  windows of consecutive batches;
* ``direct_sample_overlap`` draws the arrival gaps, batch sizes and service
  times of a single window directly.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from . import rng as rngmod
from .analytic import PairBatch, PairIndividual, TupleQuery
from .distributions import BlockSum
from .errors import DomainError
from .numerics import dkw_halfwidth, empirical_tail

_TRAJECTORY_SALT = 11
_DIRECT_SALT = 12


@dataclass
class TrajectoryLog:
    """Arrival epochs, batch sizes and service times of a sample path.

    Services of batch ``n`` are ``service[offsets[n]:offsets[n + 1]]``
    (batches and customers are 0-based in arrays).
    """

    arrival: np.ndarray
    batch_size: np.ndarray
    offsets: np.ndarray
    service: np.ndarray
    seed: int | None = None

    def __post_init__(self):
        if self.arrival.size and np.any(np.diff(self.arrival) <= 0):
            raise DomainError("arrival times must be strictly increasing")
        if np.any(self.batch_size < 1):
            raise DomainError("batch sizes must be >= 1")
        if self.offsets[-1] != self.service.size:
            raise DomainError("service array does not match batch sizes")

    @classmethod
    def from_batches(cls, arrivals, services):
        """Build a log from arrival epochs and one service list per batch."""
        sizes = np.array([len(s) for s in services], dtype=np.int64)
        offsets = np.concatenate([[0], np.cumsum(sizes)])
        flat = np.concatenate([np.asarray(s, dtype=float) for s in services])
        return cls(np.asarray(arrivals, dtype=float), sizes, offsets, flat)

    @property
    def n_batches(self):
        return self.arrival.size

    @property
    def departure(self):
        return self.service + np.repeat(self.arrival, self.batch_size)

    def batch_services(self, n):
        return self.service[self.offsets[n]:self.offsets[n + 1]]

    def to_csv(self, target):
        """Write one row per customer (indices are 1-based).

        ``target`` is a path or an open text file.
        """
        if hasattr(target, "write"):
            self._write_rows(target)
        else:
            with open(target, "w", newline="") as fh:
                self._write_rows(fh)

    def _write_rows(self, fh):
        dep = self.departure
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["batch_index", "arrival_time", "customer_index",
                         "service_time", "departure_time"])
        for n in range(self.n_batches):
            for j in range(self.offsets[n], self.offsets[n + 1]):
                writer.writerow([n + 1, repr(float(self.arrival[n])), j - self.offsets[n] + 1,
                                 repr(float(self.service[j])), repr(float(dep[j]))])


def simulate_trajectory(model, n_batches, seed=0):
    """Sample ``n_batches`` consecutive batches of the queue.

    ``A_1`` is the first inter-arrival draw and ``A_{n+1} = A_n + gap``.
    Work is cut into fixed-size chunks with one random stream each, so the
    path depends only on ``(model, n_batches, seed)``.
    """
    n_batches = int(n_batches)
    if n_batches < 1:
        raise DomainError("n_batches must be >= 1")
    gaps, sizes, services = [], [], []
    for i, size in enumerate(rngmod.chunk_sizes(n_batches)):
        g = rngmod.stream(seed, _TRAJECTORY_SALT * 2**32 + i)
        gaps.append(np.asarray(model.interarrival.sample(g, size), dtype=float))
        b = np.asarray(model.batch.sample(g, size), dtype=np.int64)
        sizes.append(b)
        services.append(np.asarray(model.service.sample(g, int(b.sum())), dtype=float))
    sizes = np.concatenate(sizes)
    offsets = np.concatenate([[0], np.cumsum(sizes)])
    return TrajectoryLog(np.cumsum(np.concatenate(gaps)), sizes, offsets,
                         np.concatenate(services), seed)


def _window(query):
    """``(member offsets relative to the first batch, statistic)``."""
    if isinstance(query, PairIndividual):
        return (0, query.lag), "first-customer"
    if isinstance(query, PairBatch):
        return (0, query.lag), "min" if query.mode == "first" else "max"
    if isinstance(query, TupleQuery):
        offs = tuple(i - query.indices[0] for i in query.indices)
        stat = {"individual": "first-customer", "first": "min", "last": "max"}[query.mode]
        return offs, stat
    raise DomainError(f"unsupported query {query!r}")


def _batch_stat(sizes, services, offsets, stat):
    if stat == "first-customer":
        return services[offsets[:-1]]
    reduce = np.minimum if stat == "min" else np.maximum
    return reduce.reduceat(services, offsets[:-1])


def overlaps_from_trajectory(log, query, full_output=False):
    """Overlap samples from disjoint windows of a trajectory.

    A window covers batches ``n .. n + span``; successive windows start
    ``span + 1`` batches apart so that they share no batch and the samples
    are i.i.d. For individual pairs the first customer of each batch is
    used; a lag-0 pair of distinct customers uses customers 1 and 2 and
    skips batches of size one (``skipped`` in the info dict).
    """
    if isinstance(query, PairIndividual) and query.lag == 0:
        sizes = log.batch_size
        first = log.service[log.offsets[:-1]]
        if query.same_customer:
            samples = first.copy()
            skipped = 0
        else:
            ok = sizes >= 2
            second = log.service[np.minimum(log.offsets[:-1] + 1, log.service.size - 1)]
            samples = np.minimum(first, second)[ok]
            skipped = int((~ok).sum())
        return (samples, {"skipped": skipped, "anchors": samples.size}) if full_output else samples

    offs, stat = _window(query)
    span = offs[-1]
    if span + 1 > log.n_batches:
        raise DomainError("trajectory is shorter than the query's window")
    values = _batch_stat(log.batch_size, log.service, log.offsets, stat)
    anchors = np.arange(0, log.n_batches - span, span + 1)
    last_arrival = log.arrival[anchors + span]
    earliest = np.full(anchors.size, np.inf)
    for o in offs:
        earliest = np.minimum(earliest, log.arrival[anchors + o] + values[anchors + o])
    samples = np.maximum(earliest - last_arrival, 0.0)
    if full_output:
        return samples, {"skipped": 0, "anchors": samples.size}
    return samples


def _direct_chunk(model, query):
    service, batch = model.service, model.batch
    offs, stat = _window(query)
    gap_blocks = [BlockSum(model.interarrival, b - a) for a, b in zip(offs, offs[1:])]

    def member_stat(g, size):
        if stat == "first-customer":
            return np.asarray(service.sample(g, size), dtype=float)
        sizes = np.asarray(batch.sample(g, size), dtype=np.int64)
        draws = np.asarray(service.sample(g, int(sizes.sum())), dtype=float)
        starts = np.concatenate([[0], np.cumsum(sizes)[:-1]])
        reduce = np.minimum if stat == "min" else np.maximum
        return reduce.reduceat(draws, starts)

    def draw(g, size):
        if isinstance(query, PairIndividual) and query.lag == 0:
            s1 = np.asarray(service.sample(g, size), dtype=float)
            if query.same_customer:
                return s1
            return np.minimum(s1, np.asarray(service.sample(g, size), dtype=float))
        block_gaps = np.column_stack([b.sample(g, size) for b in gap_blocks])
        to_last = np.cumsum(block_gaps[:, ::-1], axis=1)[:, ::-1]
        earliest = member_stat(g, size)
        earliest = earliest - to_last[:, 0]
        for i in range(1, len(offs)):
            lag = to_last[:, i] if i < len(offs) - 1 else 0.0
            earliest = np.minimum(earliest, member_stat(g, size) - lag)
        return np.maximum(earliest, 0.0)

    return draw


def direct_sample_overlap(model, query, n, seed=0):
    """``n`` i.i.d. overlap samples drawn straight from their definition."""
    if int(n) < 1:
        raise DomainError("n must be >= 1")
    return rngmod.map_chunks(_direct_chunk(model, query), int(n), seed, _DIRECT_SALT)


@dataclass
class SimEstimate:
    """Empirical tail on a grid with its DKW half-width ``epsilon``."""

    t: np.ndarray
    values: np.ndarray
    n: int
    epsilon: float
    delta: float
    seed: int | None = None
    meta: dict = field(default_factory=dict)

    def to_dict(self):
        return {"t": self.t.tolist(), "values": self.values.tolist(), "n": self.n,
                "epsilon": self.epsilon, "delta": self.delta, "seed": self.seed,
                "meta": self.meta}


def estimate_tail(samples, grid, delta=0.01, seed=None):
    samples = np.asarray(samples, dtype=float)
    grid = np.asarray(grid, dtype=float)
    values = empirical_tail(samples, grid)
    return SimEstimate(grid, values, int(samples.size), dkw_halfwidth(samples.size, delta),
                       float(delta), seed)
