"""Counter-based random streams keyed by ``(seed, stream index)``.

Every sampling task asks for its own generator; no module-level generator
exists. Philox is counter based, so a stream is a pure function of its key and
streams for different indices never overlap in practice.
"""

import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

# Monte-Carlo work is cut into fixed-size chunks, one stream per chunk, so the
# output never depends on how many workers run the chunks.
CHUNK_SIZE = 1 << 17


def stream(seed, index=0):
    """Independent generator for replicate/chunk ``index`` of ``seed``."""
    seq = np.random.SeedSequence(int(seed), spawn_key=(int(index),))
    return np.random.Generator(np.random.Philox(seq))


def chunk_sizes(n, chunk=CHUNK_SIZE):
    full, rest = divmod(int(n), chunk)
    return [chunk] * full + ([rest] if rest else [])


def worker_count():
    """Worker cap from ``OVERLAPQ_THREADS`` (default 1)."""
    raw = os.environ.get("OVERLAPQ_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def map_chunks(fn, n, seed, salt=0):
    """Run ``fn(rng, size)`` over the chunks of ``n`` draws and concatenate.

    Chunk ``i`` uses stream ``(seed, salt * 2**32 + i)``; results are merged
    in chunk order whatever the worker count.
    """
    sizes = chunk_sizes(n)
    jobs = [(stream(seed, salt * 2**32 + i), size) for i, size in enumerate(sizes)]
    workers = min(worker_count(), len(jobs))
    if workers <= 1:
        parts = [fn(rng, size) for rng, size in jobs]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda job: fn(*job), jobs))
    return np.concatenate(parts, axis=0)
