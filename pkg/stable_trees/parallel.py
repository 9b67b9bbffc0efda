"""Seeded replica chunking with joblib fan-out.

Replicas are split into fixed-size chunks; chunk ``i`` draws from the ``i``-th
child of ``SeedSequence(seed)``. Results depend only on the seed, the replica
count and the chunk size, never on the number of workers.
"""

from __future__ import annotations

import logging
from typing import Callable, TypeVar

import numpy as np
from joblib import Parallel, delayed

from stable_trees.config import get_chunk_size, get_n_jobs
from stable_trees.errors import ParameterError

logger = logging.getLogger(__name__)

T = TypeVar("T")

SeedLike = int | np.random.SeedSequence


def as_seed_sequence(seed: SeedLike) -> np.random.SeedSequence:
    if isinstance(seed, np.random.SeedSequence):
        return seed
    if int(seed) < 0:
        raise ParameterError("seed must be a non-negative integer.")
    return np.random.SeedSequence(int(seed))


def chunk_plan(
    replicas: int, seed: SeedLike, chunk_size: int | None = None
) -> list[tuple[int, np.random.SeedSequence]]:
    """Return (replica count, seed sequence) pairs covering ``replicas``."""

    if replicas < 1:
        raise ParameterError("replicas must be at least 1.")
    size = chunk_size or get_chunk_size()
    counts = [size] * (replicas // size)
    if replicas % size:
        counts.append(replicas % size)
    children = as_seed_sequence(seed).spawn(len(counts))
    return list(zip(counts, children))


def _run_chunk(
    worker: Callable[[int, np.random.Generator], T],
    count: int,
    sequence: np.random.SeedSequence,
) -> T:
    return worker(count, np.random.default_rng(sequence))


def run_chunked(
    worker: Callable[[int, np.random.Generator], T],
    replicas: int,
    seed: SeedLike,
    n_jobs: int | None = None,
    chunk_size: int | None = None,
) -> list[T]:
    """Evaluate ``worker(count, rng)`` on every chunk, in chunk order.

    ``worker`` must be picklable (a module-level function or a
    ``functools.partial`` of one) when ``n_jobs > 1``.
    """

    plan = chunk_plan(replicas, seed, chunk_size)
    jobs = n_jobs or get_n_jobs()
    logger.debug(
        "running %d replicas in %d chunks on %d jobs", replicas, len(plan), jobs
    )
    if jobs == 1 or len(plan) == 1:
        return [_run_chunk(worker, count, sequence) for count, sequence in plan]
    return Parallel(n_jobs=jobs)(
        delayed(_run_chunk)(worker, count, sequence) for count, sequence in plan
    )
