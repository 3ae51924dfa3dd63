"""Monte Carlo estimation of normalized intensity correlations.

The estimator mirrors the experimental normalization convention: the value
is the sample mean of the detector-intensity product divided by the product
of the per-detector sample means (a ratio estimator over the same sample),
not the true means.  Standard errors come from batch means: the sample is
split into equal batches, the same ratio is formed per batch, and the
standard error is the batch standard deviation over sqrt(n_batches).

Every (grid point, batch) pair owns a seeded substream spawned
deterministically from the run seed, and accumulators are merged in fixed
batch order, so results are bit-identical regardless of how the work is
partitioned across workers.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .analytic import InterferencePattern, ScanPattern
from .constants import DEFAULT_SEED
from .errors import BadBatching
from .sources import SourceModel, detector_intensities, sample_batch


@dataclass(frozen=True)
class IcfEstimate:
    """An estimated correlation value with its batch-means standard error."""

    value: float
    stderr: float
    n_samples: int
    n_batches: int


def _batch_sums(model: SourceModel, delta: np.ndarray,
                seed: np.random.SeedSequence, size: int):
    """Sum of intensity products and per-detector sums for one batch."""
    rng = np.random.default_rng(seed)
    ia, ib, theta = sample_batch(model, rng, size)
    intensities = detector_intensities(model, delta, ia, ib, theta)
    return intensities.prod(axis=0).sum(), intensities.sum(axis=1)


def _ratio(sum_prod: float, sums: np.ndarray, count: int) -> float:
    return (sum_prod / count) / np.prod(sums / count)


def _check_batching(n_samples: int, n_batches: int) -> int:
    if n_batches < 10:
        raise BadBatching(f"need at least 10 batches for a standard error, got {n_batches}")
    if n_samples % n_batches != 0:
        raise BadBatching(
            f"n_samples = {n_samples} is not divisible by n_batches = {n_batches}")
    return n_samples // n_batches


def _estimate_from_batches(model, delta, batch_seeds, batch_size, workers):
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(
                lambda s: _batch_sums(model, delta, s, batch_size), batch_seeds))
    else:
        results = [_batch_sums(model, delta, s, batch_size) for s in batch_seeds]
    # fixed-order merge keeps the global value worker-count independent
    total_prod = 0.0
    total_sums = np.zeros(len(delta))
    ratios = np.empty(len(results))
    for b, (sum_prod, sums) in enumerate(results):
        total_prod += sum_prod
        total_sums += sums
        ratios[b] = _ratio(sum_prod, sums, batch_size)
    n = batch_size * len(results)
    value = float(_ratio(total_prod, total_sums, n))
    stderr = float(ratios.std(ddof=1) / np.sqrt(len(results)))
    return IcfEstimate(value=value, stderr=stderr, n_samples=n,
                       n_batches=len(results))


def estimate_icf(model: SourceModel, delta, n_samples: int,
                 n_batches: int = 100, seed: int | None = None,
                 workers: int = 1) -> IcfEstimate:
    """Estimate the normalized correlation at one detector-phase tuple."""
    delta = np.atleast_1d(np.asarray(delta, dtype=float))
    batch_size = _check_batching(n_samples, n_batches)
    root = np.random.SeedSequence(DEFAULT_SEED if seed is None else seed)
    return _estimate_from_batches(model, delta, root.spawn(n_batches),
                                  batch_size, workers)


def estimate_scan(model: SourceModel, pattern: ScanPattern, n_samples: int,
                  n_batches: int = 100, seed: int | None = None,
                  workers: int = 1) -> InterferencePattern:
    """Estimate the correlation at every grid point of a scan pattern.

    Each grid point gets its own spawned substream (index-keyed, so the
    estimate at a point does not depend on the rest of the grid).
    """
    batch_size = _check_batching(n_samples, n_batches)
    deltas = pattern.delta_array()
    root = np.random.SeedSequence(DEFAULT_SEED if seed is None else seed)
    point_seeds = root.spawn(len(deltas))
    values = np.empty(len(deltas))
    stderrs = np.empty(len(deltas))
    for i, (delta, ps) in enumerate(zip(deltas, point_seeds)):
        est = _estimate_from_batches(model, delta, ps.spawn(n_batches),
                                     batch_size, workers)
        values[i] = est.value
        stderrs[i] = est.stderr
    return InterferencePattern(xs=pattern.grid, values=values, stderrs=stderrs)
