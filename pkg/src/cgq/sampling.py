"""Seeded Monte-Carlo accumulation that does not depend on chunking.

Samples are grouped in fixed blocks of :data:`BLOCK` consecutive indices.
Block ``b`` draws from a Philox stream keyed by the seed with ``b`` in the
counter, so sample ``k`` is a function of ``(seed, k)`` alone. Chunks are
whole blocks, and block sums are reduced with ``math.fsum``. A run split
over any number of chunks or threads therefore gives the same bits as a
serial run.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable

import numpy as np

BLOCK = 4096
SEED_ENV = "CGQ_SEED"
DEFAULT_SEED = 0


def default_seed() -> int:
    raw = os.environ.get(SEED_ENV)
    return int(raw) if raw else DEFAULT_SEED


@dataclass(frozen=True)
class SamplerConfig:
    """Sample count, 64-bit seed and chunking of a Monte-Carlo run.

    ``chunk_size`` is rounded up to a whole number of blocks; ``workers``
    greater than one evaluates chunks on a thread pool.
    """

    sample_count: int = 100_000
    seed: int = DEFAULT_SEED
    chunk_size: int = 16 * BLOCK
    workers: int = 1

    def __post_init__(self):
        if self.sample_count < 1:
            raise ValueError("sample_count must be >= 1")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be an unsigned 64-bit integer")
        if self.chunk_size < 1:
            raise ValueError("chunk_size must be >= 1")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")


def block_generator(seed: int, block: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=seed, counter=[0, block, 0, 0]))


def block_sizes(n: int) -> list[int]:
    full, rest = divmod(n, BLOCK)
    return [BLOCK] * full + ([rest] if rest else [])


def chunk_blocks(cfg: SamplerConfig) -> list[range]:
    """Block index ranges handled by each chunk."""
    nblocks = len(block_sizes(cfg.sample_count))
    per_chunk = max(1, -(-cfg.chunk_size // BLOCK))
    return [range(s, min(s + per_chunk, nblocks)) for s in range(0, nblocks, per_chunk)]


@dataclass(frozen=True)
class MCEstimate:
    mean: np.ndarray
    stderr: np.ndarray
    sample_count: int


def _exact_sum(parts: np.ndarray) -> np.ndarray:
    flat = parts.reshape(parts.shape[0], -1)
    re = np.array([math.fsum(col) for col in flat.real.T])
    im = np.array([math.fsum(col) for col in flat.imag.T])
    return (re + 1j * im).reshape(parts.shape[1:])


def accumulate(
    block_sum: Callable[[np.random.Generator, int], np.ndarray],
    cfg: SamplerConfig,
) -> MCEstimate:
    """Average per-sample contributions over ``cfg.sample_count`` samples.

    Args:
        block_sum: ``(rng, count) -> sum`` of ``count`` fresh contributions
            drawn from ``rng``.
        cfg: sampler configuration.

    Returns:
        The mean, plus a batch-means standard error per entry. The error is
        zero when there is a single block.
    """
    sizes = block_sizes(cfg.sample_count)

    def run_chunk(blocks: range) -> list[np.ndarray]:
        return [block_sum(block_generator(cfg.seed, b), sizes[b]) for b in blocks]

    chunks = chunk_blocks(cfg)
    if cfg.workers > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            results = list(pool.map(run_chunk, chunks))
    else:
        results = [run_chunk(c) for c in chunks]
    parts = np.stack([s for chunk in results for s in chunk])
    n = cfg.sample_count
    mean = _exact_sum(parts) / n

    if len(sizes) > 1:
        w = np.array(sizes, dtype=float).reshape((-1,) + (1,) * (parts.ndim - 1))
        block_means = parts / w
        dev = np.abs(block_means - mean) ** 2
        # weighted variance of block means, divided by the block count
        stderr = np.sqrt(np.sum(w * dev, axis=0) / (n * (len(sizes) - 1)))
    else:
        stderr = np.zeros(mean.shape)
    return MCEstimate(mean, stderr, n)
