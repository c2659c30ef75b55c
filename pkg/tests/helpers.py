"""Shared test utilities: uniformity statistics, reference samplers, and the
brute-force rank-correlation oracle."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from wcm.copula import SampleMatrix, make_rng


def ks_uniform_statistic(x: np.ndarray) -> float:
    """One-sample Kolmogorov-Smirnov distance to the uniform[0,1] CDF."""
    s = np.sort(np.asarray(x, float))
    n = len(s)
    grid = np.arange(1, n + 1) / n
    return float(max(np.max(grid - s), np.max(s - (grid - 1.0 / n))))


def ks_critical_1pct(n: int) -> float:
    """Asymptotic 1% critical value for the one-sample KS statistic."""
    return 1.63 / math.sqrt(n)


@dataclass(frozen=True)
class MixtureSampler:
    """Row-wise mixture: each observation comes from ``a`` with probability
    ``1 - lam`` and from ``b`` with probability ``lam``."""

    a: object
    b: object
    lam: float

    def sample(self, n: int, seed: int) -> SampleMatrix:
        rng = make_rng(seed)
        seed_a, seed_b = (int(v) for v in rng.integers(0, 2**63 - 1, size=2))
        pick_b = rng.random(n) < self.lam
        xa = self.a.sample(n, seed_a).values
        xb = self.b.sample(n, seed_b).values
        values = np.where(pick_b[:, None], xb, xa)
        return SampleMatrix(values, seed=seed, meta={"construction": "mixture"})


@dataclass(frozen=True)
class ColumnPermutedSampler:
    """Wrap a sampler and permute its columns."""

    inner: object
    permutation: tuple[int, ...]

    def sample(self, n: int, seed: int) -> SampleMatrix:
        values = self.inner.sample(n, seed).values[:, list(self.permutation)]
        return SampleMatrix(values, seed=seed, meta={"construction": "permuted"})


def spearman_oracle(x: np.ndarray, y: np.ndarray) -> float:
    """Population-style Spearman's rho evaluated on the empirical distribution.

    Enumerates every triple (i, j, k): observation i against an independent
    copy j for the first coordinate and an independent copy k for the second,
    and returns 3 * (P[concordant] - P[discordant]).  Integer counting, so the
    only rounding is the final division.
    """
    x = np.asarray(x, float)
    y = np.asarray(y, float)
    n = len(x)
    sx = np.sign(x[:, None] - x[None, :])  # sx[i, j] = sign(x_i - x_j)
    sy = np.sign(y[:, None] - y[None, :])
    prod = sx[:, :, None] * sy[:, None, :]  # over triples (i, j, k)
    concordant = int(np.count_nonzero(prod > 0))
    discordant = int(np.count_nonzero(prod < 0))
    return 3.0 * (concordant - discordant) / n**3


def empirical_cdf_on_grid(values: np.ndarray, grid: np.ndarray) -> np.ndarray:
    """Empirical CDF of a 3-column sample on a product grid, via a binned
    3-d histogram and an inclusive cumulative sum (O(n + g^3))."""
    counts = np.zeros((len(grid),) * 3)
    idx = [np.searchsorted(grid, values[:, k], side="left") for k in range(3)]
    # searchsorted(left) maps v <= grid[m] to index <= m, i.e. bin index of the
    # smallest grid point >= v; entries beyond the last grid point are dropped.
    inside = (idx[0] < len(grid)) & (idx[1] < len(grid)) & (idx[2] < len(grid))
    np.add.at(counts, (idx[0][inside], idx[1][inside], idx[2][inside]), 1.0)
    cum = counts.cumsum(axis=0).cumsum(axis=1).cumsum(axis=2)
    return cum / len(values)
