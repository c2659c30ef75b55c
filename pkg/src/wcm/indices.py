"""Rank correlation, the SIX herd behavior index with its sharp bounds, and
closed-form lognormal comparison indices (HIX, RHIX).

SIX is the ``w_i w_j``-weighted average of pairwise Spearman's rhos.  It
depends on the data only through ranks, so it is invariant to strictly
increasing transformations of the marginals.  Its sharp range is::

    (12 * l(w) - S2) / (S1^2 - S2)  <=  SIX  <=  1

with the upper end reached by comonotonicity and the lower end by the
weighted-countermonotonic coupling on the shrunken weights.  HIX and RHIX are
variance-ratio indices that do depend on the marginals; their lognormal
closed forms are provided as a contrast.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy.special import ndtr
from scipy.stats import rankdata

from .copula import SampleMatrix, make_rng
from .errors import (
    DegenerateDataError,
    DimensionError,
    DomainError,
    ModelError,
)
from .weights import WeightVector, as_weight_vector, variance_lower_bound

__all__ = [
    "SpearmanMatrix",
    "SixReport",
    "LognormalModel",
    "spearman_rho",
    "spearman_matrix",
    "spearman_matrix_gaussian",
    "gaussian_spearman",
    "six",
    "six_from_matrix",
    "six_bounds",
    "six_lognormal",
    "rhix_lognormal_bivariate",
    "rhix_lognormal",
    "hix_lognormal",
    "rhix_degeneracy_curve",
    "gaussian_copula_sample",
]


def _column_ranks(x: np.ndarray) -> np.ndarray:
    return rankdata(x, method="average", axis=0)


def _pearson_on_ranks(rx: np.ndarray, ry: np.ndarray) -> float:
    """Pearson correlation of two rank vectors with exact +/-1 fast paths.

    Identical rank vectors are perfectly concordant and exactly reversed ones
    perfectly discordant; detecting these directly returns exactly 1.0 or
    -1.0 instead of a value one ulp off.
    """
    n = len(rx)
    if np.ptp(rx) == 0.0 or np.ptp(ry) == 0.0:
        raise DegenerateDataError("constant column: rank correlation is undefined")
    if np.array_equal(rx, ry):
        return 1.0
    if np.array_equal(ry, (n + 1.0) - rx):
        return -1.0
    ax = rx - rx.mean()
    ay = ry - ry.mean()
    r = float((ax @ ay) / math.sqrt((ax @ ax) * (ay @ ay)))
    return min(1.0, max(-1.0, r))


def spearman_rho(x: Sequence[float], y: Sequence[float]) -> float:
    """Sample Spearman's rho: Pearson correlation of mid-ranks.

    Ties get average ranks.  Exactly 1 for strictly concordant tie-free data
    and exactly -1 for strictly discordant.
    """
    xa = np.asarray(x, dtype=float)
    ya = np.asarray(y, dtype=float)
    if xa.ndim != 1 or ya.ndim != 1:
        raise DimensionError("spearman_rho expects 1-d columns")
    if len(xa) != len(ya):
        raise DimensionError(f"length mismatch: {len(xa)} vs {len(ya)}")
    if len(xa) < 2:
        raise DimensionError("need at least 2 observations")
    return _pearson_on_ranks(
        rankdata(xa, method="average"), rankdata(ya, method="average")
    )


@dataclass(frozen=True)
class SpearmanMatrix:
    """Upper triangle of pairwise Spearman's rhos with an estimator tag."""

    d: int
    pairs: tuple[tuple[int, int], ...]
    rhos: tuple[float, ...]
    estimator: str

    def __post_init__(self) -> None:
        if any(not -1.0 <= r <= 1.0 for r in self.rhos):
            raise DomainError(f"rho outside [-1, 1] in {self.rhos!r}")

    def rho(self, i: int, j: int) -> float:
        if i == j:
            return 1.0
        key = (min(i, j), max(i, j))
        return self.rhos[self.pairs.index(key)]


def spearman_matrix(data: "SampleMatrix | np.ndarray") -> SpearmanMatrix:
    """Rank-sample Spearman matrix of the columns of a data matrix."""
    values = data.values if isinstance(data, SampleMatrix) else np.asarray(data, float)
    if values.ndim != 2 or values.shape[1] < 2:
        raise DimensionError("need an (n, d>=2) data matrix")
    if values.shape[0] < 2:
        raise DimensionError("need at least 2 observations")
    ranks = _column_ranks(values)
    d = values.shape[1]
    pairs = tuple((i, j) for i in range(d) for j in range(i + 1, d))
    rhos = tuple(_pearson_on_ranks(ranks[:, i], ranks[:, j]) for i, j in pairs)
    return SpearmanMatrix(d=d, pairs=pairs, rhos=rhos, estimator="rank-sample")


def gaussian_spearman(rho: float) -> float:
    """Population Spearman's rho of a Gaussian copula: ``(6/pi) * asin(rho/2)``.

    The endpoints and zero are returned exactly.
    """
    if not -1.0 <= rho <= 1.0:
        raise DomainError(f"correlation must lie in [-1, 1], got {rho!r}")
    if rho == 1.0:
        return 1.0
    if rho == -1.0:
        return -1.0
    if rho == 0.0:
        return 0.0
    return min(1.0, max(-1.0, (6.0 / math.pi) * math.asin(0.5 * rho)))


def spearman_matrix_gaussian(corr: np.ndarray) -> SpearmanMatrix:
    """Closed-form Spearman matrix implied by a Gaussian copula correlation matrix."""
    corr = np.asarray(corr, dtype=float)
    if corr.ndim != 2 or corr.shape[0] != corr.shape[1] or corr.shape[0] < 2:
        raise DimensionError(f"need a square correlation matrix, got shape {corr.shape}")
    d = corr.shape[0]
    pairs = tuple((i, j) for i in range(d) for j in range(i + 1, d))
    rhos = tuple(gaussian_spearman(float(corr[i, j])) for i, j in pairs)
    return SpearmanMatrix(d=d, pairs=pairs, rhos=rhos, estimator="closed-form-gaussian")


@dataclass(frozen=True)
class SixReport:
    """SIX value with its sharp bounds and the pair mixing weights."""

    weights: tuple[float, ...]
    six: float
    lower_bound: float
    upper_bound: float
    pair_weights: tuple[tuple[tuple[int, int], float], ...]
    estimator: str
    n: int | None
    within_bounds: bool

    def to_json_dict(self) -> dict:
        return {
            "weights": list(self.weights),
            "six": self.six,
            "lower_bound": self.lower_bound,
            "upper_bound": self.upper_bound,
            "pair_weights": {f"{i},{j}": p for (i, j), p in self.pair_weights},
            "estimator": self.estimator,
            "n": self.n,
            "within_bounds": self.within_bounds,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), sort_keys=True)

    def to_csv_row(self) -> str:
        w = " ".join(repr(v) for v in self.weights)
        return f"{w},{self.six!r},{self.lower_bound!r},{self.upper_bound!r},{self.estimator},{self.n}"


def six_bounds(w: "WeightVector | Iterable[float]") -> tuple[float, float]:
    """Sharp SIX range ``((12*l(w) - S2) / (S1^2 - S2), 1)``."""
    wv = as_weight_vector(w)
    lower = (12.0 * variance_lower_bound(wv) - wv.s2) / (wv.s1 ** 2 - wv.s2)
    return lower, 1.0


def six_from_matrix(
    sm: SpearmanMatrix, w: "WeightVector | Iterable[float]", n: int | None = None
) -> SixReport:
    """Weighted average of pairwise rhos: ``sum w_i w_j rho_ij / sum w_i w_j``.

    Numerator and denominator share the same summation order, so a matrix of
    all ones yields exactly 1.0.
    """
    wv = as_weight_vector(w)
    if wv.d != sm.d:
        raise DimensionError(f"weights have d={wv.d} but matrix has d={sm.d}")
    terms = [wv.values[i] * wv.values[j] for i, j in sm.pairs]
    numerator = math.fsum(t * r for t, r in zip(terms, sm.rhos))
    denominator = math.fsum(terms)
    value = numerator / denominator
    lower, upper = six_bounds(wv)
    pair_weights = tuple(
        (pair, t / denominator) for pair, t in zip(sm.pairs, terms)
    )
    within = (lower - 1e-12) <= value <= (upper + 1e-12)
    return SixReport(
        weights=wv.values,
        six=value,
        lower_bound=lower,
        upper_bound=upper,
        pair_weights=pair_weights,
        estimator=sm.estimator,
        n=n,
        within_bounds=within,
    )


def six(data: "SampleMatrix | np.ndarray", w: "WeightVector | Iterable[float]") -> SixReport:
    """Rank-based SIX of a data matrix (columns are variables)."""
    values = data.values if isinstance(data, SampleMatrix) else np.asarray(data, float)
    sm = spearman_matrix(values)
    return six_from_matrix(sm, w, n=values.shape[0])


@dataclass(frozen=True)
class LognormalModel:
    """Multivariate lognormal: ``X = exp(Z)`` with ``Z ~ N(mu, cov)``.

    ``cov`` is the covolatility matrix of the log returns; its implied
    correlation matrix fully determines the (Gaussian) copula.
    """

    mu: tuple[float, ...]
    cov: np.ndarray

    def __post_init__(self) -> None:
        mu = tuple(float(v) for v in self.mu)
        cov = np.asarray(self.cov, dtype=float)
        if cov.ndim != 2 or cov.shape[0] != cov.shape[1]:
            raise ModelError(f"covolatility matrix must be square, got shape {cov.shape}")
        if len(mu) != cov.shape[0]:
            raise ModelError(f"mu has length {len(mu)} but cov is {cov.shape[0]}x{cov.shape[0]}")
        if len(mu) < 2:
            raise ModelError("need at least 2 assets")
        scale = float(np.max(np.abs(cov))) or 1.0
        if not np.allclose(cov, cov.T, rtol=0.0, atol=1e-12 * scale):
            raise ModelError("covolatility matrix must be symmetric")
        diag = np.diag(cov)
        if np.any(diag <= 0.0):
            raise ModelError("covolatility diagonal must be strictly positive")
        if float(np.linalg.eigvalsh(cov).min()) < -1e-10 * scale:
            raise ModelError("covolatility matrix must be positive semidefinite")
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "cov", cov)

    @property
    def d(self) -> int:
        return len(self.mu)

    @property
    def sigmas(self) -> np.ndarray:
        return np.sqrt(np.diag(self.cov))

    @property
    def correlations(self) -> np.ndarray:
        s = self.sigmas
        corr = self.cov / np.outer(s, s)
        return np.clip(corr, -1.0, 1.0)

    @classmethod
    def bivariate(cls, rho: float, sigma1: float, sigma2: float,
                  mu: Sequence[float] = (0.0, 0.0)) -> "LognormalModel":
        if not -1.0 <= rho <= 1.0:
            raise ModelError(f"correlation must lie in [-1, 1], got {rho!r}")
        cov = np.array(
            [[sigma1 * sigma1, rho * sigma1 * sigma2],
             [rho * sigma1 * sigma2, sigma2 * sigma2]]
        )
        return cls(tuple(mu), cov)


def six_lognormal(w: "WeightVector | Iterable[float]", model: LognormalModel) -> float:
    """Population SIX of a lognormal model via the Gaussian-copula arcsine map.

    Depends on the model only through its copula correlations: the drift and
    the marginal volatilities cancel.
    """
    wv = as_weight_vector(w)
    sm = spearman_matrix_gaussian(model.correlations)
    return six_from_matrix(sm, wv).six


def _lognormal_cov(mu_i, mu_j, var_i, var_j, cov_ij) -> float:
    return math.exp(mu_i + mu_j + 0.5 * (var_i + var_j)) * math.expm1(cov_ij)


def rhix_lognormal_bivariate(rho: float, sigma1: float, sigma2: float) -> float:
    """Two-asset covariance-ratio index under lognormality:
    ``(exp(rho*s1*s2) - 1) / (exp(s1*s2) - 1)``."""
    if not -1.0 <= rho <= 1.0:
        raise ModelError(f"correlation must lie in [-1, 1], got {rho!r}")
    if sigma1 <= 0.0 or sigma2 <= 0.0:
        raise ModelError("volatilities must be positive")
    return math.expm1(rho * sigma1 * sigma2) / math.expm1(sigma1 * sigma2)


def rhix_lognormal(w: "WeightVector | Iterable[float]", model: LognormalModel) -> float:
    """Covariance-ratio index: off-diagonal covariance mass relative to its
    comonotonic ceiling.  Sensitive to the marginal volatilities."""
    wv = as_weight_vector(w)
    if wv.d != model.d:
        raise DimensionError(f"weights have d={wv.d} but model has d={model.d}")
    cov = model.cov
    var = np.diag(cov)
    mu = model.mu
    s = model.sigmas
    num = 0.0
    den = 0.0
    for i in range(wv.d):
        for j in range(i + 1, wv.d):
            ww = wv.values[i] * wv.values[j]
            num += ww * _lognormal_cov(mu[i], mu[j], var[i], var[j], cov[i, j])
            den += ww * _lognormal_cov(mu[i], mu[j], var[i], var[j], s[i] * s[j])
    return num / den


def hix_lognormal(w: "WeightVector | Iterable[float]", model: LognormalModel) -> float:
    """Variance-ratio index ``Var[S] / Var[S^c]`` under lognormality, where the
    comonotonic version keeps the marginals and sets all copula correlations
    to one.  Diagonal variance terms stay in both numerator and denominator."""
    wv = as_weight_vector(w)
    if wv.d != model.d:
        raise DimensionError(f"weights have d={wv.d} but model has d={model.d}")
    cov = model.cov
    var = np.diag(cov)
    mu = model.mu
    s = model.sigmas
    num = 0.0
    den = 0.0
    for i in range(wv.d):
        for j in range(wv.d):
            ww = wv.values[i] * wv.values[j]
            num += ww * _lognormal_cov(mu[i], mu[j], var[i], var[j], cov[i, j])
            comon = var[i] if i == j else s[i] * s[j]
            den += ww * _lognormal_cov(mu[i], mu[j], var[i], var[j], comon)
    return num / den


def rhix_degeneracy_curve(
    rho: float, sigma_grid: Sequence[float]
) -> list[tuple[float, float]]:
    """The covariance-ratio index along a common-volatility sweep.

    For ``0 < rho < 1`` the curve is strictly decreasing and tends to zero as
    the volatility grows (asserted), even though the copula never changes:
    the index is driven by the marginals.
    """
    if not -1.0 < rho < 1.0:
        raise ModelError(f"|rho| must be < 1 for the degeneracy sweep, got {rho!r}")
    sigmas = [float(s) for s in sigma_grid]
    if not sigmas or any(s <= 0.0 for s in sigmas):
        raise ModelError("sigma grid must be nonempty and positive")
    curve = [(s, rhix_lognormal_bivariate(rho, s, s)) for s in sigmas]
    if 0.0 < rho < 1.0:
        ordered = sorted(curve)
        for (s0, v0), (s1, v1) in zip(ordered, ordered[1:]):
            if not v1 < v0:
                raise AssertionError(
                    f"curve not strictly decreasing at sigma={s1} ({v0} -> {v1})"
                )
    return curve


def gaussian_copula_sample(corr: np.ndarray, n: int, seed: int) -> np.ndarray:
    """Draw ``n`` observations from the Gaussian copula with the given
    correlation matrix (strictly positive definite)."""
    corr = np.asarray(corr, dtype=float)
    if corr.ndim != 2 or corr.shape[0] != corr.shape[1]:
        raise DimensionError(f"need a square correlation matrix, got shape {corr.shape}")
    chol = np.linalg.cholesky(corr)
    rng = make_rng(seed)
    z = rng.standard_normal((n, corr.shape[0]))
    return ndtr(z @ chol.T)
