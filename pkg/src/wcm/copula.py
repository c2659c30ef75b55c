"""Construction, exact CDF evaluation, and sampling of weighted-countermonotonic
copulas.

For a weight triple ``(w1, w2, w3)`` forming (possibly degenerate) triangle
side lengths, the copula is supported on the three edges of a triangle inside
the unit cube whose vertices lie on the hyperplane ``w . u == sum(w) / 2``,
with mass uniformly distributed along each edge.  Two inequivalent vertex
layouts exist (variants "A" and "B"); both have exactly uniform marginals.
General dimension ``d >= 3`` is reached by partitioning the weights into three
groups, making coordinates within a group comonotonic, and coupling the three
group aggregates through a triangle copula.  For ``d == 2`` the construction
exists only for equal weights and reduces to the countermonotonic pair.

Randomness uses numpy's PCG64 generator seeded through ``SeedSequence``;
parallel batches draw from ``SeedSequence(seed).spawn(n_batches)`` so results
are reproducible bit-for-bit regardless of scheduling.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    DimensionError,
    DomainError,
    ExistenceError,
    MassNormalizationError,
)
from .weights import (
    GroupPartition,
    WeightVector,
    as_weight_vector,
    existence_deficit,
    partition_weights,
    validate_wcm_existence,
)

__all__ = [
    "GENERATOR_NAME",
    "SampleMatrix",
    "TriangleCopula",
    "GroupedWCMCopula",
    "CountermonotonicPair",
    "ComonotonicCopula",
    "IndependenceCopula",
    "triangle_params",
    "edge_masses",
    "build_triangle",
    "build_grouped_wcm",
    "check_wcm",
    "frechet_bounds",
    "make_rng",
    "spawn_rngs",
]

GENERATOR_NAME = "pcg64"

#: Pure-arithmetic construction checks.
_CONSTRUCTION_TOL = 1e-12
#: Sample-level support checks (accumulated rounding over linear combinations).
SUPPORT_TOL = 1e-9

_EDGES = ((0, 1), (1, 2), (2, 0))
_EDGE_LABELS = ("m12", "m23", "m31")


def make_rng(seed: int) -> np.random.Generator:
    """The package-wide generator: PCG64 seeded via ``SeedSequence(seed)``."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))


def spawn_rngs(seed: int, n: int) -> list[np.random.Generator]:
    """Independent child generators for parallel batches (stream-splitting rule)."""
    return [np.random.Generator(np.random.PCG64(s)) for s in np.random.SeedSequence(seed).spawn(n)]


@dataclass(frozen=True)
class SampleMatrix:
    """An ``n x d`` matrix of copula observations in the unit cube.

    Columns follow the original weight order.  The seed and generator name are
    recorded so any run can be reproduced exactly.
    """

    values: np.ndarray
    seed: int | None
    meta: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        arr = np.asarray(self.values, dtype=float)
        if arr.ndim != 2:
            raise DimensionError(f"sample matrix must be 2-d, got shape {arr.shape}")
        object.__setattr__(self, "values", arr)

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def d(self) -> int:
        return self.values.shape[1]

    def to_json_dict(self) -> dict:
        meta = {"n": self.n, "d": self.d, "seed": self.seed, "generator": GENERATOR_NAME}
        meta.update(self.meta)
        return meta

    def to_csv(self, path_or_buf) -> None:
        """Write one observation per row with header ``u1,...,ud``."""
        if hasattr(path_or_buf, "write"):
            self._write_csv(path_or_buf)
        else:
            with open(path_or_buf, "w", newline="") as fh:
                self._write_csv(fh)

    def _write_csv(self, fh) -> None:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow([f"u{k + 1}" for k in range(self.d)])
        for row in self.values:
            writer.writerow([repr(float(x)) for x in row])

    def to_csv_string(self) -> str:
        buf = io.StringIO()
        self._write_csv(buf)
        return buf.getvalue()


def triangle_params(w: Sequence[float]) -> tuple[float, float, float]:
    """Interior vertex coordinates for the triangle supporting a weight triple.

    Returns ``z1 = (w2+w3-w1)/(2*w2)``, ``z2 = (w3+w1-w2)/(2*w3)``,
    ``z3 = (w1+w2-w3)/(2*w1)``; all lie in ``[0, 1]`` exactly when the triple
    forms triangle side lengths.  Values within 1e-12 of the boundary are
    clamped (degenerate triangles); anything further out raises.
    """
    wv = as_weight_vector(w)
    if wv.d != 3:
        raise DimensionError(f"triangle parameters need exactly 3 weights, got {wv.d}")
    w1, w2, w3 = wv.values
    # fsum keeps the numerator sign exact at the degenerate boundary
    raw = (
        math.fsum((w2, w3, -w1)) / (2.0 * w2),
        math.fsum((w3, w1, -w2)) / (2.0 * w3),
        math.fsum((w1, w2, -w3)) / (2.0 * w1),
    )
    return tuple(_clamp_unit(z, wv) for z in raw)  # type: ignore[return-value]


def _clamp_unit(z: float, wv: WeightVector) -> float:
    if z < 0.0 or z > 1.0:
        if -_CONSTRUCTION_TOL <= z <= 1.0 + _CONSTRUCTION_TOL:
            return min(1.0, max(0.0, z))
        raise ExistenceError(
            f"weights {wv.values} do not form triangle side lengths: "
            f"2*max - sum = {existence_deficit(wv):.17g} > 0"
        )
    return z


def edge_masses(z: Sequence[float]) -> tuple[float, float, float]:
    """Edge masses making the triangle's marginals uniform.

    With ``a = 1-z1``, ``b = 1-z2``, ``c = 1-z3``::

        m12 = (abc - ab + a) / (abc + 1)
        m23 = (abc - bc + b) / (abc + 1)
        m31 = (abc - ca + c) / (abc + 1)

    For a z-triple derived from triangle side lengths the masses sum to one;
    an arbitrary z-triple generally fails that, in which case this raises
    rather than silently accepting an invalid copula.
    """
    if len(z) != 3:
        raise DimensionError(f"expected 3 z-values, got {len(z)}")
    z1, z2, z3 = (float(v) for v in z)
    for v in (z1, z2, z3):
        if not (0.0 <= v <= 1.0):
            raise DomainError(f"z-values must lie in [0, 1], got {v!r}")
    a, b, c = 1.0 - z1, 1.0 - z2, 1.0 - z3
    abc = a * b * c
    denom = abc + 1.0
    masses = (
        (abc - a * b + a) / denom,
        (abc - b * c + b) / denom,
        (abc - c * a + c) / denom,
    )
    total = math.fsum(masses)
    if abs(total - 1.0) > _CONSTRUCTION_TOL:
        raise MassNormalizationError(
            f"edge masses sum to {total:.17g}, not 1: z={z!r} is not an admissible triple"
        )
    if min(masses) < -_CONSTRUCTION_TOL:
        raise MassNormalizationError(f"negative edge mass in {masses!r} for z={z!r}")
    return tuple(max(0.0, m) for m in masses)  # type: ignore[return-value]


def _edge_fraction_leq(a: Sequence[float], b: Sequence[float], k: int, q: float) -> float:
    """Length of ``{t in [0,1] : (1-t)*a[k] + t*b[k] <= q}``."""
    ak, bk = a[k], b[k]
    if ak == bk:
        return 1.0 if ak <= q else 0.0
    s = (q - ak) / (bk - ak)
    if bk > ak:
        return min(1.0, max(0.0, s))
    return min(1.0, max(0.0, 1.0 - s))


def _solve_edge_masses(vertices: Sequence[Sequence[float]]) -> tuple[float, float, float]:
    """Solve the uniformity system for the edge masses of a triangle copula.

    Each coordinate's marginal CDF is piecewise linear with kinks only at
    vertex coordinate values, so requiring ``P(U_k <= q) == q`` at the middle
    vertex value, the midpoints of the adjacent linear pieces, and 1 pins the
    marginal to the identity.  The resulting overdetermined linear system
    (plus total mass one) is solved by least squares and verified.
    """
    rows: list[list[float]] = []
    rhs: list[float] = []
    for k in range(3):
        middle = sorted(v[k] for v in vertices)[1]
        for q in (0.5 * middle, middle, 0.5 * (1.0 + middle), 1.0):
            rows.append([_edge_fraction_leq(vertices[i], vertices[j], k, q) for i, j in _EDGES])
            rhs.append(q)
    rows.append([1.0, 1.0, 1.0])
    rhs.append(1.0)
    coeffs = np.array(rows)
    target = np.array(rhs)
    masses, *_ = np.linalg.lstsq(coeffs, target, rcond=None)
    residual = float(np.max(np.abs(coeffs @ masses - target)))
    if residual > 1e-10:
        raise MassNormalizationError(
            f"uniformity system unsolvable for vertices {vertices!r} (residual {residual:.3g})"
        )
    if float(masses.min()) < -_CONSTRUCTION_TOL:
        raise MassNormalizationError(f"negative edge mass {masses!r} for vertices {vertices!r}")
    masses = np.maximum(masses, 0.0)
    total = math.fsum(masses.tolist())
    if abs(total - 1.0) > _CONSTRUCTION_TOL:
        raise MassNormalizationError(f"edge masses sum to {total:.17g}, not 1")
    return tuple(float(m) for m in masses)  # type: ignore[return-value]


@dataclass(frozen=True)
class TriangleCopula:
    """A three-dimensional copula supported on the edges of a triangle.

    ``vertices`` are the triangle corners ``p1, p2, p3``; ``masses`` are the
    probabilities ``(m12, m23, m31)`` of the edges ``p1p2, p2p3, p3p1``, with
    mass spread uniformly along each edge.  Every support point ``u``
    satisfies ``w . u == sum(w) / 2``.
    """

    weights: tuple[float, float, float]
    z_values: tuple[float, float, float]
    vertices: tuple[tuple[float, float, float], ...]
    masses: tuple[float, float, float]
    variant: str

    def __post_init__(self) -> None:
        s1 = math.fsum(self.weights)
        tol = _CONSTRUCTION_TOL * max(1.0, s1)
        if abs(math.fsum(self.masses) - 1.0) > _CONSTRUCTION_TOL or min(self.masses) < 0.0:
            raise MassNormalizationError(f"invalid edge masses {self.masses!r}")
        for z in self.z_values:
            if not (0.0 <= z <= 1.0):
                raise DomainError(f"z-value {z!r} outside [0, 1]")
        for p in self.vertices:
            dot = math.fsum(wi * pi for wi, pi in zip(self.weights, p))
            if abs(dot - 0.5 * s1) > tol:
                raise ExistenceError(
                    f"vertex {p!r} misses the support hyperplane by {dot - 0.5 * s1:.3g}"
                )

    @property
    def d(self) -> int:
        return 3

    def cdf(self, u: Sequence[float]) -> float:
        """Exact CDF at ``u``.

        Points on an edge are ``t*p_i + (1-t)*p_j`` with ``t`` uniform; each
        coordinate constraint is linear in ``t``, so the admissible set per
        edge is an interval whose length multiplies the edge mass.  Closed
        form, no quadrature.
        """
        point = _require_unit_cube(u, 3)
        total = 0.0
        for (i, j), mass in zip(_EDGES, self.masses):
            if mass == 0.0:
                continue
            total += mass * _edge_interval_length(self.vertices[i], self.vertices[j], point)
        return min(1.0, total)

    def marginal_cdf(self, k: int, value: float) -> float:
        """CDF of coordinate ``k`` alone (others at 1)."""
        point = [1.0, 1.0, 1.0]
        point[k] = value
        return self.cdf(point)

    def sample(self, n: int, seed: int) -> SampleMatrix:
        """Draw ``n`` observations: pick an edge by mass, then a uniform
        position along it.  Deterministic given ``seed``."""
        if n < 1:
            raise DimensionError(f"sample size must be >= 1, got {n}")
        rng = make_rng(seed)
        values = self._draw(rng, n)
        return SampleMatrix(
            values,
            seed=seed,
            meta={"weights": list(self.weights), "variant": self.variant,
                  "construction": "triangle"},
        )

    def _draw(self, rng: np.random.Generator, n: int) -> np.ndarray:
        cum = np.cumsum(self.masses)
        edge_idx = np.minimum(np.searchsorted(cum, rng.random(n), side="right"), 2)
        t = rng.random(n)
        verts = np.array(self.vertices)
        start = verts[[e[0] for e in _EDGES]][edge_idx]
        end = verts[[e[1] for e in _EDGES]][edge_idx]
        return t[:, None] * start + (1.0 - t)[:, None] * end

    def to_dict(self) -> dict:
        return {
            "weights": list(self.weights),
            "variant": self.variant,
            "z": list(self.z_values),
            "vertices": [list(p) for p in self.vertices],
            "masses": dict(zip(_EDGE_LABELS, self.masses)),
        }


def _require_unit_cube(u: Sequence[float], d: int) -> tuple[float, ...]:
    point = tuple(float(v) for v in u)
    if len(point) != d:
        raise DimensionError(f"expected a point with {d} coordinates, got {len(point)}")
    for v in point:
        if not (0.0 <= v <= 1.0):
            raise DomainError(f"coordinate {v!r} outside the unit cube")
    return point


def _edge_interval_length(a: Sequence[float], b: Sequence[float], u: Sequence[float]) -> float:
    """Length of the t-interval on edge ``t*a + (1-t)*b`` lying below ``u``.

    A zero-length edge (a == b) counts fully when the point is inside the box:
    a degenerate edge is an atom.
    """
    lo, hi = 0.0, 1.0
    for k in range(len(u)):
        v0, v1 = b[k], a[k]  # coordinate value at t=0 and at t=1
        if v0 == v1:
            if v0 > u[k]:
                return 0.0
            continue
        s = (u[k] - v0) / (v1 - v0)
        if v1 > v0:
            hi = min(hi, s)
        else:
            lo = max(lo, s)
        if lo >= hi:
            return 0.0
    return max(0.0, hi - lo)


def build_triangle(w: Sequence[float], variant: str = "A") -> TriangleCopula:
    """Construct the triangle copula for a weight triple.

    Variant "A" places vertices ``(1, z1, 0), (0, 1, z2), (z3, 0, 1)`` with
    closed-form edge masses.  Variant "B" uses the mirror layout
    ``(1, 0, z1*), (z2*, 1, 0), (0, z3*, 1)`` with starred z-values (the same
    numerators over the cyclically shifted denominators); its masses come from
    re-solving the uniformity system for that geometry.  Both are valid and
    differ as functions: the construction is not unique.
    """
    wv = as_weight_vector(w)
    if wv.d != 3:
        raise DimensionError(f"triangle construction needs exactly 3 weights, got {wv.d}")
    w1, w2, w3 = wv.values
    if variant == "A":
        z = triangle_params(wv)
        vertices = ((1.0, z[0], 0.0), (0.0, 1.0, z[1]), (z[2], 0.0, 1.0))
        masses = edge_masses(z)
    elif variant == "B":
        raw = (
            math.fsum((w2, w3, -w1)) / (2.0 * w3),
            math.fsum((w3, w1, -w2)) / (2.0 * w1),
            math.fsum((w1, w2, -w3)) / (2.0 * w2),
        )
        z = tuple(_clamp_unit(v, wv) for v in raw)
        vertices = ((1.0, 0.0, z[0]), (z[1], 1.0, 0.0), (0.0, z[2], 1.0))
        masses = _solve_edge_masses(vertices)
    else:
        raise DomainError(f"variant must be 'A' or 'B', got {variant!r}")
    return TriangleCopula(wv.values, z, vertices, masses, variant)  # type: ignore[arg-type]


@dataclass(frozen=True)
class CountermonotonicPair:
    """The unique extreme-negative-dependence copula in two dimensions:
    ``U2 == 1 - U1`` exactly.  Exists for equal weights only."""

    weights: tuple[float, float]

    @property
    def d(self) -> int:
        return 2

    def cdf(self, u: Sequence[float]) -> float:
        u1, u2 = _require_unit_cube(u, 2)
        return max(u1 + u2 - 1.0, 0.0)

    def sample(self, n: int, seed: int) -> SampleMatrix:
        if n < 1:
            raise DimensionError(f"sample size must be >= 1, got {n}")
        rng = make_rng(seed)
        u = rng.random(n)
        values = np.column_stack([u, 1.0 - u])
        return SampleMatrix(
            values,
            seed=seed,
            meta={"weights": list(self.weights), "construction": "countermonotonic"},
        )


@dataclass(frozen=True)
class GroupedWCMCopula:
    """General-dimension construction: comonotonic within three groups whose
    aggregate weights are coupled through an inner triangle copula."""

    weights: tuple[float, ...]
    partition: GroupPartition
    inner: TriangleCopula

    @property
    def d(self) -> int:
        return len(self.weights)

    def sample(self, n: int, seed: int) -> SampleMatrix:
        if n < 1:
            raise DimensionError(f"sample size must be >= 1, got {n}")
        rng = make_rng(seed)
        inner = self.inner._draw(rng, n)
        values = np.empty((n, self.d))
        for col_group, group in enumerate(
            (self.partition.group_a, self.partition.group_b, self.partition.group_c)
        ):
            for original_index in group:
                values[:, original_index] = inner[:, col_group]
        return SampleMatrix(
            values,
            seed=seed,
            meta={
                "weights": list(self.weights),
                "construction": "grouped",
                "groups": [list(self.partition.group_a),
                           list(self.partition.group_b),
                           list(self.partition.group_c)],
                "aggregates": list(self.partition.aggregates),
            },
        )


def build_grouped_wcm(
    w: "WeightVector | Iterable[float]",
) -> "GroupedWCMCopula | CountermonotonicPair":
    """Build a weighted-countermonotonic copula for any admissible weights.

    Raises :class:`ExistenceError` (reporting ``2*max - sum``) when the
    criterion fails.  ``d == 2`` yields the countermonotonic pair; ``d >= 3``
    partitions the weights and couples the three aggregates through a
    variant-A triangle.
    """
    wv = as_weight_vector(w)
    if not validate_wcm_existence(wv):
        raise ExistenceError(
            f"no weighted-countermonotonic copula exists for {wv.values}: "
            f"2*max - sum = {existence_deficit(wv):.17g} > 0"
        )
    if wv.d == 2:
        return CountermonotonicPair(wv.values)  # type: ignore[arg-type]
    partition = partition_weights(wv)
    inner = build_triangle(partition.aggregates, variant="A")
    return GroupedWCMCopula(wv.values, partition, inner)


@dataclass(frozen=True)
class ComonotonicCopula:
    """All coordinates equal to one shared uniform draw."""

    d: int

    def cdf(self, u: Sequence[float]) -> float:
        return min(_require_unit_cube(u, self.d))

    def sample(self, n: int, seed: int) -> SampleMatrix:
        rng = make_rng(seed)
        v = rng.random(n)
        return SampleMatrix(
            np.tile(v[:, None], (1, self.d)), seed=seed, meta={"construction": "comonotonic"}
        )


@dataclass(frozen=True)
class IndependenceCopula:
    """Coordinates drawn independently."""

    d: int

    def cdf(self, u: Sequence[float]) -> float:
        return float(np.prod(_require_unit_cube(u, self.d)))

    def sample(self, n: int, seed: int) -> SampleMatrix:
        rng = make_rng(seed)
        return SampleMatrix(
            rng.random((n, self.d)), seed=seed, meta={"construction": "independence"}
        )


def check_wcm(
    samples: "SampleMatrix | np.ndarray",
    w: "WeightVector | Iterable[float]",
    tol: float = SUPPORT_TOL,
) -> tuple[bool, float]:
    """Verify the support constraint ``|w . u - sum(w)/2| <= tol`` row by row.

    Returns ``(ok, max_deviation)``.
    """
    values = samples.values if isinstance(samples, SampleMatrix) else np.asarray(samples, float)
    wv = as_weight_vector(w)
    if values.ndim != 2 or values.shape[1] != wv.d:
        raise DimensionError(
            f"sample has {values.shape[1] if values.ndim == 2 else '?'} columns, weights have {wv.d}"
        )
    dots = values @ np.array(wv.values)
    max_dev = float(np.max(np.abs(dots - 0.5 * wv.s1))) if len(dots) else 0.0
    return max_dev <= tol, max_dev


def frechet_bounds(u: Sequence[float]) -> tuple[float, float]:
    """Pointwise lower and upper bounds ``(W(u), M(u))`` valid for every copula:
    ``W(u) = max(sum(u) - (d-1), 0)`` and ``M(u) = min(u)``."""
    point = tuple(float(v) for v in u)
    if len(point) < 2:
        raise DimensionError("need at least 2 coordinates")
    for v in point:
        if not (0.0 <= v <= 1.0):
            raise DomainError(f"coordinate {v!r} outside the unit cube")
    lower = max(math.fsum(point) - (len(point) - 1), 0.0)
    return lower, min(point)
