"""Triangle construction, exact CDF, sampling, grouped lifting, and the
support/uniformity invariants."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import empirical_cdf_on_grid, ks_critical_1pct, ks_uniform_statistic
from wcm.copula import (
    ComonotonicCopula,
    CountermonotonicPair,
    GroupedWCMCopula,
    IndependenceCopula,
    build_grouped_wcm,
    build_triangle,
    check_wcm,
    edge_masses,
    frechet_bounds,
    triangle_params,
)
from wcm.errors import (
    DimensionError,
    DomainError,
    ExistenceError,
    MassNormalizationError,
)

triple_strategy = st.lists(
    st.floats(min_value=0.05, max_value=50.0, allow_nan=False, allow_infinity=False),
    min_size=3,
    max_size=3,
).map(tuple).filter(lambda w: 2 * max(w) <= sum(w))


class TestTriangleParams:
    def test_543_triple(self):
        z = triangle_params((5, 4, 3))
        assert z == pytest.approx((0.25, 2 / 3, 0.6), abs=1e-15)

    def test_symmetric(self):
        assert triangle_params((1, 1, 1)) == (0.5, 0.5, 0.5)

    def test_degenerate(self):
        assert triangle_params((2, 1, 1)) == (0.0, 1.0, 0.5)

    def test_rejects_nonexistent(self):
        with pytest.raises(ExistenceError):
            triangle_params((5, 1, 1))

    @given(triple_strategy)
    @settings(max_examples=200)
    def test_in_unit_interval(self, w):
        assert all(0.0 <= z <= 1.0 for z in triangle_params(w))


class TestEdgeMasses:
    def test_543_masses(self):
        m = edge_masses((0.25, 2 / 3, 0.6))
        assert m == pytest.approx((6 / 11, 3 / 11, 2 / 11), abs=1e-12)

    def test_symmetric(self):
        assert edge_masses((0.5, 0.5, 0.5)) == pytest.approx((1 / 3,) * 3, abs=1e-15)

    def test_degenerate(self):
        assert edge_masses((0.0, 1.0, 0.5)) == (1.0, 0.0, 0.0)

    def test_flags_inadmissible_triple(self):
        # An arbitrary z-triple solves the vertex equations with masses that
        # do not sum to one; that must be reported, not silently accepted.
        with pytest.raises(MassNormalizationError):
            edge_masses((0.5, 0.3, 0.2))

    def test_rejects_out_of_range(self):
        with pytest.raises(DomainError):
            edge_masses((1.2, 0.5, 0.5))

    @given(triple_strategy)
    @settings(max_examples=200)
    def test_admissible_triples_normalize(self, w):
        m = edge_masses(triangle_params(w))
        assert math.fsum(m) == pytest.approx(1.0, abs=1e-12)
        assert min(m) >= 0.0


class TestBuildTriangle:
    def test_variant_a_543(self):
        c = build_triangle((5, 4, 3), "A")
        assert c.vertices[0] == pytest.approx((1.0, 0.25, 0.0), abs=1e-15)
        assert c.vertices[1] == pytest.approx((0.0, 1.0, 2 / 3), abs=1e-15)
        assert c.vertices[2] == pytest.approx((0.6, 0.0, 1.0), abs=1e-15)
        assert c.masses == pytest.approx((6 / 11, 3 / 11, 2 / 11), abs=1e-12)

    def test_variant_a_equilateral(self):
        c = build_triangle((1, 1, 1), "A")
        assert c.masses == pytest.approx((1 / 3,) * 3, abs=1e-15)

    def test_variant_b_masses_mirror_variant_a(self):
        # Independent oracle: swapping the last two coordinates of the cube
        # maps variant B for (w1, w2, w3) onto variant A for (w1, w3, w2),
        # with edges 12/23/31 landing on 31/23/12 respectively.
        for w in ((5, 4, 3), (1, 1, 1), (3, 2, 2), (2.5, 2.0, 1.0)):
            b = build_triangle(w, "B")
            a = build_triangle((w[0], w[2], w[1]), "A")
            assert b.masses[0] == pytest.approx(a.masses[2], abs=1e-12)
            assert b.masses[1] == pytest.approx(a.masses[1], abs=1e-12)
            assert b.masses[2] == pytest.approx(a.masses[0], abs=1e-12)

    def test_variant_b_543_frozen(self):
        b = build_triangle((5, 4, 3), "B")
        assert b.z_values == pytest.approx((1 / 3, 2 / 5, 3 / 4), abs=1e-15)
        assert b.masses == pytest.approx((3 / 11, 2 / 11, 6 / 11), abs=1e-12)

    def test_variants_differ_on_cdf_grid(self):
        a = build_triangle((5, 4, 3), "A")
        b = build_triangle((5, 4, 3), "B")
        grid = np.linspace(0.0, 1.0, 21)
        best = max(
            abs(a.cdf((x, y, z)) - b.cdf((x, y, z)))
            for x in grid
            for y in grid
            for z in grid
        )
        assert best > 1e-6

    def test_rejects_nonexistent(self):
        with pytest.raises(ExistenceError):
            build_triangle((5, 1, 1), "A")
        with pytest.raises(ExistenceError):
            build_triangle((5, 1, 1), "B")

    def test_rejects_unknown_variant(self):
        with pytest.raises(DomainError):
            build_triangle((1, 1, 1), "C")

    @given(triple_strategy, st.sampled_from(["A", "B"]))
    @settings(max_examples=100, deadline=None)
    def test_vertices_on_support_hyperplane(self, w, variant):
        c = build_triangle(w, variant)
        half = 0.5 * math.fsum(w)
        for p in c.vertices:
            dot = math.fsum(wi * pi for wi, pi in zip(w, p))
            assert abs(dot - half) <= 1e-12 * max(1.0, half)


class TestCdf:
    def test_543_point_value(self):
        c = build_triangle((5, 4, 3), "A")
        assert c.cdf((1.0, 0.25, 1 / 3)) == pytest.approx(2 / 33, abs=1e-12)

    def test_total_mass(self):
        for w, variant in (((5, 4, 3), "A"), ((5, 4, 3), "B"), ((1, 1, 1), "A")):
            assert build_triangle(w, variant).cdf((1, 1, 1)) == pytest.approx(1.0, abs=1e-12)

    def test_center_of_equilateral_is_zero(self):
        c = build_triangle((1, 1, 1), "A")
        assert c.cdf((0.5, 0.5, 0.5)) == 0.0
        # brute-force Monte Carlo cross-check of the same event
        values = c.sample(10**6, seed=1234).values
        hits = np.count_nonzero(np.all(values <= 0.5, axis=1))
        assert hits == 0

    def test_domain_error(self):
        c = build_triangle((1, 1, 1), "A")
        with pytest.raises(DomainError):
            c.cdf((1.5, 0.5, 0.5))
        with pytest.raises(DimensionError):
            c.cdf((0.5, 0.5))

    def test_grounded(self):
        c = build_triangle((5, 4, 3), "A")
        rng = np.random.default_rng(0)
        for _ in range(50):
            u = rng.random(3)
            k = rng.integers(0, 3)
            u[k] = 0.0
            assert c.cdf(u) == 0.0

    @given(triple_strategy, st.sampled_from(["A", "B"]))
    @settings(max_examples=50, deadline=None)
    def test_coordinatewise_nondecreasing(self, w, variant):
        c = build_triangle(w, variant)
        rng = np.random.default_rng(7)
        for _ in range(20):
            lo = rng.random(3)
            hi = lo.copy()
            k = rng.integers(0, 3)
            hi[k] = lo[k] + (1.0 - lo[k]) * rng.random()
            assert c.cdf(hi) >= c.cdf(lo) - 1e-15

    def test_frechet_sandwich_on_grid(self):
        grid = np.linspace(0.0, 1.0, 11)
        for w, variant in (((5, 4, 3), "A"), ((5, 4, 3), "B"), ((2, 1, 1), "A")):
            c = build_triangle(w, variant)
            for x in grid:
                for y in grid:
                    for z in grid:
                        lower, upper = frechet_bounds((x, y, z))
                        value = c.cdf((x, y, z))
                        assert lower - 1e-12 <= value <= upper + 1e-12


MARGINAL_CASES = [
    ("triangle (5,4,3) A", lambda: build_triangle((5, 4, 3), "A")),
    ("triangle (5,4,3) B", lambda: build_triangle((5, 4, 3), "B")),
    ("triangle (1,1,1) A", lambda: build_triangle((1, 1, 1), "A")),
    ("inner of (1,1,1,1)", lambda: build_grouped_wcm((1, 1, 1, 1)).inner),
    ("inner of (3,3,2,2)", lambda: build_grouped_wcm((3, 3, 2, 2)).inner),
]


@pytest.mark.parametrize("label,factory", MARGINAL_CASES)
def test_exact_uniform_marginals_on_grid(label, factory):
    """CDF with all other coordinates at 1 must equal the identity exactly."""
    copula = factory()
    grid = np.linspace(0.0, 1.0, 101)
    for k in range(3):
        for u in grid:
            assert abs(copula.marginal_cdf(k, float(u)) - u) <= 1e-12, (label, k, u)


SUPPORT_WEIGHTS = [(1, 1, 1), (5, 4, 3), (1, 1, 1, 1), (3, 3, 2, 2)]


@pytest.mark.parametrize("w", SUPPORT_WEIGHTS)
def test_support_constraint_100k(w):
    copula = build_grouped_wcm(w)
    samples = copula.sample(100_000, seed=20240 + len(w))
    ok, max_dev = check_wcm(samples, w, tol=1e-9)
    assert ok, f"max deviation {max_dev}"


@pytest.mark.parametrize("w", SUPPORT_WEIGHTS)
def test_empirical_marginals_ks(w):
    copula = build_grouped_wcm(w)
    values = copula.sample(100_000, seed=515 + len(w)).values
    critical = ks_critical_1pct(values.shape[0])
    for k in range(values.shape[1]):
        assert ks_uniform_statistic(values[:, k]) < critical


@given(triple_strategy, st.sampled_from(["A", "B"]))
@settings(max_examples=25, deadline=None)
def test_cdf_matches_empirical_frequency_random_triples(w, variant):
    c = build_triangle(w, variant)
    values = c.sample(4000, seed=314).values
    rng = np.random.default_rng(159)
    for _ in range(5):
        u = rng.random(3)
        frequency = float(np.mean(np.all(values <= u, axis=1)))
        assert abs(c.cdf(u) - frequency) < 5.0 / math.sqrt(4000)


@pytest.mark.parametrize("variant", ["A", "B"])
def test_sampler_matches_exact_cdf(variant):
    """Empirical CDF of 10**6 draws within 3/sqrt(n) of the exact CDF on an
    11^3 grid."""
    c = build_triangle((5, 4, 3), variant)
    n = 10**6
    values = c.sample(n, seed=99 if variant == "A" else 100).values
    grid = np.linspace(0.0, 1.0, 11)
    empirical = empirical_cdf_on_grid(values, grid)
    worst = 0.0
    for a, x in enumerate(grid):
        for b, y in enumerate(grid):
            for cc, z in enumerate(grid):
                worst = max(worst, abs(empirical[a, b, cc] - c.cdf((x, y, z))))
    assert worst < 3.0 / math.sqrt(n), worst


class TestSampling:
    def test_support_examples(self):
        rows = build_triangle((1, 1, 1), "A").sample(1000, seed=3).values
        assert np.allclose(rows.sum(axis=1), 1.5, atol=1e-12)
        rows = build_triangle((5, 4, 3), "A").sample(1000, seed=4).values
        assert np.allclose(rows @ np.array([5.0, 4.0, 3.0]), 6.0, atol=1e-9)

    def test_deterministic_given_seed(self):
        c = build_triangle((5, 4, 3), "A")
        first = c.sample(500, seed=42).values
        second = c.sample(500, seed=42).values
        assert np.array_equal(first, second)
        third = c.sample(500, seed=43).values
        assert not np.array_equal(first, third)

    def test_rejects_empty(self):
        with pytest.raises(DimensionError):
            build_triangle((1, 1, 1), "A").sample(0, seed=1)

    @given(
        st.lists(st.floats(min_value=0.05, max_value=50.0), min_size=2, max_size=6).map(tuple)
    )
    @settings(max_examples=60, deadline=None)
    def test_support_random_weights(self, w):
        if 2 * max(w) > sum(w):
            with pytest.raises(ExistenceError):
                build_grouped_wcm(w)
            return
        copula = build_grouped_wcm(w)
        ok, max_dev = check_wcm(copula.sample(2000, seed=8), w, tol=1e-9)
        assert ok, max_dev


class TestGrouped:
    def test_equal_quadruple_structure(self):
        g = build_grouped_wcm((1, 1, 1, 1))
        assert isinstance(g, GroupedWCMCopula)
        assert g.partition.group_a == (0,)
        assert g.partition.group_b == (2,)
        assert g.partition.group_c == (1, 3)
        assert g.inner.weights == (1.0, 1.0, 2.0)

    def test_543_aggregates(self):
        g = build_grouped_wcm((5, 4, 3))
        assert g.inner.weights == (5.0, 3.0, 4.0)

    def test_existence_error_reports_deficit(self):
        with pytest.raises(ExistenceError, match="2\\*max - sum = 3"):
            build_grouped_wcm((5, 1, 1))

    def test_within_group_comonotonic(self):
        g = build_grouped_wcm((1, 1, 1, 1))
        values = g.sample(1000, seed=77).values
        i, j = g.partition.group_c
        assert np.array_equal(values[:, i], values[:, j])

    def test_pair_reduces_to_countermonotonic(self):
        pair = build_grouped_wcm((1, 1))
        assert isinstance(pair, CountermonotonicPair)
        values = pair.sample(1000, seed=5).values
        assert np.array_equal(values[:, 1], 1.0 - values[:, 0])
        assert pair.cdf((0.7, 0.6)) == pytest.approx(0.3, abs=1e-12)
        assert pair.cdf((0.2, 0.3)) == 0.0


class TestCheckWcm:
    def test_grouped_passes(self):
        s = build_grouped_wcm((1, 1, 1, 1)).sample(10_000, seed=1)
        ok, dev = check_wcm(s, (1, 1, 1, 1))
        assert ok and dev < 1e-9

    def test_comonotonic_fails(self):
        s = ComonotonicCopula(3).sample(1000, seed=2)
        ok, dev = check_wcm(s, (1, 1, 1))
        assert not ok and dev > 0.1

    def test_independent_fails(self):
        s = IndependenceCopula(3).sample(1000, seed=3)
        ok, _ = check_wcm(s, (1, 1, 1))
        assert not ok

    def test_dimension_mismatch(self):
        s = IndependenceCopula(3).sample(10, seed=4)
        with pytest.raises(DimensionError):
            check_wcm(s, (1, 1))


class TestFrechetBounds:
    def test_corner(self):
        assert frechet_bounds((1, 1, 1)) == (1.0, 1.0)

    def test_center(self):
        lower, upper = frechet_bounds((0.5, 0.5, 0.5))
        assert lower == 0.0
        assert upper == 0.5

    def test_pair(self):
        lower, upper = frechet_bounds((0.7, 0.6))
        assert lower == pytest.approx(0.3, abs=1e-12)
        assert upper == 0.6

    def test_domain(self):
        with pytest.raises(DomainError):
            frechet_bounds((1.2, 0.5))


class TestSampleMatrix:
    def test_csv_round_trip(self):
        s = build_triangle((5, 4, 3), "A").sample(25, seed=11)
        text = s.to_csv_string()
        lines = text.strip().split("\n")
        assert lines[0] == "u1,u2,u3"
        parsed = np.array([[float(v) for v in line.split(",")] for line in lines[1:]])
        assert np.array_equal(parsed, s.values)

    def test_json_metadata(self):
        s = build_triangle((5, 4, 3), "B").sample(10, seed=12)
        meta = s.to_json_dict()
        assert meta["n"] == 10
        assert meta["d"] == 3
        assert meta["seed"] == 12
        assert meta["generator"] == "pcg64"
        assert meta["variant"] == "B"
        assert meta["weights"] == [5.0, 4.0, 3.0]
