import math

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

import oracles
from detkmeans import (
    METHODS,
    ConvergenceError,
    Dataset,
    SplitState,
    centroid,
    initialize,
    katsavounidis_init,
    maximin_init,
    maxisum_init,
    pca_part_init,
    pick_projection_axes,
    principal_eigenvector,
    select_split_cluster,
    sq_euclidean,
    var_part_init,
)
from detkmeans.metrics import sse

TRIANGLE = np.array([(0, 0), (1, 0), (5, 5)], dtype=float)
RIGHT = np.array([(0, 0), (4, 0), (0, 3)], dtype=float)

small_coords = st.integers(-20, 20).map(float)
point_sets = st.integers(1, 3).flatmap(
    lambda d: arrays(np.float64, st.tuples(st.integers(2, 14), st.just(d)), elements=small_coords)
)


def n_distinct(x):
    return len({tuple(r) for r in x})


class TestMaximin:
    def test_k2(self):
        c = maximin_init(TRIANGLE, 2).points
        np.testing.assert_allclose(c[0], [2, 5 / 3], rtol=1e-15)
        np.testing.assert_array_equal(c[1], [5, 5])

    def test_k3(self):
        np.testing.assert_array_equal(maximin_init(TRIANGLE, 3).points[2], [0, 0])

    def test_matches_loop_oracle(self):
        expected = oracles.maximin_by_loops(TRIANGLE, 3, (2, 5 / 3))
        np.testing.assert_allclose(maximin_init(TRIANGLE, 3).points, expected, rtol=1e-15)

    def test_k1_is_centroid(self, iris):
        np.testing.assert_array_equal(maximin_init(iris, 1).points[0], centroid(iris))

    @pytest.mark.parametrize("k", [0, 4])
    def test_bad_k(self, k):
        with pytest.raises(ValueError):
            maximin_init(TRIANGLE, k)

    def test_lexicographic_tie(self):
        # (0, 1) and (0, -1) are equally far from the centroid (0, 0)
        x = np.array([(0, 1), (0, -1), (0, 0)], dtype=float)
        assert tuple(maximin_init(x, 2).points[1]) == (0, -1)
        assert tuple(maximin_init(x[::-1], 2).points[1]) == (0, -1)

    @given(point_sets, st.integers(1, 3))
    def test_agrees_with_loop_oracle(self, x, k):
        k = min(k, n_distinct(x))
        first = x.mean(axis=0)
        if k > 1 and n_distinct(np.vstack([x, first])) <= 1:
            return
        try:
            got = maximin_init(x, k).points
        except ValueError:
            return  # centroid coincides with the only remaining distinct point
        xs = x[np.lexsort(x.T[::-1])]
        expected = oracles.maximin_by_loops(xs, k, centroid(x))
        np.testing.assert_allclose(got, expected, rtol=0, atol=0)

    def test_centers_are_data_points_after_first(self, iris):
        rows = {tuple(r) for r in iris.points}
        assert all(tuple(c) in rows for c in maximin_init(iris, 3).points[1:])


class TestGreedyKCenterBound:
    """Farthest-first traversal from a data point is within 2x of the K-center optimum."""

    @given(
        arrays(np.float64, st.tuples(st.integers(2, 9), st.just(2)), elements=st.floats(0, 1), unique=True),
        st.integers(1, 3),
    )
    def test_two_approximation(self, x, k):
        k = min(k, n_distinct(x))
        pts = [tuple(p) for p in x]
        opt = oracles.brute_kcenter_optimum(pts, k)
        for first in x:
            try:
                c = maximin_init(x, k, first=first).points
            except ValueError:
                continue
            assert oracles.kcenter_radius(pts, [tuple(p) for p in c]) <= 2 * opt + 1e-12

    def test_centroid_start_has_no_bound(self):
        # two points: the centroid start wastes one of two centers
        x = np.array([[0.0], [10.0]])
        c = maximin_init(x, 2).points
        assert oracles.kcenter_radius([(0.0,), (10.0,)], [tuple(p) for p in c]) == 5.0
        assert oracles.brute_kcenter_optimum([(0.0,), (10.0,)], 2) == 0.0


class TestKatsavounidis:
    def test_examples(self):
        assert tuple(katsavounidis_init(TRIANGLE, 1).points[0]) == (5, 5)
        assert tuple(katsavounidis_init(TRIANGLE, 2).points[1]) == (0, 0)

    def test_identical_points(self):
        x = np.full((4, 2), 3.0)
        np.testing.assert_array_equal(katsavounidis_init(x, 1).points, [[3, 3]])
        with pytest.raises(ValueError, match="distinct"):
            katsavounidis_init(x, 2)

    @given(point_sets, st.integers(1, 3))
    def test_agrees_with_loop_oracle(self, x, k):
        k = min(k, n_distinct(x))
        xs = x[np.lexsort(x.T[::-1])]
        norms = [sq_euclidean(p, np.zeros_like(p)) for p in xs]
        first = min(tuple(p) for p, n in zip(xs, norms) if n == max(norms))
        expected = oracles.maximin_by_loops(xs, k, first)
        np.testing.assert_array_equal(katsavounidis_init(x, k).points, expected)


class TestSelectSplitCluster:
    @staticmethod
    def cells(*sses, singleton=()):
        return [
            SplitState(members=np.arange(1), sse=s, centroid=np.zeros(1), created=i, distinct=i not in singleton)
            for i, s in enumerate(sses)
        ]

    def test_argmax(self):
        assert select_split_cluster(self.cells(5.0, 7.0, 1.0)) == 1

    def test_tie_goes_to_earliest(self):
        assert select_split_cluster(self.cells(7.0, 7.0)) == 0

    def test_skips_unsplittable(self):
        assert select_split_cluster(self.cells(9.0, 2.0, singleton={0})) == 1

    def test_nothing_splittable(self):
        with pytest.raises(ValueError):
            select_split_cluster(self.cells(0.0, singleton={0}))


class TestPrincipalEigenvector:
    def test_diagonal(self):
        np.testing.assert_array_equal(principal_eigenvector(np.diag([4.0, 1.0])), [1, 0])

    def test_symmetric_2x2(self):
        v = principal_eigenvector([[2.0, 1.0], [1.0, 2.0]])
        np.testing.assert_allclose(v, [1 / math.sqrt(2)] * 2, atol=1e-8)

    def test_identity(self):
        np.testing.assert_array_equal(principal_eigenvector(np.eye(3)), [1, 0, 0])

    def test_zero_matrix(self):
        # every vector is an eigenvector; the start vector is returned
        np.testing.assert_array_equal(principal_eigenvector(np.zeros((2, 2))), [1, 0])

    def test_iteration_cap(self):
        # eigenvalues 1 and 0.99 with a rotated basis: convergence is slow
        rot = np.array([[math.cos(0.3), -math.sin(0.3)], [math.sin(0.3), math.cos(0.3)]])
        a = rot @ np.diag([1.0, 0.99]) @ rot.T
        with pytest.raises(ConvergenceError):
            principal_eigenvector(a, max_iter=5)
        v = principal_eigenvector(a, max_iter=5000)
        np.testing.assert_allclose(v, rot[:, 0], atol=1e-6)

    @given(st.floats(0, 10), st.floats(-5, 5), st.floats(0, 10))
    def test_against_closed_form_2x2(self, a, b, d):
        if a * d - b * b < 0 or abs(b) < 1e-3:
            return
        lam, expected = oracles.eigvec_2x2(a, b, d)
        other = a + d - lam
        if lam - other < 1e-3:
            return
        v = principal_eigenvector([[a, b], [b, d]])
        m = np.array([[a, b], [b, d]])
        assert np.linalg.norm(m @ v - lam * v) < 1e-8 * max(1.0, lam)
        np.testing.assert_allclose(v, expected, atol=1e-6)

    def test_unit_norm_and_sign(self, rng):
        for _ in range(20):
            b = rng.normal(size=(6, 4))
            v = principal_eigenvector(b.T @ b)
            assert abs(np.linalg.norm(v) - 1) < 1e-12
            assert v[np.flatnonzero(v)[0]] > 0


class TestDivisive:
    def test_vp_one_dimensional(self):
        c = var_part_init(np.array([[0.0], [1.0], [9.0], [10.0]]), 2).points
        np.testing.assert_array_equal(sorted(c[:, 0]), [0.5, 9.5])

    def test_pp_on_diagonal_line(self):
        x = np.array([(0, 0), (1, 1), (2, 2), (3, 3)], dtype=float)
        c = pca_part_init(x, 2).points
        np.testing.assert_allclose(sorted(map(tuple, c)), [(0.5, 0.5), (2.5, 2.5)], atol=1e-12)

    @pytest.mark.parametrize("fn", [var_part_init, pca_part_init])
    def test_k1_is_centroid(self, fn, wine):
        np.testing.assert_array_equal(fn(wine, 1).points[0], centroid(wine))

    @pytest.mark.parametrize("fn", [var_part_init, pca_part_init])
    def test_k_above_distinct_points(self, fn):
        x = np.array([[1.0, 1.0], [1.0, 1.0], [2.0, 2.0]])
        with pytest.raises(ValueError, match="distinct"):
            fn(x, 3)

    def test_ruspini_split_sequence(self, ruspini):
        trace = []
        var_part_init(ruspini, 4, trace=trace)
        axes = [int(np.flatnonzero(c.direction)[0]) for c in trace]
        assert axes == [1, 0, 0]
        np.testing.assert_allclose([c.threshold for c in trace], [92.026667, 66.975, 41.057143], atol=1e-6)

    @pytest.mark.parametrize("fn", [var_part_init, pca_part_init])
    @given(x=point_sets, k=st.integers(2, 5))
    def test_split_soundness(self, fn, x, k):
        k = min(k, n_distinct(x))
        trace = []
        fn(x, k, trace=trace)
        xs = x[np.lexsort(x.T[::-1])]
        for cell in trace:
            pts = xs[cell.members]
            assert abs(cell.sse - sse(pts, centroid(pts)[None, :])) <= 1e-9 * max(1.0, cell.sse)
            assert abs(np.linalg.norm(cell.direction) - 1) < 1e-12
            low = pts @ cell.direction <= cell.threshold
            assert low.any() and (~low).any()
            child = sse(pts[low], centroid(pts[low])[None, :]) + sse(pts[~low], centroid(pts[~low])[None, :])
            assert child <= cell.sse * (1 + 1e-9) + 1e-12

    @given(
        st.lists(st.floats(-50, 50, allow_nan=False), min_size=2, max_size=5, unique=True),
        st.lists(st.floats(-50, 50, allow_nan=False), min_size=2, max_size=5, unique=True),
        st.lists(st.floats(-50, 50, allow_nan=False), min_size=1, max_size=3, unique=True),
        st.integers(1, 6),
    )
    def test_pp_equals_vp_on_product_sets(self, a, b, c, k):
        # the covariance of a Cartesian product is diagonal, and every axis split keeps that
        x = np.array([(p, q, r) for p in a for q in b for r in c])
        k = min(k, len(x))
        trace = []
        var_part_init(x, k, trace=trace)
        xs = x[np.lexsort(x.T[::-1])]
        for cell in trace:
            # the reduction needs a unique max-variance axis in every split
            var = np.sort(xs[cell.members].var(axis=0))
            assume(var[-1] - var[-2] > 1e-6 * var[-1])
        np.testing.assert_allclose(
            sorted(map(tuple, pca_part_init(x, k).points)),
            sorted(map(tuple, var_part_init(x, k).points)),
            rtol=1e-12,
            atol=1e-12,
        )


class TestProjectionAxes:
    def test_cov_tie_and_constant_exclusion(self):
        x = np.array([[1, 1, 3], [2, 1, 1], [3, 1, 2]], dtype=float)
        plan = pick_projection_axes(x)
        assert (plan.d1, plan.d2) == (0, 2)

    def test_least_correlated(self):
        base = np.array([1.0, 2.0, 4.0, 7.0, 8.0])
        x = np.column_stack([base, base * 3 + 30, 50 - base])
        # column 0 has the largest |CoV|; column 2 is perfectly anti-correlated with it
        plan = pick_projection_axes(x)
        assert plan.d1 == 0 and plan.d2 == 2

    def test_two_attributes(self):
        plan = pick_projection_axes(np.array([[1.0, 5.0], [2.0, 3.0], [4.0, 4.0]]))
        assert {plan.d1, plan.d2} == {0, 1}

    def test_zero_mean_wins(self):
        x = np.array([[-1.0, 10.0, 5.0], [1.0, 11.0, 1.0], [0.0, 12.0, 3.0]])
        assert pick_projection_axes(x).d1 == 0

    def test_projected_columns_are_exact(self, wine):
        plan = pick_projection_axes(wine)
        xs = wine.points[np.lexsort(wine.points.T[::-1])]
        np.testing.assert_array_equal(plan.projected, xs[:, [plan.d1, plan.d2]])
        assert plan.d1 != plan.d2

    @pytest.mark.parametrize("x", [np.ones((3, 1)), np.array([[1.0, 2.0], [1.0, 3.0]])])
    def test_preconditions(self, x):
        with pytest.raises(ValueError):
            pick_projection_axes(x)


class TestMaxisum:
    def test_right_triangle(self):
        c = maxisum_init(RIGHT, 2, projected=False).points
        np.testing.assert_array_equal(c, [[4, 0], [0, 3]])
        np.testing.assert_array_equal(maxisum_init(RIGHT, 3, projected=False).points[2], [0, 0])

    def test_projection_is_identity_in_2d(self):
        np.testing.assert_array_equal(maxisum_init(RIGHT, 3, projected=True).points, [[4, 0], [0, 3], [0, 0]])

    def test_k1_farthest_from_centroid(self, iris):
        c = maxisum_init(iris, 1, projected=False).points[0]
        far = max(np.sum((iris.points - centroid(iris)) ** 2, axis=1))
        assert sq_euclidean(c, centroid(iris)) == pytest.approx(far, rel=1e-15)

    def test_ms_returns_full_dimensional_points(self, wine):
        c = maxisum_init(wine, 3, projected=True).points
        rows = {tuple(r) for r in wine.points}
        assert c.shape == (3, 13) and all(tuple(p) in rows for p in c)

    def test_k_exceeds_distinct(self):
        x = np.array([[0.0, 1.0], [0.0, 1.0], [2.0, 0.0]])
        with pytest.raises(ValueError):
            maxisum_init(x, 3, projected=False)


class TestAllMethods:
    @pytest.mark.parametrize("method", METHODS)
    def test_deterministic(self, method, wine):
        a = initialize(wine, 3, method).points
        b = initialize(wine, 3, method).points
        assert a.tobytes() == b.tobytes()

    @pytest.mark.parametrize("method", METHODS)
    def test_order_invariant(self, method, iris, rng):
        ref = initialize(iris, 3, method).points
        for _ in range(5):
            got = initialize(iris.take(rng.permutation(iris.n_points)), 3, method).points
            if method in ("vp", "pp"):
                assert sorted(map(tuple, got)) == sorted(map(tuple, ref))
            else:
                assert got.tobytes() == ref.tobytes()

    @pytest.mark.parametrize("method", ["kk", "ms", "ms+"])
    def test_centers_are_data_points(self, method, wine):
        rows = {tuple(r) for r in wine.points}
        assert all(tuple(c) in rows for c in initialize(wine, 3, method).points)

    def test_unknown_method(self, iris):
        with pytest.raises(ValueError, match="unknown method"):
            initialize(iris, 3, "forgy")

    def test_accepts_dataset_or_array(self, iris):
        a = initialize(iris, 3, "pp").points
        b = initialize(np.asarray(iris.points), 3, "pp").points
        assert a.tobytes() == b.tobytes()
        assert isinstance(iris, Dataset)
