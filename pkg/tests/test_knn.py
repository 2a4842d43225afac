import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays
from scipy.stats import special_ortho_group

from klentropy.knn import NeighbourDistances, PointCloud, ZeroDistanceError, all_knn_distances


def naive(points, k):
    # Independent oracle: full distance matrix via broadcasting, sorted rows.
    diff = points[:, None, :] - points[None, :, :]
    dist = np.sqrt((diff**2).sum(-1))
    np.fill_diagonal(dist, np.inf)
    return np.sort(dist, axis=1)[:, :k]


class TestPointCloud:
    def test_1d_input_is_column(self):
        c = PointCloud([0.0, 1.0, 3.0])
        assert (c.n, c.d) == (3, 1)

    @pytest.mark.parametrize("bad", [[[1.0]], [[0.0], [np.nan]], [[0.0], [np.inf]], np.zeros((2, 2, 2))])
    def test_rejects(self, bad):
        with pytest.raises(ValueError):
            PointCloud(bad)


class TestAllKnn:
    @pytest.mark.parametrize("backend", ["brute", "tree"])
    def test_hand_table(self, backend):
        nd = all_knn_distances([0.0, 1.0, 3.0], 2, backend=backend)
        np.testing.assert_array_equal(nd.rho, [[1, 3], [1, 2], [2, 3]])
        assert isinstance(nd, NeighbourDistances) and nd.k == 2 and nd.n == 3

    @pytest.mark.parametrize("backend", ["brute", "tree"])
    def test_full_sorted_list(self, rng, backend):
        x = rng.normal(size=(30, 3))
        nd = all_knn_distances(x, 29, backend=backend)
        np.testing.assert_allclose(nd.rho, naive(x, 29), rtol=1e-14)

    def test_tree_equals_brute_uniform_3d(self, rng):
        x = rng.random((500, 3))
        a = all_knn_distances(x, 10, backend="brute").rho
        b = all_knn_distances(x, 10, backend="tree").rho
        np.testing.assert_array_equal(a, b)

    def test_brute_chunking_is_invisible(self, rng):
        x = rng.random((300, 2))
        a = all_knn_distances(x, 7, backend="brute", chunk=17).rho
        b = all_knn_distances(x, 7, backend="brute", chunk=1000).rho
        np.testing.assert_array_equal(a, b)

    @pytest.mark.parametrize("k", [0, 3, 2.5])
    def test_k_out_of_range(self, k):
        with pytest.raises(ValueError):
            all_knn_distances([0.0, 1.0, 3.0], k)

    def test_unknown_backend(self):
        with pytest.raises(ValueError):
            all_knn_distances([0.0, 1.0, 3.0], 1, backend="annoy")

    @pytest.mark.parametrize("backend", ["brute", "tree"])
    def test_duplicates_reported(self, backend):
        x = np.array([[0.0, 0.0], [1.0, 1.0], [0.0, 0.0], [5.0, 2.0]])
        with pytest.raises(ZeroDistanceError) as exc:
            all_knn_distances(x, 1, backend=backend)
        assert sorted(exc.value.indices.tolist()) == [0, 2]

    def test_duplicates_allowed_on_request(self):
        x = np.array([[0.0], [0.0], [1.0], [3.0]])
        a = all_knn_distances(x, 2, backend="brute", allow_zero=True).rho
        b = all_knn_distances(x, 2, backend="tree", allow_zero=True).rho
        np.testing.assert_array_equal(a, b)
        np.testing.assert_array_equal(a[0], [0.0, 1.0])

    def test_ties_do_not_change_values(self):
        # Square lattice: many equal distances.
        g = np.stack(np.meshgrid(np.arange(6.0), np.arange(6.0)), -1).reshape(-1, 2)
        a = all_knn_distances(g, 8, backend="brute").rho
        b = all_knn_distances(g, 8, backend="tree").rho
        np.testing.assert_array_equal(a, b)
        np.testing.assert_allclose(a, naive(g, 8))

    def test_read_only(self, rng):
        nd = all_knn_distances(rng.random((10, 2)), 3)
        with pytest.raises(ValueError):
            nd.rho[0, 0] = 1.0


class TestInvariants:
    def test_permutation_equivariance(self, rng):
        x = rng.normal(size=(200, 4))
        perm = rng.permutation(200)
        a = all_knn_distances(x, 6).rho
        b = all_knn_distances(x[perm], 6).rho
        np.testing.assert_array_equal(a[perm], b)

    def test_isometry_invariance(self, rng):
        x = rng.normal(size=(300, 5))
        q = special_ortho_group.rvs(5, random_state=3)
        y = x @ q.T + rng.normal(size=5) * 10
        np.testing.assert_allclose(all_knn_distances(y, 5).rho, all_knn_distances(x, 5).rho, rtol=0, atol=1e-12)

    def test_scaling_equivariance(self, rng):
        x = rng.normal(size=(300, 3))
        a = 2.0**5  # exact power of two: scaling commutes with rounding
        np.testing.assert_array_equal(all_knn_distances(a * x, 5).rho, a * all_knn_distances(x, 5).rho)
        b = 3.7
        np.testing.assert_allclose(all_knn_distances(b * x, 5).rho, b * all_knn_distances(x, 5).rho, rtol=1e-14)

    @settings(max_examples=60, deadline=None)
    @given(
        x=arrays(np.float64, st.tuples(st.integers(3, 40), st.integers(1, 4)), elements=st.floats(-100, 100, width=32)),
        data=st.data(),
    )
    def test_rows_monotone_and_backends_agree(self, x, data):
        n = x.shape[0]
        k = data.draw(st.integers(1, n - 1))
        a = all_knn_distances(x, k, backend="brute", allow_zero=True).rho
        b = all_knn_distances(x, k, backend="tree", allow_zero=True).rho
        assert np.all(np.diff(a, axis=1) >= 0)
        np.testing.assert_array_equal(a, b)
        np.testing.assert_allclose(a, naive(x, k), rtol=1e-12, atol=1e-12)
