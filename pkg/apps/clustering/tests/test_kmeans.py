import itertools

import numpy as np
from django.test import SimpleTestCase

from apps.clustering.kmeans import (
    ClusterParams,
    DegenerateData,
    InvalidClusterParams,
    assign,
    cluster,
    cluster_matrix,
    inertia_of,
    kmeans_plus_plus,
    lloyd,
)
from apps.core.seeds import make_rng
from apps.corpus.dataset import Dataset, DatasetRecord
from apps.features.catalog import FEATURE_COUNT, FeatureVector


def dataset_of(rows):
    records = []
    for index, row in enumerate(rows):
        counts = list(row) + [0] * (FEATURE_COUNT - len(row))
        records.append(DatasetRecord(f"p{index:03d}.c", True, FeatureVector.from_counts(counts)))
    return Dataset(records=records, corpus_root="synthetic")


def optimum_inertia(data, k):
    """Lowest inertia over every assignment of the points to k clusters."""
    n = len(data)
    assignments = np.array(list(itertools.product(range(k), repeat=n)))
    squares = (data ** 2).sum(axis=1)
    total = np.zeros(len(assignments))
    for cluster_index in range(k):
        mask = (assignments == cluster_index).astype(float)
        counts = mask.sum(axis=1)
        sums = mask @ data
        within = mask @ squares - np.divide(
            (sums ** 2).sum(axis=1), counts, out=np.zeros_like(counts), where=counts > 0
        )
        total += within
    return float(total.min())


def means_of(data, labels, k):
    return np.array([data[labels == index].mean(axis=0) for index in range(k)])


class KMeansPlusPlusTests(SimpleTestCase):
    def test_single_center_is_a_data_point(self):
        data = np.array([[0, 1], [1, 1], [1, 0]], dtype=float)
        centers = kmeans_plus_plus(data, 1, make_rng(3))
        self.assertEqual(centers.shape, (1, 2))
        self.assertTrue(any(np.array_equal(centers[0], row) for row in data))

    def test_duplicates_of_a_chosen_point_are_never_chosen(self):
        data = np.array([[0, 0, 0]] * 5 + [[1, 1, 1]] * 5, dtype=float)
        for seed in range(50):
            centers = kmeans_plus_plus(data, 2, make_rng(seed))
            self.assertEqual({tuple(row) for row in centers}, {(0, 0, 0), (1, 1, 1)})

    def test_too_few_distinct_points(self):
        data = np.array([[1, 0]] * 4, dtype=float)
        with self.assertRaises(DegenerateData):
            kmeans_plus_plus(data, 2, make_rng(0))

    def test_second_center_follows_squared_distance_weights(self):
        data = np.array([[0, 0, 0, 0], [1, 0, 0, 0], [1, 1, 0, 0], [1, 1, 1, 1]], dtype=float)
        squared = ((data[:, None, :] - data[None, :, :]) ** 2).sum(axis=2)
        # first center uniform, second proportional to its squared distance from the first
        expected = (squared / squared.sum(axis=1, keepdims=True)).mean(axis=0)

        draws = 100_000
        rng = make_rng(20240611)
        counts = np.zeros(len(data))
        for _ in range(draws):
            second = kmeans_plus_plus(data, 2, rng)[1]
            counts[int(np.flatnonzero((data == second).all(axis=1))[0])] += 1

        sigma = np.sqrt(draws * expected * (1 - expected))
        for index in range(len(data)):
            with self.subTest(point=index):
                self.assertLessEqual(abs(counts[index] - draws * expected[index]), 3 * sigma[index])


class LloydTests(SimpleTestCase):
    def test_single_cluster_is_the_mean(self):
        rng = np.random.default_rng(11)
        data = rng.integers(0, 2, size=(40, FEATURE_COUNT)).astype(float)
        run = lloyd(data, data[:1], max_iter=300, tolerance=1e-4)
        np.testing.assert_allclose(run.centers[0], data.mean(axis=0), rtol=0, atol=1e-12)
        self.assertAlmostEqual(run.inertia, float(((data - data.mean(axis=0)) ** 2).sum()), delta=1e-9)

    def test_separated_duplicate_groups(self):
        data = np.array([[1, 1, 0, 0]] * 6 + [[0, 0, 1, 1]] * 4, dtype=float)
        _, run, _ = cluster_matrix(data, ClusterParams(k=2, seed=9))
        self.assertEqual(run.inertia, 0.0)
        self.assertEqual({tuple(row) for row in run.centers}, {(1, 1, 0, 0), (0, 0, 1, 1)})

    def test_empty_cluster_is_reseeded(self):
        data = np.array([[0, 0], [0, 1], [1, 1], [1, 0]], dtype=float)
        # the far away center starts with no points
        centers = np.array([[0.0, 0.5], [1.0, 0.5], [9.0, 9.0]])
        run = lloyd(data, centers, max_iter=50, tolerance=0.0)
        self.assertEqual(len(np.unique(run.labels)), 3)
        self.assertTrue(np.all(run.centers <= 1.0))

    def test_small_random_datasets_are_fixed_points_above_the_optimum(self):
        rng = np.random.default_rng(424242)
        checked = 0
        while checked < 200:
            n = int(rng.integers(2, 9))
            k = int(rng.integers(1, 4))
            data = rng.integers(0, 2, size=(n, 6)).astype(float)
            if len(np.unique(data, axis=0)) < k:
                continue
            checked += 1
            params = ClusterParams(k=k, seed=int(rng.integers(2**63)), n_init=3, tolerance=0.0)
            _, run, _ = cluster_matrix(data, params)
            with self.subTest(n=n, k=k, data=data.tolist()):
                labels, _ = assign(data, run.centers)
                np.testing.assert_array_equal(labels, run.labels)
                np.testing.assert_allclose(means_of(data, run.labels, k), run.centers, rtol=0, atol=1e-9)
                self.assertAlmostEqual(run.inertia, inertia_of(data, run.centers), delta=1e-9)
                self.assertGreaterEqual(run.inertia, optimum_inertia(data, k) - 1e-9)
                history = np.array(run.history)
                self.assertTrue(np.all(np.diff(history) <= 1e-9))

    def test_early_stop_labels_belong_to_returned_centers(self):
        rng = np.random.default_rng(5)
        data = rng.integers(0, 3, size=(80, 8)).astype(float)
        seeds = kmeans_plus_plus(data, 5, make_rng(5, 0))
        for max_iter, tolerance in [(1, 0.0), (300, 0.5), (300, 0.05)]:
            run = lloyd(data, seeds, max_iter=max_iter, tolerance=tolerance)
            with self.subTest(max_iter=max_iter, tolerance=tolerance):
                labels, _ = assign(data, run.centers)
                np.testing.assert_array_equal(labels, run.labels)
                self.assertAlmostEqual(run.inertia, inertia_of(data, run.centers), delta=1e-9)
                self.assertEqual(run.history[-1], run.inertia)


class ClusterTests(SimpleTestCase):
    def setUp(self):
        rng = np.random.default_rng(77)
        self.rows = rng.integers(0, 2, size=(60, FEATURE_COUNT)).tolist()
        self.dataset = dataset_of(self.rows)

    def test_same_seed_same_result(self):
        params = ClusterParams(k=4, seed=123456789, n_init=10)
        self.assertEqual(cluster(self.dataset, params), cluster(self.dataset, params))

    def test_best_of_restarts(self):
        result = cluster(self.dataset, ClusterParams(k=3, seed=5, n_init=10))
        self.assertEqual(len(result.restart_inertias), 10)
        self.assertEqual(result.inertia, min(result.restart_inertias))
        self.assertEqual(result.restart_index, result.restart_inertias.index(result.inertia))

    def test_result_shape(self):
        result = cluster(self.dataset, ClusterParams(k=3, seed=1))
        self.assertEqual(result.k, 3)
        self.assertEqual(sum(result.cluster_sizes), 60)
        self.assertTrue(all(size > 0 for size in result.cluster_sizes))
        self.assertEqual(sorted(result.assignment), [record.id for record in self.dataset.records])
        for centroid in result.centroids:
            self.assertTrue(all(0.0 <= value <= 1.0 for value in centroid.values))

    def test_k_equal_to_distinct_vectors_has_zero_inertia(self):
        dataset = dataset_of([[1, 0, 1], [1, 0, 1], [0, 1, 0], [1, 1, 1], [0, 1, 0]])
        result = cluster(dataset, ClusterParams(k=3, seed=2))
        self.assertEqual(result.inertia, 0.0)

    def test_k_one_is_the_feature_ratio(self):
        result = cluster(self.dataset, ClusterParams(k=1, seed=8))
        ratios = np.array(self.rows, dtype=float).mean(axis=0)
        np.testing.assert_allclose(result.centroids[0].values, ratios, rtol=0, atol=1e-12)

    def test_unparsable_records_are_left_out(self):
        dataset = dataset_of([[1, 0], [0, 1]])
        dataset.records.append(DatasetRecord("broken.c", False, None, "unterminated comment"))
        result = cluster(dataset, ClusterParams(k=2, seed=4))
        self.assertNotIn("broken.c", result.assignment)

    def test_degenerate_data(self):
        with self.assertRaises(DegenerateData):
            cluster(dataset_of([[1, 1]] * 5), ClusterParams(k=2, seed=0))

    def test_invalid_params(self):
        with self.assertRaises(InvalidClusterParams):
            ClusterParams(k=0, seed=1)
        with self.assertRaises(InvalidClusterParams):
            ClusterParams(k=2, seed=-1)
