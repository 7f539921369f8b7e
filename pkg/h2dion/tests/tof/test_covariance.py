import numpy as np
from django.test import SimpleTestCase
from pyfakefs.fake_filesystem_unittest import Patcher

from h2dion.exceptions.simulation import InvalidDataFileException
from h2dion.tof.covariance import CovarianceAccumulator, CovarianceMap, covariance_map, read_covariance_map, \
    write_covariance_map
from h2dion.tof.shots import ShotDataset


def random_shots(n_shots: int = 400, n_bins: int = 12, seed: int = 4) -> ShotDataset:
    rng = np.random.default_rng(seed)
    return ShotDataset(counts=rng.poisson(1.5, size=(n_shots, n_bins)).astype(float), start_ns=100.0)


class TestCovarianceMap(SimpleTestCase):
    def test_identical_shots_have_no_covariance(self):
        counts: np.ndarray = np.tile(np.array([0.0, 2.0, 5.0, 1.0]), (50, 1))
        cmap: CovarianceMap = covariance_map(ShotDataset(counts=counts))
        np.testing.assert_allclose(cmap.c2, np.zeros((4, 4)), atol=1e-12)
        np.testing.assert_allclose(cmap.mean, counts[0])

    def test_matches_population_covariance(self):
        shots: ShotDataset = random_shots()
        cmap: CovarianceMap = covariance_map(shots)
        np.testing.assert_allclose(cmap.c2, np.cov(shots.counts, rowvar=False, bias=True), atol=1e-10)
        np.testing.assert_array_equal(cmap.c2, cmap.c2.T)
        self.assertEqual(cmap.n_shots, 400)
        np.testing.assert_array_equal(cmap.t_ns, shots.t_ns)

    def test_merged_partial_sums_equal_the_full_map(self):
        shots: ShotDataset = random_shots()
        first: CovarianceAccumulator = CovarianceAccumulator(shots.n_bins).add(shots.counts[:150])
        second: CovarianceAccumulator = CovarianceAccumulator(shots.n_bins)
        for record in list(shots)[150:]:
            second.add(record)
        merged: CovarianceMap = second.merge(first).result(shots.t_ns)
        np.testing.assert_allclose(merged.c2, covariance_map(shots).c2, atol=1e-10)
        self.assertEqual(merged.n_shots, 400)

    def test_shot_order_does_not_matter(self):
        shots: ShotDataset = random_shots()
        order: np.ndarray = np.random.default_rng(9).permutation(len(shots))
        shuffled: CovarianceMap = covariance_map(ShotDataset(counts=shots.counts[order], start_ns=100.0))
        np.testing.assert_allclose(shuffled.c2, covariance_map(shots).c2, atol=1e-10)

    def test_constant_offset_leaves_covariance_unchanged(self):
        shots: ShotDataset = random_shots()
        offset: np.ndarray = np.linspace(3.0, 40.0, shots.n_bins)
        shifted: CovarianceMap = covariance_map(ShotDataset(counts=shots.counts + offset, start_ns=100.0))
        np.testing.assert_allclose(shifted.c2, covariance_map(shots).c2, atol=1e-9)
        np.testing.assert_allclose(shifted.mean, shots.mean_trace() + offset, atol=1e-10)

    def test_scaling_the_traces_scales_covariance_quadratically(self):
        shots: ShotDataset = random_shots()
        scaled: CovarianceMap = covariance_map(ShotDataset(counts=2.5 * shots.counts, start_ns=100.0))
        np.testing.assert_allclose(scaled.c2, 2.5 ** 2 * covariance_map(shots).c2, rtol=1e-10, atol=1e-10)

    def test_needs_two_shots(self):
        with self.assertRaises(InvalidDataFileException):
            covariance_map(ShotDataset(counts=np.ones((1, 4))))
        with self.assertRaises(InvalidDataFileException):
            covariance_map([])

    def test_bin_mismatch(self):
        with self.assertRaises(InvalidDataFileException):
            CovarianceAccumulator(4).add(np.ones((2, 5)))
        with self.assertRaises(InvalidDataFileException):
            CovarianceAccumulator(4).merge(CovarianceAccumulator(5))


class TestCovarianceFiles(SimpleTestCase):
    def test_text_and_binary_forms(self):
        cmap: CovarianceMap = covariance_map(random_shots(n_bins=6))
        with Patcher():
            write_covariance_map('map.dat', cmap)
            write_covariance_map('map.npz', cmap)
            text: CovarianceMap = read_covariance_map('map.dat')
            binary: CovarianceMap = read_covariance_map('map.npz')

        np.testing.assert_allclose(text.c2, cmap.c2, rtol=1e-9, atol=1e-12)
        np.testing.assert_allclose(text.t_ns, cmap.t_ns)
        self.assertEqual(text.n_shots, cmap.n_shots)
        np.testing.assert_array_equal(binary.c2, cmap.c2)
        np.testing.assert_array_equal(binary.mean, cmap.mean)
