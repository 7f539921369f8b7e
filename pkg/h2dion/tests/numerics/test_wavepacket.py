import numpy as np
from django.test import SimpleTestCase

from h2dion.exceptions.simulation import GridException, RepresentationException, SymmetryException
from h2dion.numerics.grid import GridSpec
from h2dion.numerics.wavepacket import Representation, WavePacket, exchange_defect, norm, normalize, symmetrize

GRID: GridSpec = GridSpec(n_r=8, n_z1=16, n_z2=16, r_min=0.5, r_max=4.0, z_max=10.0)


def random_packet(seed: int = 1) -> WavePacket:
    rng = np.random.default_rng(seed)
    return WavePacket(rng.normal(size=GRID.shape) + 1j * rng.normal(size=GRID.shape), GRID)


class TestWavePacket(SimpleTestCase):
    def test_shape_must_match_grid(self):
        with self.assertRaises(GridException):
            WavePacket(np.zeros((8, 16, 8)), GRID)

    def test_normalize(self):
        wp: WavePacket = normalize(random_packet())
        self.assertAlmostEqual(norm(wp), 1.0, places=12)

    def test_normalize_zero_raises(self):
        with self.assertRaises(SymmetryException):
            normalize(WavePacket.zeros(GRID))

    def test_fourier_round_trip_is_unitary(self):
        wp: WavePacket = normalize(random_packet())
        original: np.ndarray = wp.amplitudes.copy()

        wp.to_momentum()
        self.assertEqual(wp.representation, Representation.MOMENTUM)
        self.assertAlmostEqual(norm(wp), 1.0, places=12)

        wp.to_coordinate()
        np.testing.assert_allclose(wp.amplitudes, original, atol=1e-12)

    def test_representation_is_checked(self):
        wp: WavePacket = random_packet()
        with self.assertRaises(RepresentationException):
            wp.to_coordinate()
        wp.to_momentum()
        with self.assertRaises(RepresentationException):
            symmetrize(wp)

    def test_symmetrize_removes_exchange_defect(self):
        wp: WavePacket = symmetrize(random_packet())
        self.assertLess(exchange_defect(wp), 1e-14)
        self.assertAlmostEqual(norm(wp), 1.0, places=12)

    def test_symmetrize_antisymmetric_input_raises(self):
        amplitudes: np.ndarray = random_packet().amplitudes
        with self.assertRaises(SymmetryException):
            symmetrize(WavePacket(amplitudes - np.swapaxes(amplitudes, 1, 2), GRID))

    def test_copy_is_independent(self):
        wp: WavePacket = random_packet()
        duplicate: WavePacket = wp.copy()
        duplicate.amplitudes[0, 0, 0] = 100.0
        self.assertNotEqual(wp.amplitudes[0, 0, 0], 100.0)
