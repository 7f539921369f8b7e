import numpy as np
from django.test import SimpleTestCase
from pyfakefs.fake_filesystem_unittest import Patcher

from h2dion.exceptions.simulation import InvalidDataFileException
from h2dion.potentials.reference_curve import CurveKind, coulomb_curve, load_reference_curve, load_shipped_curve, \
    write_reference_curve


class TestShippedCurves(SimpleTestCase):
    def test_h2_minimum(self):
        curve = load_shipped_curve(CurveKind.H2_GROUND)
        r_min, u_min = curve.minimum()
        self.assertAlmostEqual(r_min, 1.40, places=2)
        self.assertAlmostEqual(u_min, -1.1745, places=3)

    def test_h2plus_minimum(self):
        curve = load_shipped_curve(CurveKind.H2PLUS_GROUND)
        r_min, u_min = curve.minimum()
        self.assertAlmostEqual(r_min, 2.0, places=2)
        self.assertAlmostEqual(u_min, -0.6026, places=3)

    def test_range_covers_calibration_samples(self):
        for kind in (CurveKind.H2_GROUND, CurveKind.H2PLUS_GROUND):
            curve = load_shipped_curve(kind)
            self.assertTrue(curve.covers(0.6))
            self.assertTrue(curve.covers(10.0))
            self.assertFalse(curve.covers(12.0))

    def test_spline_passes_through_samples(self):
        curve = load_shipped_curve(CurveKind.H2_GROUND)
        np.testing.assert_allclose(curve.energy_at(curve.r), curve.u, atol=1e-12)


class TestLoadReferenceCurve(SimpleTestCase):
    def test_comma_and_whitespace_rows(self):
        with Patcher() as patcher:
            patcher.fs.create_file('curve.dat', contents='# R U\n1.0, -1.0\n2.0 -1.1\n3.0\t-1.05\n')
            curve = load_reference_curve('curve.dat', CurveKind.H2_GROUND)
        self.assertEqual(len(curve), 3)
        self.assertAlmostEqual(curve.u[1], -1.1)

    def test_duplicate_r_rejected(self):
        with Patcher() as patcher:
            patcher.fs.create_file('curve.dat', contents='1.0 -1.0\n1.0 -1.1\n2.0 -1.05\n')
            with self.assertRaises(InvalidDataFileException):
                load_reference_curve('curve.dat', CurveKind.H2_GROUND)

    def test_reversed_rows_rejected(self):
        with Patcher() as patcher:
            patcher.fs.create_file('curve.dat', contents='3.0 -1.0\n2.0 -1.1\n1.0 -1.05\n')
            with self.assertRaises(InvalidDataFileException):
                load_reference_curve('curve.dat', CurveKind.H2_GROUND)

    def test_wrong_column_count_rejected(self):
        with Patcher() as patcher:
            patcher.fs.create_file('curve.dat', contents='1.0 -1.0 5\n2.0 -1.1 5\n')
            with self.assertRaises(InvalidDataFileException):
                load_reference_curve('curve.dat', CurveKind.H2_GROUND)

    def test_missing_file_rejected(self):
        with Patcher():
            with self.assertRaises(InvalidDataFileException):
                load_reference_curve('missing.dat', CurveKind.H2_GROUND)

    def test_written_curve_reads_back(self):
        curve = coulomb_curve([1.0, 2.0, 4.0])
        with Patcher():
            write_reference_curve('coulomb.dat', curve)
            restored = load_reference_curve('coulomb.dat', CurveKind.COULOMB)
        np.testing.assert_allclose(restored.u, [1.0, 0.5, 0.25])
