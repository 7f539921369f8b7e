import numpy as np
from django.test import SimpleTestCase
from pyfakefs.fake_filesystem_unittest import Patcher

from h2dion.exceptions.simulation import ArtifactIOException
from h2dion.propagation.trace import TRACE_COLUMNS, ObservablesTrace, read_trace, write_snapshots, write_trace

R: np.ndarray = np.linspace(0.6, 3.0, 5)


def sample_trace(run_id: str = 'trace-test') -> ObservablesTrace:
    trace: ObservablesTrace = ObservablesTrace(r=R.copy(), run_id=run_id)
    trace.record(0.0, 1.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, np.zeros(5))
    trace.record(10.0, 0.98, 0.9, 0.07, 0.01, 0.015, 0.004, 0.001, np.array([0.0, 0.001, 0.004, 0.003, 0.002]))
    return trace


class TestObservablesTrace(SimpleTestCase):
    def test_frame(self):
        frame = sample_trace().as_frame()
        self.assertEqual(list(frame.columns), TRACE_COLUMNS)
        self.assertEqual(len(frame), 2)
        self.assertEqual(frame['P2'].iloc[1], 0.01)

    def test_ionized_and_absorbed(self):
        np.testing.assert_allclose(sample_trace().ionized_and_absorbed(), [0.0, 0.1], atol=1e-15)

    def test_final_gamma2_density(self):
        density = sample_trace().final_gamma2_density()
        self.assertEqual(density.metadata['t'], 10.0)
        self.assertEqual(density.p[2], 0.004)

    def test_final_density_without_snapshots_is_zero(self):
        density = ObservablesTrace(r=R.copy()).final_gamma2_density()
        np.testing.assert_array_equal(density.p, np.zeros(5))

    def test_written_trace_reads_back(self):
        trace: ObservablesTrace = sample_trace()
        with Patcher():
            write_trace('trace.dat', trace)
            write_snapshots('p2.npz', trace)
            restored: ObservablesTrace = read_trace('trace.dat', 'p2.npz')

        self.assertEqual(restored.run_id, 'trace-test')
        np.testing.assert_allclose(restored.as_frame().to_numpy(), trace.as_frame().to_numpy(), rtol=1e-11)
        np.testing.assert_array_equal(restored.r, R)
        self.assertEqual(restored.snapshot_times, [0.0, 10.0])
        np.testing.assert_array_equal(restored.snapshots[1], trace.snapshots[1])

    def test_snapshots_of_another_run_rejected(self):
        with Patcher():
            write_trace('trace.dat', sample_trace('first'))
            write_snapshots('p2.npz', sample_trace('second'))
            with self.assertRaises(ArtifactIOException):
                read_trace('trace.dat', 'p2.npz')

    def test_missing_snapshots_rejected(self):
        with Patcher():
            write_trace('trace.dat', sample_trace())
            with self.assertRaises(ArtifactIOException):
                read_trace('trace.dat', 'missing.npz')
