from dataclasses import dataclass, field
from typing import Any, Dict, List

import numpy as np
import pandas as pd

from h2dion.exceptions.simulation import ArtifactIOException
from h2dion.stationary.nuclear_density import NuclearDensity
from h2dion.utils.text_io import read_table, write_table

TRACE_COLUMNS: List[str] = ['t', 'norm', 'P0', 'P1', 'P2', 'absorbed_G1', 'absorbed_G2', 'absorbed_G0']


@dataclass
class ObservablesTrace:
    """
    Observables recorded every analysis interval, plus the Gamma2 nuclear density P2(R, t) snapshots.
    """
    r: np.ndarray
    run_id: str = ''
    rows: List[Dict[str, float]] = field(default_factory=list)
    snapshot_times: List[float] = field(default_factory=list)
    snapshots: List[np.ndarray] = field(default_factory=list)
    metadata: Dict[str, Any] = field(default_factory=dict)

    def record(self, t: float, norm: float, p0: float, p1: float, p2: float,
               absorbed_g1: float, absorbed_g2: float, absorbed_g0: float, p2_of_r: np.ndarray = None):
        self.rows.append({'t': t, 'norm': norm, 'P0': p0, 'P1': p1, 'P2': p2,
                          'absorbed_G1': absorbed_g1, 'absorbed_G2': absorbed_g2, 'absorbed_G0': absorbed_g0})
        if p2_of_r is not None:
            self.snapshot_times.append(t)
            self.snapshots.append(np.asarray(p2_of_r, dtype=float).copy())

    def as_frame(self) -> pd.DataFrame:
        return pd.DataFrame(self.rows, columns=TRACE_COLUMNS)

    def final_gamma2_density(self) -> NuclearDensity:
        if not self.snapshots:
            return NuclearDensity(r=self.r.copy(), p=np.zeros(len(self.r)), metadata={'run_id': self.run_id})
        return NuclearDensity(r=self.r.copy(), p=self.snapshots[-1].copy(),
                              metadata={'run_id': self.run_id, 't': self.snapshot_times[-1]})

    def ionized_and_absorbed(self) -> np.ndarray:
        frame: pd.DataFrame = self.as_frame()
        return (frame['P1'] + frame['P2'] + frame['absorbed_G1'] + frame['absorbed_G2']
                + frame['absorbed_G0']).to_numpy()


def write_trace(path: str, trace: ObservablesTrace) -> str:
    frame: pd.DataFrame = trace.as_frame()
    return write_table(path, {name: frame[name].to_numpy() for name in TRACE_COLUMNS},
                       metadata={**trace.metadata, 'run_id': trace.run_id})


def write_snapshots(path: str, trace: ObservablesTrace) -> str:
    try:
        with open(path, 'wb') as f:
            np.savez(f, r=trace.r, t=np.asarray(trace.snapshot_times),
                     p2=np.asarray(trace.snapshots).reshape(len(trace.snapshots), len(trace.r)),
                     run_id=np.asarray(trace.run_id))
    except OSError as e:
        raise ArtifactIOException(f'Cannot write P2 snapshots {path}: {e}')
    return path


def read_trace(trace_path: str, snapshots_path: str = None) -> ObservablesTrace:
    frame, metadata = read_table(trace_path, names=TRACE_COLUMNS)
    run_id: str = metadata.pop('run_id', '')
    trace: ObservablesTrace = ObservablesTrace(r=np.zeros(0), run_id=run_id, rows=frame.to_dict('records'),
                                               metadata=metadata)
    if snapshots_path is not None:
        try:
            with np.load(snapshots_path) as data:
                trace.r = data['r']
                trace.snapshot_times = list(data['t'])
                trace.snapshots = list(data['p2'])
                if str(data['run_id']) != run_id:
                    raise ArtifactIOException(f'Snapshots {snapshots_path} belong to run {data["run_id"]}, '
                                              f'trace {trace_path} to run {run_id}')
        except (OSError, KeyError, ValueError) as e:
            raise ArtifactIOException(f'Cannot read P2 snapshots {snapshots_path}: {e}')
    return trace
