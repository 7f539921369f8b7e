"""
Scan drivers over pulse duration, carrier-envelope phase and peak intensity.

Every scan point is an independent run_simulation in its own run directory under the scan
directory; all points share one relaxed ground state, written once before the points start.
"""
import math
import os
from collections import namedtuple
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from django.conf import settings

from h2dion.analysis.spectrum import instantaneous_explosion_spectrum, peak_energy
from h2dion.exceptions.simulation import ConfigurationException, H2DionException
from h2dion.numerics.checkpoint import write_checkpoint
from h2dion.numerics.wavepacket import WavePacket
from h2dion.orchestration.config import SCAN_AXES, RunConfig
from h2dion.orchestration.runner import GROUND_STATE_FILE, RunArtifacts, load_or_build_table, \
    prepare_ground_state, run_directory, run_simulation
from h2dion.potentials.softcore_table import SoftCoreTable
from h2dion.utils.h2dion_logger import H2DionLogger
from h2dion.utils.text_io import write_table

logger: H2DionLogger = H2DionLogger(__name__, '[Scan]')

PEAK_TABLE_FILE: str = 'peaks.dat'
SHIFT_TABLE_FILE: str = 'cep_shifts.dat'
STATUS_OK: str = 'ok'
INSTANTANEOUS_LABEL: str = 'instantaneous'

DEFAULT_DURATIONS_FS: Tuple[float, ...] = (1.0, 2.0, 4.0, 10.0)
DEFAULT_CEPS: Tuple[float, ...] = (0.0, math.pi / 2.0)
DEFAULT_CEP_DURATIONS_FS: Tuple[float, ...] = (1.0, 2.0, 4.0)
DEFAULT_INTENSITIES: Tuple[float, ...] = (1e14, 2e14, 4e14, 8e14)

# measured peak positions (eV) of the intensity scan, for comparison overlays
EXPERIMENTAL_INTENSITY_PEAKS_EV: Dict[float, float] = {1e14: 4.2, 2e14: 4.9, 4e14: 5.0, 8e14: 5.5}

ScanPoint = namedtuple('ScanPoint', ['value', 'run_id', 'peak_ev', 'p2_total', 'status'])
ScanResult = namedtuple('ScanResult', ['directory', 'points', 'table', 'reference_peak_ev'])


@dataclass(frozen=True)
class ScanSpec:
    axis: str
    values: Tuple[float, ...]
    base: RunConfig

    def __post_init__(self):
        if self.axis not in SCAN_AXES:
            raise ConfigurationException(f'Unknown scan axis "{self.axis}", expected one of {", ".join(SCAN_AXES)}')
        if len(self.values) < 1:
            raise ConfigurationException('A scan needs at least one value')
        for value in self.values:
            if not math.isfinite(value):
                raise ConfigurationException(f'Scan value {value} is not finite')
            if self.axis == 'duration' and value <= 0.0:
                raise ConfigurationException(f'Pulse duration must be positive, got {value} fs')
            if self.axis == 'intensity' and value < 0.0:
                raise ConfigurationException(f'Peak intensity must be non-negative, got {value} W/cm2')
        if len(set(self.values)) != len(self.values):
            raise ConfigurationException(f'Scan values repeat: {self.values}')

    @property
    def directory(self) -> str:
        return run_directory(self.base)

    def label(self, value: float) -> str:
        if self.axis == 'duration':
            return f'{value:g}fs'
        if self.axis == 'cep':
            return f'{value:.4f}rad'
        return f'{value:.3e}Wcm2'

    def point_config(self, value: float) -> RunConfig:
        """
        The run of one scan value; its run id and directory depend only on the value.
        """
        changes: Dict[str, float] = {'duration': {'duration_fs': value},
                                     'cep': {'cep': value},
                                     'intensity': {'intensity': value}}[self.axis]
        config: RunConfig = self.base.with_pulse(**changes)
        return replace(config, run_id=f'{self.axis}_{self.label(value)}', output_dir=self.directory)


def _run_point(config: RunConfig, value: float) -> ScanPoint:
    try:
        artifacts: RunArtifacts = run_simulation(config)
    except H2DionException as e:
        logger.error(f'Scan point {config.run_id} failed: {e.message}')
        return ScanPoint(value=value, run_id=config.run_id, peak_ev=math.nan, p2_total=math.nan,
                         status=f'failed:{type(e).__name__}')

    peak: float = artifacts.peak_ev if artifacts.peak_ev is not None else math.nan
    return ScanPoint(value=value, run_id=config.run_id, peak_ev=peak, p2_total=artifacts.double_ionization,
                     status=STATUS_OK)


def share_ground_state(base: RunConfig, directory: str) -> Tuple[RunConfig, WavePacket]:
    table: SoftCoreTable = load_or_build_table(base)
    ground: WavePacket = prepare_ground_state(base, table)
    if base.ground_state:
        return base, ground

    os.makedirs(directory, exist_ok=True)
    path: str = write_checkpoint(os.path.join(directory, GROUND_STATE_FILE), ground)
    return replace(base, ground_state=path), ground


def peak_table(points: Sequence[ScanPoint]) -> pd.DataFrame:
    return pd.DataFrame({'value': [p.value for p in points],
                         'peak_eV': [p.peak_ev for p in points],
                         'P2_total': [p.p2_total for p in points],
                         'status': [p.status for p in points]})


def write_peak_table(path: str, table: pd.DataFrame, metadata: Optional[Dict[str, str]] = None) -> str:
    return write_table(path, {name: table[name].to_numpy() for name in table.columns}, metadata=metadata)


def run_scan(scan: ScanSpec, workers: Optional[int] = None) -> ScanResult:
    """
    Runs every scan value as an independent process. Failed points are logged and recorded
    with their status; the remaining points continue.
    """
    workers = workers or settings.SCAN_WORKERS
    base, ground = share_ground_state(scan.base, scan.directory)
    shared: ScanSpec = replace(scan, base=base)
    reference: Optional[float] = peak_energy(instantaneous_explosion_spectrum(ground))

    configs: List[RunConfig] = [shared.point_config(value) for value in scan.values]
    logger.info(f'Scanning {scan.axis} over {len(configs)} values with {workers} worker(s)')

    if workers > 1 and len(configs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as executor:
            points: List[ScanPoint] = list(executor.map(_run_point, configs, scan.values))
    else:
        points = [_run_point(config, value) for config, value in zip(configs, scan.values)]

    table: pd.DataFrame = peak_table(points)
    write_peak_table(os.path.join(scan.directory, PEAK_TABLE_FILE), table,
                     metadata={'axis': scan.axis, 'instantaneous_peak_eV': reference})

    failed: int = sum(1 for point in points if point.status != STATUS_OK)
    if failed:
        logger.warning(f'{failed} of {len(points)} scan points failed')
    return ScanResult(directory=scan.directory, points=points, table=table, reference_peak_ev=reference)


def pulse_duration_scan(base: RunConfig,
                        durations: Sequence[float] = DEFAULT_DURATIONS_FS,
                        intensity: Optional[float] = 8e14,
                        workers: Optional[int] = None) -> ScanResult:
    """
    Duration scan; the peak table also gets the instantaneous explosion reference as a 0 fs row.
    """
    if intensity is not None:
        base = base.with_pulse(intensity=intensity)
    result: ScanResult = run_scan(ScanSpec(axis='duration', values=tuple(durations), base=base), workers)

    reference_row: pd.DataFrame = pd.DataFrame({'value': [0.0], 'peak_eV': [result.reference_peak_ev],
                                                'P2_total': [math.nan], 'status': [INSTANTANEOUS_LABEL]})
    table: pd.DataFrame = pd.concat([reference_row, result.table], ignore_index=True)
    write_peak_table(os.path.join(result.directory, PEAK_TABLE_FILE), table,
                     metadata={'axis': 'duration', 'intensity_W_cm2': f'{base.pulse.intensity:.4e}'})
    return result._replace(table=table)


def cep_scan(base: RunConfig,
             ceps: Sequence[float] = DEFAULT_CEPS,
             durations: Sequence[float] = DEFAULT_CEP_DURATIONS_FS,
             workers: Optional[int] = None) -> pd.DataFrame:
    """
    Phase scan repeated for every duration. Returns the shift table: per duration, the peak and
    double ionization at each phase and the peak shift between the first two phases.
    """
    if len(ceps) < 2:
        raise ConfigurationException('A CEP shift table needs at least two phases')

    rows: List[Dict[str, float]] = []
    directory: str = run_directory(base)
    base, _ = share_ground_state(base, directory)
    for duration in durations:
        label: str = f'{duration:g}fs'
        duration_base: RunConfig = replace(base.with_pulse(duration_fs=duration),
                                           run_id=f'cep_{label}', output_dir=directory)
        result: ScanResult = run_scan(ScanSpec(axis='cep', values=tuple(ceps), base=duration_base), workers)

        peaks: np.ndarray = result.table['peak_eV'].to_numpy()
        row: Dict[str, float] = {'duration_fs': duration}
        for index, phase in enumerate(ceps):
            row[f'peak_eV_{index}'] = peaks[index]
            row[f'P2_total_{index}'] = result.table['P2_total'].iloc[index]
        row['shift_eV'] = abs(peaks[0] - peaks[1])
        rows.append(row)

    table: pd.DataFrame = pd.DataFrame(rows)
    os.makedirs(directory, exist_ok=True)
    write_peak_table(os.path.join(directory, SHIFT_TABLE_FILE), table,
                     metadata={f'cep_{index}': f'{phase:.6f}' for index, phase in enumerate(ceps)})
    return table


def intensity_scan(base: RunConfig,
                   intensities: Sequence[float] = DEFAULT_INTENSITIES,
                   duration: Optional[float] = 10.0,
                   workers: Optional[int] = None) -> ScanResult:
    if duration is not None:
        base = base.with_pulse(duration_fs=duration)
    result: ScanResult = run_scan(ScanSpec(axis='intensity', values=tuple(intensities), base=base), workers)

    table: pd.DataFrame = result.table.copy()
    table['experimental_peak_eV'] = [EXPERIMENTAL_INTENSITY_PEAKS_EV.get(value, math.nan) for value in table['value']]
    write_peak_table(os.path.join(result.directory, PEAK_TABLE_FILE), table,
                     metadata={'axis': 'intensity', 'duration_fs': base.pulse.duration_fs})
    return result._replace(table=table)
