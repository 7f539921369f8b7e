import hashlib
import json
import os
import shutil
from collections import namedtuple
from typing import Any, Dict, List, Optional

from django.conf import settings
from django.utils import timezone

from h2dion import __version__
from h2dion.analysis.spectrum import KerSpectrum, accumulate_spectrum, double_ionization_probability, \
    instantaneous_explosion_spectrum, peak_energy, single_ionization_probability, write_spectrum
from h2dion.exceptions.simulation import ArtifactIOException, ConfigurationException, H2DionException, \
    ProvenanceException
from h2dion.numerics.checkpoint import HEADER, read_checkpoint, write_checkpoint
from h2dion.numerics.wavepacket import WavePacket, norm
from h2dion.orchestration.config import RunConfig, dump_run_config
from h2dion.potentials.calibration import build_softcore_table
from h2dion.potentials.hamiltonian import ModelHamiltonian
from h2dion.potentials.reference_curve import CurveKind, load_shipped_curve
from h2dion.potentials.softcore_table import SoftCoreTable, read_softcore_table, write_softcore_table
from h2dion.propagation.ledger import write_ledger
from h2dion.propagation.propagator import PropagationResult, propagate
from h2dion.propagation.trace import write_snapshots, write_trace
from h2dion.stationary.ground_state import energy_expectation, relax_ground_state
from h2dion.stationary.nuclear_density import nuclear_density, write_nuclear_density
from h2dion.utils.h2dion_logger import H2DionLogger

logger: H2DionLogger = H2DionLogger(__name__, '[Run]')

MANIFEST_NAME: str = 'manifest.json'
CHECKPOINT_DIR: str = 'checkpoints'

GROUND_STATE_FILE: str = 'ground.wp'
GROUND_DENSITY_FILE: str = 'ground_density.dat'
INSTANTANEOUS_SPECTRUM_FILE: str = 'spectrum_instantaneous.dat'
TRACE_FILE: str = 'trace.dat'
SNAPSHOTS_FILE: str = 'p2_snapshots.npz'
LEDGER_FILE: str = 'ledger.dat'
SPECTRUM_FILE: str = 'spectrum.dat'
FINAL_STATE_FILE: str = 'final.wp'
CONFIG_FILE: str = 'config.ini'

# headroom over the estimated artifact size
DISK_MARGIN: float = 1.2

RunArtifacts = namedtuple('RunArtifacts', ['directory', 'manifest', 'spectrum', 'peak_ev',
                                           'single_ionization', 'double_ionization'])


def run_directory(config: RunConfig) -> str:
    return os.path.join(config.output_dir or settings.RUNS_DIR, config.run_id)


def sha256_of(path: str) -> str:
    digest = hashlib.sha256()
    try:
        with open(path, 'rb') as f:
            for chunk in iter(lambda: f.read(1 << 20), b''):
                digest.update(chunk)
    except OSError as e:
        raise ArtifactIOException(f'Cannot hash {path}: {e}')
    return digest.hexdigest()


def estimate_run_bytes(config: RunConfig) -> int:
    """
    Upper estimate of what a run writes: ground and final checkpoints, periodic checkpoints
    and one R profile per analysis interval.
    """
    points: int = config.grid.n_r * config.grid.n_z1 * config.grid.n_z2
    checkpoint_bytes: int = HEADER.size + 16 * points

    steps: int = int((config.pulse.duration + config.propagator.tail_cap(config.pulse)) / config.propagator.time_step) + 1
    intervals: int = steps // config.propagator.analysis_interval + 2
    periodic: int = intervals // config.propagator.checkpoint_interval if config.propagator.checkpoint_interval else 0

    profiles: int = intervals * (config.grid.n_r + 8) * 8 * 2
    return int(DISK_MARGIN * ((2 + periodic) * checkpoint_bytes + profiles))


def preflight(config: RunConfig) -> str:
    directory: str = run_directory(config)
    if os.path.exists(os.path.join(directory, MANIFEST_NAME)) and not config.overwrite:
        raise ConfigurationException(f'Run id "{config.run_id}" is already used in {os.path.dirname(directory)}; '
                                     f'choose another run id or set run.overwrite')
    try:
        os.makedirs(directory, exist_ok=True)
        free: int = shutil.disk_usage(directory).free
    except OSError as e:
        raise ArtifactIOException(f'Cannot prepare run directory {directory}: {e}')

    needed: int = estimate_run_bytes(config)
    if free < needed:
        raise ArtifactIOException(f'Not enough disk space in {directory}: {needed / 1e9:.2f} GB needed, '
                                  f'{free / 1e9:.2f} GB free')
    logger.debug(f'Preflight for {config.run_id}: {needed / 1e6:.1f} MB needed, {free / 1e6:.1f} MB free')
    return directory


def load_or_build_table(config: RunConfig) -> SoftCoreTable:
    path: str = config.softcore_table
    if os.path.exists(path):
        return read_softcore_table(path)
    if not config.calibration.auto_build:
        raise ConfigurationException(f'Soft-core table {path} does not exist and calibration.auto_build is off; '
                                     f'run the calibrate command first')

    logger.info(f'Soft-core table {path} not found, calibrating {config.calibration.samples} R samples')
    table: SoftCoreTable = build_softcore_table(load_shipped_curve(CurveKind.H2_GROUND),
                                                load_shipped_curve(CurveKind.H2PLUS_GROUND),
                                                config.calibration.r_samples,
                                                config.calibration.solver)
    directory: str = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    write_softcore_table(path, table)
    return table


def prepare_ground_state(config: RunConfig,
                         table: SoftCoreTable,
                         hamiltonian: Optional[ModelHamiltonian] = None) -> WavePacket:
    if config.ground_state:
        ground: WavePacket = read_checkpoint(config.ground_state)
        if ground.grid != config.grid:
            raise ConfigurationException(f'Ground state {config.ground_state} is on grid {ground.grid.shape}, '
                                         f'the run uses {config.grid.shape}')
        logger.info(f'Reusing ground state {config.ground_state}')
        return ground
    return relax_ground_state(config.grid, table, config.relaxation, hamiltonian=hamiltonian)


def _write_manifest(directory: str, config: RunConfig, inputs: Dict[str, str], outputs: List[str],
                    summary: Dict[str, Any]) -> str:
    manifest: Dict[str, Any] = {
        'run_id': config.run_id,
        'version': __version__,
        'created': timezone.now().isoformat(),
        'parameters': config.describe(),
        'inputs': {name: {'path': os.path.abspath(path), 'sha256': sha256_of(path)} for name, path in inputs.items()},
        'outputs': {name: sha256_of(os.path.join(directory, name)) for name in outputs},
        'summary': summary,
    }
    path: str = os.path.join(directory, MANIFEST_NAME)
    try:
        with open(path, 'w') as f:
            json.dump(manifest, f, indent=2, sort_keys=True)
    except OSError as e:
        raise ArtifactIOException(f'Cannot write manifest {path}: {e}')
    return path


def run_simulation(config: RunConfig) -> RunArtifacts:
    """
    Ground state, propagation and spectra of one pulse, written to <output_dir>/<run_id>/
    together with a manifest of every input and output hash.
    """
    try:
        return _run(config)
    except H2DionException as e:
        logger.error(f'Run {config.run_id} failed: {e.message}')
        e.message = f'Run {config.run_id}: {e.message}'
        e.args = (e.message,)
        raise


def _run(config: RunConfig) -> RunArtifacts:
    directory: str = preflight(config)
    logger.info(f'Starting run {config.run_id} in {directory}')

    table: SoftCoreTable = load_or_build_table(config)
    hamiltonian: ModelHamiltonian = ModelHamiltonian(config.grid, table)
    ground: WavePacket = prepare_ground_state(config, table, hamiltonian)
    ground_energy: float = energy_expectation(ground, hamiltonian)

    outputs: List[str] = []

    def output(name: str) -> str:
        outputs.append(name)
        return os.path.join(directory, name)

    write_checkpoint(output(GROUND_STATE_FILE), ground)
    write_nuclear_density(output(GROUND_DENSITY_FILE), nuclear_density(ground))
    instantaneous: KerSpectrum = instantaneous_explosion_spectrum(ground)
    write_spectrum(output(INSTANTANEOUS_SPECTRUM_FILE), instantaneous)

    checkpoint_dir: Optional[str] = None
    if config.propagator.checkpoint_interval:
        checkpoint_dir = os.path.join(directory, CHECKPOINT_DIR)
        os.makedirs(checkpoint_dir, exist_ok=True)

    result: PropagationResult = propagate(ground, config.pulse, config.propagator, table, config.regions,
                                          run_id=config.run_id, checkpoint_dir=checkpoint_dir,
                                          hamiltonian=hamiltonian)

    write_trace(output(TRACE_FILE), result.trace)
    write_snapshots(output(SNAPSHOTS_FILE), result.trace)
    write_ledger(output(LEDGER_FILE), result.ledger)
    write_checkpoint(output(FINAL_STATE_FILE), result.final)

    spectrum: KerSpectrum = accumulate_spectrum(result.trace, result.ledger, config.accumulation_mode)
    write_spectrum(output(SPECTRUM_FILE), spectrum)
    dump_run_config(output(CONFIG_FILE), config)

    peak: Optional[float] = peak_energy(spectrum)
    p1: float = single_ionization_probability(result.trace, result.ledger)
    p2: float = double_ionization_probability(result.trace, result.ledger)
    summary: Dict[str, Any] = {
        'ground_energy_Eh': ground_energy,
        'instantaneous_peak_eV': peak_energy(instantaneous),
        'peak_eV': peak,
        'P1_total': p1,
        'P2_total': p2,
        'final_norm': norm(result.final),
    }

    inputs: Dict[str, str] = {'softcore_table': config.softcore_table}
    if config.ground_state:
        inputs['ground_state'] = config.ground_state
    manifest: str = _write_manifest(directory, config, inputs, outputs, summary)

    logger.info(f'Run {config.run_id} done: peak {peak} eV, P1={p1:.4e}, P2={p2:.4e}')
    return RunArtifacts(directory=directory, manifest=manifest, spectrum=spectrum, peak_ev=peak,
                        single_ionization=p1, double_ionization=p2)


def read_manifest(path: str) -> Dict[str, Any]:
    try:
        with open(path, 'r') as f:
            return json.load(f)
    except OSError as e:
        raise ArtifactIOException(f'Cannot read manifest {path}: {e}')
    except json.JSONDecodeError as e:
        raise ProvenanceException(f'Manifest {path} is not valid JSON: {e}')


def verify_manifest(path: str) -> List[str]:
    """
    Re-hash every input and output listed in a manifest.
    Returns the names whose file is missing or whose hash changed; an empty list means intact.
    """
    manifest: Dict[str, Any] = read_manifest(path)
    directory: str = os.path.dirname(os.path.abspath(path))
    problems: List[str] = []

    listed: Dict[str, str] = {name: os.path.join(directory, name) for name in manifest.get('outputs', {})}
    expected: Dict[str, str] = dict(manifest.get('outputs', {}))
    for name, entry in manifest.get('inputs', {}).items():
        listed[name] = entry['path']
        expected[name] = entry['sha256']

    for name, file_path in listed.items():
        if not os.path.exists(file_path):
            logger.warning(f'{name} listed in {path} is missing')
            problems.append(name)
        elif sha256_of(file_path) != expected[name]:
            logger.warning(f'{name} listed in {path} has changed')
            problems.append(name)
    return problems
