from dataclasses import dataclass
from typing import Optional

import numpy as np

from h2dion.exceptions.simulation import ConfigurationException
from h2dion.numerics.grid import GridSpec
from h2dion.numerics.wavepacket import Representation, WavePacket, normalize, symmetrize
from h2dion.potentials.hamiltonian import ModelHamiltonian
from h2dion.potentials.softcore_table import SoftCoreTable
from h2dion.stationary.imaginary_time import ImaginaryTimeRelaxer, RelaxationResult, energy_variance, \
    exchange_symmetric, expected_energy
from h2dion.utils.h2dion_logger import H2DionLogger

logger: H2DionLogger = H2DionLogger(__name__, '[Ground state]')


@dataclass(frozen=True)
class RelaxationConfig:
    time_step: float = 0.05
    energy_threshold: float = 1e-10
    max_iterations: int = 100000
    symmetrize_every: int = 1
    energy_interval: int = 10
    # initial guess: Gaussian in R times symmetric Gaussians in z1, z2
    guess_r_center: float = 1.4
    guess_r_width: float = 0.25
    guess_z_width: float = 1.0

    def __post_init__(self):
        if self.time_step <= 0.0:
            raise ConfigurationException(f'Imaginary time step must be positive, got {self.time_step}')
        if self.energy_threshold <= 0.0:
            raise ConfigurationException(f'Energy threshold must be positive, got {self.energy_threshold}')
        if self.max_iterations < 1 or self.symmetrize_every < 1 or self.energy_interval < 1:
            raise ConfigurationException('Iteration counts and cadences must be at least 1')


def initial_guess(grid: GridSpec, config: RelaxationConfig = RelaxationConfig()) -> WavePacket:
    wp: WavePacket = WavePacket.zeros(grid)
    r, z1, z2 = wp.axes.r, wp.axes.z1, wp.axes.z2
    nuclear: np.ndarray = np.exp(-0.5 * ((r - config.guess_r_center) / config.guess_r_width) ** 2)
    electron_1: np.ndarray = np.exp(-0.5 * (z1 / config.guess_z_width) ** 2)
    electron_2: np.ndarray = np.exp(-0.5 * (z2 / config.guess_z_width) ** 2)
    wp.amplitudes = (nuclear[:, None, None] * electron_1[None, :, None] * electron_2[None, None, :]).astype(np.complex128)
    return normalize(wp)


def _relaxer(hamiltonian: ModelHamiltonian, config: RelaxationConfig) -> ImaginaryTimeRelaxer:
    return ImaginaryTimeRelaxer(kinetic=hamiltonian.kinetic,
                                potential=hamiltonian.static_potential,
                                time_step=config.time_step,
                                energy_threshold=config.energy_threshold,
                                max_iterations=config.max_iterations,
                                energy_interval=config.energy_interval,
                                symmetrize=exchange_symmetric,
                                symmetrize_every=config.symmetrize_every)


def relax_ground_state(grid: GridSpec,
                       table: SoftCoreTable,
                       config: Optional[RelaxationConfig] = None,
                       initial: Optional[WavePacket] = None,
                       hamiltonian: Optional[ModelHamiltonian] = None) -> WavePacket:
    """
    Non-Born-Oppenheimer ground state by imaginary-time relaxation of the full (R, z1, z2) Hamiltonian.
    The result is normalized to 1 and exchange symmetric.
    """
    config = config or RelaxationConfig()
    hamiltonian = hamiltonian or ModelHamiltonian(grid, table)
    start: WavePacket = initial if initial is not None else initial_guess(grid, config)
    start.require(Representation.COORDINATE)

    logger.info(f'Relaxing ground state on grid {grid.shape} with dtau={config.time_step}')
    result: RelaxationResult = _relaxer(hamiltonian, config).relax(start.amplitudes, label='H2')
    logger.info(f'Ground state energy {result.energy:.8f} Eh after {result.iterations} iterations')

    relaxed: WavePacket = WavePacket(result.amplitudes, grid, Representation.COORDINATE, hamiltonian.axes)
    return symmetrize(relaxed)


def energy_expectation(wp: WavePacket, hamiltonian: ModelHamiltonian) -> float:
    wp.require(Representation.COORDINATE)
    return expected_energy(wp.amplitudes, hamiltonian.kinetic, hamiltonian.static_potential)


def hamiltonian_variance(wp: WavePacket, hamiltonian: ModelHamiltonian) -> float:
    """
    <H^2> - <H>^2 in hartree^2; zero for an exact eigenstate of the discretized Hamiltonian.
    """
    wp.require(Representation.COORDINATE)
    return energy_variance(wp.amplitudes, hamiltonian.kinetic, hamiltonian.static_potential)
