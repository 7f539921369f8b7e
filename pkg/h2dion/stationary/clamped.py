"""
Clamped-R electronic ground energies used as calibration oracles.

One electron: finite-difference diagonalization (with a Richardson check between two
resolutions) and, independently, imaginary-time relaxation on a spectral grid.
Two electrons: imaginary-time relaxation on a spectral 2D grid with exchange symmetrization.
"""
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from scipy.linalg import eigh_tridiagonal

from h2dion.exceptions.simulation import GridException
from h2dion.numerics.grid import MomentumGrid, coordinate_axis
from h2dion.potentials.soft_core import v_ee, v_en
from h2dion.stationary.imaginary_time import ImaginaryTimeRelaxer, RelaxationResult, exchange_symmetric
from h2dion.utils.h2dion_logger import H2DionLogger

logger: H2DionLogger = H2DionLogger(__name__, '[Clamped nuclei]')


@dataclass(frozen=True)
class FiniteDifferenceConfig:
    """
    Box [-z_max, z_max] with Dirichlet walls. The spacing is refined to beta / points_per_beta
    when the softening is small. Two resolutions (h and h/2) are diagonalized; their difference
    above `richardson_tolerance` flags a grid too coarse.
    """
    z_max: float = 40.0
    spacing: float = 0.02
    points_per_beta: float = 10.0
    richardson_tolerance: float = 1e-3

    def __post_init__(self):
        if self.z_max <= 0.0 or self.spacing <= 0.0 or self.points_per_beta <= 0.0:
            raise GridException('Finite-difference box, spacing and points per beta must be positive')

    def spacing_for(self, beta: float) -> float:
        return min(self.spacing, beta / self.points_per_beta)


@dataclass(frozen=True)
class SpectralGridConfig:
    """
    Periodic grid of n points over [-z_max, z_max) per electron, relaxed in imaginary time.
    """
    n: int = 256
    z_max: float = 20.0
    time_step: float = 0.05
    energy_threshold: float = 1e-10
    max_iterations: int = 50000
    energy_interval: int = 10

    @classmethod
    def one_electron(cls) -> 'SpectralGridConfig':
        return cls(n=1024, z_max=40.0, time_step=0.01, energy_threshold=1e-12, max_iterations=200000)

    @classmethod
    def two_electron(cls) -> 'SpectralGridConfig':
        return cls()

    @property
    def spacing(self) -> float:
        return 2.0 * self.z_max / self.n

    @property
    def z(self) -> np.ndarray:
        return coordinate_axis(self.n, -self.z_max, self.spacing)

    @property
    def k(self) -> np.ndarray:
        return MomentumGrid.for_axis(self.n, self.spacing).k


def _lowest_tridiagonal_eigenvalue(r: float, beta: float, z_max: float, spacing: float) -> float:
    interior: np.ndarray = np.arange(-z_max + spacing, z_max - 0.5 * spacing, spacing)
    diagonal: np.ndarray = 1.0 / spacing ** 2 + v_en(r, interior, beta)
    off_diagonal: np.ndarray = np.full(len(interior) - 1, -0.5 / spacing ** 2)
    eigenvalues = eigh_tridiagonal(diagonal, off_diagonal, eigvals_only=True, select='i', select_range=(0, 0))
    return float(eigenvalues[0])


def one_electron_ground_energy(r: float, beta: float, config: Optional[FiniteDifferenceConfig] = None) -> float:
    """
    Ground eigenvalue of -1/2 d^2/dz^2 + v_en(R, z, beta).

    The second-order finite-difference error scales as h^2, so the two resolutions are
    combined as (4 E(h/2) - E(h)) / 3.
    """
    if beta <= 0.0:
        raise GridException(f'beta must be positive, got {beta}')
    config = config or FiniteDifferenceConfig()
    spacing: float = config.spacing_for(beta)

    coarse: float = _lowest_tridiagonal_eigenvalue(r, beta, config.z_max, spacing)
    fine: float = _lowest_tridiagonal_eigenvalue(r, beta, config.z_max, spacing / 2.0)

    if abs(coarse - fine) > config.richardson_tolerance:
        raise GridException(f'Finite-difference grid too coarse at R={r}, beta={beta}: '
                            f'E(h)={coarse:.8f}, E(h/2)={fine:.8f}')

    return (4.0 * fine - coarse) / 3.0


def one_electron_relaxer(r: float, beta: float, config: SpectralGridConfig) -> ImaginaryTimeRelaxer:
    return ImaginaryTimeRelaxer(kinetic=0.5 * config.k ** 2,
                                potential=v_en(r, config.z, beta),
                                time_step=config.time_step,
                                energy_threshold=config.energy_threshold,
                                max_iterations=config.max_iterations,
                                energy_interval=config.energy_interval)


def one_electron_relaxed_energy(r: float, beta: float, config: Optional[SpectralGridConfig] = None) -> float:
    if beta <= 0.0:
        raise GridException(f'beta must be positive, got {beta}')
    config = config or SpectralGridConfig.one_electron()
    initial: np.ndarray = np.exp(-0.5 * config.z ** 2).astype(np.complex128)
    result: RelaxationResult = one_electron_relaxer(r, beta, config).relax(initial, label=f'1e R={r}')
    return result.energy


def two_electron_relaxer(r: float, alpha: float, beta: float, config: SpectralGridConfig) -> ImaginaryTimeRelaxer:
    z: np.ndarray = config.z
    k_squared: np.ndarray = config.k ** 2
    one_body: np.ndarray = v_en(r, z, beta)
    potential: np.ndarray = one_body[:, None] + one_body[None, :] + v_ee(z[:, None], z[None, :], alpha)

    return ImaginaryTimeRelaxer(kinetic=0.5 * (k_squared[:, None] + k_squared[None, :]),
                                potential=potential,
                                time_step=config.time_step,
                                energy_threshold=config.energy_threshold,
                                max_iterations=config.max_iterations,
                                energy_interval=config.energy_interval,
                                symmetrize=exchange_symmetric)


def relax_two_electron(r: float,
                       alpha: float,
                       beta: float,
                       config: Optional[SpectralGridConfig] = None,
                       initial: Optional[np.ndarray] = None) -> Tuple[float, np.ndarray]:
    """
    Singlet ground state of the clamped-R two-electron Hamiltonian.
    Returns the energy and the normalized state, which can warm-start a neighbouring evaluation.
    """
    if alpha <= 0.0 or beta <= 0.0:
        raise GridException(f'alpha and beta must be positive, got alpha={alpha}, beta={beta}')
    config = config or SpectralGridConfig.two_electron()

    if initial is None:
        z: np.ndarray = config.z
        initial = np.exp(-0.5 * (z[:, None] ** 2 + z[None, :] ** 2)).astype(np.complex128)

    result: RelaxationResult = two_electron_relaxer(r, alpha, beta, config).relax(initial, label=f'2e R={r}')
    return result.energy, result.amplitudes


def two_electron_ground_energy(r: float, alpha: float, beta: float,
                               config: Optional[SpectralGridConfig] = None) -> float:
    energy, _ = relax_two_electron(r, alpha, beta, config)
    return energy
