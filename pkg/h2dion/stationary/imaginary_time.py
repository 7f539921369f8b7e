from collections import namedtuple
from typing import Callable, List, Optional

import numpy as np

from h2dion.exceptions.simulation import RelaxationException
from h2dion.numerics import fft
from h2dion.utils.h2dion_logger import H2DionLogger

logger: H2DionLogger = H2DionLogger(__name__, '[Imaginary time]')

RelaxationResult = namedtuple('RelaxationResult', ['amplitudes', 'energy', 'iterations', 'energies'])

# allowed rise of the energy between two checks before it counts as non-monotone
MONOTONICITY_TOLERANCE: float = 1e-12


def exchange_symmetric(amplitudes: np.ndarray) -> np.ndarray:
    """
    Average with the swap of the last two (electron) axes.
    """
    return 0.5 * (amplitudes + np.swapaxes(amplitudes, -1, -2))


def expected_energy(amplitudes: np.ndarray, kinetic: np.ndarray, potential: np.ndarray) -> float:
    """
    <T> + <V> of an arbitrary (not necessarily normalized) state.
    """
    weight: float = float(np.sum(np.abs(amplitudes) ** 2))
    if weight <= 0.0:
        raise RelaxationException('Energy of a zero state is undefined')
    kinetic_part: float = float(np.sum(kinetic * np.abs(fft.forward(amplitudes)) ** 2))
    potential_part: float = float(np.sum(potential * np.abs(amplitudes) ** 2))
    return (kinetic_part + potential_part) / weight


def energy_variance(amplitudes: np.ndarray, kinetic: np.ndarray, potential: np.ndarray) -> float:
    weight: float = float(np.sum(np.abs(amplitudes) ** 2))
    h_psi: np.ndarray = fft.inverse(kinetic * fft.forward(amplitudes)) + potential * amplitudes
    mean: float = float(np.real(np.vdot(amplitudes, h_psi))) / weight
    return float(np.sum(np.abs(h_psi) ** 2)) / weight - mean ** 2


class ImaginaryTimeRelaxer:
    """
    Ground state of H = T(k) + V(x) by split-operator propagation in imaginary time,
    exp(-V dtau / 2) exp(-T dtau) exp(-V dtau / 2), renormalizing after every step.

    `kinetic` and `potential` only need to broadcast to the amplitude shape. The energy
    expectation is evaluated every `energy_interval` steps and the relaxation stops when two
    consecutive evaluations differ by less than `energy_threshold`.
    """

    def __init__(self,
                 kinetic: np.ndarray,
                 potential: np.ndarray,
                 time_step: float,
                 energy_threshold: float,
                 max_iterations: int,
                 energy_interval: int = 10,
                 symmetrize: Optional[Callable[[np.ndarray], np.ndarray]] = None,
                 symmetrize_every: int = 1):
        if time_step <= 0.0:
            raise RelaxationException(f'Imaginary time step must be positive, got {time_step}')
        if energy_threshold <= 0.0:
            raise RelaxationException(f'Energy threshold must be positive, got {energy_threshold}')

        self.__kinetic: np.ndarray = kinetic
        self.__potential: np.ndarray = potential
        self.__energy_threshold: float = energy_threshold
        self.__max_iterations: int = int(max_iterations)
        self.__energy_interval: int = max(1, int(energy_interval))
        self.__symmetrize = symmetrize
        self.__symmetrize_every: int = max(1, int(symmetrize_every))

        self.__half_potential_factor: np.ndarray = np.exp(-0.5 * time_step * potential)
        self.__kinetic_factor: np.ndarray = np.exp(-time_step * kinetic)

    def energy(self, amplitudes: np.ndarray) -> float:
        return expected_energy(amplitudes, self.__kinetic, self.__potential)

    def __step(self, amplitudes: np.ndarray) -> np.ndarray:
        amplitudes = amplitudes * self.__half_potential_factor
        amplitudes = fft.forward(amplitudes)
        amplitudes *= self.__kinetic_factor
        amplitudes = fft.inverse(amplitudes)
        amplitudes *= self.__half_potential_factor
        return amplitudes

    @staticmethod
    def __renormalized(amplitudes: np.ndarray, iteration: int) -> np.ndarray:
        weight: float = float(np.sum(np.abs(amplitudes) ** 2))
        if not np.isfinite(weight) or weight <= np.finfo(float).tiny:
            raise RelaxationException(f'State collapsed to zero at iteration {iteration}: '
                                      f'the initial guess has no ground-state overlap')
        return amplitudes / np.sqrt(weight)

    def relax(self, initial: np.ndarray, label: str = '') -> RelaxationResult:
        amplitudes: np.ndarray = self.__renormalized(np.asarray(initial, dtype=np.complex128), 0)
        energies: List[float] = [self.energy(amplitudes)]
        rises: int = 0

        for iteration in range(1, self.__max_iterations + 1):
            amplitudes = self.__step(amplitudes)
            if self.__symmetrize is not None and iteration % self.__symmetrize_every == 0:
                amplitudes = self.__symmetrize(amplitudes)
            amplitudes = self.__renormalized(amplitudes, iteration)

            if iteration % self.__energy_interval != 0:
                continue

            energy: float = self.energy(amplitudes)
            if not np.isfinite(energy):
                raise RelaxationException(f'Energy became {energy} at iteration {iteration}')
            if energy - energies[-1] > MONOTONICITY_TOLERANCE:
                rises += 1
            energies.append(energy)

            if abs(energies[-1] - energies[-2]) < self.__energy_threshold:
                if rises:
                    logger.warning(f'{label} energy rose {rises} time(s) during the relaxation')
                logger.debug(f'{label} converged to {energy:.12f} Eh after {iteration} iterations')
                return RelaxationResult(amplitudes=amplitudes, energy=energy,
                                        iterations=iteration, energies=np.array(energies))

        raise RelaxationException(f'{label} relaxation did not converge within {self.__max_iterations} '
                                  f'iterations (last change {abs(energies[-1] - energies[-2]):.3e} Eh)'
                                  if len(energies) > 1 else
                                  f'{label} relaxation did not converge within {self.__max_iterations} iterations')
