from enum import Enum, auto

import numpy as np

from h2dion.exceptions.simulation import GridException, RepresentationException, SymmetryException
from h2dion.numerics import fft
from h2dion.numerics.grid import GridAxes, GridSpec, build_grid

ELECTRON_AXES = (1, 2)


class Representation(Enum):
    COORDINATE = auto()
    MOMENTUM = auto()


class WavePacket:
    """
    Electronuclear amplitude Psi(R, z1, z2) on a GridSpec.

    Momentum-space amplitudes use the unitary ('ortho') transform, so the squared norm
    sum |Psi|^2 dR dz1 dz2 has the same value in both representations.
    """

    def __init__(self,
                 amplitudes: np.ndarray,
                 grid: GridSpec,
                 representation: Representation = Representation.COORDINATE,
                 axes: GridAxes = None):
        amplitudes = np.asarray(amplitudes, dtype=np.complex128)
        if amplitudes.shape != grid.shape:
            raise GridException(f'Amplitude shape {amplitudes.shape} does not match grid shape {grid.shape}')

        self.__amplitudes: np.ndarray = amplitudes
        self.__grid: GridSpec = grid
        self.__representation: Representation = representation
        self.__axes: GridAxes = axes if axes is not None else build_grid(grid)

    @classmethod
    def zeros(cls, grid: GridSpec) -> 'WavePacket':
        return cls(np.zeros(grid.shape, dtype=np.complex128), grid)

    @property
    def amplitudes(self) -> np.ndarray:
        return self.__amplitudes

    @amplitudes.setter
    def amplitudes(self, values: np.ndarray):
        if values.shape != self.__grid.shape:
            raise GridException(f'Amplitude shape {values.shape} does not match grid shape {self.__grid.shape}')
        self.__amplitudes = values

    @property
    def grid(self) -> GridSpec:
        return self.__grid

    @property
    def axes(self) -> GridAxes:
        return self.__axes

    @property
    def representation(self) -> Representation:
        return self.__representation

    def copy(self) -> 'WavePacket':
        return WavePacket(self.__amplitudes.copy(), self.__grid, self.__representation, self.__axes)

    def require(self, representation: Representation):
        if self.__representation != representation:
            raise RepresentationException(f'Operation needs the {representation.name.lower()} representation, '
                                          f'wavepacket is in the {self.__representation.name.lower()} one')

    def to_momentum(self) -> 'WavePacket':
        self.require(Representation.COORDINATE)
        self.__amplitudes = fft.forward(self.__amplitudes)
        self.__representation = Representation.MOMENTUM
        return self

    def to_coordinate(self) -> 'WavePacket':
        self.require(Representation.MOMENTUM)
        self.__amplitudes = fft.inverse(self.__amplitudes)
        self.__representation = Representation.COORDINATE
        return self

    def density(self) -> np.ndarray:
        return np.abs(self.__amplitudes) ** 2


def norm(wp: WavePacket) -> float:
    return float(np.sum(wp.density()) * wp.grid.volume_element)


def normalize(wp: WavePacket, target: float = 1.0) -> WavePacket:
    current: float = norm(wp)
    if current <= 0.0:
        raise SymmetryException('Cannot normalize a zero wavepacket')
    wp.amplitudes = wp.amplitudes * np.sqrt(target / current)
    return wp


def exchanged(amplitudes: np.ndarray) -> np.ndarray:
    return np.swapaxes(amplitudes, *ELECTRON_AXES)


def exchange_defect(wp: WavePacket) -> float:
    """
    L2 distance between Psi and Psi with z1 and z2 swapped.
    """
    difference: np.ndarray = wp.amplitudes - exchanged(wp.amplitudes)
    return float(np.sqrt(np.sum(np.abs(difference) ** 2) * wp.grid.volume_element))


def symmetrize(wp: WavePacket, relative_cutoff: float = 1e-14) -> WavePacket:
    """
    Project onto the exchange-symmetric (singlet) subspace and renormalize to 1.
    Requires equal electron axes.
    """
    wp.require(Representation.COORDINATE)
    if wp.grid.n_z1 != wp.grid.n_z2:
        raise GridException('Exchange symmetrization needs n_z1 == n_z2')

    before: float = norm(wp)
    projected: np.ndarray = 0.5 * (wp.amplitudes + exchanged(wp.amplitudes))
    result: WavePacket = WavePacket(projected, wp.grid, wp.representation, wp.axes)

    if norm(result) <= relative_cutoff * max(before, np.finfo(float).tiny):
        raise SymmetryException('Wavefunction vanishes after symmetrization (antisymmetric input)')

    return normalize(result)
