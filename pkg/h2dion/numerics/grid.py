from collections import namedtuple
from dataclasses import dataclass

import numpy as np

from h2dion.exceptions.simulation import GridException

GridAxes = namedtuple('GridAxes', ['r', 'z1', 'z2', 'k_r', 'k_z1', 'k_z2', 'dr', 'dz1', 'dz2'])


def is_power_of_two(n: int) -> bool:
    return n > 0 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class GridSpec:
    """
    Uniform grid over (R, z1, z2).

    The R axis spans [r_min, r_max] with both end points on the grid.
    The electron axes span [-z_max, z_max) end point excluded, matching the periodic
    convention of the discrete Fourier transform.
    """
    n_r: int = 128
    n_z1: int = 256
    n_z2: int = 256
    r_min: float = 0.4
    r_max: float = 10.0
    z_max: float = 100.0

    def __post_init__(self):
        for name in ('n_r', 'n_z1', 'n_z2'):
            value: int = getattr(self, name)
            if not is_power_of_two(int(value)) or int(value) != value:
                raise GridException(f'Grid point count {name}={value} is not a power of two')
        if self.n_r < 2:
            raise GridException(f'The R axis needs at least two points, got n_r={self.n_r}')
        if self.r_min <= 0.0:
            raise GridException(f'r_min must be positive (1/R is singular at 0), got {self.r_min}')
        if self.r_max <= self.r_min:
            raise GridException(f'r_max={self.r_max} must exceed r_min={self.r_min}')
        if self.z_max <= 0.0:
            raise GridException(f'z_max must be positive, got {self.z_max}')

    @property
    def dr(self) -> float:
        return (self.r_max - self.r_min) / (self.n_r - 1)

    @property
    def dz1(self) -> float:
        return 2.0 * self.z_max / self.n_z1

    @property
    def dz2(self) -> float:
        return 2.0 * self.z_max / self.n_z2

    @property
    def shape(self):
        return self.n_r, self.n_z1, self.n_z2

    @property
    def volume_element(self) -> float:
        return self.dr * self.dz1 * self.dz2

    def check_absorber_fits(self, z_a: float, absorber_width: float):
        if self.z_max <= z_a + absorber_width:
            raise GridException(f'z_max={self.z_max} must exceed z_A + absorber width '
                                f'= {z_a} + {absorber_width}')

    def as_header_values(self):
        return self.n_r, self.n_z1, self.n_z2, self.r_min, self.r_max, self.z_max


@dataclass(frozen=True)
class MomentumGrid:
    """
    Conjugate wavenumbers of one axis, in the numpy FFT order
    (0, 1, ..., n/2 - 1, -n/2, ..., -1) times 2 pi / (n d).
    """
    k: np.ndarray
    dk: float

    @classmethod
    def for_axis(cls, n: int, spacing: float) -> 'MomentumGrid':
        k: np.ndarray = 2.0 * np.pi * np.fft.fftfreq(n, d=spacing)
        return cls(k=k, dk=2.0 * np.pi / (n * spacing))

    @property
    def nyquist(self) -> float:
        return self.dk * len(self.k) / 2.0


def coordinate_axis(n: int, start: float, spacing: float) -> np.ndarray:
    return start + spacing * np.arange(n)


def build_grid(spec: GridSpec) -> GridAxes:
    r: np.ndarray = np.linspace(spec.r_min, spec.r_max, spec.n_r)
    z1: np.ndarray = coordinate_axis(spec.n_z1, -spec.z_max, spec.dz1)
    z2: np.ndarray = coordinate_axis(spec.n_z2, -spec.z_max, spec.dz2)

    return GridAxes(r=r, z1=z1, z2=z2,
                    k_r=MomentumGrid.for_axis(spec.n_r, spec.dr).k,
                    k_z1=MomentumGrid.for_axis(spec.n_z1, spec.dz1).k,
                    k_z2=MomentumGrid.for_axis(spec.n_z2, spec.dz2).k,
                    dr=spec.dr, dz1=spec.dz1, dz2=spec.dz2)
