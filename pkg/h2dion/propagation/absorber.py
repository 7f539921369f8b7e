from dataclasses import dataclass
from functools import cached_property
from typing import Optional, Tuple

import numpy as np

from h2dion.exceptions.simulation import ConfigurationException
from h2dion.numerics.grid import GridAxes, GridSpec, build_grid
from h2dion.numerics.wavepacket import Representation, WavePacket, norm
from h2dion.propagation.ledger import AbsorbedFluxLedger

MASK_EXPONENT: float = 1.0 / 8.0


def edge_profile(depth: np.ndarray, width: float, spacing: float) -> np.ndarray:
    """
    cos^(1/8) roll-off: 1 at the onset of the edge zone (depth 0) falling towards the grid end.
    The zone is stretched by one spacing so that the outermost point stays strictly positive.
    """
    if width <= 0.0:
        return np.ones_like(depth)
    inside: np.ndarray = np.clip(depth, 0.0, None) / (width + spacing)
    return np.cos(0.5 * np.pi * np.clip(inside, 0.0, 1.0)) ** MASK_EXPONENT


@dataclass(frozen=True)
class AbsorberMask:
    """
    Separable multiplicative mask m(R) m(z1) m(z2), values in (0, 1].
    """
    r: np.ndarray
    z1: np.ndarray
    z2: np.ndarray

    @property
    def is_identity(self) -> bool:
        return bool(np.all(self.r == 1.0) and np.all(self.z1 == 1.0) and np.all(self.z2 == 1.0))

    @property
    def electron_plane(self) -> np.ndarray:
        return self.z1[:, None] * self.z2[None, :]

    @cached_property
    def full(self) -> np.ndarray:
        return self.r[:, None, None] * self.electron_plane[None, :, :]

    @cached_property
    def loss(self) -> np.ndarray:
        return 1.0 - self.full ** 2

    @classmethod
    def identity(cls, grid: GridSpec) -> 'AbsorberMask':
        return cls(r=np.ones(grid.n_r), z1=np.ones(grid.n_z1), z2=np.ones(grid.n_z2))


def build_absorber_mask(grid: GridSpec, z_width: float = 10.0, r_width: float = 0.5,
                        axes: Optional[GridAxes] = None) -> AbsorberMask:
    """
    Masks over the outer z_width of both ends of each electron axis and the outer r_width of the top R edge.
    """
    if not 0.0 <= z_width < grid.z_max:
        raise ConfigurationException(f'Electron absorber width {z_width} must lie in [0, z_max={grid.z_max})')
    if not 0.0 <= r_width < grid.r_max - grid.r_min:
        raise ConfigurationException(f'Nuclear absorber width {r_width} must be smaller than the R extent')

    axes = axes or build_grid(grid)
    onset_z: float = grid.z_max - z_width
    onset_r: float = grid.r_max - r_width

    return AbsorberMask(r=edge_profile(axes.r - onset_r, r_width, grid.dr),
                        z1=edge_profile(np.abs(axes.z1) - onset_z, z_width, grid.dz1),
                        z2=edge_profile(np.abs(axes.z2) - onset_z, z_width, grid.dz2))


def apply_absorber(wp: WavePacket, mask: AbsorberMask,
                   ledger: Optional[AbsorbedFluxLedger] = None) -> Tuple[WavePacket, float]:
    """
    Multiply by the mask in place. The removed probability |Psi|^2 (1 - m^2) dV is returned
    and, with a ledger, attributed to the region of every absorbing grid point.
    """
    wp.require(Representation.COORDINATE)
    if mask.is_identity:
        return wp, 0.0

    if ledger is None:
        before: float = norm(wp)
        wp.amplitudes *= mask.full
        return wp, before - norm(wp)

    absorbed: np.ndarray = wp.density() * mask.loss * wp.grid.volume_element
    wp.amplitudes *= mask.full
    return wp, ledger.record(absorbed)
