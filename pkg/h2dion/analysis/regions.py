from dataclasses import dataclass
from enum import Enum
from typing import Dict

import numpy as np

from h2dion.exceptions.simulation import ConfigurationException
from h2dion.numerics.wavepacket import Representation, WavePacket
from h2dion.stationary.nuclear_density import NuclearDensity


class Region(Enum):
    GAMMA0 = 0
    GAMMA1 = 1
    GAMMA2 = 2


PRETTY_REGION_NAME: Dict[Region, str] = {
    Region.GAMMA0: 'neutral (both electrons bound)',
    Region.GAMMA1: 'single ionization',
    Region.GAMMA2: 'double ionization',
}


@dataclass(frozen=True)
class RegionSpec:
    z_a: float = 20.0

    def __post_init__(self):
        if not self.z_a > 0.0:
            raise ConfigurationException(f'z_A must be positive, got {self.z_a}')


@dataclass(frozen=True)
class RegionPopulations:
    p0: float
    p1: float
    p2: float

    @property
    def total(self) -> float:
        return self.p0 + self.p1 + self.p2


def classify_region(z1: float, z2: float, spec: RegionSpec = RegionSpec()) -> Region:
    outside_1: bool = abs(z1) > spec.z_a
    outside_2: bool = abs(z2) > spec.z_a
    if outside_1 and outside_2:
        return Region.GAMMA2
    if outside_1 or outside_2:
        return Region.GAMMA1
    return Region.GAMMA0


def region_labels(z1: np.ndarray, z2: np.ndarray, spec: RegionSpec) -> np.ndarray:
    """
    Region value of every (z1, z2) grid point, shape (len(z1), len(z2)).
    """
    return (np.abs(z1) > spec.z_a).astype(int)[:, None] + (np.abs(z2) > spec.z_a).astype(int)[None, :]


def region_populations(wp: WavePacket, spec: RegionSpec = RegionSpec()) -> RegionPopulations:
    wp.require(Representation.COORDINATE)
    plane: np.ndarray = np.sum(wp.density(), axis=0) * wp.grid.volume_element
    labels: np.ndarray = region_labels(wp.axes.z1, wp.axes.z2, spec)
    return RegionPopulations(p0=float(np.sum(plane[labels == Region.GAMMA0.value])),
                             p1=float(np.sum(plane[labels == Region.GAMMA1.value])),
                             p2=float(np.sum(plane[labels == Region.GAMMA2.value])))


def gamma2_nuclear_density(wp: WavePacket, spec: RegionSpec = RegionSpec()) -> NuclearDensity:
    """
    P2(R) = integral of |Psi|^2 over the doubly ionized part of the electron plane.
    """
    wp.require(Representation.COORDINATE)
    gamma2: np.ndarray = region_labels(wp.axes.z1, wp.axes.z2, spec) == Region.GAMMA2.value
    p: np.ndarray = np.einsum('ijk,jk->i', wp.density(), gamma2.astype(float)) * wp.grid.dz1 * wp.grid.dz2
    return NuclearDensity(r=wp.axes.r.copy(), p=p, metadata={'region': 'gamma2', 'z_a': spec.z_a})
