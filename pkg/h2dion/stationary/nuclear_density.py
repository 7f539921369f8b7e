from dataclasses import dataclass, field
from typing import Any, Dict, Optional

import numpy as np
from scipy.linalg import eigh_tridiagonal

from h2dion.exceptions.simulation import GridException
from h2dion.numerics.wavepacket import Representation, WavePacket
from h2dion.potentials.reference_curve import ReferenceCurve
from h2dion.utils.text_io import read_table, write_table
from h2dion.utils.units import AtomicUnits


@dataclass
class NuclearDensity:
    """
    P(R) in probability per bohr on the uniform R axis.
    """
    r: np.ndarray
    p: np.ndarray
    metadata: Dict[str, Any] = field(default_factory=dict)

    @property
    def dr(self) -> float:
        return float(self.r[1] - self.r[0]) if len(self.r) > 1 else 0.0

    def total(self) -> float:
        return float(np.sum(self.p) * self.dr)

    def peak(self) -> float:
        """
        Maximum position refined by a parabola through the highest sample and its neighbours.
        """
        index: int = int(np.argmax(self.p))
        if index == 0 or index == len(self.p) - 1:
            return float(self.r[index])
        left, centre, right = self.p[index - 1], self.p[index], self.p[index + 1]
        curvature: float = left - 2.0 * centre + right
        if curvature >= 0.0:
            return float(self.r[index])
        return float(self.r[index] + 0.5 * self.dr * (left - right) / curvature)

    def relative_l2_distance(self, other: 'NuclearDensity') -> float:
        if len(other.r) != len(self.r) or not np.allclose(other.r, self.r):
            raise GridException('Nuclear densities live on different R axes')
        return float(np.linalg.norm(self.p - other.p) / np.linalg.norm(other.p))


def nuclear_density(wp: WavePacket) -> NuclearDensity:
    wp.require(Representation.COORDINATE)
    p: np.ndarray = np.sum(wp.density(), axis=(1, 2)) * wp.grid.dz1 * wp.grid.dz2
    return NuclearDensity(r=wp.axes.r.copy(), p=p)


def reference_vibrational_density(curve: ReferenceCurve,
                                  r_axis: np.ndarray,
                                  mass: Optional[float] = None,
                                  refinement: int = 10) -> NuclearDensity:
    """
    v=0 density |chi_0(R)|^2 on a Born-Oppenheimer curve, from the lowest eigenvector of the
    finite-difference nuclear Hamiltonian -1/(2 mu) d^2/dR^2 + U(R) with walls just outside the axis.
    The eigenproblem is solved on an axis `refinement` times finer and sampled back.
    """
    mass = mass or AtomicUnits.reduced_nuclear_mass()
    r_axis = np.asarray(r_axis, dtype=float)
    fine: np.ndarray = np.linspace(r_axis[0], r_axis[-1], (len(r_axis) - 1) * refinement + 1)
    spacing: float = float(fine[1] - fine[0])

    potential: np.ndarray = curve.energy_at(np.clip(fine, curve.r[0], curve.r[-1]))
    diagonal: np.ndarray = 1.0 / (mass * spacing ** 2) + potential
    off_diagonal: np.ndarray = np.full(len(fine) - 1, -0.5 / (mass * spacing ** 2))
    _, vectors = eigh_tridiagonal(diagonal, off_diagonal, select='i', select_range=(0, 0))

    chi: np.ndarray = vectors[::refinement, 0]
    density: np.ndarray = chi ** 2
    density /= np.sum(density) * (r_axis[1] - r_axis[0])
    return NuclearDensity(r=r_axis.copy(), p=density, metadata={'source': f'v=0 on {curve.kind.name}'})


def write_nuclear_density(path: str, density: NuclearDensity) -> str:
    return write_table(path, {'R': density.r, 'P': density.p}, metadata=density.metadata)


def read_nuclear_density(path: str) -> NuclearDensity:
    frame, metadata = read_table(path, names=['R', 'P'])
    return NuclearDensity(r=frame['R'].to_numpy(), p=frame['P'].to_numpy(), metadata=metadata)
