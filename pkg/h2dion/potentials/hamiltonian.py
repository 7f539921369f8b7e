from typing import Optional

import numpy as np

from h2dion.numerics.grid import GridAxes, GridSpec, build_grid
from h2dion.potentials.soft_core import v_ee, v_en
from h2dion.potentials.softcore_table import SoftCoreTable
from h2dion.utils.units import AtomicUnits


class ModelHamiltonian:
    """
    Collinear H2 Hamiltonian on a GridSpec, split into
    a kinetic part diagonal in momentum space, T = k_R^2 / 2 mu + k_1^2 / 2 + k_2^2 / 2,
    and a static potential diagonal in coordinate space,
    V = 1/R + v_en(R, z1, beta(R)) + v_en(R, z2, beta(R)) + v_ee(z1, z2, alpha(R)).

    The length-gauge laser coupling -(z1 + z2) E(t) is added by the propagator from `dipole`.
    """

    def __init__(self, grid: GridSpec, table: SoftCoreTable, nuclear_mass: Optional[float] = None,
                 axes: Optional[GridAxes] = None):
        self.__grid: GridSpec = grid
        self.__table: SoftCoreTable = table
        self.__axes: GridAxes = axes if axes is not None else build_grid(grid)
        self.__nuclear_mass: float = nuclear_mass or AtomicUnits.reduced_nuclear_mass()
        self.__static_potential: Optional[np.ndarray] = None

    @property
    def grid(self) -> GridSpec:
        return self.__grid

    @property
    def axes(self) -> GridAxes:
        return self.__axes

    @property
    def table(self) -> SoftCoreTable:
        return self.__table

    @property
    def nuclear_mass(self) -> float:
        return self.__nuclear_mass

    @property
    def kinetic_r(self) -> np.ndarray:
        return self.__axes.k_r ** 2 / (2.0 * self.__nuclear_mass)

    @property
    def kinetic_z(self) -> np.ndarray:
        return 0.5 * (self.__axes.k_z1[:, None] ** 2 + self.__axes.k_z2[None, :] ** 2)

    @property
    def kinetic(self) -> np.ndarray:
        return self.kinetic_r[:, None, None] + self.kinetic_z[None, :, :]

    @property
    def dipole(self) -> np.ndarray:
        """
        z1 + z2 over the electron plane.
        """
        return self.__axes.z1[:, None] + self.__axes.z2[None, :]

    @property
    def static_potential(self) -> np.ndarray:
        if self.__static_potential is None:
            self.__static_potential = self.__build_static_potential()
        return self.__static_potential

    def __build_static_potential(self) -> np.ndarray:
        r: np.ndarray = self.__axes.r[:, None, None]
        beta: np.ndarray = self.__table.beta_at(self.__axes.r)[:, None, None]
        alpha: np.ndarray = self.__table.alpha_at(self.__axes.r)[:, None, None]
        z1: np.ndarray = self.__axes.z1[None, :, None]
        z2: np.ndarray = self.__axes.z2[None, None, :]

        potential: np.ndarray = v_ee(z1, z2, alpha)
        potential += v_en(r, z1, beta)
        potential += v_en(r, z2, beta)
        potential += 1.0 / r
        return potential

    def interaction(self, field: float) -> np.ndarray:
        return -AtomicUnits.ELEMENTARY_CHARGE * field * self.dipole
