"""
Atomic units (hbar = m_e = e = 1) and conversions used at I/O boundaries.

All physics inside the package is written in atomic units. Quantities coming
from configuration files or experimental data are converted here, either with
the plain factors or from astropy Quantities.
"""
import math

import astropy.units as u


class AtomicUnits:
    HARTREE_EV: float = 27.2114
    TIME_AS: float = 24.1888
    BOHR_NM: float = 0.0529177
    INTENSITY_W_CM2: float = 3.50945e16
    PROTON_MASS: float = 1836.1527
    # hbar, m_e and e of the model Hamiltonian
    HBAR: float = 1.0
    ELECTRON_MASS: float = 1.0
    ELEMENTARY_CHARGE: float = 1.0

    @classmethod
    def reduced_nuclear_mass(cls) -> float:
        return cls.PROTON_MASS / 2.0

    @classmethod
    def hartree_to_ev(cls, energy: float) -> float:
        return energy * cls.HARTREE_EV

    @classmethod
    def ev_to_hartree(cls, energy_ev: float) -> float:
        return energy_ev / cls.HARTREE_EV

    @classmethod
    def fs_to_au(cls, time_fs: float) -> float:
        return time_fs * 1000.0 / cls.TIME_AS

    @classmethod
    def au_to_fs(cls, time_au: float) -> float:
        return time_au * cls.TIME_AS / 1000.0

    @classmethod
    def as_to_au(cls, time_as: float) -> float:
        return time_as / cls.TIME_AS

    @classmethod
    def nm_to_bohr(cls, length_nm: float) -> float:
        return length_nm / cls.BOHR_NM

    @classmethod
    def bohr_to_nm(cls, length_bohr: float) -> float:
        return length_bohr * cls.BOHR_NM

    @classmethod
    def angular_frequency(cls, wavelength_nm: float) -> float:
        """
        Angular frequency in a.u. of light with the given vacuum wavelength.
        The speed of light in a.u. is 1/fine-structure constant.
        """
        speed_of_light: float = 137.035999
        return 2.0 * math.pi * speed_of_light / cls.nm_to_bohr(wavelength_nm)

    @classmethod
    def fs2_to_au2(cls, gdd_fs2: float) -> float:
        return gdd_fs2 * cls.fs_to_au(1.0) ** 2

    @classmethod
    def fs3_to_au3(cls, tod_fs3: float) -> float:
        return tod_fs3 * cls.fs_to_au(1.0) ** 3

    # astropy Quantity entry points

    @classmethod
    def to_atomic_time(cls, quantity: u.Quantity) -> float:
        return cls.as_to_au(quantity.to_value(u.attosecond))

    @classmethod
    def to_atomic_length(cls, quantity: u.Quantity) -> float:
        return cls.nm_to_bohr(quantity.to_value(u.nm))

    @classmethod
    def to_atomic_energy(cls, quantity: u.Quantity) -> float:
        return cls.ev_to_hartree(quantity.to_value(u.eV))

    @classmethod
    def intensity_to_atomic(cls, quantity: u.Quantity) -> float:
        return quantity.to_value(u.W / u.cm ** 2) / cls.INTENSITY_W_CM2
