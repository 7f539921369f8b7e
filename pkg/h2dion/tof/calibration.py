from dataclasses import dataclass
from typing import Optional, Tuple, Union

import astropy.units as u
import numpy as np
from astropy import constants as const
from scipy.signal import fftconvolve

from h2dion.exceptions.simulation import ConfigurationException

ArrayLike = Union[float, np.ndarray]


@dataclass(frozen=True)
class TofCalibration:
    """
    Linear momentum-to-time relation of a uniform collection field: T = T0 -+ P / (e F_c),
    forward-emitted protons arriving before T0. The acquisition delay is bookkeeping only
    and never enters T.
    """
    t0_ns: float
    field_v_cm: float = 25.0
    delay_offset_ns: float = 0.0

    def __post_init__(self):
        if not self.field_v_cm > 0.0:
            raise ConfigurationException(f'Collection field must be positive, got {self.field_v_cm} V/cm')

    @property
    def momentum_per_ns(self) -> u.Quantity:
        return (const.e.si * self.field_v_cm * u.V / u.cm * u.ns).to(u.kg * u.m / u.s)

    def absolute_time(self, t_ns: ArrayLike) -> ArrayLike:
        return np.asarray(t_ns) + self.delay_offset_ns


def tof_to_energy(t_ns: ArrayLike, cal: TofCalibration, forward: Optional[bool] = None) -> ArrayLike:
    """
    Proton kinetic energy in eV from the relative time of flight, E = (e F_c |T - T0|)^2 / 2 m_p.
    With `forward` set, times on the other side of T0 belong to the other branch and give NaN.
    """
    t: np.ndarray = np.asarray(t_ns, dtype=float)
    momentum: u.Quantity = cal.momentum_per_ns * np.abs(t - cal.t0_ns)
    energy: np.ndarray = np.asarray((momentum ** 2 / (2.0 * const.m_p)).to_value(u.eV), dtype=float)

    if forward is not None:
        wrong_branch: np.ndarray = t > cal.t0_ns if forward else t < cal.t0_ns
        energy = np.where(wrong_branch, np.nan, energy)

    return energy if np.ndim(energy) else float(energy)


def energy_to_tof(energy_ev: ArrayLike, cal: TofCalibration, forward: bool = True) -> ArrayLike:
    energy: np.ndarray = np.asarray(energy_ev, dtype=float)
    if np.any(energy < 0.0):
        raise ConfigurationException('Kinetic energies must be non-negative')
    momentum: u.Quantity = np.sqrt(2.0 * const.m_p * energy * u.eV)
    offset: np.ndarray = np.asarray((momentum / cal.momentum_per_ns).decompose().value, dtype=float)
    result = cal.t0_ns - offset if forward else cal.t0_ns + offset
    return result if np.ndim(result) else float(result)


def estimate_t0(mean_trace: np.ndarray, t_ns: np.ndarray, window_ns: Optional[Tuple[float, float]] = None) -> float:
    """
    Mirror-symmetry centre of the proton region: the self-convolution sum_k x(k) x(n - k)
    peaks at n = 2 c for a trace symmetric about bin c (resolution half a bin).
    """
    t: np.ndarray = np.asarray(t_ns, dtype=float)
    x: np.ndarray = np.asarray(mean_trace, dtype=float)
    inside: np.ndarray = np.ones(len(x), dtype=bool) if window_ns is None \
        else (t >= window_ns[0]) & (t <= window_ns[1])
    if not np.any(inside):
        raise ConfigurationException(f'No TOF bins inside the window {window_ns}')
    x = np.where(inside, np.clip(x - np.median(x[inside]), 0.0, None), 0.0)
    if not np.any(x > 0.0):
        raise ConfigurationException('Cannot estimate T0 from an empty trace')

    convolution: np.ndarray = fftconvolve(x, x, mode='full')
    return float(t[0] + 0.5 * int(np.argmax(convolution)) * (t[1] - t[0]))
