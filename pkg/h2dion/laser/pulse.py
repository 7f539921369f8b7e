import math
from dataclasses import dataclass, field
from enum import Enum, auto
from typing import Any, Dict, Union

import numpy as np

from h2dion.exceptions.simulation import ConfigurationException, GridException
from h2dion.utils.text_io import read_table, write_table
from h2dion.utils.units import AtomicUnits

ArrayLike = Union[float, np.ndarray]

# intensity FWHM of the sin^2 field envelope over its total duration: sin^4 drops to 1/2 at arcsin(2^-1/4)
SIN2_FWHM_RATIO: float = 1.0 - (2.0 / math.pi) * math.asin(2.0 ** -0.25)

MIN_SAMPLES_PER_CYCLE: int = 20


class EnvelopeKind(Enum):
    SIN2 = auto()
    GAUSSIAN = auto()


ENVELOPE_NAMES: Dict[str, EnvelopeKind] = {
    'sin2': EnvelopeKind.SIN2,
    'gaussian': EnvelopeKind.GAUSSIAN,
}


def total_duration_from_fwhm(fwhm_fs: float) -> float:
    return fwhm_fs / SIN2_FWHM_RATIO


def fwhm_from_total_duration(duration_fs: float) -> float:
    return duration_fs * SIN2_FWHM_RATIO


@dataclass(frozen=True)
class PulseParams:
    """
    Linearly polarized pulse E(t) = E0 f(t) cos(omega t + cep) on [0, tau].

    `duration_fs` is the total duration tau of the envelope. The Gaussian envelope is centred
    at tau/2 with the same intensity FWHM as the sin^2 one and is cut to [0, tau].
    Zero intensity is accepted and means a field-free run.
    """
    intensity: float
    duration_fs: float
    cep: float = 0.0
    wavelength_nm: float = 800.0
    envelope: EnvelopeKind = EnvelopeKind.SIN2

    def __post_init__(self):
        if not self.intensity >= 0.0:
            raise ConfigurationException(f'Peak intensity must be non-negative, got {self.intensity} W/cm2')
        if not self.duration_fs > 0.0:
            raise ConfigurationException(f'Pulse duration must be positive, got {self.duration_fs} fs')
        if not self.wavelength_nm > 0.0:
            raise ConfigurationException(f'Wavelength must be positive, got {self.wavelength_nm} nm')
        object.__setattr__(self, 'cep', float(self.cep) % (2.0 * math.pi))

    @property
    def duration(self) -> float:
        return AtomicUnits.fs_to_au(self.duration_fs)

    @property
    def omega(self) -> float:
        return AtomicUnits.angular_frequency(self.wavelength_nm)

    @property
    def peak_field(self) -> float:
        return peak_field_from_intensity(self.intensity)

    @property
    def optical_cycle(self) -> float:
        return 2.0 * math.pi / self.omega

    @property
    def fwhm_fs(self) -> float:
        return fwhm_from_total_duration(self.duration_fs)

    def describe(self) -> Dict[str, Any]:
        return {'intensity_W_cm2': f'{self.intensity:.4e}', 'duration_fs': self.duration_fs,
                'cep_rad': f'{self.cep:.6f}', 'wavelength_nm': self.wavelength_nm,
                'envelope': self.envelope.name.lower()}


def peak_field_from_intensity(intensity: float) -> float:
    if intensity < 0.0:
        raise ConfigurationException(f'Peak intensity must be non-negative, got {intensity} W/cm2')
    return math.sqrt(intensity / AtomicUnits.INTENSITY_W_CM2)


def envelope(t: ArrayLike, p: PulseParams) -> ArrayLike:
    t = np.asarray(t, dtype=float)
    tau: float = p.duration
    inside: np.ndarray = (t >= 0.0) & (t <= tau)

    if p.envelope == EnvelopeKind.SIN2:
        shape = np.sin(math.pi * t / tau) ** 2
    else:
        fwhm: float = SIN2_FWHM_RATIO * tau
        shape = np.exp(-2.0 * math.log(2.0) * ((t - tau / 2.0) / fwhm) ** 2)

    result = np.where(inside, shape, 0.0)
    return result if np.ndim(result) else float(result)


def field_at(t: ArrayLike, p: PulseParams) -> ArrayLike:
    """
    Electric field in a.u.; zero outside [0, tau].
    """
    result = p.peak_field * np.asarray(envelope(t, p)) * np.cos(p.omega * np.asarray(t, dtype=float) + p.cep)
    return result if np.ndim(result) else float(result)


@dataclass
class SampledField:
    """
    E(t) on a uniform time axis, both in atomic units; `omega` is the carrier frequency.
    """
    t: np.ndarray
    e: np.ndarray
    omega: float
    metadata: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if len(self.t) != len(self.e) or len(self.t) < 2:
            raise GridException('Sampled field needs at least two samples and equally long t and E')
        if self.samples_per_cycle < MIN_SAMPLES_PER_CYCLE:
            raise GridException(f'Sampling resolves only {self.samples_per_cycle:.1f} points per optical cycle, '
                                f'at least {MIN_SAMPLES_PER_CYCLE} are needed')

    @property
    def dt(self) -> float:
        return float(self.t[1] - self.t[0])

    @property
    def samples_per_cycle(self) -> float:
        return 2.0 * math.pi / self.omega / self.dt

    def energy(self) -> float:
        return float(np.sum(self.e ** 2) * self.dt)


def sample_pulse(p: PulseParams, samples_per_cycle: int = 64, padding_fs: float = 0.0) -> SampledField:
    dt: float = p.optical_cycle / samples_per_cycle
    padding: float = AtomicUnits.fs_to_au(padding_fs)
    t: np.ndarray = np.arange(-padding, p.duration + padding + 0.5 * dt, dt)
    return SampledField(t=t, e=field_at(t, p), omega=p.omega, metadata=p.describe())


def write_sampled_field(path: str, f: SampledField) -> str:
    metadata: Dict[str, Any] = {**f.metadata, 'omega_au': repr(f.omega)}
    return write_table(path, {'t': f.t, 'E': f.e}, metadata=metadata)


def read_sampled_field(path: str, omega: float = None) -> SampledField:
    frame, metadata = read_table(path, names=['t', 'E'])
    carrier: float = omega if omega is not None else float(metadata.get('omega_au', AtomicUnits.angular_frequency(800.0)))
    return SampledField(t=frame['t'].to_numpy(), e=frame['E'].to_numpy(), omega=carrier, metadata=metadata)
