"""
Pulse diagnostics on sampled fields: spectral phase (fused-silica dispersion),
interferometric autocorrelation and envelope duration.
"""
from collections import namedtuple
from typing import Sequence

import numpy as np
import pandas as pd
from scipy.fft import irfft, rfft, rfftfreq
from scipy.signal import hilbert

from h2dion.exceptions.simulation import AliasingException
from h2dion.laser.pulse import SampledField
from h2dion.utils.h2dion_logger import H2DionLogger
from h2dion.utils.units import AtomicUnits

logger: H2DionLogger = H2DionLogger(__name__, '[Pulse diagnostics]')

# fused silica around 800 nm, per mm of material
FUSED_SILICA_GDD_FS2_PER_MM: float = 36.1
FUSED_SILICA_TOD_FS3_PER_MM: float = 27.49

# spectral energy allowed above this fraction of the Nyquist frequency
NYQUIST_GUARD: float = 0.9
SPECTRAL_LEAK_TOLERANCE: float = 1e-6
# energy allowed in the outer edge of the time window after the phase is applied
EDGE_FRACTION: float = 0.02
TEMPORAL_LEAK_TOLERANCE: float = 1e-6

AutocorrelationTrace = namedtuple('AutocorrelationTrace', ['delays', 'values'])


def fused_silica_gdd(thickness_mm: float) -> float:
    return FUSED_SILICA_GDD_FS2_PER_MM * thickness_mm


def fused_silica_tod(thickness_mm: float) -> float:
    return FUSED_SILICA_TOD_FS3_PER_MM * thickness_mm


def _check_spectral_support(spectrum: np.ndarray):
    power: np.ndarray = np.abs(spectrum) ** 2
    total: float = float(np.sum(power))
    if total == 0.0:
        return
    guard: int = int(NYQUIST_GUARD * (len(power) - 1))
    leak: float = float(np.sum(power[guard:])) / total
    if leak > SPECTRAL_LEAK_TOLERANCE:
        raise AliasingException(f'{leak:.2e} of the spectral energy lies near the Nyquist frequency: '
                                f'sample the field more finely')


def _check_temporal_support(values: np.ndarray):
    power: np.ndarray = values ** 2
    total: float = float(np.sum(power))
    if total == 0.0:
        return
    edge: int = max(1, int(EDGE_FRACTION * len(values)))
    leak: float = float(np.sum(power[:edge]) + np.sum(power[-edge:])) / total
    if leak > TEMPORAL_LEAK_TOLERANCE:
        raise AliasingException(f'{leak:.2e} of the chirped pulse energy reaches the edge of the time window: '
                                f'pad the field')


def apply_spectral_phase(f: SampledField, gdd_fs2: float, tod_fs3: float = 0.0) -> SampledField:
    """
    Multiply the spectrum by exp(i (gdd/2) (w - w0)^2 + i (tod/6) (w - w0)^3).
    Only the moduli of the spectral amplitudes enter the field energy, so it is conserved.
    """
    spectrum: np.ndarray = rfft(f.e)
    _check_spectral_support(spectrum)

    detuning: np.ndarray = 2.0 * np.pi * rfftfreq(len(f.e), d=f.dt) - f.omega
    phase: np.ndarray = (0.5 * AtomicUnits.fs2_to_au2(gdd_fs2) * detuning ** 2
                         + AtomicUnits.fs3_to_au3(tod_fs3) * detuning ** 3 / 6.0)
    # DC and (even length) Nyquist bins must stay real for a real field
    phase[0] = 0.0
    if len(f.e) % 2 == 0:
        phase[-1] = 0.0

    values: np.ndarray = irfft(spectrum * np.exp(1j * phase), n=len(f.e))
    if gdd_fs2 != 0.0 or tod_fs3 != 0.0:
        _check_temporal_support(values)

    metadata = {**f.metadata, 'gdd_fs2': gdd_fs2, 'tod_fs3': tod_fs3}
    return SampledField(t=f.t.copy(), e=values, omega=f.omega, metadata=metadata)


def intensity_fwhm(f: SampledField) -> float:
    """
    FWHM (a.u. of time) of the cycle-averaged intensity |E + i H[E]|^2, outermost half-maximum crossings.
    """
    profile: np.ndarray = np.abs(hilbert(f.e)) ** 2
    half: float = 0.5 * float(np.max(profile))
    above: np.ndarray = np.nonzero(profile >= half)[0]
    first, last = int(above[0]), int(above[-1])

    def crossing(inside: int, outside: int) -> float:
        if outside < 0 or outside >= len(profile):
            return float(f.t[inside])
        fraction: float = (profile[inside] - half) / (profile[inside] - profile[outside])
        return float(f.t[inside] + fraction * (f.t[outside] - f.t[inside]))

    return crossing(last, last + 1) - crossing(first, first - 1)


def interferometric_autocorrelation(f: SampledField, delays: Sequence[float]) -> AutocorrelationTrace:
    """
    IAC(d) = integral of (E(t) + E(t - d))^4 dt, normalized by its value at infinite delay, 2 * integral of E^4.

    Delays (a.u.) are rounded to whole samples; the field is zero padded by the largest shift,
    so IAC(d) and IAC(-d) are evaluated on the same support.
    """
    shifts: np.ndarray = np.rint(np.asarray(delays, dtype=float) / f.dt).astype(int)
    pad: int = int(np.max(np.abs(shifts))) if len(shifts) else 0
    padded: np.ndarray = np.pad(f.e, pad)
    background: float = 2.0 * float(np.sum(padded ** 4))

    values: np.ndarray = np.empty(len(shifts))
    for i, shift in enumerate(shifts):
        values[i] = np.sum((padded + np.roll(padded, shift)) ** 4) / background

    return AutocorrelationTrace(delays=shifts * f.dt, values=values)


def fused_silica_thickness_scan(f: SampledField, thicknesses_mm: Sequence[float],
                                initial_gdd_fs2: float = 0.0) -> pd.DataFrame:
    """
    Envelope FWHM of a (possibly pre-chirped) pulse after each amount of added fused silica.
    """
    rows = []
    for thickness in thicknesses_mm:
        gdd: float = initial_gdd_fs2 + fused_silica_gdd(thickness)
        chirped: SampledField = apply_spectral_phase(f, gdd, fused_silica_tod(thickness))
        rows.append({'thickness_mm': thickness, 'gdd_fs2': gdd,
                     'fwhm_fs': AtomicUnits.au_to_fs(intensity_fwhm(chirped))})
        logger.debug(f'{thickness} mm fused silica: GDD {gdd:.1f} fs2, FWHM {rows[-1]["fwhm_fs"]:.2f} fs')
    return pd.DataFrame(rows, columns=['thickness_mm', 'gdd_fs2', 'fwhm_fs'])
