from dataclasses import dataclass
from typing import Optional

import numpy as np

from h2dion.analysis.spectrum import KerSpectrum, energy_edges
from h2dion.exceptions.simulation import ConfigurationException
from h2dion.tof.calibration import TofCalibration, tof_to_energy
from h2dion.tof.covariance import CovarianceMap
from h2dion.utils.h2dion_logger import H2DionLogger

logger: H2DionLogger = H2DionLogger(__name__, '[Covariance channels]')


@dataclass(frozen=True)
class BandConfig:
    """
    Anti-diagonal band of momentum-conserving pairs: T1 < T0 < T2 and |T1 + T2 - 2 T0| < half_width_ns.
    Pairs closer than min_separation_ns to T0 (low energy, dominated by the diagonal) are skipped.
    """
    half_width_ns: float = 3.0
    min_separation_ns: float = 5.0
    bin_width_ev: float = 0.1
    max_energy_ev: float = 25.0


def extract_channel_spectrum(cmap: CovarianceMap, cal: TofCalibration, band: BandConfig = BandConfig()) -> KerSpectrum:
    """
    Per-proton energy spectrum of the H+ + H+ channel from the covariance island: every map cell in
    the band adds its C2 at the energy of the half separation (T2 - T1) / 2. Negative covariance
    left in a bin after summation is statistical noise and is cut to zero.
    """
    edges: np.ndarray = energy_edges(band.bin_width_ev, band.max_energy_ev)
    spectrum: KerSpectrum = KerSpectrum(edges=edges, contents=np.zeros(len(edges) - 1),
                                        metadata={'mode': 'covariance', 't0_ns': cal.t0_ns,
                                                  'field_v_cm': cal.field_v_cm, 'n_shots': cmap.n_shots})
    if band.half_width_ns <= 0.0:
        return spectrum

    t1: np.ndarray = cmap.t_ns[:, None]
    t2: np.ndarray = cmap.t_ns[None, :]
    in_band: np.ndarray = (t1 < cal.t0_ns) & (t2 > cal.t0_ns) \
        & (np.abs(t1 + t2 - 2.0 * cal.t0_ns) < band.half_width_ns) \
        & (0.5 * (t2 - t1) >= band.min_separation_ns)
    if not np.any(in_band):
        raise ConfigurationException(f'The anti-diagonal band around T0={cal.t0_ns} ns holds no map cells')

    half_separation: np.ndarray = 0.5 * (t2 - t1)[in_band]
    energies: np.ndarray = tof_to_energy(cal.t0_ns + half_separation, cal)
    contents, _ = np.histogram(energies, bins=edges, weights=cmap.c2[in_band])
    spectrum.contents = np.clip(contents, 0.0, None)
    logger.debug(f'Band of {int(np.sum(in_band))} cells holds {float(np.sum(cmap.c2[in_band])):.4e} covariance')
    return spectrum


def proton_energy_spectrum(mean_trace: np.ndarray, t_ns: np.ndarray, cal: TofCalibration,
                           forward: Optional[bool] = None, bin_width_ev: float = 0.1,
                           max_energy_ev: float = 25.0) -> KerSpectrum:
    """
    Conventional (all channels) proton spectrum: the counts of each TOF bin go to the energy of that bin,
    which carries the Jacobian dE/dT of the map. `forward` restricts to one branch.
    """
    edges: np.ndarray = energy_edges(bin_width_ev, max_energy_ev)
    energies: np.ndarray = np.asarray(tof_to_energy(np.asarray(t_ns, dtype=float), cal, forward=forward))
    on_branch: np.ndarray = np.isfinite(energies)
    contents, _ = np.histogram(energies[on_branch], bins=edges, weights=np.asarray(mean_trace)[on_branch])
    branch: str = 'both' if forward is None else ('forward' if forward else 'backward')
    return KerSpectrum(edges=edges, contents=contents.astype(float),
                       metadata={'mode': 'conventional', 'branch': branch, 't0_ns': cal.t0_ns})
