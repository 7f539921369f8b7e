from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, Optional, Tuple

import numpy as np

from h2dion.analysis.regions import Region
from h2dion.exceptions.simulation import GridException, InvalidDataFileException, ProvenanceException
from h2dion.numerics.wavepacket import WavePacket
from h2dion.propagation.ledger import AbsorbedFluxLedger
from h2dion.propagation.trace import ObservablesTrace
from h2dion.stationary.nuclear_density import NuclearDensity, nuclear_density
from h2dion.utils.h2dion_logger import H2DionLogger
from h2dion.utils.text_io import read_table, write_table
from h2dion.utils.units import AtomicUnits

logger: H2DionLogger = H2DionLogger(__name__, '[KER spectrum]')

DEFAULT_BIN_WIDTH_EV: float = 0.05
DEFAULT_MAX_ENERGY_EV: float = 25.0


class AccumulationMode(Enum):
    FLUX_RESIDUAL = 'flux+residual'
    FINAL_SNAPSHOT = 'final-snapshot'


class KerMapping(Enum):
    POINT = 'point'
    LINEAR = 'linear'


@dataclass
class KerSpectrum:
    """
    Per-proton kinetic energy distribution: `contents` holds the probability in each bin
    between consecutive `edges` (eV). Probability mapped above the last edge is kept in `overflow`.
    """
    edges: np.ndarray
    contents: np.ndarray
    metadata: Dict[str, Any] = field(default_factory=dict)
    overflow: float = 0.0

    @classmethod
    def empty(cls, bin_width_ev: float = DEFAULT_BIN_WIDTH_EV,
              max_energy_ev: float = DEFAULT_MAX_ENERGY_EV) -> 'KerSpectrum':
        edges: np.ndarray = energy_edges(bin_width_ev, max_energy_ev)
        return cls(edges=edges, contents=np.zeros(len(edges) - 1))

    @property
    def centers(self) -> np.ndarray:
        return 0.5 * (self.edges[1:] + self.edges[:-1])

    @property
    def widths(self) -> np.ndarray:
        return np.diff(self.edges)

    @property
    def density(self) -> np.ndarray:
        """
        S(E) in probability per eV.
        """
        return self.contents / self.widths

    def total(self) -> float:
        return float(np.sum(self.contents))


def energy_edges(bin_width_ev: float = DEFAULT_BIN_WIDTH_EV, max_energy_ev: float = DEFAULT_MAX_ENERGY_EV) -> np.ndarray:
    n_bins: int = int(round(max_energy_ev / bin_width_ev))
    return np.linspace(0.0, n_bins * bin_width_ev, n_bins + 1)


def _hat_cdf(x: np.ndarray, centers: np.ndarray, half_width: float) -> np.ndarray:
    """
    Cumulative distribution of unit-mass triangles centred on `centers`, evaluated at x.
    Shape (len(centers), len(x)).
    """
    u: np.ndarray = (x[None, :] - centers[:, None]) / half_width
    rising: np.ndarray = 0.5 * (1.0 + u) ** 2
    falling: np.ndarray = 1.0 - 0.5 * (1.0 - u) ** 2
    return np.where(u <= -1.0, 0.0, np.where(u <= 0.0, rising, np.where(u < 1.0, falling, 1.0)))


def ker_from_nuclear_density(density: NuclearDensity,
                             bin_width_ev: float = DEFAULT_BIN_WIDTH_EV,
                             max_energy_ev: float = DEFAULT_MAX_ENERGY_EV,
                             mapping: KerMapping = KerMapping.POINT) -> KerSpectrum:
    """
    Map P(R) to S(E) with E = 0.5/R per proton, so that S(E) dE = P(R) dR.

    POINT puts the mass P(R_i) dR of every sample into the bin holding 0.5/R_i.
    LINEAR reads P as piecewise linear between the R samples (triangles of mass P(R_i) dR, cut at
    the ends of the R axis) and every energy bin collects the exact probability of its R interval
    [0.5/E_high, 0.5/E_low]. Both conserve the total for any binning.
    """
    r: np.ndarray = np.asarray(density.r, dtype=float)
    if np.any(r <= 0.0):
        raise GridException('Nuclear density contains R <= 0 samples')

    edges_ev: np.ndarray = energy_edges(bin_width_ev, max_energy_ev)
    spectrum: KerSpectrum = KerSpectrum(edges=edges_ev, contents=np.zeros(len(edges_ev) - 1),
                                        metadata=dict(density.metadata))
    masses: np.ndarray = np.clip(np.asarray(density.p, dtype=float), 0.0, None) * density.dr
    if len(r) < 2:
        raise GridException('A nuclear density needs at least two R samples to be mapped to energies')
    if not np.any(masses > 0.0):
        return spectrum

    if mapping == KerMapping.POINT:
        spectrum.contents, spectrum.overflow = _point_mapping(r, masses, edges_ev)
    else:
        spectrum.contents, spectrum.overflow = _linear_mapping(r, masses, edges_ev, density.dr)
    return spectrum


def _point_mapping(r: np.ndarray, masses: np.ndarray, edges_ev: np.ndarray) -> Tuple[np.ndarray, float]:
    n_bins: int = len(edges_ev) - 1
    energies: np.ndarray = AtomicUnits.hartree_to_ev(0.5 / r)
    index: np.ndarray = np.searchsorted(edges_ev, energies, side='right') - 1
    inside: np.ndarray = index < n_bins
    contents: np.ndarray = np.bincount(index[inside], weights=masses[inside], minlength=n_bins)
    return contents, float(np.sum(masses[~inside]))


def _linear_mapping(r: np.ndarray, masses: np.ndarray, edges_ev: np.ndarray,
                    half_width: float) -> Tuple[np.ndarray, float]:
    with np.errstate(divide='ignore'):
        r_edges: np.ndarray = 0.5 / AtomicUnits.ev_to_hartree(edges_ev)

    # triangles restricted to [R_min, R_max] and renormalized to their full mass
    low: np.ndarray = np.clip(r - half_width, r[0], r[-1])
    high: np.ndarray = np.clip(r + half_width, r[0], r[-1])
    cdf_low: np.ndarray = np.diag(_hat_cdf(low, r, half_width))
    cdf_high: np.ndarray = np.diag(_hat_cdf(high, r, half_width))
    cdf: np.ndarray = (_hat_cdf(np.clip(r_edges, r[0], r[-1]), r, half_width) - cdf_low[:, None]) \
        / (cdf_high - cdf_low)[:, None]

    # R decreases with E: bin k spans R in [r_edges[k + 1], r_edges[k]]
    return masses @ (cdf[:, :-1] - cdf[:, 1:]), float(masses @ cdf[:, -1])


def instantaneous_explosion_spectrum(ground: WavePacket, mapping: KerMapping = KerMapping.LINEAR,
                                     **binning) -> KerSpectrum:
    """
    Reference spectrum of the ground-state nuclear density projected onto the 1/R curve at t = 0.
    Wavepacket densities are smooth in R and are mapped piecewise linear unless told otherwise.
    """
    spectrum: KerSpectrum = ker_from_nuclear_density(nuclear_density(ground), mapping=mapping, **binning)
    spectrum.metadata.update({'mode': 'instantaneous'})
    return spectrum


def accumulate_spectrum(trace: ObservablesTrace,
                        ledger: AbsorbedFluxLedger,
                        mode: AccumulationMode = AccumulationMode.FLUX_RESIDUAL,
                        mapping: KerMapping = KerMapping.LINEAR,
                        **binning) -> KerSpectrum:
    """
    KER spectrum of a finished run: Gamma2 probability absorbed at each R plus the Gamma2
    nuclear density left on the grid at the end (flux+residual), or the final density alone.
    """
    if trace.run_id != ledger.run_id:
        raise ProvenanceException(f'Trace of run "{trace.run_id}" and ledger of run "{ledger.run_id}" differ')

    final: NuclearDensity = trace.final_gamma2_density()
    p: np.ndarray = final.p.copy()
    if mode == AccumulationMode.FLUX_RESIDUAL:
        if len(ledger.r) != len(final.r) or not np.allclose(ledger.r, final.r):
            raise ProvenanceException('Ledger and trace are on different R axes')
        p += ledger.gamma2_by_r / final.dr

    spectrum: KerSpectrum = ker_from_nuclear_density(NuclearDensity(r=final.r, p=p), mapping=mapping, **binning)
    spectrum.metadata = {**trace.metadata, 'run_id': trace.run_id, 'mode': mode.value}
    logger.debug(f'Run {trace.run_id}: accumulated {spectrum.total():.4e} ({mode.value})')
    return spectrum


def peak_energy(spectrum: KerSpectrum) -> Optional[float]:
    """
    Vertex of the parabola through the highest bin and its two neighbours; None for an empty spectrum.
    """
    values: np.ndarray = spectrum.density
    if not np.any(values > 0.0):
        return None
    index: int = int(np.argmax(values))
    centers: np.ndarray = spectrum.centers
    if index == 0 or index == len(values) - 1:
        return float(centers[index])

    left, middle, right = values[index - 1], values[index], values[index + 1]
    curvature: float = left - 2.0 * middle + right
    if curvature >= 0.0:
        return float(centers[index])
    return float(centers[index] + 0.5 * spectrum.widths[index] * (left - right) / curvature)


def total_probability(spectrum: KerSpectrum) -> float:
    return spectrum.total()


def single_ionization_probability(trace: ObservablesTrace, ledger: AbsorbedFluxLedger) -> float:
    final: Dict[str, float] = trace.rows[-1]
    return final['P1'] + ledger.absorbed(Region.GAMMA1)


def double_ionization_probability(trace: ObservablesTrace, ledger: AbsorbedFluxLedger) -> float:
    final: Dict[str, float] = trace.rows[-1]
    return final['P2'] + ledger.absorbed(Region.GAMMA2)


def write_spectrum(path: str, spectrum: KerSpectrum) -> str:
    metadata: Dict[str, Any] = {**spectrum.metadata, 'bin_width_eV': repr(float(spectrum.widths[0])),
                                'overflow': repr(spectrum.overflow)}
    return write_table(path, {'E_eV': spectrum.centers, 'S': spectrum.density}, metadata=metadata)


def read_spectrum(path: str) -> KerSpectrum:
    frame, metadata = read_table(path, names=['E_eV', 'S'])
    centers: np.ndarray = frame['E_eV'].to_numpy()
    if len(centers) < 2:
        raise InvalidDataFileException(f'Spectrum {path} needs at least two bins')
    width: float = float(metadata.pop('bin_width_eV', centers[1] - centers[0]))
    edges: np.ndarray = np.append(centers - 0.5 * width, centers[-1] + 0.5 * width)
    overflow: float = float(metadata.pop('overflow', 0.0))
    return KerSpectrum(edges=edges, contents=frame['S'].to_numpy() * width, metadata=metadata, overflow=overflow)
