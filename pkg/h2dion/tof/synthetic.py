from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from h2dion.exceptions.simulation import ConfigurationException
from h2dion.tof.calibration import TofCalibration, energy_to_tof
from h2dion.tof.shots import ShotDataset


@dataclass(frozen=True)
class SyntheticChannel:
    """
    Two-body Coulomb explosion: per shot a Poisson number of events, each putting one proton
    on the forward and one on the backward branch with equal momentum.
    """
    energy_ev: float
    rate: float
    energy_spread_ev: float = 0.0


@dataclass(frozen=True)
class SyntheticShotGenerator:
    """
    Shot-resolved TOF traces with known statistics, for tests and demonstrations.
    `background` holds uncorrelated Poisson peaks as (T in ns, mean counts per shot).
    """
    calibration: TofCalibration
    channels: Tuple[SyntheticChannel, ...]
    n_bins: int = 600
    start_ns: float = 0.0
    bin_width_ns: float = 1.0
    background: Tuple[Tuple[float, float], ...] = field(default_factory=tuple)
    seed: Optional[int] = None

    def __post_init__(self):
        for channel in self.channels:
            if channel.rate < 0.0 or channel.energy_ev < 0.0 or channel.energy_spread_ev < 0.0:
                raise ConfigurationException('Channel rates, energies and spreads must be non-negative')
        for _, rate in self.background:
            if rate < 0.0:
                raise ConfigurationException('Background rates must be non-negative')

    def bin_of(self, t_ns: np.ndarray) -> np.ndarray:
        return np.rint((np.asarray(t_ns) - self.start_ns) / self.bin_width_ns).astype(int)

    def generate(self, n_shots: int) -> ShotDataset:
        rng: np.random.Generator = np.random.default_rng(self.seed)
        counts: np.ndarray = np.zeros((n_shots, self.n_bins))
        rows: np.ndarray = np.arange(n_shots)

        for channel in self.channels:
            events: np.ndarray = rng.poisson(channel.rate, size=n_shots)
            shot_of_event: np.ndarray = np.repeat(rows, events)
            energies: np.ndarray = np.full(len(shot_of_event), channel.energy_ev)
            if channel.energy_spread_ev > 0.0:
                energies = np.clip(rng.normal(channel.energy_ev, channel.energy_spread_ev, len(energies)), 0.0, None)
            for forward in (True, False):
                bins: np.ndarray = self.bin_of(energy_to_tof(energies, self.calibration, forward=forward))
                self.__deposit(counts, shot_of_event, bins)

        for t_ns, rate in self.background:
            counts[:, int(self.bin_of(t_ns))] += rng.poisson(rate, size=n_shots)

        return ShotDataset(counts=counts, start_ns=self.start_ns, bin_width_ns=self.bin_width_ns,
                           delay_offset_ns=self.calibration.delay_offset_ns,
                           metadata={'generator': 'synthetic', 'seed': self.seed})

    def __deposit(self, counts: np.ndarray, shots: np.ndarray, bins: np.ndarray):
        inside: np.ndarray = (bins >= 0) & (bins < self.n_bins)
        np.add.at(counts, (shots[inside], bins[inside]), 1.0)

    def island_bins(self) -> List[Tuple[int, int]]:
        """
        (forward, backward) bin pair of every channel at its nominal energy.
        """
        return [(int(self.bin_of(energy_to_tof(c.energy_ev, self.calibration, forward=True))),
                 int(self.bin_of(energy_to_tof(c.energy_ev, self.calibration, forward=False))))
                for c in self.channels]
