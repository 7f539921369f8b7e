import math
import os
from collections import namedtuple
from dataclasses import dataclass
from typing import Optional

import numpy as np

from h2dion.analysis.regions import Region, RegionPopulations, RegionSpec, gamma2_nuclear_density, \
    region_populations
from h2dion.exceptions.simulation import ConfigurationException, NaNDetectedException
from h2dion.laser.pulse import PulseParams, field_at
from h2dion.numerics import fft
from h2dion.numerics.checkpoint import write_checkpoint
from h2dion.numerics.grid import GridSpec
from h2dion.numerics.wavepacket import Representation, WavePacket, norm
from h2dion.potentials.hamiltonian import ModelHamiltonian
from h2dion.potentials.softcore_table import SoftCoreTable
from h2dion.propagation.absorber import AbsorberMask, apply_absorber, build_absorber_mask
from h2dion.propagation.ledger import AbsorbedFluxLedger
from h2dion.propagation.trace import ObservablesTrace
from h2dion.utils.h2dion_logger import H2DionLogger
from h2dion.utils.units import AtomicUnits

logger: H2DionLogger = H2DionLogger(__name__, '[Propagator]')

PropagationResult = namedtuple('PropagationResult', ['final', 'trace', 'ledger'])


@dataclass(frozen=True)
class PropagatorConfig:
    """
    time_step_as: split-operator step in attoseconds.
    analysis_interval: steps between recorded observables.
    The field-free tail ends once (P2 + absorbed Gamma2) changes by less than tail_threshold over one
    analysis interval, or after tail_duration_factor * tau + tail_extra_au.
    checkpoint_interval: analysis intervals between checkpoints, 0 disables them.
    """
    time_step_as: float = 1.0
    analysis_interval: int = 100
    absorber_z_width: float = 10.0
    absorber_r_width: float = 0.5
    absorbers: bool = True
    tail_threshold: float = 1e-6
    tail_duration_factor: float = 2.0
    tail_extra_au: float = 500.0
    checkpoint_interval: int = 0

    def __post_init__(self):
        if not self.time_step_as > 0.0:
            raise ConfigurationException(f'Time step must be positive, got {self.time_step_as} as')
        if self.analysis_interval < 1:
            raise ConfigurationException(f'Analysis interval must be at least one step, got {self.analysis_interval}')
        if self.absorber_z_width < 0.0 or self.absorber_r_width < 0.0:
            raise ConfigurationException('Absorber widths must be non-negative')
        if self.tail_threshold <= 0.0 or self.tail_duration_factor < 0.0 or self.tail_extra_au < 0.0:
            raise ConfigurationException('Tail threshold must be positive and tail limits non-negative')
        if self.checkpoint_interval < 0:
            raise ConfigurationException('Checkpoint interval must be non-negative')

    @property
    def time_step(self) -> float:
        return AtomicUnits.as_to_au(self.time_step_as)

    def check_grid(self, grid: GridSpec):
        if self.absorber_z_width >= grid.z_max:
            raise ConfigurationException(f'Electron absorber width {self.absorber_z_width} exceeds the '
                                         f'half-length z_max={grid.z_max}')
        r_half_length: float = 0.5 * (grid.r_max - grid.r_min)
        if self.absorber_r_width >= r_half_length:
            raise ConfigurationException(f'Nuclear absorber width {self.absorber_r_width} exceeds the '
                                         f'R half-length {r_half_length}')

    def tail_cap(self, pulse: PulseParams) -> float:
        return self.tail_duration_factor * pulse.duration + self.tail_extra_au


class SplitOperatorPropagator:
    """
    Strang splitting exp(-i T dt/2) exp(-i V(t + dt/2) dt) exp(-i T dt/2) on a fixed grid.

    The kinetic half-step factor is separable into an R part and a (z1, z2) part; the static
    potential phase is precomputed and the laser term -(z1 + z2) E is applied per step.
    A negative time step propagates backwards.
    """

    def __init__(self, hamiltonian: ModelHamiltonian, time_step: float):
        if time_step == 0.0 or not math.isfinite(time_step):
            raise ConfigurationException(f'Time step must be finite and non-zero, got {time_step}')
        self.__hamiltonian: ModelHamiltonian = hamiltonian
        self.__time_step: float = time_step
        self.__half_kinetic_r: np.ndarray = np.exp(-0.5j * time_step * hamiltonian.kinetic_r)[:, None, None]
        self.__half_kinetic_z: np.ndarray = np.exp(-0.5j * time_step * hamiltonian.kinetic_z)[None, :, :]
        self.__static_phase: np.ndarray = np.exp(-1j * time_step * hamiltonian.static_potential)
        self.__dipole: np.ndarray = hamiltonian.dipole

    @property
    def time_step(self) -> float:
        return self.__time_step

    @property
    def hamiltonian(self) -> ModelHamiltonian:
        return self.__hamiltonian

    def __half_kinetic(self, amplitudes: np.ndarray) -> np.ndarray:
        amplitudes = fft.forward(amplitudes)
        amplitudes *= self.__half_kinetic_r
        amplitudes *= self.__half_kinetic_z
        return fft.inverse(amplitudes)

    def step(self, wp: WavePacket, t: float, pulse: Optional[PulseParams] = None) -> WavePacket:
        wp.require(Representation.COORDINATE)
        amplitudes: np.ndarray = self.__half_kinetic(wp.amplitudes)

        amplitudes *= self.__static_phase
        field: float = field_at(t + 0.5 * self.__time_step, pulse) if pulse is not None else 0.0
        if field != 0.0:
            # V_int = -e (z1 + z2) E
            amplitudes *= np.exp(1j * self.__time_step * AtomicUnits.ELEMENTARY_CHARGE * field
                                 * self.__dipole)[None, :, :]

        wp.amplitudes = self.__half_kinetic(amplitudes)
        return wp


def step(wp: WavePacket, t: float, dt: float, pulse: Optional[PulseParams], table: SoftCoreTable) -> WavePacket:
    """
    One split-operator step. Builds the Hamiltonian on every call: loops should hold a SplitOperatorPropagator.
    """
    propagator: SplitOperatorPropagator = SplitOperatorPropagator(ModelHamiltonian(wp.grid, table, axes=wp.axes), dt)
    propagator.step(wp, t, pulse)
    if not np.all(np.isfinite(wp.amplitudes)):
        raise NaNDetectedException(f'Non-finite amplitudes after the step at t={t:.4f} a.u.')
    return wp


class _Observer:
    """
    Observables, snapshots, NaN check and checkpoints at the end of every analysis interval.
    """

    def __init__(self, trace: ObservablesTrace, ledger: AbsorbedFluxLedger, regions: RegionSpec,
                 config: PropagatorConfig, checkpoint_dir: Optional[str]):
        self.trace: ObservablesTrace = trace
        self.ledger: AbsorbedFluxLedger = ledger
        self.regions: RegionSpec = regions
        self.config: PropagatorConfig = config
        self.checkpoint_dir: Optional[str] = checkpoint_dir
        self.intervals: int = 0

    def __call__(self, wp: WavePacket, t: float, step_index: int) -> float:
        current_norm: float = norm(wp)
        if not math.isfinite(current_norm):
            logger.error(f'NaN detected at t={t:.4f} a.u. (step {step_index})')
            raise NaNDetectedException(f'Norm became {current_norm} at t={t:.4f} a.u. (step {step_index}); '
                                       f'reduce the time step or check the soft-core table')

        populations: RegionPopulations = region_populations(wp, self.regions)
        p2_of_r: np.ndarray = gamma2_nuclear_density(wp, self.regions).p
        self.trace.record(t, current_norm, populations.p0, populations.p1, populations.p2,
                          self.ledger.absorbed(Region.GAMMA1), self.ledger.absorbed(Region.GAMMA2),
                          self.ledger.absorbed(Region.GAMMA0), p2_of_r)

        if step_index > 0:
            self.intervals += 1
            logger.info(f't={AtomicUnits.au_to_fs(t):.3f} fs norm={current_norm:.10f} P1={populations.p1:.3e} '
                        f'P2={populations.p2:.3e} absorbed={self.ledger.total:.3e}')
            if self.checkpoint_dir and self.config.checkpoint_interval \
                    and self.intervals % self.config.checkpoint_interval == 0:
                write_checkpoint(os.path.join(self.checkpoint_dir, f'checkpoint_{step_index:09d}.wp'), wp)

        return populations.p2 + self.ledger.absorbed(Region.GAMMA2)


def propagate(initial: WavePacket,
              pulse: PulseParams,
              config: PropagatorConfig,
              table: SoftCoreTable,
              regions: RegionSpec = RegionSpec(),
              run_id: str = '',
              checkpoint_dir: Optional[str] = None,
              hamiltonian: Optional[ModelHamiltonian] = None) -> PropagationResult:
    """
    Steps through the pulse [0, tau], then field-free until the doubly ionized probability
    (in the grid plus absorbed) settles over a full analysis interval or the tail cap is reached.

    The absorber mask acts once per step, right after the closing kinetic half-step of the
    Strang sequence and before the next step's opening half-step.
    """
    initial.require(Representation.COORDINATE)
    grid: GridSpec = initial.grid
    config.check_grid(grid)
    if config.absorbers:
        grid.check_absorber_fits(regions.z_a, config.absorber_z_width)

    hamiltonian = hamiltonian or ModelHamiltonian(grid, table, axes=initial.axes)
    propagator: SplitOperatorPropagator = SplitOperatorPropagator(hamiltonian, config.time_step)
    mask: AbsorberMask = build_absorber_mask(grid, config.absorber_z_width, config.absorber_r_width, initial.axes) \
        if config.absorbers else AbsorberMask.identity(grid)

    wp: WavePacket = initial.copy()
    trace: ObservablesTrace = ObservablesTrace(r=initial.axes.r.copy(), run_id=run_id,
                                               metadata={**pulse.describe(), 'dt_as': config.time_step_as})
    ledger: AbsorbedFluxLedger = AbsorbedFluxLedger.for_grid(initial.axes, regions, run_id=run_id)
    observe: _Observer = _Observer(trace, ledger, regions, config, checkpoint_dir)

    dt: float = config.time_step
    pulse_steps: int = int(math.ceil(pulse.duration / dt - 1e-9))
    tail_steps: int = int(math.ceil(config.tail_cap(pulse) / dt))
    logger.info(f'Propagating {pulse_steps} pulse steps (dt={dt:.5f} a.u.), field-free tail up to {tail_steps} steps')

    t: float = 0.0
    watched: float = observe(wp, t, 0)
    observed_at: int = 0
    for index in range(1, pulse_steps + tail_steps + 1):
        propagator.step(wp, t, pulse)
        t = index * dt
        apply_absorber(wp, mask, ledger)

        last_step: bool = index == pulse_steps + tail_steps
        if index % config.analysis_interval != 0 and index != pulse_steps and not last_step:
            continue

        previous: float = watched
        watched = observe(wp, t, index)
        full_interval: bool = index - observed_at == config.analysis_interval
        observed_at = index
        if index > pulse_steps and full_interval and abs(watched - previous) < config.tail_threshold:
            logger.info(f'Field-free tail settled at t={AtomicUnits.au_to_fs(t):.3f} fs')
            break

    logger.info(f'Final norm {norm(wp):.10f}, absorbed {ledger.total:.3e} (G2 {ledger.absorbed(Region.GAMMA2):.3e})')
    return PropagationResult(final=wp, trace=trace, ledger=ledger)
