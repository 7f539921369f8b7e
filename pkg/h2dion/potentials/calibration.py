from collections import namedtuple
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import brentq

from h2dion.exceptions.simulation import CalibrationBracketException, CalibrationConvergenceException, \
    ConfigurationException, NumericalFailureException
from h2dion.potentials.reference_curve import CurveKind, ReferenceCurve
from h2dion.potentials.soft_core import v_nn
from h2dion.potentials.softcore_table import SoftCoreTable
from h2dion.stationary.clamped import FiniteDifferenceConfig, SpectralGridConfig, one_electron_ground_energy, \
    relax_two_electron
from h2dion.utils.h2dion_logger import H2DionLogger

logger: H2DionLogger = H2DionLogger(__name__, '[Calibration]')

CalibrationPoint = namedtuple('CalibrationPoint', ['r', 'beta', 'alpha', 'resid_h2p', 'resid_h2'])


@dataclass(frozen=True)
class CalibrationConfig:
    beta_bracket: Tuple[float, float] = (0.05, 5.0)
    alpha_bracket: Tuple[float, float] = (0.05, 10.0)
    energy_tolerance: float = 1e-6
    max_iterations: int = 100
    parameter_tolerance: float = 1e-10
    fine_grid: FiniteDifferenceConfig = field(default_factory=FiniteDifferenceConfig)
    two_electron_grid: SpectralGridConfig = field(default_factory=SpectralGridConfig.two_electron)
    workers: int = 1


def _solve(residual: Callable[[float], float],
           bracket: Tuple[float, float],
           config: CalibrationConfig,
           r: float,
           name: str) -> Tuple[float, float]:
    """
    Bracketed root of a monotone residual (Brent: bisection safeguarded secant and inverse
    quadratic steps), then checked against the energy tolerance.
    """
    low, high = bracket
    f_low: float = residual(low)
    f_high: float = residual(high)
    if np.sign(f_low) == np.sign(f_high):
        raise CalibrationBracketException(f'{name} root not bracketed in [{low}, {high}] at R={r}: '
                                          f'residuals {f_low:.3e}, {f_high:.3e}', r=r)

    root, result = brentq(residual, low, high, xtol=config.parameter_tolerance,
                          maxiter=config.max_iterations, full_output=True, disp=False)
    if not result.converged:
        raise CalibrationConvergenceException(f'{name} did not converge in {config.max_iterations} iterations '
                                              f'at R={r}: {result.flag}', r=r)

    achieved: float = residual(root)
    if not abs(achieved) <= config.energy_tolerance:
        raise CalibrationConvergenceException(f'{name} residual {achieved:.3e} Eh at R={r} exceeds the tolerance '
                                              f'{config.energy_tolerance:.1e} Eh', r=r)
    return float(root), float(achieved)


def _check_covered(r: float, reference: ReferenceCurve):
    if not reference.covers(r):
        raise ConfigurationException(f'R={r} lies outside the {reference.kind.name} reference range '
                                     f'[{reference.r[0]}, {reference.r[-1]}]')


def _beta_residual(r: float, reference: ReferenceCurve, config: CalibrationConfig) -> Callable[[float], float]:
    target: float = float(reference.energy_at(r))
    return lambda beta: one_electron_ground_energy(r, beta, config.fine_grid) + v_nn(r) - target


def calibrate_beta_point(r: float, reference: ReferenceCurve, config: CalibrationConfig) -> Tuple[float, float]:
    _check_covered(r, reference)
    return _solve(_beta_residual(r, reference, config), config.beta_bracket, config, r, 'beta')


def calibrate_beta(r: float, reference: ReferenceCurve, config: Optional[CalibrationConfig] = None) -> float:
    """
    beta(R) such that the one-electron ground energy plus 1/R reproduces the H2+ curve at R.
    """
    beta, _ = calibrate_beta_point(r, reference, config or CalibrationConfig())
    return beta


class _TwoElectronResidual:
    """
    eps2(alpha) + 1/R - U(R), each relaxation warm-started from the previous state.
    """

    def __init__(self, r: float, beta: float, reference: ReferenceCurve, config: CalibrationConfig):
        self.__r: float = r
        self.__beta: float = beta
        self.__target: float = float(reference.energy_at(r))
        self.__grid: SpectralGridConfig = config.two_electron_grid
        self.__state: Optional[np.ndarray] = None

    def __call__(self, alpha: float) -> float:
        energy, self.__state = relax_two_electron(self.__r, alpha, self.__beta, self.__grid, self.__state)
        return energy + v_nn(self.__r) - self.__target


def calibrate_alpha_point(r: float, beta: float, reference: ReferenceCurve,
                          config: CalibrationConfig) -> Tuple[float, float]:
    _check_covered(r, reference)
    return _solve(_TwoElectronResidual(r, beta, reference, config), config.alpha_bracket, config, r, 'alpha')


def calibrate_alpha(r: float, beta: float, reference: ReferenceCurve,
                    config: Optional[CalibrationConfig] = None) -> float:
    """
    alpha(R) such that the singlet two-electron ground energy plus 1/R reproduces the H2 curve at R.
    """
    alpha, _ = calibrate_alpha_point(r, beta, reference, config or CalibrationConfig())
    return alpha


def calibrate_point(r: float, ref_h2: ReferenceCurve, ref_h2p: ReferenceCurve,
                    config: CalibrationConfig) -> CalibrationPoint:
    beta, resid_h2p = calibrate_beta_point(r, ref_h2p, config)
    alpha, resid_h2 = calibrate_alpha_point(r, beta, ref_h2, config)
    logger.info(f'R={r:.4f}: beta={beta:.6f} ({resid_h2p:+.2e} Eh), alpha={alpha:.6f} ({resid_h2:+.2e} Eh)')
    return CalibrationPoint(r=r, beta=beta, alpha=alpha, resid_h2p=resid_h2p, resid_h2=resid_h2)


def _validate_samples(r_samples: Sequence[float]) -> np.ndarray:
    samples: np.ndarray = np.asarray(r_samples, dtype=float)
    if samples.ndim != 1 or len(samples) == 0:
        raise ConfigurationException('At least one R sample is needed for calibration')
    if np.any(np.diff(samples) <= 0.0):
        raise ConfigurationException('R samples must be strictly increasing')
    if samples[0] <= 0.0:
        raise ConfigurationException(f'R samples must be positive, got {samples[0]}')
    return samples


def build_softcore_table(ref_h2: ReferenceCurve,
                         ref_h2p: ReferenceCurve,
                         r_samples: Sequence[float],
                         config: Optional[CalibrationConfig] = None) -> SoftCoreTable:
    """
    Calibrate beta then alpha at every R sample. Samples are independent and run in a process
    pool when config.workers > 1; any failure is re-raised naming the offending R.
    """
    config = config or CalibrationConfig()
    if ref_h2.kind != CurveKind.H2_GROUND or ref_h2p.kind != CurveKind.H2PLUS_GROUND:
        raise ConfigurationException('build_softcore_table needs the H2 and H2+ ground state curves')
    samples: np.ndarray = _validate_samples(r_samples)
    logger.info(f'Calibrating soft-core parameters at {len(samples)} R samples with {config.workers} worker(s)')

    points: List[CalibrationPoint] = []
    if config.workers <= 1:
        for r in samples:
            points.append(_calibrate_reporting(float(r), ref_h2, ref_h2p, config))
    else:
        with ProcessPoolExecutor(max_workers=config.workers) as executor:
            futures: Dict[float, object] = {float(r): executor.submit(calibrate_point, float(r), ref_h2, ref_h2p,
                                                                      config)
                                            for r in samples}
            for r, future in futures.items():
                points.append(_collect(r, future))

    return SoftCoreTable(r=np.array([p.r for p in points]),
                         beta=np.array([p.beta for p in points]),
                         alpha=np.array([p.alpha for p in points]),
                         resid_h2p=np.array([p.resid_h2p for p in points]),
                         resid_h2=np.array([p.resid_h2 for p in points]),
                         metadata={'energy_tolerance': config.energy_tolerance,
                                   'beta_bracket': f'{config.beta_bracket[0]} {config.beta_bracket[1]}',
                                   'alpha_bracket': f'{config.alpha_bracket[0]} {config.alpha_bracket[1]}'})


def _calibrate_reporting(r: float, ref_h2: ReferenceCurve, ref_h2p: ReferenceCurve,
                         config: CalibrationConfig) -> CalibrationPoint:
    try:
        return calibrate_point(r, ref_h2, ref_h2p, config)
    except NumericalFailureException as e:
        logger.error(f'Calibration failed at R={r}: {e.message}')
        raise _with_r(e, r)


def _collect(r: float, future) -> CalibrationPoint:
    try:
        return future.result()
    except NumericalFailureException as e:
        logger.error(f'Calibration failed at R={r}: {e.message}')
        raise _with_r(e, r)


def _with_r(error: NumericalFailureException, r: float) -> NumericalFailureException:
    if isinstance(error, (CalibrationBracketException, CalibrationConvergenceException)):
        error.r = r
        return error
    return CalibrationConvergenceException(f'Calibration failed at R={r}: {error.message}', r=r)
