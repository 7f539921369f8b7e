from dataclasses import dataclass, field
from typing import Any, Dict, Optional

import numpy as np
from scipy.interpolate import PchipInterpolator

from h2dion.exceptions.simulation import InvalidDataFileException
from h2dion.utils.h2dion_logger import H2DionLogger
from h2dion.utils.text_io import read_table, write_table

logger: H2DionLogger = H2DionLogger(__name__, '[Soft-core table]')

TABLE_COLUMNS = ['R', 'beta', 'alpha', 'resid_h2p', 'resid_h2']


@dataclass(frozen=True)
class SoftCoreTable:
    """
    Calibrated softening parameters beta(R) (electron-nuclei) and alpha(R) (electron-electron),
    with the achieved calibration residuals in hartree.

    Between samples the parameters are interpolated with a shape-preserving cubic (PCHIP), which keeps
    them positive; outside the sampled range they are held at the nearest end point.
    """
    r: np.ndarray
    beta: np.ndarray
    alpha: np.ndarray
    resid_h2p: np.ndarray
    resid_h2: np.ndarray
    metadata: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        lengths = {len(self.r), len(self.beta), len(self.alpha), len(self.resid_h2p), len(self.resid_h2)}
        if len(lengths) != 1 or len(self.r) == 0:
            raise InvalidDataFileException('Soft-core table columns are empty or differ in length')
        if np.any(np.diff(self.r) <= 0.0):
            raise InvalidDataFileException('Soft-core table R samples must be strictly increasing')
        for name in ('beta', 'alpha'):
            values: np.ndarray = getattr(self, name)
            if not np.all(np.isfinite(values)) or np.any(values <= 0.0):
                raise InvalidDataFileException(f'Soft-core parameter {name} must be finite and positive')
        if len(self.r) == 1:
            logger.warning(f'Single-sample soft-core table at R={self.r[0]}: parameters are constant in R')

    @classmethod
    def constant(cls, alpha: float, beta: float, r: Optional[np.ndarray] = None) -> 'SoftCoreTable':
        r = np.array([1.0]) if r is None else np.asarray(r, dtype=float)
        return cls(r=r, beta=np.full(len(r), beta), alpha=np.full(len(r), alpha),
                   resid_h2p=np.zeros(len(r)), resid_h2=np.zeros(len(r)),
                   metadata={'kind': 'constant'})

    def __interpolate(self, values: np.ndarray, r) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        if len(self.r) == 1:
            return np.full(r.shape, values[0])
        held: np.ndarray = np.clip(r, self.r[0], self.r[-1])
        if len(self.r) == 2:
            return np.interp(held, self.r, values)
        return PchipInterpolator(self.r, values)(held)

    def beta_at(self, r) -> np.ndarray:
        return self.__interpolate(self.beta, r)

    def alpha_at(self, r) -> np.ndarray:
        return self.__interpolate(self.alpha, r)

    @property
    def max_residuals(self):
        return float(np.max(np.abs(self.resid_h2p))), float(np.max(np.abs(self.resid_h2)))


def write_softcore_table(path: str, table: SoftCoreTable) -> str:
    return write_table(path, {'R': table.r, 'beta': table.beta, 'alpha': table.alpha,
                              'resid_h2p': table.resid_h2p, 'resid_h2': table.resid_h2},
                       metadata=table.metadata)


def read_softcore_table(path: str) -> SoftCoreTable:
    frame, metadata = read_table(path, names=TABLE_COLUMNS)
    return SoftCoreTable(r=frame['R'].to_numpy(), beta=frame['beta'].to_numpy(),
                         alpha=frame['alpha'].to_numpy(), resid_h2p=frame['resid_h2p'].to_numpy(),
                         resid_h2=frame['resid_h2'].to_numpy(), metadata=metadata)
