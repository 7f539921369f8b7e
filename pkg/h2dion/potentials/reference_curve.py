import os
from dataclasses import dataclass
from enum import Enum, auto
from typing import Dict, Optional, Sequence

import numpy as np
from django.conf import settings
from scipy.interpolate import CubicSpline

from h2dion.exceptions.simulation import InvalidDataFileException
from h2dion.utils.h2dion_logger import H2DionLogger
from h2dion.utils.text_io import read_table, write_table

logger: H2DionLogger = H2DionLogger(__name__, '[Reference curves]')


class CurveKind(Enum):
    H2_GROUND = auto()
    H2PLUS_GROUND = auto()
    COULOMB = auto()


PRETTY_CURVE_NAME: Dict[CurveKind, str] = {
    CurveKind.H2_GROUND: 'H2 X1Sigma_g+',
    CurveKind.H2PLUS_GROUND: 'H2+ X2Sigma_g+',
    CurveKind.COULOMB: 'H+ + H+ (1/R)',
}

REFERENCE_FILES: Dict[CurveKind, str] = {
    CurveKind.H2_GROUND: 'h2_x1sigmag.dat',
    CurveKind.H2PLUS_GROUND: 'h2plus_x2sigmag.dat',
}


@dataclass(frozen=True)
class ReferenceCurve:
    """
    Born-Oppenheimer potential curve U(R) in hartree, R in bohr, R strictly increasing.
    """
    r: np.ndarray
    u: np.ndarray
    kind: CurveKind

    def __post_init__(self):
        if len(self.r) == 0:
            raise InvalidDataFileException(f'Empty {PRETTY_CURVE_NAME[self.kind]} curve')
        if len(self.r) != len(self.u):
            raise InvalidDataFileException('Curve R and U columns differ in length')
        if np.any(np.diff(self.r) <= 0.0):
            raise InvalidDataFileException(f'R is not strictly increasing in the {PRETTY_CURVE_NAME[self.kind]} curve')

    def __len__(self) -> int:
        return len(self.r)

    def covers(self, r: float) -> bool:
        return self.r[0] <= r <= self.r[-1]

    def energy_at(self, r) -> np.ndarray:
        if len(self.r) < 2:
            return np.full_like(np.asarray(r, dtype=float), self.u[0])
        return CubicSpline(self.r, self.u)(r)

    def minimum(self):
        index: int = int(np.argmin(self.u))
        return float(self.r[index]), float(self.u[index])


def load_reference_curve(source: str, kind: CurveKind) -> ReferenceCurve:
    """
    Load a two-column (R [bohr], U [hartree]) '#'-commented text file.
    Rows must already be in increasing R: duplicates or reversed rows are rejected, not re-sorted.
    """
    frame, _ = read_table(source)
    if frame.shape[1] != 2:
        raise InvalidDataFileException(f'{source} must have exactly two columns, found {frame.shape[1]}')

    r: np.ndarray = frame[0].to_numpy(dtype=float)
    u: np.ndarray = frame[1].to_numpy(dtype=float)

    if np.any(np.diff(r) == 0.0):
        raise InvalidDataFileException(f'Duplicate R values in {source}')
    if np.any(np.diff(r) < 0.0):
        raise InvalidDataFileException(f'Non-monotonic R values in {source}')

    logger.debug(f'Loaded {len(r)} samples of {PRETTY_CURVE_NAME[kind]} from {source}')
    return ReferenceCurve(r=r, u=u, kind=kind)


def load_shipped_curve(kind: CurveKind, data_dir: Optional[str] = None) -> ReferenceCurve:
    directory: str = data_dir or settings.REFERENCE_DATA_DIR
    return load_reference_curve(os.path.join(directory, REFERENCE_FILES[kind]), kind)


def coulomb_curve(r_samples: Sequence[float]) -> ReferenceCurve:
    r: np.ndarray = np.asarray(r_samples, dtype=float)
    return ReferenceCurve(r=r, u=1.0 / r, kind=CurveKind.COULOMB)


def write_reference_curve(path: str, curve: ReferenceCurve) -> str:
    return write_table(path, {'R': curve.r, 'U': curve.u}, metadata={'curve': PRETTY_CURVE_NAME[curve.kind]})
