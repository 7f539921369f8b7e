from typing import Any, Dict, Optional

import numpy as np

from h2dion.analysis.regions import Region, RegionSpec, region_labels
from h2dion.exceptions.simulation import InvalidDataFileException
from h2dion.numerics.grid import GridAxes
from h2dion.utils.text_io import read_table, write_table


class AbsorbedFluxLedger:
    """
    Probability removed by the absorbers, attributed to the region (Gamma0, Gamma1, Gamma2)
    of the absorbing grid point at absorption time. The Gamma2 part is also kept per R sample.
    """

    def __init__(self, r: np.ndarray, labels: np.ndarray, run_id: str = '', metadata: Dict[str, Any] = None):
        self.__r: np.ndarray = np.asarray(r, dtype=float)
        self.__masks: Dict[Region, np.ndarray] = {region: (labels == region.value).astype(float) for region in Region}
        self.__by_region: Dict[Region, float] = {region: 0.0 for region in Region}
        self.__gamma2_by_r: np.ndarray = np.zeros(len(self.__r))
        self.run_id: str = run_id
        self.metadata: Dict[str, Any] = metadata or {}

    @classmethod
    def for_grid(cls, axes: GridAxes, spec: RegionSpec, run_id: str = '') -> 'AbsorbedFluxLedger':
        return cls(axes.r, region_labels(axes.z1, axes.z2, spec), run_id=run_id, metadata={'z_a': spec.z_a})

    @property
    def r(self) -> np.ndarray:
        return self.__r

    @property
    def gamma2_by_r(self) -> np.ndarray:
        """
        Absorbed Gamma2 probability per R sample (not per bohr).
        """
        return self.__gamma2_by_r

    def absorbed(self, region: Region) -> float:
        return self.__by_region[region]

    @property
    def total(self) -> float:
        return float(sum(self.__by_region.values()))

    def record(self, absorbed: np.ndarray) -> float:
        """
        Book an absorbed probability array over (R, z1, z2); returns its sum.
        """
        by_r: Dict[Region, np.ndarray] = {region: np.einsum('ijk,jk->i', absorbed, mask)
                                          for region, mask in self.__masks.items()}
        for region, values in by_r.items():
            self.__by_region[region] += float(np.sum(values))
        self.__gamma2_by_r += by_r[Region.GAMMA2]
        return float(sum(np.sum(values) for values in by_r.values()))

    @classmethod
    def restore(cls, r: np.ndarray, gamma2_by_r: np.ndarray, by_region: Dict[Region, float],
                run_id: str, metadata: Dict[str, Any]) -> 'AbsorbedFluxLedger':
        ledger: AbsorbedFluxLedger = cls(r, np.zeros((1, 1), dtype=int), run_id=run_id, metadata=metadata)
        ledger.__gamma2_by_r = np.asarray(gamma2_by_r, dtype=float).copy()
        ledger.__by_region = dict(by_region)
        return ledger


def write_ledger(path: str, ledger: AbsorbedFluxLedger) -> str:
    metadata: Dict[str, Any] = {**ledger.metadata,
                                'run_id': ledger.run_id,
                                'absorbed_G0': repr(ledger.absorbed(Region.GAMMA0)),
                                'absorbed_G1': repr(ledger.absorbed(Region.GAMMA1)),
                                'absorbed_G2': repr(ledger.absorbed(Region.GAMMA2))}
    return write_table(path, {'R': ledger.r, 'absorbed_G2': ledger.gamma2_by_r}, metadata=metadata)


def read_ledger(path: str) -> AbsorbedFluxLedger:
    frame, metadata = read_table(path, names=['R', 'absorbed_G2'])
    try:
        by_region: Dict[Region, float] = {Region.GAMMA0: float(metadata.pop('absorbed_G0')),
                                          Region.GAMMA1: float(metadata.pop('absorbed_G1')),
                                          Region.GAMMA2: float(metadata.pop('absorbed_G2'))}
    except (KeyError, ValueError) as e:
        raise InvalidDataFileException(f'Ledger {path} lacks the absorbed totals: {e}')
    run_id: Optional[str] = metadata.pop('run_id', '')
    return AbsorbedFluxLedger.restore(frame['R'].to_numpy(), frame['absorbed_G2'].to_numpy(), by_region,
                                      run_id, metadata)
