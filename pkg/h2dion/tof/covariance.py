from dataclasses import dataclass, field
from typing import Any, Dict, Iterable, List, Optional, Union

import numpy as np
import pandas as pd

from h2dion.exceptions.simulation import ArtifactIOException, InvalidDataFileException
from h2dion.tof.shots import ShotDataset, ShotRecord
from h2dion.utils.text_io import format_metadata, read_table


@dataclass
class CovarianceMap:
    """
    C2(T1, T2) = <x(T1) x(T2)> - <x(T1)> <x(T2)> with population averages over shots.
    """
    c2: np.ndarray
    t_ns: np.ndarray
    n_shots: int
    mean: np.ndarray
    metadata: Dict[str, Any] = field(default_factory=dict)

    @property
    def variance(self) -> np.ndarray:
        return np.diag(self.c2)

    @property
    def bin_width_ns(self) -> float:
        return float(self.t_ns[1] - self.t_ns[0]) if len(self.t_ns) > 1 else 1.0


class CovarianceAccumulator:
    """
    Running sums (n, sum x, sum x x^T) over shots. Merging two accumulators adds the sums, so
    partial results over disjoint shot sets combine in any order.
    """

    def __init__(self, n_bins: int):
        self.__n: int = 0
        self.__sum: np.ndarray = np.zeros(n_bins)
        self.__sum_outer: np.ndarray = np.zeros((n_bins, n_bins))

    @property
    def n_shots(self) -> int:
        return self.__n

    @property
    def n_bins(self) -> int:
        return len(self.__sum)

    def add(self, traces: Union[np.ndarray, ShotRecord]) -> 'CovarianceAccumulator':
        values: np.ndarray = np.atleast_2d(np.asarray(traces.counts if isinstance(traces, ShotRecord) else traces,
                                                      dtype=float))
        if values.shape[1] != self.n_bins:
            raise InvalidDataFileException(f'Shot with {values.shape[1]} bins added to a {self.n_bins}-bin map')
        self.__n += values.shape[0]
        self.__sum += values.sum(axis=0)
        self.__sum_outer += values.T @ values
        return self

    def merge(self, other: 'CovarianceAccumulator') -> 'CovarianceAccumulator':
        if other.n_bins != self.n_bins:
            raise InvalidDataFileException('Cannot merge covariance sums over different bin axes')
        merged: CovarianceAccumulator = CovarianceAccumulator(self.n_bins)
        merged.__n = self.__n + other.__n
        merged.__sum = self.__sum + other.__sum
        merged.__sum_outer = self.__sum_outer + other.__sum_outer
        return merged

    def result(self, t_ns: np.ndarray, metadata: Optional[Dict[str, Any]] = None) -> CovarianceMap:
        if self.__n < 2:
            raise InvalidDataFileException(f'A covariance map needs at least 2 shots, got {self.__n}')
        mean: np.ndarray = self.__sum / self.__n
        c2: np.ndarray = self.__sum_outer / self.__n - np.outer(mean, mean)
        # the two products above are symmetric up to rounding
        c2 = 0.5 * (c2 + c2.T)
        return CovarianceMap(c2=c2, t_ns=np.asarray(t_ns, dtype=float), n_shots=self.__n, mean=mean,
                             metadata=metadata or {})


def covariance_map(shots: Union[ShotDataset, Iterable[ShotRecord]], t_ns: Optional[np.ndarray] = None) -> CovarianceMap:
    if not isinstance(shots, ShotDataset):
        records: List[ShotRecord] = list(shots)
        if not records:
            raise InvalidDataFileException('A covariance map needs at least 2 shots, got 0')
        shots = ShotDataset.from_records(records)
    accumulator: CovarianceAccumulator = CovarianceAccumulator(shots.n_bins).add(shots.counts)
    return accumulator.result(t_ns if t_ns is not None else shots.t_ns,
                              metadata={**shots.metadata, **shots.axis_metadata()})


def write_covariance_map(path: str, cmap: CovarianceMap) -> str:
    """
    '.npz' gives the binary form; otherwise a dense text matrix, row i holding C2(T_i, T_j) over j.
    """
    try:
        if path.endswith('.npz'):
            with open(path, 'wb') as f:
                np.savez_compressed(f, c2=cmap.c2, t_ns=cmap.t_ns, mean=cmap.mean, n_shots=cmap.n_shots)
            return path

        header: List[str] = format_metadata({**cmap.metadata, 'n_shots': cmap.n_shots,
                                             't_first_ns': repr(float(cmap.t_ns[0])),
                                             'bin_width_ns': repr(cmap.bin_width_ns)})
        with open(path, 'w') as f:
            f.write('\n'.join(header) + '\n')
            f.write(pd.DataFrame(cmap.c2).to_csv(sep=' ', header=False, index=False, float_format='%.10e'))
    except OSError as e:
        raise ArtifactIOException(f'Cannot write covariance map {path}: {e}')
    return path


def read_covariance_map(path: str) -> CovarianceMap:
    if path.endswith('.npz'):
        try:
            with np.load(path) as data:
                return CovarianceMap(c2=data['c2'], t_ns=data['t_ns'], n_shots=int(data['n_shots']), mean=data['mean'])
        except (OSError, KeyError, ValueError) as e:
            raise InvalidDataFileException(f'Malformed covariance archive {path}: {e}')

    frame, metadata = read_table(path)
    c2: np.ndarray = frame.to_numpy()
    if c2.shape[0] != c2.shape[1]:
        raise InvalidDataFileException(f'Covariance matrix in {path} is not square: {c2.shape}')
    try:
        t_first: float = float(metadata.pop('t_first_ns'))
        width: float = float(metadata.pop('bin_width_ns'))
        n_shots: int = int(metadata.pop('n_shots'))
    except (KeyError, ValueError) as e:
        raise InvalidDataFileException(f'Covariance map {path} lacks its axis header: {e}')
    return CovarianceMap(c2=c2, t_ns=t_first + width * np.arange(c2.shape[0]), n_shots=n_shots,
                         mean=np.full(c2.shape[0], np.nan), metadata=metadata)
