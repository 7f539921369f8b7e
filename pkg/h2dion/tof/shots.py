import os
from dataclasses import dataclass, field
from io import StringIO
from typing import Any, Dict, Iterator, List, Sequence

import numpy as np
import pandas as pd

from h2dion.exceptions.simulation import ArtifactIOException, ConfigurationException, InvalidDataFileException
from h2dion.utils.h2dion_logger import H2DionLogger
from h2dion.utils.text_io import COMMENT_PREFIX, format_metadata, parse_metadata

logger: H2DionLogger = H2DionLogger(__name__, '[Shot data]')


@dataclass(frozen=True)
class ShotRecord:
    shot_id: int
    counts: np.ndarray

    def __post_init__(self):
        if np.any(np.asarray(self.counts) < 0):
            raise InvalidDataFileException(f'Shot {self.shot_id} has negative counts')


@dataclass
class ShotDataset:
    """
    Shot-resolved TOF traces on a common bin axis. `start_ns` is the centre of the first bin,
    relative to the trigger; the acquisition delay is metadata.
    """
    counts: np.ndarray
    start_ns: float = 0.0
    bin_width_ns: float = 1.0
    delay_offset_ns: float = 0.0
    shot_ids: np.ndarray = None
    metadata: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        self.counts = np.atleast_2d(np.asarray(self.counts, dtype=float))
        if self.shot_ids is None:
            self.shot_ids = np.arange(self.counts.shape[0])
        if len(self.shot_ids) != self.counts.shape[0]:
            raise InvalidDataFileException('Shot ids and traces differ in number')
        if np.any(self.counts < 0):
            raise InvalidDataFileException('Shot traces must hold non-negative counts')
        if not self.bin_width_ns > 0.0:
            raise ConfigurationException(f'Bin width must be positive, got {self.bin_width_ns} ns')

    @classmethod
    def from_records(cls, records: Sequence[ShotRecord], **axis) -> 'ShotDataset':
        lengths = {len(record.counts) for record in records}
        if len(lengths) > 1:
            raise InvalidDataFileException(f'Shots have different bin axes (lengths {sorted(lengths)})')
        return cls(counts=np.array([record.counts for record in records], dtype=float),
                   shot_ids=np.array([record.shot_id for record in records]), **axis)

    def __len__(self) -> int:
        return self.counts.shape[0]

    def __iter__(self) -> Iterator[ShotRecord]:
        for shot_id, counts in zip(self.shot_ids, self.counts):
            yield ShotRecord(shot_id=int(shot_id), counts=counts)

    @property
    def n_bins(self) -> int:
        return self.counts.shape[1]

    @property
    def t_ns(self) -> np.ndarray:
        return self.start_ns + self.bin_width_ns * np.arange(self.n_bins)

    def mean_trace(self) -> np.ndarray:
        return np.mean(self.counts, axis=0)

    def axis_metadata(self) -> Dict[str, Any]:
        return {'start_ns': repr(self.start_ns), 'bin_width_ns': repr(self.bin_width_ns),
                'delay_offset_ns': repr(self.delay_offset_ns)}


def write_shots(path: str, dataset: ShotDataset) -> str:
    """
    '.npz' gives the binary form; anything else a text file with one shot per row (id, counts...).
    """
    try:
        if path.endswith('.npz'):
            with open(path, 'wb') as f:
                np.savez_compressed(f, counts=dataset.counts, shot_ids=dataset.shot_ids,
                                    start_ns=dataset.start_ns, bin_width_ns=dataset.bin_width_ns,
                                    delay_offset_ns=dataset.delay_offset_ns)
            return path

        frame: pd.DataFrame = pd.DataFrame(dataset.counts)
        frame.insert(0, 'shot_id', dataset.shot_ids)
        header: List[str] = format_metadata({**dataset.metadata, **dataset.axis_metadata()})
        with open(path, 'w') as f:
            f.write('\n'.join(header) + '\n')
            f.write(frame.to_csv(sep=' ', header=False, index=False, float_format='%.10g'))
    except OSError as e:
        raise ArtifactIOException(f'Cannot write shot data {path}: {e}')

    logger.debug(f'Wrote {len(dataset)} shots of {dataset.n_bins} bins to {path}')
    return path


def read_shots(path: str) -> ShotDataset:
    if not os.path.exists(path):
        raise InvalidDataFileException(f'Shot data file {path} does not exist')

    if path.endswith('.npz'):
        try:
            with np.load(path) as data:
                return ShotDataset(counts=data['counts'], shot_ids=data['shot_ids'],
                                   start_ns=float(data['start_ns']), bin_width_ns=float(data['bin_width_ns']),
                                   delay_offset_ns=float(data['delay_offset_ns']))
        except (KeyError, ValueError) as e:
            raise InvalidDataFileException(f'Malformed shot archive {path}: {e}')

    with open(path, 'r') as f:
        lines: List[str] = f.read().splitlines()
    comments: List[str] = [line for line in lines if line.startswith(COMMENT_PREFIX)]
    rows: List[str] = [line for line in lines if line.strip() and not line.startswith(COMMENT_PREFIX)]
    if not rows:
        raise InvalidDataFileException(f'Shot data file {path} has no shots')

    try:
        frame: pd.DataFrame = pd.read_csv(StringIO('\n'.join(rows)), sep=r'\s+', header=None, dtype=float)
    except (ValueError, pd.errors.ParserError) as e:
        raise InvalidDataFileException(f'Malformed shot rows in {path}: {e}')
    if frame.isnull().values.any():
        raise InvalidDataFileException(f'Shots in {path} have different bin axes')

    metadata: Dict[str, str] = parse_metadata(comments)
    axis: Dict[str, float] = {key: float(metadata.pop(key)) for key in ('start_ns', 'bin_width_ns', 'delay_offset_ns')
                              if key in metadata}
    return ShotDataset(counts=frame.iloc[:, 1:].to_numpy(), shot_ids=frame.iloc[:, 0].to_numpy().astype(int),
                       metadata=metadata, **axis)
