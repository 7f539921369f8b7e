from io import StringIO
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
import pandas as pd

from h2dion.exceptions.simulation import InvalidDataFileException

COMMENT_PREFIX: str = '#'
METADATA_SEPARATOR: str = '='


def format_metadata(metadata: Optional[Dict[str, Any]]) -> List[str]:
    if not metadata:
        return []
    return [f'{COMMENT_PREFIX} {key} {METADATA_SEPARATOR} {value}' for key, value in metadata.items()]


def write_table(path: str,
                columns: Dict[str, np.ndarray],
                metadata: Optional[Dict[str, Any]] = None,
                float_format: str = '%.12e') -> str:
    """
    Write equally long columns as a whitespace-delimited table.
    Metadata goes to '#'-prefixed "key = value" lines, followed by a '#' line with the column names.
    """
    frame: pd.DataFrame = pd.DataFrame({name: np.asarray(values) for name, values in columns.items()})
    header: List[str] = format_metadata(metadata)
    header.append(f'{COMMENT_PREFIX} ' + ' '.join(frame.columns))

    body: str = frame.to_csv(sep=' ', header=False, index=False, float_format=float_format, na_rep='nan')
    with open(path, 'w') as f:
        f.write('\n'.join(header) + '\n')
        f.write(body)
    return path


def parse_metadata(lines: List[str]) -> Dict[str, str]:
    metadata: Dict[str, str] = {}
    for line in lines:
        content: str = line.lstrip(COMMENT_PREFIX).strip()
        if METADATA_SEPARATOR in content:
            key, value = content.split(METADATA_SEPARATOR, 1)
            metadata[key.strip()] = value.strip()
    return metadata


def read_table(path: str, names: Optional[List[str]] = None) -> Tuple[pd.DataFrame, Dict[str, str]]:
    """
    Read a '#'-commented delimited table (whitespace or comma separated).
    Returns the numeric frame and the metadata found in the comment lines.
    """
    try:
        with open(path, 'r') as f:
            content: str = f.read()
    except OSError as e:
        raise InvalidDataFileException(f'Cannot read data file {path}: {e}')

    comments: List[str] = [line for line in content.splitlines() if line.strip().startswith(COMMENT_PREFIX)]
    rows: List[str] = [line.replace(',', ' ') for line in content.splitlines()
                       if line.strip() and not line.strip().startswith(COMMENT_PREFIX)]

    if len(rows) == 0:
        raise InvalidDataFileException(f'Data file {path} has no data rows')

    try:
        frame: pd.DataFrame = pd.read_csv(StringIO('\n'.join(rows)), sep=r'\s+', header=None,
                                          names=names, dtype=float)
    except (ValueError, pd.errors.ParserError) as e:
        raise InvalidDataFileException(f'Malformed rows in data file {path}: {e}')

    if frame.isnull().values.any():
        raise InvalidDataFileException(f'Malformed rows in data file {path}: missing values')

    return frame, parse_metadata(comments)
