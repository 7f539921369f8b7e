"""
Binary wavepacket checkpoints.

Layout (little endian): 8-byte magic, uint64 version, int64 n_r, n_z1, n_z2,
float64 r_min, r_max, z_max, then the amplitudes as interleaved float64
real/imaginary pairs in (R, z1, z2) order.
"""
import struct

import numpy as np

from h2dion.exceptions.simulation import ArtifactIOException
from h2dion.numerics.grid import GridSpec
from h2dion.numerics.wavepacket import Representation, WavePacket
from h2dion.utils.h2dion_logger import H2DionLogger

logger: H2DionLogger = H2DionLogger(__name__, '[Checkpoint]')

MAGIC: bytes = b'H2DIONWP'
VERSION: int = 1
HEADER = struct.Struct('<8sQqqqddd')
AMPLITUDE_DTYPE = np.dtype('<c16')


def write_checkpoint(path: str, wp: WavePacket) -> str:
    wp.require(Representation.COORDINATE)
    header: bytes = HEADER.pack(MAGIC, VERSION, *wp.grid.as_header_values())
    try:
        with open(path, 'wb') as f:
            f.write(header)
            f.write(np.ascontiguousarray(wp.amplitudes, dtype=AMPLITUDE_DTYPE).tobytes(order='C'))
    except OSError as e:
        logger.error(f'Error while writing checkpoint {path}: {e}')
        raise ArtifactIOException(f'Cannot write checkpoint {path}: {e}')

    logger.debug(f'Wrote checkpoint {path} for grid {wp.grid.shape}')
    return path


def read_checkpoint(path: str) -> WavePacket:
    try:
        with open(path, 'rb') as f:
            raw_header: bytes = f.read(HEADER.size)
            payload: bytes = f.read()
    except OSError as e:
        raise ArtifactIOException(f'Cannot read checkpoint {path}: {e}')

    if len(raw_header) != HEADER.size:
        raise ArtifactIOException(f'Checkpoint {path} is truncated (incomplete header)')

    magic, version, n_r, n_z1, n_z2, r_min, r_max, z_max = HEADER.unpack(raw_header)
    if magic != MAGIC:
        raise ArtifactIOException(f'{path} is not a wavepacket checkpoint')
    if version != VERSION:
        raise ArtifactIOException(f'Unsupported checkpoint version {version} in {path}')

    grid: GridSpec = GridSpec(n_r=n_r, n_z1=n_z1, n_z2=n_z2, r_min=r_min, r_max=r_max, z_max=z_max)
    expected: int = n_r * n_z1 * n_z2 * AMPLITUDE_DTYPE.itemsize
    if len(payload) != expected:
        raise ArtifactIOException(f'Checkpoint {path} holds {len(payload)} bytes of amplitudes, expected {expected}')

    amplitudes: np.ndarray = np.frombuffer(payload, dtype=AMPLITUDE_DTYPE).reshape(grid.shape)
    return WavePacket(amplitudes.astype(np.complex128), grid)
