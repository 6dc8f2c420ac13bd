"""
Proximity Store
Dense Survival Forest Subgroup Profiler

Binary layout: 8-byte magic, two little-endian uint64 dimensions, then the
matrix as little-endian float64 in row-major order.
"""

import csv
import struct
from pathlib import Path
from typing import Union

import numpy as np

from config.settings import settings
from src.utils.errors import SurvProfileError
from src.utils.logger import get_logger

logger = get_logger(__name__)

MAGIC = b"SPROXv01"
_HEADER = struct.Struct("<8sQQ")


class ProximityFormatError(SurvProfileError, ValueError):
    """File is not a proximity matrix written by write_proximity"""


def write_proximity(path: Union[str, Path], values: np.ndarray) -> str:
    values = np.ascontiguousarray(values, dtype="<f8")
    if values.ndim != 2:
        raise ValueError(f"proximity must be 2-D, got shape {values.shape}")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "wb") as handle:
        handle.write(_HEADER.pack(MAGIC, values.shape[0], values.shape[1]))
        handle.write(values.tobytes(order="C"))
    logger.debug(f"Proximity written: {path} {values.shape}")
    return str(path)


def read_proximity(path: Union[str, Path]) -> np.ndarray:
    """
    Load a matrix written by write_proximity

    Raises:
        ProximityFormatError: On a wrong magic or a truncated payload
    """
    with open(path, "rb") as handle:
        header = handle.read(_HEADER.size)
        if len(header) != _HEADER.size:
            raise ProximityFormatError(f"{path}: truncated header")
        magic, rows, cols = _HEADER.unpack(header)
        if magic != MAGIC:
            raise ProximityFormatError(f"{path}: bad magic {magic!r}")
        payload = handle.read()
    expected = rows * cols * 8
    if len(payload) != expected:
        raise ProximityFormatError(f"{path}: expected {expected} bytes of values, found {len(payload)}")
    return np.frombuffer(payload, dtype="<f8").reshape(rows, cols).astype(float)


def export_proximity_csv(path: Union[str, Path], values: np.ndarray) -> str:
    """Plain-text copy of the matrix, one row per line"""
    path = Path(path)
    with open(path, "w", newline="", encoding=settings.CSV_ENCODING) as handle:
        writer = csv.writer(handle, delimiter=settings.CSV_DELIMITER)
        for row in np.asarray(values, dtype=float):
            writer.writerow([repr(float(v)) for v in row])
    return str(path)
