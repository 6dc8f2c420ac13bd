"""
Integrity Utilities
Dense Survival Forest Subgroup Profiler

Checksums for run manifests and keyed random streams for reproducible
parallel work.
"""

import hashlib
from pathlib import Path
from typing import Union

import numpy as np


def file_sha256(path: Union[str, Path], chunk_size: int = 1 << 20) -> str:
    """
    Compute the SHA-256 digest of a file

    Args:
        path: File to hash
        chunk_size: Bytes read per chunk

    Returns:
        Hex digest
    """
    digest = hashlib.sha256()
    with open(path, 'rb') as f:
        for chunk in iter(lambda: f.read(chunk_size), b''):
            digest.update(chunk)
    return digest.hexdigest()


def bytes_sha256(payload: bytes) -> str:
    """SHA-256 hex digest of an in-memory payload"""
    return hashlib.sha256(payload).hexdigest()


def keyed_rng(seed: int, *keys: int) -> np.random.Generator:
    """
    Random generator for the stream identified by (seed, *keys)

    Streams with different keys are statistically independent and do not
    depend on the order in which they are created, so tasks can run on any
    worker in any order.
    """
    entropy = [int(seed) & 0xFFFFFFFFFFFFFFFF] + [int(k) & 0xFFFFFFFFFFFFFFFF for k in keys]
    return np.random.default_rng(np.random.SeedSequence(entropy))
