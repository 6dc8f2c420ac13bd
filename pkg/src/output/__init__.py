"""
Output module
"""
from .artifact_writer import ArtifactWriter, canonical, dumps_canonical, grid_to_pixels
from .proximity_store import write_proximity, read_proximity, export_proximity_csv, ProximityFormatError

__all__ = [
    "ArtifactWriter",
    "canonical",
    "dumps_canonical",
    "grid_to_pixels",
    "write_proximity",
    "read_proximity",
    "export_proximity_csv",
    "ProximityFormatError",
]
