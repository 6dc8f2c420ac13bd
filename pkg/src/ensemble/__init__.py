"""
Dense ensemble module
"""
from .grid import ParamGrid, expand_grid, GRID_PARAMETERS
from .dense import FusedProximity, fuse_proximity, dense_train

__all__ = [
    "ParamGrid",
    "expand_grid",
    "GRID_PARAMETERS",
    "FusedProximity",
    "fuse_proximity",
    "dense_train",
]
