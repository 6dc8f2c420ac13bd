"""
Utils module
"""
from .logger import get_logger, StageLogger
from .integrity import file_sha256, keyed_rng
from .parallel import BatchRunner

__all__ = ["get_logger", "StageLogger", "file_sha256", "keyed_rng", "BatchRunner"]
