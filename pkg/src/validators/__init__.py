"""
Validators module
"""
from .dataset_validator import DatasetValidator, dataset_validator

__all__ = ["DatasetValidator", "dataset_validator"]
