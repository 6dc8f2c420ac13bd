"""
Dataset Validator
Dense Survival Forest Subgroup Profiler
"""

from typing import List, Optional, Tuple

import numpy as np
import pandas as pd

from src.utils.logger import get_logger

logger = get_logger(__name__)

MANDATORY_COLUMNS = ("time", "event", "treatment")
ID_COLUMN = "id"


class DatasetValidator:
    """Checks a raw trial table before it becomes a SurvivalDataset"""

    def validate_frame(self, frame: pd.DataFrame) -> Tuple[bool, List[str], Optional[Tuple[int, str]]]:
        """
        Validate a table read with every cell as text

        Rows are reported 1-based, counting data rows after the header.

        Args:
            frame: Raw table

        Returns:
            Tuple of (is_valid, list_of_errors, (row, column) of the first error or None)
        """
        errors: List[str] = []
        first: Optional[Tuple[int, str]] = None

        missing = [column for column in MANDATORY_COLUMNS if column not in frame.columns]
        if missing:
            errors.append(f"Missing mandatory column(s): {', '.join(missing)}")
            logger.warning(f"Dataset validation failed: {errors[0]}")
            return False, errors, (0, missing[0])

        if frame.empty:
            errors.append("Dataset has no rows")
            return False, errors, None

        checks = (
            ("time", self.validate_time),
            ("event", self.validate_binary),
            ("treatment", self.validate_binary),
        )
        for column, check in checks:
            bad_rows, message = check(frame[column])
            for row in bad_rows:
                errors.append(f"row {row}, column '{column}': {message}")
            if bad_rows and first is None:
                first = (bad_rows[0], column)

        for column in self.covariate_columns(frame):
            cells = frame[column].astype(str).str.strip()
            empty = np.flatnonzero((cells == "").to_numpy()) + 1
            for row in empty:
                errors.append(f"row {row}, column '{column}': missing covariate value")
            if empty.size and first is None:
                first = (int(empty[0]), column)

        is_valid = len(errors) == 0
        if is_valid:
            logger.debug(f"Dataset validation successful: {len(frame)} rows")
        else:
            logger.warning(f"Dataset validation failed with {len(errors)} error(s); first: {errors[0]}")
        return is_valid, errors, first

    @staticmethod
    def covariate_columns(frame: pd.DataFrame) -> List[str]:
        return [c for c in frame.columns if c not in MANDATORY_COLUMNS and c != ID_COLUMN]

    @staticmethod
    def validate_time(cells: pd.Series) -> Tuple[List[int], str]:
        values = pd.to_numeric(cells.astype(str).str.strip(), errors="coerce")
        bad = values.isna() | (values < 0) | ~np.isfinite(values.fillna(0.0))
        return [int(i) + 1 for i in np.flatnonzero(bad.to_numpy())], "time must be a non-negative number"

    @staticmethod
    def validate_binary(cells: pd.Series) -> Tuple[List[int], str]:
        values = pd.to_numeric(cells.astype(str).str.strip(), errors="coerce")
        bad = ~values.isin([0, 1])
        return [int(i) + 1 for i in np.flatnonzero(bad.to_numpy())], "value must be 0 or 1"


# Global validator instance
dataset_validator = DatasetValidator()
