"""
Survival Dataset
Dense Survival Forest Subgroup Profiler

Observed (time, event, treatment) triplets plus a covariate matrix and its
schema. Categorical covariates are stored as level indices in the same float
matrix as numeric ones.
"""

from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from src.utils.errors import EmptyDatasetError, DatasetValidationError

NUMERIC = "numeric"
CATEGORICAL = "categorical"


@dataclass(frozen=True)
class CovariateSpec:
    """Name and kind of one covariate column"""
    name: str
    kind: str = NUMERIC
    levels: Tuple[str, ...] = ()

    def __post_init__(self):
        if self.kind not in (NUMERIC, CATEGORICAL):
            raise ValueError(f"Unknown covariate kind: {self.kind}")
        if self.kind == CATEGORICAL and len(self.levels) < 1:
            raise ValueError(f"Categorical covariate {self.name} needs at least one level")

    @property
    def is_categorical(self) -> bool:
        return self.kind == CATEGORICAL

    @property
    def level_count(self) -> int:
        return len(self.levels)


@dataclass(frozen=True)
class SurvivalRecord:
    """One patient: observed time, event flag, arm and covariates"""
    time: float
    event: bool
    treatment: int
    covariates: Tuple[float, ...]


@dataclass
class SurvivalDataset:
    """Ordered collection of survival records sharing one covariate schema"""
    time: np.ndarray
    event: np.ndarray
    treatment: np.ndarray
    covariates: np.ndarray
    schema: Tuple[CovariateSpec, ...]
    ids: Optional[np.ndarray] = field(default=None, compare=False)

    def __post_init__(self):
        self.time = np.asarray(self.time, dtype=float)
        self.event = np.asarray(self.event, dtype=bool)
        self.treatment = np.asarray(self.treatment).astype(np.int8)
        self.covariates = np.asarray(self.covariates, dtype=float)
        self.schema = tuple(self.schema)
        if self.covariates.ndim == 1:
            self.covariates = self.covariates.reshape(-1, len(self.schema))
        self._validate()

    def _validate(self):
        n = self.time.shape[0]
        if n < 1:
            raise EmptyDatasetError()

        errors: List[str] = []
        if self.event.shape != (n,) or self.treatment.shape != (n,):
            errors.append("time, event and treatment must have the same length")
        if self.covariates.shape != (n, len(self.schema)):
            errors.append(
                f"covariate matrix has shape {self.covariates.shape}, expected ({n}, {len(self.schema)})"
            )
        if errors:
            raise DatasetValidationError(errors)

        if not np.all(np.isfinite(self.time)) or np.any(self.time < 0):
            row = int(np.flatnonzero(~(np.isfinite(self.time) & (self.time >= 0)))[0])
            raise DatasetValidationError([f"row {row}: time must be a non-negative number"], row=row, column="time")
        if np.any((self.treatment != 0) & (self.treatment != 1)):
            row = int(np.flatnonzero((self.treatment != 0) & (self.treatment != 1))[0])
            raise DatasetValidationError([f"row {row}: treatment must be 0 or 1"], row=row, column="treatment")
        if not np.all(np.isfinite(self.covariates)):
            row, col = (int(v[0]) for v in np.nonzero(~np.isfinite(self.covariates)))
            name = self.schema[col].name
            raise DatasetValidationError([f"row {row}: covariate {name} is missing"], row=row, column=name)

        for j, spec in enumerate(self.schema):
            if not spec.is_categorical:
                continue
            column = self.covariates[:, j]
            bad = (column < 0) | (column >= spec.level_count) | (column != np.floor(column))
            if np.any(bad):
                row = int(np.flatnonzero(bad)[0])
                raise DatasetValidationError(
                    [f"row {row}: level index of {spec.name} outside [0, {spec.level_count})"],
                    row=row, column=spec.name,
                )

    @property
    def n(self) -> int:
        return int(self.time.shape[0])

    @property
    def p(self) -> int:
        return len(self.schema)

    @property
    def covariate_names(self) -> List[str]:
        return [spec.name for spec in self.schema]

    @property
    def categorical_mask(self) -> np.ndarray:
        return np.array([spec.is_categorical for spec in self.schema], dtype=bool)

    @property
    def event_count(self) -> int:
        return int(self.event.sum())

    @property
    def records(self) -> List[SurvivalRecord]:
        return [
            SurvivalRecord(float(t), bool(d), int(w), tuple(float(v) for v in x))
            for t, d, w, x in zip(self.time, self.event, self.treatment, self.covariates)
        ]

    def subset(self, rows: Sequence[int]) -> "SurvivalDataset":
        """Dataset restricted to (possibly repeated) row indices, in the given order"""
        rows = np.asarray(rows, dtype=np.intp)
        return SurvivalDataset(
            time=self.time[rows],
            event=self.event[rows],
            treatment=self.treatment[rows],
            covariates=self.covariates[rows],
            schema=self.schema,
            ids=None if self.ids is None else self.ids[rows],
        )

    def with_covariates(self, covariates: np.ndarray) -> "SurvivalDataset":
        """Same outcomes and arms, replaced covariate matrix"""
        return SurvivalDataset(
            time=self.time.copy(),
            event=self.event.copy(),
            treatment=self.treatment.copy(),
            covariates=covariates,
            schema=self.schema,
            ids=self.ids,
        )

    def with_treatment(self, treatment: np.ndarray) -> "SurvivalDataset":
        return SurvivalDataset(
            time=self.time.copy(),
            event=self.event.copy(),
            treatment=treatment,
            covariates=self.covariates.copy(),
            schema=self.schema,
            ids=self.ids,
        )

    @classmethod
    def from_records(cls, records: Sequence[SurvivalRecord], schema: Sequence[CovariateSpec]) -> "SurvivalDataset":
        if not records:
            raise EmptyDatasetError()
        return cls(
            time=[r.time for r in records],
            event=[r.event for r in records],
            treatment=[r.treatment for r in records],
            covariates=np.array([r.covariates for r in records], dtype=float).reshape(len(records), len(schema)),
            schema=tuple(schema),
        )
