"""
Dataset Loader
Dense Survival Forest Subgroup Profiler

CSV ingestion and export. Columns: id (optional, not analysed), time,
event (0/1), treatment (0/1); every other column is a covariate.
"""

import csv
import json
from pathlib import Path
from typing import Dict, List, Mapping, Optional, Sequence, Union

import numpy as np
import pandas as pd

from config.settings import settings
from src.simulation.generator import GeneratedDataset
from src.survival.dataset import CATEGORICAL, NUMERIC, CovariateSpec, SurvivalDataset
from src.utils.errors import DatasetValidationError
from src.utils.logger import get_logger
from src.validators.dataset_validator import ID_COLUMN, dataset_validator

logger = get_logger(__name__)

SchemaDeclaration = Union[Sequence[CovariateSpec], Mapping[str, str], None]


def schema_sidecar_path(path: Union[str, Path]) -> Path:
    path = Path(path)
    return path.with_name(f"{path.stem}.schema.json")


def truth_sidecar_path(path: Union[str, Path]) -> Path:
    path = Path(path)
    return path.with_name(f"{path.stem}.truth.csv")


def _declared_specs(schema: SchemaDeclaration) -> Dict[str, CovariateSpec]:
    if schema is None:
        return {}
    if isinstance(schema, Mapping):
        return {name: CovariateSpec(name, kind, ("_",) if kind == CATEGORICAL else ())
                for name, kind in schema.items()}
    return {spec.name: spec for spec in schema}


def _load_sidecar(path: Path) -> Optional[List[CovariateSpec]]:
    sidecar = schema_sidecar_path(path)
    if not sidecar.exists():
        return None
    with open(sidecar, "r", encoding=settings.CSV_ENCODING) as handle:
        document = json.load(handle)
    logger.debug(f"Using schema sidecar {sidecar}")
    return [CovariateSpec(c["name"], c["kind"], tuple(c.get("levels", ()))) for c in document["covariates"]]


def _encode_column(name: str, cells: pd.Series, declared: Optional[CovariateSpec]):
    """(CovariateSpec, float column) for one covariate"""
    text = cells.astype(str).str.strip()
    numeric = pd.to_numeric(text, errors="coerce")
    kind = declared.kind if declared is not None else None

    if kind == NUMERIC or (kind is None and not numeric.isna().any()):
        if numeric.isna().any():
            row = int(np.flatnonzero(numeric.isna().to_numpy())[0]) + 1
            raise DatasetValidationError([f"row {row}, column '{name}': not a number"], row=row, column=name)
        return CovariateSpec(name, NUMERIC), numeric.to_numpy(dtype=float)

    observed = sorted(set(text))
    if declared is not None and declared.levels and declared.levels != ("_",):
        levels = tuple(declared.levels)
        unknown = [value for value in observed if value not in levels]
        if unknown:
            row = int(np.flatnonzero(text.isin(unknown).to_numpy())[0]) + 1
            raise DatasetValidationError([f"row {row}, column '{name}': unknown level '{unknown[0]}'"],
                                         row=row, column=name)
    else:
        if kind is None and len(observed) > settings.CATEGORICAL_MAX_LEVELS:
            raise DatasetValidationError(
                [f"column '{name}': {len(observed)} distinct non-numeric values; declare its kind"], column=name
            )
        levels = tuple(observed)
    codes = text.map({level: i for i, level in enumerate(levels)}).to_numpy(dtype=float)
    return CovariateSpec(name, CATEGORICAL, levels), codes


def ingest_csv(path: Union[str, Path], schema: SchemaDeclaration = None) -> SurvivalDataset:
    """
    Read a trial CSV into a SurvivalDataset

    Covariate kinds come from the declaration, else from a `<stem>.schema.json`
    sidecar, else are inferred: all-numeric columns are numeric and columns
    with at most 10 distinct non-numeric values are categorical.

    Args:
        path: CSV file with a header row
        schema: CovariateSpec list or {name: kind} mapping

    Returns:
        SurvivalDataset

    Raises:
        DatasetValidationError: With the row and column of the first problem
    """
    path = Path(path)
    logger.info(f"Reading dataset: {path}")
    frame = pd.read_csv(path, dtype=str, keep_default_na=False, encoding=settings.CSV_ENCODING,
                        sep=settings.CSV_DELIMITER)
    frame.columns = [str(c).strip() for c in frame.columns]

    is_valid, errors, first = dataset_validator.validate_frame(frame)
    if not is_valid:
        row, column = first if first is not None else (None, None)
        raise DatasetValidationError(errors, row=row, column=column)

    if schema is None:
        schema = _load_sidecar(path)
    declared = _declared_specs(schema)

    specs, columns = [], []
    for name in dataset_validator.covariate_columns(frame):
        spec, values = _encode_column(name, frame[name], declared.get(name))
        specs.append(spec)
        columns.append(values)

    covariates = np.column_stack(columns) if columns else np.zeros((len(frame), 0))
    ids = frame[ID_COLUMN].to_numpy() if ID_COLUMN in frame.columns else None
    dataset = SurvivalDataset(
        time=pd.to_numeric(frame["time"]).to_numpy(dtype=float),
        event=pd.to_numeric(frame["event"]).to_numpy(dtype=int).astype(bool),
        treatment=pd.to_numeric(frame["treatment"]).to_numpy(dtype=int),
        covariates=covariates,
        schema=tuple(specs),
        ids=ids,
    )
    logger.info(f"Loaded {dataset.n} rows, {dataset.p} covariates, {dataset.event_count} events")
    return dataset


def _cell(spec: CovariateSpec, value: float) -> str:
    if spec.is_categorical:
        return spec.levels[int(value)]
    return repr(float(value))


def export_dataset_csv(dataset: SurvivalDataset, path: Union[str, Path], with_schema: bool = True) -> str:
    """
    Write a dataset in the ingest format

    Floats are written with repr so a re-read reproduces them exactly.

    Returns:
        Path of the CSV
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    names = dataset.covariate_names
    ids = dataset.ids if dataset.ids is not None else np.arange(1, dataset.n + 1)
    with open(path, "w", newline="", encoding=settings.CSV_ENCODING) as handle:
        writer = csv.writer(handle, delimiter=settings.CSV_DELIMITER, quoting=csv.QUOTE_MINIMAL)
        writer.writerow([ID_COLUMN, "time", "event", "treatment"] + names)
        for i in range(dataset.n):
            writer.writerow(
                [ids[i], repr(float(dataset.time[i])), int(dataset.event[i]), int(dataset.treatment[i])]
                + [_cell(spec, dataset.covariates[i, j]) for j, spec in enumerate(dataset.schema)]
            )

    if with_schema:
        document = {"covariates": [{"name": s.name, "kind": s.kind, "levels": list(s.levels)}
                                   for s in dataset.schema]}
        with open(schema_sidecar_path(path), "w", encoding=settings.CSV_ENCODING) as handle:
            json.dump(document, handle, indent=2, sort_keys=True)
            handle.write("\n")

    logger.info(f"Dataset written: {path} ({dataset.n} rows)")
    return str(path)


def export_truth_csv(generated: GeneratedDataset, path: Union[str, Path]) -> str:
    """Latent event time, censoring time and true region per row"""
    path = Path(path)
    ids = generated.dataset.ids if generated.dataset.ids is not None else np.arange(1, generated.dataset.n + 1)
    with open(path, "w", newline="", encoding=settings.CSV_ENCODING) as handle:
        writer = csv.DictWriter(handle, fieldnames=["id", "event_time", "censor_time", "region"],
                                delimiter=settings.CSV_DELIMITER)
        writer.writeheader()
        for i in range(generated.dataset.n):
            writer.writerow({
                "id": ids[i],
                "event_time": repr(float(generated.event_time[i])),
                "censor_time": repr(float(generated.censor_time[i])),
                "region": generated.region[i],
            })
    return str(path)
