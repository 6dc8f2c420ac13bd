"""
Artifact Writer
Dense Survival Forest Subgroup Profiler

Writes every run artifact into one output directory and records its
SHA-256 digest for the run manifest. Machine-readable outputs carry no
timestamps so repeated runs are byte-identical.
"""

import csv
import json
import math
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence, Union

import numpy as np
from PIL import Image

from config.settings import settings
from src.evaluation.gradient import GradientGrid
from src.output.proximity_store import export_proximity_csv, write_proximity
from src.survival.statistics import KaplanMeierCurve
from src.utils.integrity import file_sha256
from src.utils.logger import get_logger

logger = get_logger(__name__)

MANIFEST_NAME = "manifest.json"
MANIFEST_VERSION = 1
JSON_SIGNIFICANT_DIGITS = 12


def canonical(value: Any) -> Any:
    """JSON-ready copy with floats rounded to 12 significant digits and NaN/inf as null"""
    if isinstance(value, dict):
        return {str(k): canonical(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [canonical(v) for v in value]
    if isinstance(value, np.ndarray):
        return [canonical(v) for v in value.tolist()]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if not math.isfinite(value):
            return None
        return float(f"{value:.{JSON_SIGNIFICANT_DIGITS}g}")
    if isinstance(value, Path):
        return str(value)
    return value


def dumps_canonical(document: Any) -> str:
    return json.dumps(canonical(document), indent=2, sort_keys=True) + "\n"


def grid_to_pixels(values: np.ndarray) -> np.ndarray:
    """[-1, 1] mapped linearly onto 0..255"""
    clipped = np.clip(np.asarray(values, dtype=float), -1.0, 1.0)
    return np.rint((clipped + 1.0) * 127.5).astype(np.uint8)


class ArtifactWriter:
    """Writes named artifacts into one directory and remembers their digests"""

    def __init__(self, output_dir: Optional[Union[str, Path]] = None):
        self.encoding = settings.CSV_ENCODING
        self.delimiter = settings.CSV_DELIMITER
        self.output_dir = Path(output_dir) if output_dir is not None else settings.OUTPUT_DIR
        self.output_dir.mkdir(parents=True, exist_ok=True)
        self.artifacts: Dict[str, str] = {}

    def path_for(self, name: str) -> Path:
        return self.output_dir / name

    def _record(self, name: str) -> str:
        path = self.path_for(name)
        self.artifacts[name] = file_sha256(path)
        logger.debug(f"Artifact written: {path}")
        return str(path)

    def write_csv(self, name: str, rows: Iterable[Dict], fieldnames: Sequence[str]) -> str:
        """
        Write dict rows as CSV

        Args:
            name: File name inside the output directory
            rows: Row dictionaries; missing keys become empty cells
            fieldnames: Column order

        Returns:
            Path to the CSV file
        """
        path = self.path_for(name)
        try:
            with open(path, "w", newline="", encoding=self.encoding) as handle:
                writer = csv.DictWriter(handle, fieldnames=list(fieldnames), delimiter=self.delimiter,
                                        quoting=csv.QUOTE_MINIMAL, extrasaction="ignore")
                writer.writeheader()
                count = 0
                for row in rows:
                    writer.writerow({k: _csv_value(v) for k, v in row.items()})
                    count += 1
            logger.info(f"CSV generated: {path} ({count} rows)")
            return self._record(name)
        except Exception as e:
            logger.error(f"Error writing {path}: {str(e)}")
            raise

    def write_json(self, name: str, document: Any) -> str:
        path = self.path_for(name)
        with open(path, "w", encoding=self.encoding, newline="\n") as handle:
            handle.write(dumps_canonical(document))
        return self._record(name)

    def write_text(self, name: str, text: str) -> str:
        path = self.path_for(name)
        with open(path, "w", encoding=self.encoding, newline="\n") as handle:
            handle.write(text if text.endswith("\n") else text + "\n")
        return self._record(name)

    def write_proximity(self, name: str, values: np.ndarray) -> str:
        write_proximity(self.path_for(name), values)
        return self._record(name)

    def write_proximity_csv(self, name: str, values: np.ndarray) -> str:
        export_proximity_csv(self.path_for(name), values)
        return self._record(name)

    def write_gradient(self, stem: str, grid: GradientGrid) -> List[str]:
        """
        Gradient grid as a 6-decimal CSV matrix and an 8-bit grayscale PGM

        Image rows run from the highest value of the second covariate down,
        so the picture reads like a plot.
        """
        csv_name, pgm_name = f"{stem}.csv", f"{stem}.pgm"
        with open(self.path_for(csv_name), "w", newline="", encoding=self.encoding) as handle:
            writer = csv.writer(handle, delimiter=self.delimiter)
            writer.writerow(["y\\x"] + [f"{x:.2f}" for x in grid.axis])
            for y, row in zip(grid.axis, grid.values):
                writer.writerow([f"{y:.2f}"] + [f"{v:.6f}" for v in row])
        self._record(csv_name)

        image = Image.fromarray(grid_to_pixels(grid.values)[::-1].copy(), mode="L")
        image.save(self.path_for(pgm_name), format="PPM")
        self._record(pgm_name)
        logger.info(f"Gradient written: {self.path_for(pgm_name)} {grid.shape}")
        return [str(self.path_for(csv_name)), str(self.path_for(pgm_name))]

    def write_km_curves(self, name: str, curves: Dict[str, KaplanMeierCurve]) -> str:
        """Step functions keyed by a group label, one row per step"""
        rows = []
        for group in sorted(curves):
            for t, s in curves[group].as_pairs():
                rows.append({"group": group, "time": t, "survival": s})
        return self.write_csv(name, rows, ["group", "time", "survival"])

    def write_manifest(self, config: Dict, seeds: Dict, extra: Optional[Dict] = None) -> str:
        """
        Manifest listing the configuration, seeds and digest of every artifact written so far

        The manifest itself is not listed.
        """
        document = {
            "version": MANIFEST_VERSION,
            "config": config,
            "seeds": seeds,
            "artifacts": {name: {"sha256": digest} for name, digest in sorted(self.artifacts.items())},
        }
        if extra:
            document.update(extra)
        path = self.path_for(MANIFEST_NAME)
        with open(path, "w", encoding=self.encoding, newline="\n") as handle:
            handle.write(dumps_canonical(document))
        logger.info(f"Manifest written: {path} ({len(self.artifacts)} artifacts)")
        return str(path)


def _csv_value(value: Any) -> Any:
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return "" if not math.isfinite(value) else repr(float(f"{value:.{JSON_SIGNIFICANT_DIGITS}g}"))
    if value is None:
        return ""
    return value
