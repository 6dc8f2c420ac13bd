"""
Pipeline Processor
Dense Survival Forest Subgroup Profiler

Runs the whole analysis for one configuration: load or simulate data,
calibrate p*, train the dense ensemble, scan the cluster counts, select a
profile and write every artifact plus a manifest.
"""

import configparser
import json
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union

import numpy as np

from config.settings import settings
from src import __version__
from src.calibration.calibration import (
    SOURCE_FIXED,
    TARGET_COVARIATES,
    TARGET_TREATMENT,
    CalibrationResult,
    calibrate_by_permutation,
    calibrate_by_simulation,
    ecdf_rows,
    scenario_statistics,
)
from src.ensemble.dense import FusedProximity, dense_train
from src.ensemble.grid import GRID_PARAMETERS, ParamGrid
from src.output.artifact_writer import ArtifactWriter
from src.processors.dataset_loader import ingest_csv
from src.profiling.heterogeneity import DF_LEAVES_MINUS_ONE, DF_MODES
from src.profiling.render import leaf_effects_rows, profile_to_document, render_profile_text
from src.profiling.selection import ProfileResult, passes_threshold, select_best_profile, selection_metric
from src.simulation.generator import generate_dataset
from src.simulation.scenarios import SCENARIO_NAMES, builtin_scenario
from src.survival.dataset import SurvivalDataset
from src.survival.statistics import km_estimate
from src.utils.errors import ConfigurationError, PipelineStageError, SurvProfileError
from src.utils.logger import StageLogger

CALIBRATION_SIMULATION = "simulation"
CALIBRATION_PERMUTATION = "permutation"
CALIBRATION_FIXED = "fixed"
CALIBRATION_MODES = (CALIBRATION_SIMULATION, CALIBRATION_PERMUTATION, CALIBRATION_FIXED)

# Replicates of each homogeneous scenario when calibrating by simulation
DEFAULT_CALIBRATION_REPLICATES = 50

_SECTIONS = {
    "data": ("dataset_path", "scenario", "n", "categorical"),
    "grid": GRID_PARAMETERS + ("ntree", "den", "preset", "minimum_leaf_size"),
    "profile": ("k_min", "k_max", "minimum_leaf_size", "df_mode", "apply_leaf_size_to_forest"),
    "calibration": ("mode", "alpha", "p_star", "n_perm", "replicates", "permutation_target"),
    "run": ("seed", "workers", "output_dir"),
}

# Fields that change where or how fast a run executes, never what it computes
_RUNTIME_FIELDS = ("workers", "output_dir")


def _int_list(text: str) -> Tuple[int, ...]:
    return tuple(int(v) for v in _split(text))


def _float_list(text: str) -> Tuple[float, ...]:
    return tuple(float(v) for v in _split(text))


def _split(text: str) -> List[str]:
    values = [v.strip() for v in str(text).split(",") if v.strip()]
    if not values:
        raise ConfigurationError(f"empty value list '{text}'")
    return values


def _boolean(text: str) -> bool:
    lowered = str(text).strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ConfigurationError(f"not a boolean: '{text}'")


@dataclass
class PipelineConfig:
    """Everything one pipeline run depends on"""
    dataset_path: Optional[str] = None
    scenario: Optional[str] = None
    n: int = 1000
    grid: ParamGrid = field(default_factory=lambda: ParamGrid.preset("desk"))
    k_min: int = settings.DEFAULT_K_MIN
    k_max: int = settings.DEFAULT_K_MAX
    min_leaf_size: int = settings.DEFAULT_MIN_LEAF_SIZE
    alpha: float = settings.DEFAULT_ALPHA
    calibration_mode: str = CALIBRATION_PERMUTATION
    p_star: Optional[float] = None
    n_perm: int = settings.DEFAULT_N_PERM
    calibration_replicates: int = DEFAULT_CALIBRATION_REPLICATES
    permutation_target: str = TARGET_COVARIATES
    df_mode: str = DF_LEAVES_MINUS_ONE
    apply_leaf_size_to_forest: bool = False
    seed: int = settings.DEFAULT_SEED
    workers: int = settings.MAX_WORKERS
    output_dir: str = str(settings.OUTPUT_DIR)
    categorical: Tuple[str, ...] = ()

    def validate(self) -> "PipelineConfig":
        """
        Check cross-field consistency

        Raises:
            ConfigurationError: On the first inconsistency
        """
        if (self.dataset_path is None) == (self.scenario is None):
            raise ConfigurationError("exactly one of dataset_path and scenario must be given")
        if self.scenario is not None and self.scenario not in SCENARIO_NAMES:
            raise ConfigurationError(f"unknown scenario '{self.scenario}' (choose from {', '.join(SCENARIO_NAMES)})")
        if not 0.0 < self.alpha < 1.0:
            raise ConfigurationError(f"alpha must lie in (0, 1), got {self.alpha}")
        if self.k_min < 2 or self.k_min > self.k_max:
            raise ConfigurationError(f"k range must satisfy 2 <= k_min <= k_max, got ({self.k_min}, {self.k_max})")
        if self.min_leaf_size < 1:
            raise ConfigurationError("minimum_leaf_size must be positive")
        if self.calibration_mode not in CALIBRATION_MODES:
            raise ConfigurationError(f"unknown calibration mode '{self.calibration_mode}'")
        if self.calibration_mode == CALIBRATION_FIXED:
            if self.p_star is None or not 0.0 <= self.p_star <= 1.0:
                raise ConfigurationError("fixed calibration needs p_star in [0, 1]")
        if self.calibration_mode == CALIBRATION_SIMULATION and self.calibration_replicates < 1:
            raise ConfigurationError("simulation calibration needs at least one replicate")
        if self.permutation_target not in (TARGET_COVARIATES, TARGET_TREATMENT):
            raise ConfigurationError(f"unknown permutation target '{self.permutation_target}'")
        if self.df_mode not in DF_MODES:
            raise ConfigurationError(f"unknown df_mode '{self.df_mode}'")
        if self.workers < 1:
            raise ConfigurationError("workers must be at least 1")
        if self.n < 1:
            raise ConfigurationError("n must be positive")
        return self

    @property
    def k_range(self) -> Tuple[int, int]:
        return (self.k_min, self.k_max)

    def effective_grid(self) -> ParamGrid:
        """The forest grid actually trained, seeded from the run seed"""
        grid = replace(self.grid, seed=self.seed)
        if self.apply_leaf_size_to_forest:
            grid = grid.with_min_nodesize(self.min_leaf_size)
        return grid

    def to_dict(self, include_runtime: bool = False) -> Dict:
        """
        Plain document of the configuration

        Args:
            include_runtime: Keep workers and output_dir, which never affect results

        Returns:
            Dictionary accepted by from_dict
        """
        document = {f.name: getattr(self, f.name) for f in fields(self)}
        document["grid"] = self.grid.to_dict()
        document["categorical"] = list(self.categorical)
        if not include_runtime:
            for name in _RUNTIME_FIELDS:
                document.pop(name)
        return document

    @classmethod
    def from_dict(cls, document: Dict) -> "PipelineConfig":
        values = dict(document)
        grid = values.pop("grid", None)
        if grid is not None:
            grid = {k: (tuple(v) if isinstance(v, list) else v) for k, v in grid.items()}
            values["grid"] = ParamGrid(**grid)
        values["categorical"] = tuple(values.get("categorical", ()))
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(values) - known)
        if unknown:
            raise ConfigurationError(f"unknown configuration field(s): {', '.join(unknown)}")
        return cls(**values)

    @classmethod
    def from_file(cls, path: Union[str, Path], **overrides) -> "PipelineConfig":
        """
        Load an INI configuration

        Sections [data], [grid], [profile], [calibration] and [run]; grid
        values are comma-separated lists. Unknown sections or keys are errors.

        Args:
            path: INI file
            **overrides: Field values that take precedence over the file

        Returns:
            Validated PipelineConfig
        """
        parser = configparser.ConfigParser(interpolation=None)
        parser.optionxform = str
        if not parser.read(path, encoding="utf-8"):
            raise ConfigurationError(f"configuration file not found: {path}")

        values: Dict = {}
        grid_values: Dict = {}
        preset = "desk"
        for section in parser.sections():
            if section not in _SECTIONS:
                raise ConfigurationError(f"unknown section [{section}] in {path}")
            for key, raw in parser.items(section):
                if key not in _SECTIONS[section]:
                    raise ConfigurationError(f"unknown key '{key}' in section [{section}] of {path}")
                if section == "grid" and key == "preset":
                    preset = raw.strip()
                elif section == "grid" and key in ("mtry", "nodedepth", "nsplit", "nodesize"):
                    grid_values[key] = _int_list(raw)
                elif section == "grid" and key == "weight":
                    grid_values[key] = _float_list(raw)
                elif key == "ntree":
                    grid_values[key] = int(raw)
                elif key == "den":
                    grid_values[key] = float(raw)
                else:
                    values.update(_convert(section, key, raw))

        values["grid"] = ParamGrid.preset(preset, **grid_values)
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values).validate()

    @classmethod
    def from_manifest(cls, path: Union[str, Path], **overrides) -> "PipelineConfig":
        """Configuration recorded in a run manifest"""
        with open(path, "r", encoding="utf-8") as handle:
            document = json.load(handle)
        if "config" not in document:
            raise ConfigurationError(f"{path} is not a run manifest")
        config = cls.from_dict(document["config"])
        values = {k: v for k, v in overrides.items() if v is not None}
        return replace(config, **values).validate()


def _convert(section: str, key: str, raw: str) -> Dict:
    """One INI entry as PipelineConfig fields"""
    raw = raw.strip()
    if key == "minimum_leaf_size":
        return {"min_leaf_size": int(raw)}
    if key == "mode":
        return {"calibration_mode": raw}
    if key == "replicates":
        return {"calibration_replicates": int(raw)}
    if key == "categorical":
        return {"categorical": tuple(_split(raw))}
    if key in ("n", "k_min", "k_max", "n_perm", "seed", "workers"):
        return {key: int(raw)}
    if key in ("alpha", "p_star"):
        return {key: float(raw)}
    if key == "apply_leaf_size_to_forest":
        return {key: _boolean(raw)}
    return {key: raw}


@dataclass
class PipelineOutcome:
    """Result of run_pipeline"""
    profile: ProfileResult
    calibration: CalibrationResult
    fused: FusedProximity
    artifacts: Dict[str, str]
    manifest_path: str


def load_dataset(config: PipelineConfig) -> SurvivalDataset:
    """The run's dataset: the CSV file, or the scenario simulated with the run seed"""
    if config.dataset_path is not None:
        schema = {name: "categorical" for name in config.categorical} or None
        return ingest_csv(config.dataset_path, schema=schema)
    return generate_dataset(builtin_scenario(config.scenario, n=config.n), config.seed).dataset


def calibrate(config: PipelineConfig, dataset: Optional[SurvivalDataset] = None) -> CalibrationResult:
    """
    Threshold p* for the configured calibration mode

    Simulation calibration pools the null and global scenarios at the run's
    sample size; their replicates use seeds derived from the run seed.
    """
    if config.calibration_mode == CALIBRATION_FIXED:
        return CalibrationResult(p_star=float(config.p_star), sample_count=0, alpha=config.alpha, source=SOURCE_FIXED)
    if config.calibration_mode == CALIBRATION_PERMUTATION:
        if dataset is None:
            dataset = load_dataset(config)
        return calibrate_by_permutation(dataset, config)

    n = dataset.n if dataset is not None else config.n
    replicates = config.calibration_replicates
    null_values = scenario_statistics(builtin_scenario("null", n=n), replicates, config, seed=config.seed + 1_000_000)
    global_values = scenario_statistics(builtin_scenario("global", n=n), replicates, config,
                                        seed=config.seed + 2_000_000)
    return calibrate_by_simulation(null_values, global_values, alpha=config.alpha)


def per_k_rows(profile: ProfileResult, p_star: float) -> List[Dict]:
    rows = []
    for candidate in profile.candidates:
        rows.append({
            "k": candidate.k,
            "num_leaves": candidate.num_leaves,
            "p_leaf": candidate.p_leaf,
            "metric": selection_metric(candidate.p_leaf, p_star),
            "passes": int(passes_threshold(candidate.p_leaf, p_star)),
            "selected": int(profile.k == candidate.k),
            "diagnostic": candidate.test.diagnostic or "",
        })
    return rows


def km_curves(dataset: SurvivalDataset, leaf_ids: np.ndarray) -> Dict:
    """Kaplan-Meier curve per (leaf, arm) group with at least one patient"""
    curves = {}
    for leaf in np.unique(leaf_ids):
        for arm in (0, 1):
            rows = np.flatnonzero((leaf_ids == leaf) & (dataset.treatment == arm))
            if rows.size:
                curves[f"leaf{int(leaf)}_arm{arm}"] = km_estimate(dataset.subset(rows))
    return curves


def write_calibration(writer: ArtifactWriter, calibration: CalibrationResult):
    writer.write_json("calibration.json", calibration.to_dict())
    rows = []
    for group in sorted(calibration.groups):
        rows.extend(ecdf_rows(group, calibration.groups[group]))
    if rows:
        writer.write_csv("ecdf.csv", rows, ["group", "p_leaf", "ecdf"])


def run_pipeline(config: PipelineConfig, proximity_csv: bool = False) -> PipelineOutcome:
    """
    Execute the full pipeline and write its artifacts

    Args:
        config: Validated configuration
        proximity_csv: Also write the fused proximity as proximity.csv

    Returns:
        PipelineOutcome; the verdict is in profile.heterogeneous

    Raises:
        PipelineStageError: Tagged with the stage that failed
    """
    config.validate()
    stages = StageLogger(__name__)
    writer = ArtifactWriter(config.output_dir)

    def stage(name, fn, *args):
        stages.enter(name)
        try:
            return fn(*args)
        except PipelineStageError:
            raise
        except (SurvProfileError, ValueError, OSError) as e:
            stages.error(str(e))
            raise PipelineStageError(name, str(e)) from e

    dataset = stage("load", load_dataset, config)
    stages.info(f"n={dataset.n}, p={dataset.p}, events={dataset.event_count}")

    calibration = stage("calibration", calibrate, config, dataset)
    stages.info(f"p* = {calibration.p_star:.6g} ({calibration.source}, m={calibration.sample_count})")

    grid = config.effective_grid()
    fused = stage("dense_train", dense_train, dataset, grid, config.workers)
    stages.info(f"{fused.config_count} configurations, {fused.total_trees} trees fused")

    profile = stage("profiling", select_best_profile, dataset, fused, config.k_range, calibration.p_star,
                    config.min_leaf_size, config.seed, config.df_mode)

    def write_outputs():
        writer.write_proximity("proximity.bin", fused.values)
        if proximity_csv:
            writer.write_proximity_csv("proximity.csv", fused.values)
        writer.write_csv("per_k.csv", per_k_rows(profile, calibration.p_star),
                         ["k", "num_leaves", "p_leaf", "metric", "passes", "selected", "diagnostic"])
        writer.write_text("profile.txt", render_profile_text(profile))
        writer.write_json("profile.json", profile_to_document(profile))
        writer.write_csv("leaf_effects.csv", leaf_effects_rows(profile.leaf_effects),
                         ["leaf", "n_control", "n_treated", "events_control", "events_treated",
                          "hazard_ratio", "logrank_p", "flags"])
        writer.write_km_curves("km_curves.csv", km_curves(dataset, profile.leaf_ids))
        write_calibration(writer, calibration)
        return writer.write_manifest(
            config.to_dict(),
            seeds={"run": config.seed, "grid": grid.seed, "configurations": [grid.seed, grid.seed + grid.size - 1]},
            extra={"package_version": __version__, "command": "run"},
        )

    manifest_path = stage("output", write_outputs)
    verdict = "heterogeneous" if profile.heterogeneous else "homogeneous"
    stages.info(f"Verdict: {verdict}; artifacts in {writer.output_dir}")
    return PipelineOutcome(profile, calibration, fused, dict(writer.artifacts), manifest_path)

