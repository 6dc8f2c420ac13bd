"""
Main Entry Point
Dense Survival Forest Subgroup Profiler
"""

import argparse
import sys
from dataclasses import replace
from pathlib import Path
from typing import Dict, List, Optional

# Add src to path
sys.path.insert(0, str(Path(__file__).parent.parent))

from config.settings import settings
from src import __version__
from src.calibration.calibration import (
    TARGET_COVARIATES,
    TARGET_TREATMENT,
    CalibrationResult,
    ecdf_distance,
    scenario_statistics,
)
from src.ensemble.grid import ParamGrid
from src.evaluation.baseline import kmeans_baseline
from src.evaluation.gradient import DEFAULT_PAIR, true_region_gradient
from src.output.artifact_writer import ArtifactWriter
from src.processors.batch_processor import METHOD_KMEANS, METHOD_PROPOSED, METHODS, ReplicateProcessor
from src.processors.dataset_loader import export_dataset_csv, export_truth_csv, truth_sidecar_path
from src.processors.pipeline_processor import (
    CALIBRATION_MODES,
    PipelineConfig,
    calibrate,
    load_dataset,
    run_pipeline,
    write_calibration,
)
from src.profiling.heterogeneity import DF_MODES
from src.profiling.render import leaf_effects_rows, profile_to_document, render_profile_text
from src.simulation.generator import generate_dataset
from src.simulation.scenarios import MULTIPLIER_CONSTANT, MULTIPLIER_SUM, SCENARIO_NAMES, builtin_scenario
from src.utils.errors import ConfigurationError, PipelineStageError, SurvProfileError
from src.utils.logger import get_logger

logger = get_logger(__name__)

# CLI flag -> PipelineConfig field
_OVERRIDES = {
    "data": "dataset_path",
    "scenario": "scenario",
    "n": "n",
    "seed": "seed",
    "workers": "workers",
    "output_dir": "output_dir",
    "calibration": "calibration_mode",
    "p_star": "p_star",
    "alpha": "alpha",
    "n_perm": "n_perm",
    "calibration_replicates": "calibration_replicates",
    "permutation_target": "permutation_target",
    "k_min": "k_min",
    "k_max": "k_max",
    "min_leaf_size": "min_leaf_size",
    "df_mode": "df_mode",
}


def _add_config_arguments(parser: argparse.ArgumentParser, with_manifest: bool = False):
    source = parser.add_argument_group("configuration")
    source.add_argument("--config", help="INI configuration file")
    if with_manifest:
        source.add_argument("--manifest", help="Re-run from a run manifest")
    source.add_argument("--data", help="Trial CSV (id, time, event, treatment, covariates)")
    source.add_argument("--scenario", choices=SCENARIO_NAMES, help="Simulated scenario instead of a CSV")
    source.add_argument("--n", type=int, help="Simulated sample size")
    source.add_argument("--preset", choices=("case_study", "simulation", "desk"), help="Forest grid preset")
    source.add_argument("--ntree", type=int, help="Trees per forest configuration")
    source.add_argument("--seed", type=int, help="Base seed")
    source.add_argument("--workers", type=int, help="Worker processes for every parallel stage")
    source.add_argument("--output-dir", dest="output_dir", help="Artifact directory")
    source.add_argument("--calibration", choices=CALIBRATION_MODES, help="How p* is obtained")
    source.add_argument("--p-star", dest="p_star", type=float, help="Threshold for --calibration fixed")
    source.add_argument("--alpha", type=float, help="Target false-heterogeneity rate")
    source.add_argument("--n-perm", dest="n_perm", type=int, help="Permutations for permutation calibration")
    source.add_argument("--calibration-replicates", dest="calibration_replicates", type=int,
                        help="Null and global replicates for simulation calibration")
    source.add_argument("--permutation-target", dest="permutation_target",
                        choices=(TARGET_COVARIATES, TARGET_TREATMENT))
    source.add_argument("--k-min", dest="k_min", type=int)
    source.add_argument("--k-max", dest="k_max", type=int)
    source.add_argument("--min-leaf-size", dest="min_leaf_size", type=int, help="Minimum profile leaf size")
    source.add_argument("--df-mode", dest="df_mode", choices=DF_MODES, help="Degrees of freedom of the leaf test")


def build_config(args: argparse.Namespace) -> PipelineConfig:
    """
    PipelineConfig from a manifest, a config file or flags alone

    Flags override file values, which override settings defaults.
    """
    overrides: Dict = {field: getattr(args, flag, None) for flag, field in _OVERRIDES.items()}
    overrides = {k: v for k, v in overrides.items() if v is not None}

    if getattr(args, "manifest", None):
        config = PipelineConfig.from_manifest(args.manifest, **overrides)
    elif args.config:
        config = PipelineConfig.from_file(args.config, **overrides)
    else:
        config = PipelineConfig(**overrides)

    if args.preset:
        config = replace(config, grid=ParamGrid.preset(args.preset, seed=config.seed))
    if args.ntree:
        config = replace(config, grid=replace(config.grid, ntree=args.ntree))
    return config.validate()


def _resolve_p_star(config: PipelineConfig) -> CalibrationResult:
    calibration = calibrate(config)
    logger.info(f"p* = {calibration.p_star:.6g} ({calibration.source})")
    return calibration


def _manifest(writer: ArtifactWriter, config: PipelineConfig, command: str, extra: Optional[Dict] = None) -> str:
    document = {"package_version": __version__, "command": command}
    document.update(extra or {})
    return writer.write_manifest(config.to_dict(), seeds={"run": config.seed}, extra=document)


def cmd_simulate(args: argparse.Namespace) -> int:
    """Simulate one dataset with its truth sidecar"""
    logger.info(f"=== Simulating {args.scenario} (n={args.n}, seed={args.seed}) ===")
    spec = builtin_scenario(args.scenario, n=args.n, multiplier=args.multiplier)
    generated = generate_dataset(spec, args.seed)

    output_dir = Path(args.output_dir)
    path = export_dataset_csv(generated.dataset, output_dir / f"{args.scenario}.csv")
    export_truth_csv(generated, truth_sidecar_path(path))

    events = generated.dataset.event_count
    logger.info(f"Dataset: {path} ({events} events, {generated.dataset.n - events} censored)")
    return 0


def cmd_run(args: argparse.Namespace) -> int:
    config = build_config(args)
    logger.info("=== Dense survival forest pipeline ===")
    outcome = run_pipeline(config, proximity_csv=args.proximity_csv)
    print(render_profile_text(outcome.profile), end="")
    logger.info(f"Manifest: {outcome.manifest_path}")
    return 0


def cmd_calibrate(args: argparse.Namespace) -> int:
    """Calibrate p* and export the p_leaf ECDF data"""
    config = build_config(args)
    logger.info(f"=== Calibration ({config.calibration_mode}) ===")
    calibration = _resolve_p_star(config)
    writer = ArtifactWriter(config.output_dir)

    distances = {}
    if args.compare_scenario:
        n = config.n
        spec = builtin_scenario(args.compare_scenario, n=n)
        compared = scenario_statistics(spec, config.calibration_replicates, config, seed=config.seed + 3_000_000)
        calibration.groups[args.compare_scenario] = compared
        if calibration.values:
            distances[f"{args.compare_scenario}_vs_pooled"] = ecdf_distance(compared, calibration.values)
        if "null" in calibration.groups and "global" in calibration.groups:
            distances["null_vs_global"] = ecdf_distance(calibration.groups["null"], calibration.groups["global"])

    write_calibration(writer, calibration)
    if distances:
        writer.write_json("ecdf_distances.json", distances)
        for name, value in sorted(distances.items()):
            logger.info(f"KS distance {name}: {value:.4f}")
    _manifest(writer, config, "calibrate", {"compare_scenario": args.compare_scenario})
    print(f"p* = {calibration.p_star:.6g}")
    return 0


def cmd_gradient(args: argparse.Namespace) -> int:
    """Averaged gradient grid over simulated replicates, plus the true-region grid"""
    config = build_config(args)
    if config.scenario is None:
        raise ConfigurationError("gradient needs --scenario")
    calibration = _resolve_p_star(config)
    spec = builtin_scenario(config.scenario, n=config.n)
    processor = ReplicateProcessor(config, calibration.p_star)
    outcomes = processor.run(spec, args.replicates, args.method, pair=DEFAULT_PAIR)

    writer = ArtifactWriter(config.output_dir)
    writer.write_gradient(f"gradient_{args.method}", processor.gradient(outcomes))
    writer.write_gradient("gradient_truth", true_region_gradient(spec))
    writer.write_csv(f"replicates_{args.method}.csv", processor.summary_rows(outcomes),
                     ["replicate", "method", "k", "num_leaves", "p_leaf", "heterogeneous", "bidirectional",
                      "split_variables"])
    _manifest(writer, config, "gradient", {"method": args.method, "replicates": args.replicates,
                                           "p_star": calibration.p_star})
    return 0


def cmd_baseline(args: argparse.Namespace) -> int:
    """K-means baseline profile of one dataset"""
    config = build_config(args)
    dataset = load_dataset(config)
    calibration = calibrate(config, dataset)
    profile = kmeans_baseline(dataset, config.k_range, config.min_leaf_size, config.seed,
                              calibration.p_star, config.df_mode)

    writer = ArtifactWriter(config.output_dir)
    writer.write_text("baseline_profile.txt", render_profile_text(profile))
    writer.write_json("baseline_profile.json", profile_to_document(profile))
    writer.write_csv("baseline_leaf_effects.csv", leaf_effects_rows(profile.leaf_effects),
                     ["leaf", "n_control", "n_treated", "events_control", "events_treated",
                      "hazard_ratio", "logrank_p", "flags"])
    _manifest(writer, config, "baseline", {"p_star": calibration.p_star})
    print(render_profile_text(profile), end="")
    return 0


def cmd_report(args: argparse.Namespace) -> int:
    """Covariate recovery of both methods on the same replicates"""
    config = build_config(args)
    if config.scenario is None:
        raise ConfigurationError("report needs --scenario")
    calibration = _resolve_p_star(config)
    spec = builtin_scenario(config.scenario, n=config.n)
    processor = ReplicateProcessor(config, calibration.p_star)

    rows: List[Dict] = []
    replicate_rows: List[Dict] = []
    for method in (METHOD_PROPOSED, METHOD_KMEANS):
        outcomes = processor.run(spec, args.replicates, method)
        report = processor.recovery(outcomes, declared_only=not args.all_replicates)
        rows.extend(report.rows())
        replicate_rows.extend(processor.summary_rows(outcomes))
        logger.info(
            f"{method}: {report.target_names[0]} {report.rate_first:.0%}, "
            f"{report.target_names[1]} {report.rate_second:.0%}, both {report.rate_both:.0%}"
        )

    writer = ArtifactWriter(config.output_dir)
    writer.write_csv("recovery.csv", rows, ["method", "measure", "value"])
    writer.write_csv("replicates.csv", replicate_rows,
                     ["replicate", "method", "k", "num_leaves", "p_leaf", "heterogeneous", "bidirectional",
                      "split_variables"])
    _manifest(writer, config, "report", {"replicates": args.replicates, "p_star": calibration.p_star})
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="survprofile",
        description="Treatment-effect heterogeneity profiles from dense random survival forests",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    commands = parser.add_subparsers(dest="command", required=True)

    simulate = commands.add_parser("simulate", help="Write a simulated trial CSV with its truth sidecar")
    simulate.add_argument("--scenario", required=True, choices=SCENARIO_NAMES)
    simulate.add_argument("--n", type=int, default=1000)
    simulate.add_argument("--seed", type=int, default=settings.DEFAULT_SEED)
    simulate.add_argument("--multiplier", choices=(MULTIPLIER_CONSTANT, MULTIPLIER_SUM), default=MULTIPLIER_CONSTANT)
    simulate.add_argument("--output-dir", dest="output_dir", default=str(settings.OUTPUT_DIR))
    simulate.set_defaults(handler=cmd_simulate)

    run = commands.add_parser("run", help="Full pipeline: calibrate, train, cluster, profile")
    _add_config_arguments(run, with_manifest=True)
    run.add_argument("--proximity-csv", dest="proximity_csv", action="store_true",
                     help="Also export the fused proximity as proximity.csv")
    run.set_defaults(handler=cmd_run)

    calibrate_parser = commands.add_parser("calibrate", help="Calibrate p* and export ECDF data")
    _add_config_arguments(calibrate_parser)
    calibrate_parser.add_argument("--compare-scenario", dest="compare_scenario", choices=SCENARIO_NAMES,
                                  help="Also compute this scenario's statistics for ECDF comparison")
    calibrate_parser.set_defaults(handler=cmd_calibrate)

    gradient = commands.add_parser("gradient", help="Averaged gradient grid over replicates")
    _add_config_arguments(gradient)
    gradient.add_argument("--replicates", type=int, default=settings.DEFAULT_GRADIENT_REPLICATES)
    gradient.add_argument("--method", choices=METHODS, default=METHOD_PROPOSED)
    gradient.set_defaults(handler=cmd_gradient)

    baseline = commands.add_parser("baseline", help="K-means baseline profile")
    _add_config_arguments(baseline)
    baseline.set_defaults(handler=cmd_baseline)

    report = commands.add_parser("report", help="Covariate recovery tables for both methods")
    _add_config_arguments(report)
    report.add_argument("--replicates", type=int, default=20)
    report.add_argument("--all-replicates", dest="all_replicates", action="store_true",
                        help="Count every replicate, not only those declaring heterogeneity")
    report.set_defaults(handler=cmd_report)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """
    Command-line entry point

    Returns:
        0 when the command completed (whatever the verdict), 1 on error
    """
    args = build_parser().parse_args(argv)
    try:
        return args.handler(args)
    except PipelineStageError as e:
        logger.error(f"[{e.stage}] {e.message}")
        return 1
    except (SurvProfileError, OSError) as e:
        logger.error(f"[{args.command}] {str(e)}")
        return 1


if __name__ == "__main__":
    sys.exit(main())
