"""
Processors module
"""
from .dataset_loader import ingest_csv, export_dataset_csv, export_truth_csv
from .pipeline_processor import PipelineConfig, PipelineOutcome, run_pipeline, calibrate, load_dataset
from .batch_processor import ReplicateProcessor, ReplicateOutcome, METHOD_PROPOSED, METHOD_KMEANS

__all__ = [
    "ingest_csv",
    "export_dataset_csv",
    "export_truth_csv",
    "PipelineConfig",
    "PipelineOutcome",
    "run_pipeline",
    "calibrate",
    "load_dataset",
    "ReplicateProcessor",
    "ReplicateOutcome",
    "METHOD_PROPOSED",
    "METHOD_KMEANS",
]
