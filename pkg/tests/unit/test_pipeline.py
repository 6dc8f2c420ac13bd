"""
Pipeline Unit Tests
Dense Survival Forest Subgroup Profiler
"""

import json
from types import SimpleNamespace

import numpy as np
import pytest

from src.ensemble.grid import ParamGrid
from src.evaluation.gradient import DEFAULT_PAIR
from src.main import build_parser, main
from src.output.artifact_writer import MANIFEST_NAME
from src.output.proximity_store import read_proximity
from src.processors.batch_processor import METHOD_KMEANS, METHOD_PROPOSED, ReplicateProcessor
from src.processors.pipeline_processor import (
    CALIBRATION_FIXED,
    PipelineConfig,
    calibrate,
    km_curves,
    per_k_rows,
    run_pipeline,
)
from src.profiling.heterogeneity import HeterogeneityTest
from src.profiling.selection import KCandidate
from src.simulation.scenarios import builtin_scenario
from src.utils.errors import ConfigurationError, PipelineStageError

INI = """
[data]
scenario = scenario1
n = 150

[grid]
preset = desk
mtry = 2
ntree = 3

[profile]
k_min = 2
k_max = 3
minimum_leaf_size = 20

[calibration]
mode = fixed
p_star = 0.05

[run]
seed = 7
"""


def tiny_config(output_dir, **values):
    grid = ParamGrid(mtry=(2,), nodedepth=(2,), nsplit=(5,), nodesize=(15,), weight=(0.0, 0.5), ntree=3)
    defaults = dict(scenario="scenario1", n=150, grid=grid, k_min=2, k_max=3, min_leaf_size=20,
                    calibration_mode=CALIBRATION_FIXED, p_star=0.05, seed=11, workers=1,
                    output_dir=str(output_dir))
    defaults.update(values)
    return PipelineConfig(**defaults)


class TestPipelineConfig:
    """Test cases for PipelineConfig"""

    def test_from_file(self, tmp_path):
        """Test INI sections map onto the configuration"""
        path = tmp_path / "run.ini"
        path.write_text(INI, encoding="utf-8")
        config = PipelineConfig.from_file(path)

        assert config.scenario == "scenario1"
        assert config.grid.mtry == (2,)
        assert config.grid.ntree == 3
        assert config.grid.nodedepth == ParamGrid.preset("desk").nodedepth
        assert config.min_leaf_size == 20
        assert config.calibration_mode == CALIBRATION_FIXED
        assert config.p_star == 0.05
        assert config.seed == 7

    def test_overrides_beat_file(self, tmp_path):
        """Test keyword overrides take precedence"""
        path = tmp_path / "run.ini"
        path.write_text(INI, encoding="utf-8")

        assert PipelineConfig.from_file(path, seed=99, k_max=None).seed == 99

    def test_unknown_key(self, tmp_path):
        """Test unknown keys are rejected"""
        path = tmp_path / "run.ini"
        path.write_text(INI.replace("k_max = 3", "k_maximum = 3"), encoding="utf-8")
        with pytest.raises(ConfigurationError):
            PipelineConfig.from_file(path)

    def test_unknown_section(self, tmp_path):
        """Test unknown sections are rejected"""
        path = tmp_path / "run.ini"
        path.write_text(INI + "\n[extras]\nvalue = 1\n", encoding="utf-8")
        with pytest.raises(ConfigurationError):
            PipelineConfig.from_file(path)

    def test_missing_file(self, tmp_path):
        """Test a configuration path that does not exist"""
        with pytest.raises(ConfigurationError):
            PipelineConfig.from_file(tmp_path / "absent.ini")

    def test_validation(self, tmp_path):
        """Test cross-field checks"""
        with pytest.raises(ConfigurationError):
            tiny_config(tmp_path, dataset_path="x.csv").validate()
        with pytest.raises(ConfigurationError):
            tiny_config(tmp_path, k_min=4, k_max=3).validate()
        with pytest.raises(ConfigurationError):
            tiny_config(tmp_path, p_star=None).validate()
        with pytest.raises(ConfigurationError):
            tiny_config(tmp_path, df_mode="three").validate()

    def test_to_dict_excludes_runtime(self, tmp_path):
        """Test workers and output_dir stay out of the recorded configuration"""
        document = tiny_config(tmp_path, workers=4).to_dict()

        assert "workers" not in document
        assert "output_dir" not in document
        assert PipelineConfig.from_dict(document).to_dict() == document

    def test_effective_grid(self, tmp_path):
        """Test run seed and leaf-size floor reach the forest grid"""
        config = tiny_config(tmp_path, apply_leaf_size_to_forest=True)
        grid = config.effective_grid()

        assert grid.seed == 11
        assert grid.nodesize == (20,)

    def test_fixed_calibration(self, tmp_path):
        """Test fixed mode returns the given threshold"""
        result = calibrate(tiny_config(tmp_path))

        assert result.p_star == 0.05
        assert result.source == "fixed"


class TestRunPipeline:
    """Test cases for run_pipeline"""

    def test_artifacts_and_manifest(self, tmp_path):
        """Test every artifact is written and listed"""
        outcome = run_pipeline(tiny_config(tmp_path / "out"))
        manifest = json.loads((tmp_path / "out" / MANIFEST_NAME).read_text(encoding="utf-8"))

        expected = {"proximity.bin", "per_k.csv", "profile.txt", "profile.json", "leaf_effects.csv",
                    "km_curves.csv", "calibration.json"}
        assert expected <= set(manifest["artifacts"])
        assert manifest["config"]["seed"] == 11
        assert manifest["command"] == "run"
        assert outcome.fused.total_trees == 6
        assert (tmp_path / "out" / "profile.txt").read_text(encoding="utf-8").startswith("verdict: ")

    def test_reproducible_across_runs_and_workers(self, tmp_path):
        """Test byte-identical manifests for repeated runs and other worker counts"""
        run_pipeline(tiny_config(tmp_path / "a"))
        run_pipeline(tiny_config(tmp_path / "b"))
        run_pipeline(tiny_config(tmp_path / "c", workers=2))

        first = (tmp_path / "a" / MANIFEST_NAME).read_bytes()
        assert (tmp_path / "b" / MANIFEST_NAME).read_bytes() == first
        assert (tmp_path / "c" / MANIFEST_NAME).read_bytes() == first

    def test_rerun_from_manifest(self, tmp_path):
        """Test the manifest rebuilds the same configuration"""
        config = tiny_config(tmp_path / "a")
        outcome = run_pipeline(config)
        rebuilt = PipelineConfig.from_manifest(outcome.manifest_path, output_dir=str(tmp_path / "b"))

        assert rebuilt.to_dict() == config.to_dict()

    def test_stage_error(self, tmp_path):
        """Test failures are tagged with their stage"""
        bad = tmp_path / "bad.csv"
        bad.write_text("time,event,treatment\n1,1,0\n-2,1,1\n", encoding="utf-8")
        config = tiny_config(tmp_path / "out", scenario=None, dataset_path=str(bad))

        with pytest.raises(PipelineStageError) as info:
            run_pipeline(config)
        assert info.value.stage == "load"

    def test_km_curve_groups(self, small_dataset):
        """Test one curve per leaf and arm"""
        leaves = (small_dataset.covariates[:, 1] > 0).astype(int)

        assert sorted(km_curves(small_dataset, leaves)) == ["leaf0_arm0", "leaf0_arm1", "leaf1_arm0", "leaf1_arm1"]

    def test_per_k_rows_threshold_flag(self):
        """Test an underflowed p_leaf passes while p_leaf at p* does not"""
        candidates = [KCandidate(2, None, None, None, HeterogeneityTest(p_leaf=0.01, leaf_count=2)),
                      KCandidate(3, None, None, None, HeterogeneityTest(p_leaf=0.0, leaf_count=3))]
        rows = per_k_rows(SimpleNamespace(k=3, candidates=candidates), 0.01)

        assert [row["passes"] for row in rows] == [0, 1]
        assert [row["selected"] for row in rows] == [0, 1]
        assert [row["metric"] for row in rows] == [0.0, 0.0]


class TestReplicateProcessor:
    """Test cases for replicate processing"""

    def test_kmeans_replicates_with_gradients(self, tmp_path):
        """Test outcomes, gradients and summary rows"""
        processor = ReplicateProcessor(tiny_config(tmp_path), 0.05)
        spec = builtin_scenario("scenario1", n=150)
        outcomes = processor.run(spec, 2, METHOD_KMEANS, pair=DEFAULT_PAIR)

        assert [o.index for o in outcomes] == [0, 1]
        assert all(o.gradient.shape == (301, 301) for o in outcomes)
        averaged = processor.gradient(outcomes)
        assert averaged.values.shape == (301, 301)
        assert np.allclose(averaged.values, (outcomes[0].gradient.values + outcomes[1].gradient.values) / 2)
        rows = processor.summary_rows(outcomes)
        assert [row["method"] for row in rows] == [METHOD_KMEANS] * 2
        report = processor.recovery(outcomes)
        assert report.method == METHOD_KMEANS
        assert 0.0 <= report.rate_both <= 1.0

    def test_proposed_replicate(self, tmp_path):
        """Test the forest method on one replicate"""
        processor = ReplicateProcessor(tiny_config(tmp_path), 0.05)
        outcomes = processor.run(builtin_scenario("scenario1", n=150), 1, METHOD_PROPOSED)

        assert outcomes[0].gradient is None
        assert outcomes[0].profile.num_leaves >= 1
        with pytest.raises(ConfigurationError):
            processor.gradient(outcomes)

    def test_unknown_method(self, tmp_path):
        """Test methods outside the supported pair"""
        with pytest.raises(ConfigurationError):
            ReplicateProcessor(tiny_config(tmp_path), 0.05).run(builtin_scenario("null", n=50), 1, "forest")


class TestCommandLine:
    """Test cases for the command-line interface"""

    def common(self, output_dir):
        return ["--scenario", "scenario1", "--n", "150", "--ntree", "3", "--calibration", "fixed",
                "--p-star", "0.05", "--k-max", "3", "--min-leaf-size", "20", "--workers", "1",
                "--output-dir", str(output_dir)]

    def test_simulate(self, tmp_path):
        """Test the simulate command writes data and sidecars"""
        code = main(["simulate", "--scenario", "null", "--n", "40", "--seed", "3", "--output-dir", str(tmp_path)])

        assert code == 0
        assert (tmp_path / "null.csv").exists()
        assert (tmp_path / "null.schema.json").exists()
        assert (tmp_path / "null.truth.csv").exists()

    def test_run(self, tmp_path, capsys):
        """Test the run command prints the profile"""
        assert main(["run", *self.common(tmp_path)]) == 0
        assert capsys.readouterr().out.startswith("verdict: ")
        assert (tmp_path / MANIFEST_NAME).exists()

    def test_run_proximity_csv(self, tmp_path):
        """Test the proximity CSV copy matches the binary and is listed in the manifest"""
        assert main(["run", *self.common(tmp_path), "--proximity-csv"]) == 0
        manifest = json.loads((tmp_path / MANIFEST_NAME).read_text(encoding="utf-8"))
        values = read_proximity(tmp_path / "proximity.bin")
        copied = np.loadtxt(tmp_path / "proximity.csv", delimiter=",")

        assert "proximity.csv" in manifest["artifacts"]
        assert np.array_equal(copied, values)

    def test_run_without_proximity_csv(self, tmp_path):
        """Test the CSV copy is opt-in"""
        assert main(["run", *self.common(tmp_path)]) == 0
        assert not (tmp_path / "proximity.csv").exists()

    def test_run_error_exit_code(self, tmp_path):
        """Test invalid data exits with status 1"""
        bad = tmp_path / "bad.csv"
        bad.write_text("time,event,treatment\n1,2,0\n", encoding="utf-8")
        code = main(["run", "--data", str(bad), "--calibration", "fixed", "--p-star", "0.05",
                     "--output-dir", str(tmp_path / "out")])

        assert code == 1

    def test_missing_file_exit_code(self, tmp_path):
        """Test a dataset path that does not exist"""
        code = main(["baseline", "--data", str(tmp_path / "absent.csv"), "--calibration", "fixed",
                     "--p-star", "0.05", "--output-dir", str(tmp_path / "out")])

        assert code == 1

    def test_configuration_error_exit_code(self, tmp_path):
        """Test conflicting sources exit with status 1"""
        code = main(["run", "--scenario", "null", "--data", "x.csv", "--output-dir", str(tmp_path)])
        assert code == 1

    def test_parser_commands(self):
        """Test every subcommand is registered"""
        parser = build_parser()
        for command in ("simulate", "run", "calibrate", "gradient", "baseline", "report"):
            assert parser.parse_args([command, "--scenario", "null"]).command == command
