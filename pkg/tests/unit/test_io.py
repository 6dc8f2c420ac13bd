"""
Input and Output Unit Tests
Dense Survival Forest Subgroup Profiler
"""

import json

import numpy as np
import pandas as pd
import pytest
from PIL import Image

from src.evaluation.gradient import GradientGrid
from src.output.artifact_writer import MANIFEST_NAME, ArtifactWriter, canonical, dumps_canonical, grid_to_pixels
from src.output.proximity_store import ProximityFormatError, export_proximity_csv, read_proximity, write_proximity
from src.processors.dataset_loader import (
    export_dataset_csv,
    export_truth_csv,
    ingest_csv,
    schema_sidecar_path,
    truth_sidecar_path,
)
from src.simulation.generator import generate_dataset
from src.simulation.scenarios import builtin_scenario
from src.survival.dataset import CATEGORICAL, NUMERIC
from src.survival.statistics import KaplanMeierCurve
from src.utils.errors import DatasetValidationError
from src.utils.integrity import file_sha256
from src.validators.dataset_validator import DatasetValidator


def write_rows(path, header, rows):
    lines = [",".join(header)] + [",".join(str(v) for v in row) for row in rows]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


class TestDatasetValidator:
    """Test cases for DatasetValidator"""

    def setup_method(self):
        """Setup test fixtures"""
        self.validator = DatasetValidator()

    def test_valid_frame(self):
        """Test a clean table"""
        frame = pd.DataFrame({"time": ["1.5", "2"], "event": ["1", "0"], "treatment": ["0", "1"], "age": ["50", "61"]})
        is_valid, errors, first = self.validator.validate_frame(frame)

        assert is_valid
        assert errors == []
        assert first is None

    def test_negative_time_on_row_seven(self):
        """Test the first bad row is reported 1-based"""
        times = ["1.0"] * 10
        times[6] = "-3"
        frame = pd.DataFrame({"time": times, "event": ["1"] * 10, "treatment": ["0", "1"] * 5})
        is_valid, errors, first = self.validator.validate_frame(frame)

        assert not is_valid
        assert first == (7, "time")
        assert "row 7" in errors[0]

    def test_missing_column(self):
        """Test missing mandatory columns"""
        is_valid, errors, first = self.validator.validate_frame(pd.DataFrame({"time": ["1"], "event": ["1"]}))

        assert not is_valid
        assert first == (0, "treatment")

    def test_binary_columns(self):
        """Test event and treatment must be 0/1"""
        frame = pd.DataFrame({"time": ["1", "2"], "event": ["1", "2"], "treatment": ["yes", "0"]})
        _, errors, first = self.validator.validate_frame(frame)

        assert len(errors) == 2
        assert first == (2, "event")

    def test_empty_covariate_cell(self):
        """Test blank covariate values"""
        frame = pd.DataFrame({"time": ["1", "2"], "event": ["1", "0"], "treatment": ["0", "1"], "age": ["50", " "]})
        _, _, first = self.validator.validate_frame(frame)

        assert first == (2, "age")


class TestIngest:
    """Test cases for CSV ingestion and export"""

    def test_kind_inference(self, tmp_path):
        """Test numeric and categorical columns are recognized"""
        path = write_rows(tmp_path / "trial.csv", ["id", "time", "event", "treatment", "age", "stage"],
                          [["a", 10, 1, 0, 55.5, "II"], ["b", 12, 0, 1, 61, "I"], ["c", 7, 1, 1, 48, "II"]])
        data = ingest_csv(path)

        assert data.covariate_names == ["age", "stage"]
        assert [spec.kind for spec in data.schema] == [NUMERIC, CATEGORICAL]
        assert data.schema[1].levels == ("I", "II")
        assert list(data.covariates[:, 1]) == [1.0, 0.0, 1.0]
        assert list(data.ids) == ["a", "b", "c"]

    def test_declared_categorical(self, tmp_path):
        """Test a numeric-looking column declared categorical"""
        path = write_rows(tmp_path / "trial.csv", ["time", "event", "treatment", "ecog"],
                          [[1, 1, 0, 2], [2, 1, 1, 0], [3, 0, 0, 1]])
        data = ingest_csv(path, schema={"ecog": CATEGORICAL})

        assert data.schema[0].is_categorical
        assert data.schema[0].levels == ("0", "1", "2")

    def test_validation_error_names_row(self, tmp_path):
        """Test a bad time raises with its row and column"""
        path = write_rows(tmp_path / "trial.csv", ["time", "event", "treatment"],
                          [[1, 1, 0], [2, 1, 1], ["x", 1, 0]])
        with pytest.raises(DatasetValidationError) as info:
            ingest_csv(path)

        assert info.value.row == 3
        assert info.value.column == "time"

    def test_too_many_text_levels(self, tmp_path):
        """Test an undeclared free-text column"""
        rows = [[i + 1, 1, i % 2, f"name{i}"] for i in range(12)]
        path = write_rows(tmp_path / "trial.csv", ["time", "event", "treatment", "site"], rows)
        with pytest.raises(DatasetValidationError):
            ingest_csv(path)

    def test_round_trip(self, tmp_path, small_dataset):
        """Test export then ingest reproduces the dataset through the sidecar"""
        path = tmp_path / "small.csv"
        export_dataset_csv(small_dataset, path)
        data = ingest_csv(path)

        assert schema_sidecar_path(path).exists()
        assert np.array_equal(data.time, small_dataset.time)
        assert np.array_equal(data.covariates, small_dataset.covariates)
        assert data.schema == small_dataset.schema

    def test_truth_sidecar(self, tmp_path):
        """Test the latent truth file"""
        generated = generate_dataset(builtin_scenario("scenario1", n=30), 2)
        path = truth_sidecar_path(tmp_path / "scenario1.csv")
        export_truth_csv(generated, path)
        truth = pd.read_csv(path)

        assert path.name == "scenario1.truth.csv"
        assert list(truth.columns) == ["id", "event_time", "censor_time", "region"]
        assert np.allclose(truth["event_time"].to_numpy(), generated.event_time)


class TestProximityStore:
    """Test cases for the binary proximity format"""

    def test_round_trip(self, tmp_path):
        """Test exact bytes survive write and read"""
        values = np.random.default_rng(0).random((5, 5))
        path = write_proximity(tmp_path / "p.bin", values)

        assert read_proximity(path).tobytes() == values.tobytes()

    def test_bad_magic(self, tmp_path):
        """Test a file of another format"""
        path = tmp_path / "p.bin"
        path.write_bytes(b"NOTPROXY" + bytes(16))
        with pytest.raises(ProximityFormatError):
            read_proximity(path)

    def test_truncated(self, tmp_path):
        """Test a short payload"""
        path = write_proximity(tmp_path / "p.bin", np.eye(3))
        with open(path, "r+b") as handle:
            handle.truncate(30)
        with pytest.raises(ProximityFormatError):
            read_proximity(path)

    def test_csv_copy(self, tmp_path):
        """Test the text export"""
        path = export_proximity_csv(tmp_path / "p.csv", np.array([[1.0, 0.25], [0.25, 1.0]]))
        assert open(path, encoding="utf-8").read().splitlines() == ["1.0,0.25", "0.25,1.0"]


class TestArtifactWriter:
    """Test cases for ArtifactWriter"""

    def test_canonical_floats(self):
        """Test rounding and non-finite values"""
        assert canonical({"a": 0.1 + 0.2, "b": float("nan"), "c": np.int64(3)}) == {"a": 0.3, "b": None, "c": 3}
        assert dumps_canonical({"b": 1, "a": 2}).index('"a"') < dumps_canonical({"b": 1, "a": 2}).index('"b"')

    def test_grid_pixels(self):
        """Test -1, 0 and 1 map to 0, 128 and 255"""
        assert list(grid_to_pixels(np.array([-1.0, 0.0, 1.0, 2.0]))) == [0, 128, 255, 255]

    def test_manifest_lists_digests(self, tmp_path):
        """Test every artifact digest is recorded"""
        writer = ArtifactWriter(tmp_path)
        csv_path = writer.write_csv("rows.csv", [{"a": 1, "b": 0.5}, {"a": 2, "b": None}], ["a", "b"])
        writer.write_text("note.txt", "hello")
        manifest = json.loads(open(writer.write_manifest({"seed": 1}, {"run": 1}), encoding="utf-8").read())

        assert set(manifest["artifacts"]) == {"rows.csv", "note.txt"}
        assert manifest["artifacts"]["rows.csv"]["sha256"] == file_sha256(csv_path)
        assert MANIFEST_NAME not in manifest["artifacts"]
        assert open(csv_path, encoding="utf-8").read().splitlines() == ["a,b", "1,0.5", "2,"]

    def test_gradient_files(self, tmp_path):
        """Test CSV matrix and flipped grayscale image"""
        axis = np.array([-1.0, 0.0, 1.0])
        values = np.array([[-1.0, -1.0, -1.0], [0.0, 0.0, 0.0], [1.0, 1.0, 1.0]])
        csv_path, pgm_path = ArtifactWriter(tmp_path).write_gradient("gradient", GradientGrid(values, axis))

        lines = open(csv_path, encoding="utf-8").read().splitlines()
        assert lines[0] == "y\\x,-1.00,0.00,1.00"
        assert lines[1] == "-1.00,-1.000000,-1.000000,-1.000000"
        image = np.asarray(Image.open(pgm_path))
        assert image.shape == (3, 3)
        assert image[0, 0] == 255
        assert image[2, 0] == 0

    def test_km_curves(self, tmp_path):
        """Test one row per curve step"""
        curve = KaplanMeierCurve(np.array([0.0, 2.0]), np.array([1.0, 0.5]))
        path = ArtifactWriter(tmp_path).write_km_curves("km.csv", {"leaf0_arm1": curve})

        assert open(path, encoding="utf-8").read().splitlines() == [
            "group,time,survival", "leaf0_arm1,0.0,1.0", "leaf0_arm1,2.0,0.5",
        ]
