"""
Utility Unit Tests
Dense Survival Forest Subgroup Profiler
"""

import numpy as np
import pytest

from src.utils.errors import DatasetValidationError, PipelineStageError, SurvProfileError
from src.utils.integrity import bytes_sha256, file_sha256, keyed_rng
from src.utils.logger import StageLogger
from src.utils.parallel import BatchRunner


def square_plus(value, offset):
    return value * value + offset


def fail_on_three(value):
    if value == 3:
        raise ValueError("three")
    return value


class TestIntegrity:
    """Test cases for checksums and keyed streams"""

    def test_keyed_streams_reproducible(self):
        """Test the same keys give the same draws"""
        assert np.array_equal(keyed_rng(5, 1, 2).random(4), keyed_rng(5, 1, 2).random(4))

    def test_keyed_streams_differ(self):
        """Test different keys give different draws"""
        assert not np.array_equal(keyed_rng(5, 1).random(4), keyed_rng(5, 2).random(4))
        assert not np.array_equal(keyed_rng(5).random(4), keyed_rng(6).random(4))

    def test_file_digest(self, tmp_path):
        """Test the file digest equals the payload digest"""
        path = tmp_path / "payload.bin"
        path.write_bytes(b"survival")

        assert file_sha256(path) == bytes_sha256(b"survival")


class TestBatchRunner:
    """Test cases for BatchRunner"""

    def test_in_process_order(self):
        """Test results follow task order"""
        runner = BatchRunner(max_workers=1, show_progress=False)
        assert runner.map(square_plus, [(i, 1) for i in range(5)]) == [1, 2, 5, 10, 17]

    def test_pool_order(self):
        """Test pooled results follow task order"""
        runner = BatchRunner(max_workers=2, show_progress=False)
        assert runner.map(square_plus, [(i, 0) for i in range(6)]) == [0, 1, 4, 9, 16, 25]

    def test_empty(self):
        """Test no tasks"""
        assert BatchRunner(max_workers=2).map(square_plus, []) == []

    def test_failure_propagates(self):
        """Test a failing task raises in the caller"""
        with pytest.raises(ValueError):
            BatchRunner(max_workers=2, show_progress=False).map(fail_on_three, [(i,) for i in range(5)])


class TestStageLogger:
    """Test cases for StageLogger"""

    def test_messages_tagged_with_stage(self, mocker):
        """Test every message carries the current stage"""
        stages = StageLogger("tests.stage")
        info = mocker.spy(stages.logger, "info")
        stages.enter("profiling")
        stages.info("k=2")

        assert [call.args[0] for call in info.call_args_list] == ["[profiling] started", "[profiling] k=2"]

    def test_error_tagged_with_stage(self, mocker):
        """Test errors carry the stage they occurred in"""
        stages = StageLogger("tests.stage")
        error = mocker.spy(stages.logger, "error")
        stages.enter("load")
        stages.error("bad file")

        error.assert_called_once_with("[load] bad file")


class TestErrors:
    """Test cases for the exception hierarchy"""

    def test_validation_error_fields(self):
        """Test row, column and joined message"""
        error = DatasetValidationError(["a", "b"], row=4, column="time")

        assert isinstance(error, SurvProfileError)
        assert isinstance(error, ValueError)
        assert str(error) == "a; b"
        assert (error.row, error.column) == (4, "time")

    def test_stage_error_message(self):
        """Test the stage prefix"""
        error = PipelineStageError("load", "bad file")

        assert str(error) == "[load] bad file"
        assert error.message == "bad file"
