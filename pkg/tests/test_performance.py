# SPDX-License-Identifier: Apache-2.0
# SPDX-FileCopyrightText: 2025 The Linux Foundation

"""Tests for stage timing."""

import pytest

from fano_congruence.performance import StageTimer


class TestStageTimer:
    """Stage timing collection."""

    @pytest.fixture
    def timer(self):
        """Timer for a fake command."""
        return StageTimer("count")

    def test_successful_stage(self, timer):
        """Test a stage that completes is recorded as a success."""
        with timer.stage("enumerate"):
            pass
        (timing,) = timer.timings
        assert timing.stage == "enumerate"
        assert timing.success
        assert timing.error_message is None
        assert timing.duration >= 0

    def test_failed_stage(self, timer):
        """Test a failing stage is recorded and the error propagates."""
        with pytest.raises(ValueError):
            with timer.stage("frame"):
                raise ValueError("degenerate frame")
        (timing,) = timer.timings
        assert not timing.success
        assert timing.error_message == "degenerate frame"

    def test_render(self, timer):
        """Test the table has one row per stage plus the total."""
        with timer.stage("load"):
            pass
        with timer.stage("classify"):
            pass
        table = timer.render()
        assert table.row_count == len(timer.timings) + 1
        assert timer.total_duration >= 0
