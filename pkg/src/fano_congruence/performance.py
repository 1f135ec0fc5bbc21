# SPDX-License-Identifier: Apache-2.0
# SPDX-FileCopyrightText: 2025 The Linux Foundation

"""Wall-clock timing of pipeline stages."""

import time
from dataclasses import dataclass
from typing import List, Optional

from rich.console import Console
from rich.table import Table

console = Console(stderr=True)


@dataclass
class StageTiming:
    """Timing of one pipeline stage."""

    stage: str
    duration: float
    success: bool
    error_message: Optional[str] = None


class StageTimer:
    """Collects stage timings for one command invocation."""

    def __init__(self, command: str):
        self.command = command
        self.timings: List[StageTiming] = []
        self.start_time = time.perf_counter()

    def stage(self, name: str) -> "StageTracker":
        return StageTracker(self, name)

    def record(
        self, stage: str, duration: float, success: bool, error_message: Optional[str] = None
    ) -> None:
        self.timings.append(StageTiming(stage, duration, success, error_message))

    @property
    def total_duration(self) -> float:
        return time.perf_counter() - self.start_time

    def render(self) -> Table:
        table = Table(title=f"Stage timings: {self.command}")
        table.add_column("Stage", style="cyan")
        table.add_column("Duration", style="magenta")
        table.add_column("Status", style="green")
        for timing in self.timings:
            status = "ok" if timing.success else f"failed: {timing.error_message}"
            table.add_row(timing.stage, f"{timing.duration:.3f} s", status)
        table.add_row("total", f"{self.total_duration:.3f} s", "")
        return table

    def display(self) -> None:
        console.print(self.render())


class StageTracker:
    """Context manager recording the duration of a stage, failed or not."""

    def __init__(self, timer: StageTimer, stage: str):
        self.timer = timer
        self.stage = stage
        self.start_time = 0.0

    def __enter__(self) -> "StageTracker":
        self.start_time = time.perf_counter()
        return self

    def __exit__(self, exc_type, exc_val, exc_tb) -> None:  # type: ignore[no-untyped-def]
        duration = time.perf_counter() - self.start_time
        self.timer.record(
            self.stage,
            duration,
            success=exc_type is None,
            error_message=str(exc_val) if exc_val else None,
        )
