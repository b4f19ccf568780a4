"""场景执行与结果输出"""

from platsim.runner.executor import ScenarioRun, run_chunk, run_scenario
from platsim.runner.output import (
    COMPARISON_COLUMNS,
    REPLICATE_COLUMNS,
    RunManifest,
    atomic_write_text,
    comparison_frame,
    ocs_row,
    prepare_output_dir,
    replicate_frame,
    write_scenario_outputs,
)
from platsim.runner.report import build_report, collect, find_ocs_files, render_table

__all__ = [
    "ScenarioRun",
    "run_chunk",
    "run_scenario",
    "COMPARISON_COLUMNS",
    "REPLICATE_COLUMNS",
    "RunManifest",
    "atomic_write_text",
    "comparison_frame",
    "ocs_row",
    "prepare_output_dir",
    "replicate_frame",
    "write_scenario_outputs",
    "build_report",
    "collect",
    "find_ocs_files",
    "render_table",
]
