"""模拟引擎：平台试验循环与连续双臂试验"""

from typing import Optional

from platsim.config.scenario import ScenarioConfig, SimulationMode
from platsim.engine.events import Event, EventKind, EventLog
from platsim.engine.platform import (
    PlatformEngine,
    PlatformState,
    concurrent_control_mask,
    concurrent_controls,
    run_replicate,
    try_enter_arm,
)
from platsim.engine.results import ArmTrajectory, ReplicateFailure, ReplicateResult
from platsim.engine.two_arm import TwoArmSeriesEngine, run_two_arm_series
from platsim.outcome.model import OutcomeModel
from platsim.stats.rng import RngStream


def simulate(
    config: ScenarioConfig,
    rng: RngStream,
    record_events: bool = False,
    outcome_model: Optional[OutcomeModel] = None,
) -> ReplicateResult:
    """按 config.mode 运行一次重复"""
    if config.mode == SimulationMode.TWO_ARM_SERIES:
        return run_two_arm_series(config, rng, record_events, outcome_model)
    return run_replicate(config, rng, record_events, outcome_model)


__all__ = [
    "simulate",
    "Event",
    "EventKind",
    "EventLog",
    "PlatformEngine",
    "PlatformState",
    "concurrent_control_mask",
    "concurrent_controls",
    "run_replicate",
    "try_enter_arm",
    "ArmTrajectory",
    "ReplicateFailure",
    "ReplicateResult",
    "TwoArmSeriesEngine",
    "run_two_arm_series",
]
