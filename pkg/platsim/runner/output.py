"""
结果输出

每个场景一个子目录：

- ocs.csv / ocs.yaml：汇总工作特征（一行，含扫描参数和工具版本）
- replicates.csv：逐重复指标
- comparisons.csv：逐比较结果
- events.csv：事件日志（仅 --verbose-events）
- failures.csv：失败的重复（仅在有失败时）
- manifest.yaml：运行清单

所有文件先写临时文件再 os.replace，不会留下写了一半的结果。
"""

import json
import os
import shutil
import tempfile
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, List, Optional

import pandas as pd
import yaml
from pydantic import BaseModel, Field

from platsim import __version__
from platsim.config.grid import ExpandedScenario
from platsim.engine.results import ReplicateFailure, ReplicateResult
from platsim.errors import OutputError
from platsim.ocs.aggregate import OperatingCharacteristics
from platsim.outcome.model import OutcomeModel
from platsim.runner.executor import ScenarioRun
from platsim.utils.logging import get_logger

logger = get_logger(__name__)

FLOAT_FORMAT = "%.10g"

REPLICATE_COLUMNS = [
    "scenario_id",
    "replicate",
    "total_n",
    "control_n",
    "n_arms",
    "duration_weeks",
    "periods",
    "n_rejections",
    "arms_per_1000",
]
COMPARISON_COLUMNS = [
    "scenario_id",
    "replicate",
    "arm_id",
    "d",
    "decision",
    "p_interim",
    "p_final",
    "n_t",
    "n_c_interim",
    "n_c_final",
    "entry_week",
    "exit_week",
    "duration_weeks",
]


class RunManifest(BaseModel):
    """单个场景的运行清单"""

    tool_version: str = Field(default=__version__)
    scenario_id: str
    config_digest: str = Field(..., description="场景文件的 SHA-256")
    master_seed: int
    replicates: int
    failed_replicates: int = 0
    outputs: List[str] = Field(default_factory=list, description="本场景写出的文件")
    started_at: str
    wall_clock_seconds: float
    calibration: Dict[str, float] = Field(default_factory=dict, description="推导出的 SD_Δ 与 σ")
    sweep_values: Dict[str, Any] = Field(default_factory=dict)


def prepare_output_dir(out_dir: Path, force: bool = False) -> Path:
    """
    准备输出目录

    不存在则创建；已存在且非空时需要 force。force 时删除上次运行留下的
    场景子目录（含 ocs.csv 或 manifest.yaml）和 grid.yaml，其他文件保留。

    Raises:
        OutputError: 路径是文件、目录非空且未指定 force、或不可写
    """
    out_dir = Path(out_dir)
    if out_dir.exists() and not out_dir.is_dir():
        raise OutputError(f"输出路径不是目录: {out_dir}", field="out")
    if out_dir.is_dir() and any(out_dir.iterdir()) and not force:
        raise OutputError(f"输出目录非空（使用 --force 覆盖）: {out_dir}", field="out")
    if out_dir.is_dir() and force:
        _clear_previous_run(out_dir)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise OutputError(f"无法创建输出目录: {e}", field="out") from e
    if not os.access(out_dir, os.W_OK):
        raise OutputError(f"输出目录不可写: {out_dir}", field="out")
    return out_dir


def _clear_previous_run(out_dir: Path) -> None:
    try:
        for entry in out_dir.iterdir():
            if entry.is_dir() and any(
                (entry / name).is_file() for name in ("ocs.csv", "manifest.yaml")
            ):
                shutil.rmtree(entry)
                logger.info("删除旧的场景结果", path=str(entry))
        (out_dir / "grid.yaml").unlink(missing_ok=True)
    except OSError as e:
        raise OutputError(f"无法清理输出目录: {e}", field="out") from e


def atomic_write_text(path: Path, text: str) -> None:
    """写临时文件后原子替换"""
    path = Path(path)
    try:
        with tempfile.NamedTemporaryFile(
            "w", encoding="utf-8", newline="", dir=path.parent, delete=False, suffix=".tmp"
        ) as handle:
            handle.write(text)
            tmp_name = handle.name
        os.replace(tmp_name, path)
    except OSError as e:
        raise OutputError(f"写入失败: {path}: {e}", field=path.name) from e


def write_csv(path: Path, frame: pd.DataFrame) -> None:
    text = frame.to_csv(index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    atomic_write_text(path, text)


def _round(value: Any) -> Any:
    if isinstance(value, float):
        return float(FLOAT_FORMAT % value)
    return value


def _flat_value(value: Any) -> Any:
    """扫描值写入 CSV 单元格"""
    if isinstance(value, (dict, list)):
        return json.dumps(value, sort_keys=True)
    return value


def ocs_row(scenario: ExpandedScenario, ocs: OperatingCharacteristics) -> Dict[str, Any]:
    """ocs.csv 的一行：场景编号、扫描参数、工具版本，然后是展平的工作特征"""
    row: Dict[str, Any] = {"scenario_id": scenario.scenario_id}
    for key, value in scenario.sweep_values.items():
        row[f"sweep.{key}"] = _flat_value(value)
    row["tool_version"] = __version__
    row.update(ocs.to_record())
    return row


def replicate_frame(scenario_id: str, results: List[ReplicateResult]) -> pd.DataFrame:
    rows = [
        {
            "scenario_id": scenario_id,
            "replicate": r.replicate,
            "total_n": r.total_platform_n,
            "control_n": r.total_control_n,
            "n_arms": r.n_arms_tested,
            "duration_weeks": r.platform_duration_weeks,
            "periods": r.periods,
            "n_rejections": r.n_rejections,
            "arms_per_1000": r.arms_per_1000,
        }
        for r in results
    ]
    return pd.DataFrame(rows, columns=REPLICATE_COLUMNS)


def comparison_frame(scenario_id: str, results: List[ReplicateResult]) -> pd.DataFrame:
    rows = [
        {
            "scenario_id": scenario_id,
            "replicate": r.replicate,
            "arm_id": c.arm_id,
            "d": c.true_effect,
            "decision": c.decision.value,
            "p_interim": c.p_interim,
            "p_final": c.p_final,
            "n_t": c.n_treatment,
            "n_c_interim": c.n_concurrent_controls_interim,
            "n_c_final": c.n_concurrent_controls_final,
            "entry_week": c.entry_week,
            "exit_week": c.exit_week,
            "duration_weeks": c.duration_weeks,
        }
        for r in results
        for c in r.comparisons
    ]
    frame = pd.DataFrame(rows, columns=COMPARISON_COLUMNS)
    # 缺失值列保持整数显示
    for column in ("n_c_interim", "n_c_final"):
        frame[column] = frame[column].astype("Int64")
    return frame


def events_frame(scenario_id: str, results: List[ReplicateResult]) -> pd.DataFrame:
    rows = [
        {"scenario_id": scenario_id, "replicate": r.replicate, **event.to_row()}
        for r in results
        for event in r.events
    ]
    frame = pd.DataFrame(rows)
    for column in ("arm_id", "period_id", "n_t", "n_c"):
        if column in frame:
            frame[column] = frame[column].astype("Int64")
    return frame


def failures_frame(scenario_id: str, failures: List[ReplicateFailure]) -> pd.DataFrame:
    rows = [{"scenario_id": scenario_id, **f.model_dump()} for f in failures]
    return pd.DataFrame(rows, columns=["scenario_id", "replicate", "message", "arm_id", "kind"])


def write_scenario_outputs(
    scenario_dir: Path,
    scenario: ExpandedScenario,
    run: ScenarioRun,
    ocs: OperatingCharacteristics,
    config_digest: str,
    started_at: Optional[datetime] = None,
    record_events: bool = False,
) -> RunManifest:
    """
    写出一个场景的全部文件

    Args:
        scenario_dir: 场景目录（不存在则创建）
        scenario: 展开后的场景
        run: 执行结果
        ocs: 汇总工作特征
        config_digest: 场景文件摘要
        started_at: 开始时间，写入清单
        record_events: 是否写 events.csv

    Returns:
        写入的运行清单
    """
    scenario_dir = Path(scenario_dir)
    try:
        scenario_dir.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise OutputError(f"无法创建场景目录: {e}", field=scenario.scenario_id) from e

    sid = scenario.scenario_id
    outputs: List[str] = []

    row = ocs_row(scenario, ocs)
    write_csv(scenario_dir / "ocs.csv", pd.DataFrame([row]))
    outputs.append("ocs.csv")
    ocs_yaml = {
        "scenario_id": sid,
        "tool_version": __version__,
        "sweep_values": scenario.sweep_values,
        "config": scenario.config.model_dump(mode="json"),
        "ocs": {key: _round(value) for key, value in ocs.to_record().items()},
    }
    atomic_write_text(
        scenario_dir / "ocs.yaml", yaml.safe_dump(ocs_yaml, sort_keys=False, allow_unicode=True)
    )
    outputs.append("ocs.yaml")

    write_csv(scenario_dir / "replicates.csv", replicate_frame(sid, run.results))
    outputs.append("replicates.csv")
    write_csv(scenario_dir / "comparisons.csv", comparison_frame(sid, run.results))
    outputs.append("comparisons.csv")

    if record_events:
        write_csv(scenario_dir / "events.csv", events_frame(sid, run.results))
        outputs.append("events.csv")
    if run.failures:
        write_csv(scenario_dir / "failures.csv", failures_frame(sid, run.failures))
        outputs.append("failures.csv")

    config = scenario.config
    model = OutcomeModel(config.calibration, config.time_trend_model)
    started_at = started_at or datetime.now(timezone.utc)
    manifest = RunManifest(
        scenario_id=sid,
        config_digest=config_digest,
        master_seed=config.master_seed,
        replicates=config.replicates,
        failed_replicates=len(run.failures),
        outputs=outputs + ["manifest.yaml"],
        started_at=started_at.isoformat(timespec="seconds"),
        wall_clock_seconds=round(run.seconds, 3),
        calibration=model.describe(),
        sweep_values=scenario.sweep_values,
    )
    atomic_write_text(
        scenario_dir / "manifest.yaml",
        yaml.safe_dump(manifest.model_dump(mode="json"), sort_keys=False, allow_unicode=True),
    )
    logger.debug("场景输出已写入", scenario_id=sid, directory=str(scenario_dir), files=len(outputs))
    return manifest
