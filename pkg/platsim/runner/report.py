"""
场景对比报告

收集若干输出目录下的 ocs.csv，按扫描参数拼成一张宽表：
每行一个场景，列是每 1000 名患者的试验组数和各效应量的拒绝率等。
"""

from pathlib import Path
from typing import Iterable, List, Optional, Sequence

import pandas as pd
from rich.console import Console
from rich.table import Table

from platsim.errors import ReportError
from platsim.runner.output import write_csv
from platsim.utils.logging import get_logger

logger = get_logger(__name__)

KEY_PREFIX = "sweep."
HEADLINE_PREFIXES = ("arms_per_1000_median", "rate_success_d", "platform_n_median")


def find_ocs_files(paths: Iterable[Path]) -> List[Path]:
    """在给定路径（文件或目录，递归）中查找 ocs.csv"""
    found: List[Path] = []
    for path in paths:
        path = Path(path)
        if path.is_file() and path.name == "ocs.csv":
            found.append(path)
        elif path.is_dir():
            found.extend(sorted(path.rglob("ocs.csv")))
    # 同一个文件可能通过不同参数重复出现
    unique = list(dict.fromkeys(p.resolve() for p in found))
    return unique


def _metric_columns(frame: pd.DataFrame) -> List[str]:
    return [c for c in frame.columns if not c.startswith(KEY_PREFIX) and c != "scenario_id"]


def collect(paths: Sequence[Path]) -> pd.DataFrame:
    """
    读取并拼接所有 ocs.csv

    Returns:
        每行一个场景；扫描参数列取并集，缺失的留空

    Raises:
        ReportError: 没有找到结果，或工作特征列不一致
    """
    files = find_ocs_files(paths)
    if not files:
        raise ReportError(f"没有找到 ocs.csv: {', '.join(str(p) for p in paths)}", field="dirs")

    frames = []
    reference: Optional[List[str]] = None
    for path in files:
        frame = pd.read_csv(path)
        metrics = _metric_columns(frame)
        if reference is None:
            reference = metrics
        elif metrics != reference:
            missing = sorted(set(reference) - set(metrics))
            extra = sorted(set(metrics) - set(reference))
            raise ReportError(
                f"{path} 的列与其他结果不一致（缺少 {missing[:5]}，多出 {extra[:5]}）",
                field="schema",
            )
        frames.append(frame)

    table = pd.concat(frames, ignore_index=True, sort=False)
    versions = sorted(table["tool_version"].astype(str).unique())
    if len(versions) > 1:
        logger.warning("结果来自不同的工具版本", versions=versions)

    keys = sorted({c for c in table.columns if c.startswith(KEY_PREFIX)})
    ordered = ["scenario_id"] + keys + reference
    return table[ordered].sort_values("scenario_id", kind="stable").reset_index(drop=True)


def headline_columns(table: pd.DataFrame) -> List[str]:
    """终端表格显示的列：场景、扫描参数和主要工作特征"""
    keys = [c for c in table.columns if c == "scenario_id" or c.startswith(KEY_PREFIX)]
    metrics = [c for c in table.columns if c.startswith(HEADLINE_PREFIXES)]
    return keys + metrics


def render_table(
    table: pd.DataFrame, precision: int = 4, console: Optional[Console] = None
) -> None:
    """用 rich 输出对比表"""
    console = console or Console()
    columns = headline_columns(table)
    rich_table = Table(title=f"场景对比（{len(table)} 个场景）", show_lines=False)
    for column in columns:
        justify = "left" if column == "scenario_id" or column.startswith(KEY_PREFIX) else "right"
        rich_table.add_column(column.removeprefix(KEY_PREFIX), justify=justify)

    for _, row in table[columns].iterrows():
        cells = []
        for value in row:
            if isinstance(value, float):
                cells.append("" if pd.isna(value) else f"{value:.{precision}f}")
            else:
                cells.append(str(value))
        rich_table.add_row(*cells)

    console.print(rich_table)


def build_report(
    paths: Sequence[Path],
    out: Optional[Path] = None,
    precision: int = 4,
    console: Optional[Console] = None,
) -> pd.DataFrame:
    """
    report 命令的实现

    Args:
        paths: 输出目录或 ocs.csv 文件
        out: 可选，完整宽表写入的 CSV 路径
        precision: 终端表格的小数位
        console: rich Console（测试时可注入）

    Returns:
        拼接后的宽表
    """
    table = collect(paths)
    render_table(table, precision=precision, console=console)
    if out is not None:
        write_csv(Path(out), table)
        logger.info("报告已写入", path=str(out), scenarios=len(table))
    return table
