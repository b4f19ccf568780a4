"""
重复执行器

把一个场景的重复按编号切块，分发给进程池（threads == 1 时在当前进程内顺序执行）。
每个重复使用 derive_stream(master_seed, i) 的独立随机数流，结果按重复编号排序，
因此输出与进程数、分块大小、完成顺序无关。
"""

import time
from concurrent.futures import ProcessPoolExecutor, as_completed
from dataclasses import dataclass, field
from typing import List, Sequence, Tuple

from platsim.config.scenario import ScenarioConfig
from platsim.engine import simulate
from platsim.engine.results import ReplicateFailure, ReplicateResult
from platsim.errors import AnalysisError, FailureBudgetExceeded, ParameterError
from platsim.outcome.model import OutcomeModel
from platsim.stats.rng import derive_stream
from platsim.utils.logging import configure_logging, current_logging_options, get_logger

logger = get_logger(__name__)

ChunkOutput = Tuple[List[ReplicateResult], List[ReplicateFailure]]


@dataclass
class ScenarioRun:
    """一个场景的全部重复结果"""

    results: List[ReplicateResult]
    failures: List[ReplicateFailure] = field(default_factory=list)
    seconds: float = 0.0

    @property
    def n_attempted(self) -> int:
        return len(self.results) + len(self.failures)


def run_chunk(
    config: ScenarioConfig,
    indices: Sequence[int],
    record_events: bool = False,
) -> ChunkOutput:
    """
    运行一块重复

    必须是模块级函数，ProcessPoolExecutor 才能 pickle。
    分析退化（AnalysisError）的重复记为失败，其他异常向上抛出。
    """
    model = OutcomeModel(config.calibration, config.time_trend_model)
    results: List[ReplicateResult] = []
    failures: List[ReplicateFailure] = []
    for index in indices:
        rng = derive_stream(config.master_seed, index)
        try:
            results.append(simulate(config, rng, record_events, model))
        except AnalysisError as e:
            failures.append(
                ReplicateFailure(replicate=index, message=e.message, arm_id=e.arm_id, kind=e.kind)
            )
    return results, failures


def _chunks(n: int, chunk_size: int) -> List[range]:
    return [range(start, min(start + chunk_size, n)) for start in range(0, n, chunk_size)]


def run_scenario(
    config: ScenarioConfig,
    threads: int = 1,
    chunk_size: int = 50,
    failure_budget: float = 0.001,
    record_events: bool = False,
    scenario_id: str = "scenario",
) -> ScenarioRun:
    """
    运行一个场景的全部重复

    Args:
        config: 场景
        threads: 工作进程数
        chunk_size: 每个任务包含的重复数
        failure_budget: 允许失败的重复比例
        record_events: 是否记录事件日志
        scenario_id: 日志用的场景编号

    Returns:
        按重复编号排序的结果

    Raises:
        ParameterError: threads 或 chunk_size 不合法
        FailureBudgetExceeded: 失败重复超过 failure_budget × replicates
    """
    if threads < 1:
        raise ParameterError(f"threads 必须 >= 1: {threads}", field="threads")
    if chunk_size < 1:
        raise ParameterError(f"chunk_size 必须 >= 1: {chunk_size}", field="chunk_size")

    log = logger.bind(scenario_id=scenario_id)
    OutcomeModel(config.calibration, config.time_trend_model).log_derivation()
    log.info("场景开始", replicates=config.replicates, threads=threads, mode=config.mode.value)

    started = time.perf_counter()
    chunks = _chunks(config.replicates, chunk_size)
    results: List[ReplicateResult] = []
    failures: List[ReplicateFailure] = []

    if threads == 1 or len(chunks) == 1:
        for chunk in chunks:
            chunk_results, chunk_failures = run_chunk(config, chunk, record_events)
            results.extend(chunk_results)
            failures.extend(chunk_failures)
    else:
        with ProcessPoolExecutor(
            max_workers=threads,
            initializer=configure_logging,
            initargs=current_logging_options(),
        ) as executor:
            futures = {
                executor.submit(run_chunk, config, list(chunk), record_events): i
                for i, chunk in enumerate(chunks)
            }
            for future in as_completed(futures):
                chunk_results, chunk_failures = future.result()
                results.extend(chunk_results)
                failures.extend(chunk_failures)

    results.sort(key=lambda r: r.replicate)
    failures.sort(key=lambda f: f.replicate)
    seconds = time.perf_counter() - started

    for failure in failures:
        log.warning(
            "重复失败",
            replicate=failure.replicate,
            arm_id=failure.arm_id,
            kind=failure.kind,
            error=failure.message,
        )

    allowed = failure_budget * config.replicates
    if len(failures) > allowed:
        log.error("失败重复超出预算", failed=len(failures), allowed=allowed)
        raise FailureBudgetExceeded(
            f"{len(failures)}/{config.replicates} 次重复失败，超过预算 {failure_budget:.4%}",
            failed=len(failures),
            total=config.replicates,
        )

    log.info(
        "场景完成",
        replicates=len(results),
        failed=len(failures),
        seconds=round(seconds, 2),
    )
    return ScenarioRun(results=results, failures=failures, seconds=seconds)
