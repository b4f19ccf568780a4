"""
PlatSim - 平台试验模拟引擎

共享对照组的 II 期自适应平台试验的蒙特卡洛评估：试验组随时间进入和离开，
按 √k（带对照下限）等规则分配，只用同期对照做 ANCOVA，可选期中无效性分析，
最后汇总成工作特征（各效应量下的拒绝率、样本量、持续时间、每 1000 名患者的试验组数）。

示例:
    >>> from platsim import ScenarioConfig, derive_stream, simulate
    >>>
    >>> config = ScenarioConfig(target_n_per_arm=80, replicates=100)
    >>> result = simulate(config, derive_stream(config.master_seed, 0))
    >>> print(result.n_arms_tested, result.total_platform_n)

或运行整个场景并汇总:
    >>> from platsim import aggregate, run_scenario
    >>>
    >>> run = run_scenario(config, threads=4)
    >>> ocs = aggregate(run.results, config.effect_distribution.effects)
    >>> print(ocs.strata["0.35"].success_rate)
"""

__version__ = "0.1.0"

from platsim.config.grid import ScenarioGrid, parse_config
from platsim.config.scenario import ScenarioConfig
from platsim.engine import simulate
from platsim.ocs import OperatingCharacteristics, aggregate
from platsim.runner.executor import run_scenario
from platsim.stats.rng import derive_stream

__all__ = [
    "ScenarioConfig",
    "ScenarioGrid",
    "parse_config",
    "simulate",
    "derive_stream",
    "run_scenario",
    "aggregate",
    "OperatingCharacteristics",
    "__version__",
]
