"""配置管理：应用设置与场景文件"""

from platsim.config.grid import (
    ExpandedScenario,
    ScenarioGrid,
    config_digest,
    load_grid,
    parse_config,
    to_yaml,
)
from platsim.config.loader import ConfigLoader
from platsim.config.scenario import (
    DEFAULT_RECRUITMENT_LAW,
    Randomization,
    ScenarioConfig,
    SimulationMode,
)
from platsim.config.schema import (
    AppSettings,
    LogFormat,
    LoggingConfig,
    LogLevel,
    PerformanceConfig,
    RunConfig,
)
from platsim.config.settings import get_settings, reload_settings

__all__ = [
    "AppSettings",
    "ConfigLoader",
    "get_settings",
    "reload_settings",
    # 配置类
    "LoggingConfig",
    "LogLevel",
    "LogFormat",
    "PerformanceConfig",
    "RunConfig",
    # 场景
    "ScenarioConfig",
    "Randomization",
    "SimulationMode",
    "DEFAULT_RECRUITMENT_LAW",
    "ScenarioGrid",
    "ExpandedScenario",
    "parse_config",
    "load_grid",
    "config_digest",
    "to_yaml",
]
