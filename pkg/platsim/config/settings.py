"""
配置设置模块

提供全局配置单例和便捷的配置访问接口。
"""

from functools import lru_cache
from pathlib import Path
from typing import Optional

from platsim.config.loader import ConfigLoader
from platsim.config.schema import AppSettings, LoggingConfig, PerformanceConfig, RunConfig


@lru_cache(maxsize=1)
def get_settings(
    env_file: Optional[Path] = None,
    config_file: Optional[Path] = None,
) -> AppSettings:
    """
    获取全局配置单例（带缓存）

    Args:
        env_file: .env 文件路径
        config_file: YAML 配置文件路径

    Returns:
        AppSettings 配置对象
    """
    loader = ConfigLoader(env_file=env_file, config_file=config_file)
    return loader.load()


def reload_settings() -> AppSettings:
    """清除缓存并重新加载配置"""
    get_settings.cache_clear()
    return get_settings()


def get_logging_config() -> LoggingConfig:
    """获取日志配置"""
    return get_settings().logging


def get_performance_config() -> PerformanceConfig:
    """获取性能配置"""
    return get_settings().performance


def get_run_config() -> RunConfig:
    """获取运行策略配置"""
    return get_settings().run
