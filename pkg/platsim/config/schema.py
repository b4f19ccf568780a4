"""
配置数据模型定义

使用 Pydantic 定义应用级配置（日志、性能、运行策略），提供类型验证和默认值。
场景配置（试验设计参数）见 platsim.config.scenario。
"""

from enum import Enum
from pathlib import Path
from typing import Optional, Tuple, Type

from pydantic import BaseModel, Field, field_validator
from pydantic_settings import BaseSettings, PydanticBaseSettingsSource, SettingsConfigDict


class LogLevel(str, Enum):
    """日志级别枚举"""

    DEBUG = "DEBUG"
    INFO = "INFO"
    WARNING = "WARNING"
    ERROR = "ERROR"


class LogFormat(str, Enum):
    """日志格式枚举"""

    JSON = "json"
    TEXT = "text"


class LoggingConfig(BaseModel):
    """日志配置"""

    level: LogLevel = Field(default=LogLevel.INFO, description="日志级别")
    format: LogFormat = Field(default=LogFormat.TEXT, description="日志格式")
    file: Optional[Path] = Field(default=None, description="日志文件路径，None 表示只输出到 stderr")

    @field_validator("level", mode="before")
    @classmethod
    def normalize_level(cls, v):
        """允许小写的级别名"""
        if isinstance(v, str):
            return v.upper()
        return v

    @field_validator("file")
    @classmethod
    def validate_log_file(cls, v: Optional[Path]) -> Optional[Path]:
        """验证日志文件路径"""
        if v is None:
            return None
        return Path(v).expanduser().resolve()


class PerformanceConfig(BaseModel):
    """性能配置"""

    threads: int = Field(default=1, ge=1, le=512, description="并行工作进程数")
    chunk_size: int = Field(default=50, ge=1, description="每个工作单元包含的重复次数")


class RunConfig(BaseModel):
    """运行策略配置"""

    failure_budget: float = Field(
        default=0.001, ge=0.0, le=1.0, description="允许失败（分析退化）的重复比例上限"
    )
    float_precision: int = Field(default=4, ge=1, le=12, description="report 表格的小数位数")


class AppSettings(BaseSettings):
    """应用主配置类，包含所有子配置"""

    logging: LoggingConfig = Field(default_factory=LoggingConfig)
    performance: PerformanceConfig = Field(default_factory=PerformanceConfig)
    run: RunConfig = Field(default_factory=RunConfig)

    model_config = SettingsConfigDict(
        env_prefix="PLATSIM_",
        env_nested_delimiter="__",
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore",
    )

    @classmethod
    def settings_customise_sources(
        cls,
        settings_cls: Type[BaseSettings],
        init_settings: PydanticBaseSettingsSource,
        env_settings: PydanticBaseSettingsSource,
        dotenv_settings: PydanticBaseSettingsSource,
        file_secret_settings: PydanticBaseSettingsSource,
    ) -> Tuple[PydanticBaseSettingsSource, ...]:
        """
        配置来源优先级：环境变量 > .env 文件 > YAML（由 ConfigLoader 以初始化参数传入）> 默认值
        """
        return env_settings, dotenv_settings, init_settings, file_secret_settings


__all__ = [
    "LogLevel",
    "LogFormat",
    "LoggingConfig",
    "PerformanceConfig",
    "RunConfig",
    "AppSettings",
]
