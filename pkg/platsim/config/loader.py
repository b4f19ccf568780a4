"""
配置加载器

从 YAML 配置文件、.env 文件和环境变量加载应用配置。
优先级：环境变量 > .env 文件 > YAML 配置文件 > 默认值
"""

from pathlib import Path
from typing import Any, Dict, Optional

import yaml
from pydantic import ValidationError

from platsim.config.schema import AppSettings
from platsim.errors import ConfigError


class ConfigLoader:
    """配置加载器"""

    CONFIG_CANDIDATES = (
        "platsim.yaml",
        "platsim.yml",
        "config/platsim.yaml",
        "config/platsim.yml",
    )

    def __init__(
        self,
        env_file: Optional[Path] = None,
        config_file: Optional[Path] = None,
    ):
        """
        初始化配置加载器

        Args:
            env_file: .env 文件路径，默认为当前目录的 .env
            config_file: YAML 配置文件路径，默认按 CONFIG_CANDIDATES 查找
        """
        self.env_file = env_file or self._find_env_file()
        self.config_file = config_file or self._find_config_file()

    @staticmethod
    def _find_env_file() -> Optional[Path]:
        """查找 .env 文件"""
        env_file = Path.cwd() / ".env"
        if env_file.exists():
            return env_file
        return None

    @classmethod
    def _find_config_file(cls) -> Optional[Path]:
        """查找 YAML 配置文件"""
        current_dir = Path.cwd()
        for candidate in cls.CONFIG_CANDIDATES:
            config_file = current_dir / candidate
            if config_file.exists():
                return config_file
        return None

    def load_yaml_config(self) -> Dict[str, Any]:
        """
        从 YAML 文件加载配置

        Returns:
            配置字典，如果文件不存在则返回空字典
        """
        if self.config_file is None or not self.config_file.exists():
            return {}

        try:
            with open(self.config_file, "r", encoding="utf-8") as f:
                config = yaml.safe_load(f)
        except yaml.YAMLError as e:
            raise ConfigError(f"YAML 配置文件解析失败: {e}", field=str(self.config_file)) from e
        except OSError as e:
            raise ConfigError(f"读取 YAML 配置文件失败: {e}", field=str(self.config_file)) from e

        if config is None:
            return {}
        if not isinstance(config, dict):
            raise ConfigError("配置文件顶层必须是映射", field=str(self.config_file))
        return config

    def load(self) -> AppSettings:
        """
        加载配置并返回 AppSettings 对象

        Returns:
            AppSettings 配置对象

        Raises:
            ConfigError: 配置文件读取或验证失败
        """
        yaml_config = self.load_yaml_config()

        try:
            # YAML 以初始化参数传入，环境变量和 .env 由 pydantic-settings 合并
            return AppSettings(_env_file=self.env_file, **yaml_config)
        except ValidationError as e:
            first = e.errors()[0]
            field = ".".join(str(part) for part in first.get("loc", ()))
            raise ConfigError(f"配置验证失败: {first.get('msg')}", field=field or None) from e
