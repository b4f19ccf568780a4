"""
应用设置单元测试
"""

from pathlib import Path

import pytest

from platsim.config import (
    AppSettings,
    ConfigLoader,
    LogFormat,
    LoggingConfig,
    LogLevel,
    PerformanceConfig,
    RunConfig,
    get_settings,
    reload_settings,
)
from platsim.config.settings import get_performance_config, get_run_config
from platsim.errors import ConfigError


class TestLoggingConfig:
    """测试日志配置"""

    def test_default_values(self):
        """默认 INFO/text，不写文件"""
        config = LoggingConfig()
        assert config.level == LogLevel.INFO
        assert config.format == LogFormat.TEXT
        assert config.file is None

    def test_lowercase_level(self):
        """级别名不区分大小写"""
        assert LoggingConfig(level="debug").level == LogLevel.DEBUG

    def test_log_file_resolved(self, tmp_path, monkeypatch):
        """相对路径解析为绝对路径"""
        monkeypatch.chdir(tmp_path)
        config = LoggingConfig(file="logs/run.log")
        assert config.file == tmp_path.resolve() / "logs" / "run.log"


class TestRunSettings:
    """测试性能和运行策略配置"""

    def test_default_values(self):
        """单进程、每块 50 个重复、失败预算 0.1%"""
        assert PerformanceConfig().threads == 1
        assert PerformanceConfig().chunk_size == 50
        assert RunConfig().failure_budget == 0.001
        assert RunConfig().float_precision == 4

    @pytest.mark.parametrize(
        "model,field,value",
        [
            (PerformanceConfig, "threads", 0),
            (PerformanceConfig, "threads", 513),
            (PerformanceConfig, "chunk_size", 0),
            (RunConfig, "failure_budget", 1.5),
            (RunConfig, "float_precision", 0),
        ],
    )
    def test_ranges(self, model, field, value):
        """取值范围"""
        with pytest.raises(ValueError):
            model(**{field: value})


class TestConfigLoader:
    """测试配置加载器"""

    def test_no_files(self, tmp_path, monkeypatch):
        """没有任何配置文件时使用默认值"""
        monkeypatch.chdir(tmp_path)
        loader = ConfigLoader()
        assert loader.config_file is None
        assert loader.env_file is None
        assert loader.load() == AppSettings(_env_file=None)

    def test_load_from_yaml_file(self, tmp_path):
        """从 YAML 文件加载"""
        config_file = tmp_path / "settings.yaml"
        config_file.write_text(
            "logging:\n  level: debug\nperformance:\n  threads: 4\n  chunk_size: 10\n",
            encoding="utf-8",
        )
        settings = ConfigLoader(config_file=config_file).load()
        assert settings.logging.level == LogLevel.DEBUG
        assert settings.performance.threads == 4
        assert settings.performance.chunk_size == 10
        assert settings.run.failure_budget == 0.001

    def test_finds_candidate(self, tmp_path, monkeypatch):
        """按候选顺序在当前目录查找"""
        monkeypatch.chdir(tmp_path)
        (tmp_path / "config").mkdir()
        (tmp_path / "config" / "platsim.yml").write_text("run:\n  float_precision: 2\n")
        loader = ConfigLoader()
        assert loader.config_file == Path.cwd() / "config" / "platsim.yml"
        assert loader.load().run.float_precision == 2

    def test_load_from_env_file(self, tmp_path):
        """从 .env 文件加载嵌套字段"""
        env_file = tmp_path / ".env"
        env_file.write_text("PLATSIM_RUN__FAILURE_BUDGET=0.01\n", encoding="utf-8")
        settings = ConfigLoader(env_file=env_file).load()
        assert settings.run.failure_budget == 0.01

    def test_config_priority(self, tmp_path, monkeypatch):
        """环境变量 > .env 文件 > YAML > 默认值"""
        config_file = tmp_path / "platsim.yaml"
        config_file.write_text(
            "performance:\n  threads: 2\n  chunk_size: 10\nrun:\n  float_precision: 6\n",
            encoding="utf-8",
        )
        env_file = tmp_path / ".env"
        env_file.write_text(
            "PLATSIM_PERFORMANCE__THREADS=3\nPLATSIM_RUN__FLOAT_PRECISION=5\n",
            encoding="utf-8",
        )
        monkeypatch.setenv("PLATSIM_PERFORMANCE__THREADS", "8")

        settings = ConfigLoader(env_file=env_file, config_file=config_file).load()
        assert settings.performance.threads == 8
        assert settings.run.float_precision == 5
        assert settings.performance.chunk_size == 10
        assert settings.run.failure_budget == 0.001

    def test_empty_yaml(self, tmp_path):
        """空文件等于没有配置"""
        config_file = tmp_path / "platsim.yaml"
        config_file.write_text("", encoding="utf-8")
        assert ConfigLoader(config_file=config_file).load_yaml_config() == {}

    def test_invalid_yaml(self, tmp_path):
        """YAML 语法错误"""
        config_file = tmp_path / "platsim.yaml"
        config_file.write_text("performance: [1, 2\n", encoding="utf-8")
        with pytest.raises(ConfigError) as exc_info:
            ConfigLoader(config_file=config_file).load()
        assert exc_info.value.field == str(config_file)

    def test_not_a_mapping(self, tmp_path):
        """顶层不是映射"""
        config_file = tmp_path / "platsim.yaml"
        config_file.write_text("- threads\n", encoding="utf-8")
        with pytest.raises(ConfigError):
            ConfigLoader(config_file=config_file).load()

    def test_validation_error(self, tmp_path):
        """校验失败时报告字段路径"""
        config_file = tmp_path / "platsim.yaml"
        config_file.write_text("performance:\n  threads: 0\n", encoding="utf-8")
        with pytest.raises(ConfigError) as exc_info:
            ConfigLoader(config_file=config_file).load()
        assert exc_info.value.field == "performance.threads"


class TestSettings:
    """测试全局设置"""

    def test_singleton_pattern(self, tmp_path, monkeypatch):
        """同样参数返回同一个对象"""
        monkeypatch.chdir(tmp_path)
        assert get_settings() is get_settings()

    def test_reload(self, tmp_path, monkeypatch):
        """reload_settings 重新读取配置文件"""
        monkeypatch.chdir(tmp_path)
        assert get_settings().performance.threads == 1
        (tmp_path / "platsim.yaml").write_text("performance:\n  threads: 6\n")
        assert get_settings().performance.threads == 1
        assert reload_settings().performance.threads == 6

    def test_section_accessors(self, tmp_path, monkeypatch):
        """按配置段访问"""
        monkeypatch.chdir(tmp_path)
        monkeypatch.setenv("PLATSIM_RUN__FAILURE_BUDGET", "0.05")
        assert get_run_config().failure_budget == 0.05
        assert get_performance_config() == PerformanceConfig()
