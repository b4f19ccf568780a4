"""
日志系统单元测试
"""

import json
import logging

from platsim.utils.logging import configure_logging, current_logging_options, get_logger


def last_line(text: str) -> str:
    return [line for line in text.splitlines() if line.strip()][-1]


class TestConfigureLogging:
    """测试日志配置"""

    def test_configure_with_defaults(self):
        """没有设置文件时为 INFO/text"""
        configure_logging()
        assert logging.getLogger().level == logging.INFO
        assert current_logging_options() == ("INFO", "text")

    def test_configure_with_custom_level(self):
        """自定义日志级别"""
        configure_logging(level="DEBUG", format_type="text")
        assert logging.getLogger().level == logging.DEBUG

    def test_level_from_settings(self, tmp_path, monkeypatch):
        """未指定时从应用设置读取"""
        monkeypatch.chdir(tmp_path)
        (tmp_path / "platsim.yaml").write_text(
            "logging:\n  level: warning\n  format: json\n", encoding="utf-8"
        )
        configure_logging()
        assert logging.getLogger().level == logging.WARNING
        assert current_logging_options() == ("WARNING", "json")

    def test_json_format(self, capsys):
        """JSON 格式每行一个事件，键值对作为字段"""
        configure_logging(level="INFO", format_type="json")
        get_logger("platsim.test").info("场景完成", scenario_id="base-000", failed=0)
        record = json.loads(last_line(capsys.readouterr().err))
        assert record["event"] == "场景完成"
        assert record["scenario_id"] == "base-000"
        assert record["failed"] == 0
        assert record["level"] == "info"
        assert record["logger"] == "platsim.test"

    def test_logs_go_to_stderr(self, capsys):
        """日志写 stderr，stdout 保持干净"""
        configure_logging(level="INFO", format_type="text")
        get_logger("platsim.test").info("写出结果")
        captured = capsys.readouterr()
        assert "写出结果" in captured.err
        assert captured.out == ""

    def test_level_filtering(self, capsys):
        """低于配置级别的事件被丢弃"""
        configure_logging(level="WARNING", format_type="text")
        logger = get_logger("platsim.test")
        logger.info("不应出现")
        logger.warning("失败重复", replicate=3)
        err = capsys.readouterr().err
        assert "不应出现" not in err
        assert "失败重复" in err

    def test_configure_with_log_file(self, tmp_path):
        """同时写日志文件"""
        log_file = tmp_path / "logs" / "platsim.log"
        configure_logging(level="INFO", format_type="text", log_file=log_file)
        get_logger("platsim.test").info("test message")
        assert log_file.exists()
        assert "test message" in log_file.read_text(encoding="utf-8")

    def test_reconfigure_replaces_handlers(self, tmp_path):
        """重复配置不叠加处理器"""
        log_file = tmp_path / "platsim.log"
        configure_logging(level="INFO", format_type="text", log_file=log_file)
        configure_logging(level="INFO", format_type="text")
        assert not any(
            isinstance(h, logging.FileHandler) for h in logging.getLogger().handlers
        )


class TestGetLogger:
    """测试获取 logger"""

    def test_get_logger_with_name(self):
        """指定名称"""
        configure_logging(level="INFO", format_type="text")
        assert get_logger("platsim.engine") is not None

    def test_get_logger_auto_name(self, capsys):
        """默认使用调用模块名"""
        configure_logging(level="INFO", format_type="json")
        get_logger().info("自动命名")
        record = json.loads(last_line(capsys.readouterr().err))
        assert record["logger"] == __name__

    def test_bound_context(self, capsys):
        """bind 的字段出现在后续事件中"""
        configure_logging(level="INFO", format_type="json")
        logger = get_logger("platsim.test").bind(scenario_id="cap-002")
        logger.info("开始")
        record = json.loads(last_line(capsys.readouterr().err))
        assert record["scenario_id"] == "cap-002"


class TestWorkerOptions:
    """测试传给工作进程的日志参数"""

    def test_options_normalized(self):
        """级别大写、格式小写"""
        configure_logging(level="debug", format_type="JSON")
        assert current_logging_options() == ("DEBUG", "json")

    def test_options_round_trip(self):
        """工作进程用同样的参数重新配置"""
        configure_logging(level="ERROR", format_type="text")
        configure_logging(*current_logging_options())
        assert logging.getLogger().level == logging.ERROR
