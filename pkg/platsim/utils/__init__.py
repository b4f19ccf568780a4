"""工具函数"""

from platsim.utils.logging import configure_logging, current_logging_options, get_logger

__all__ = [
    "configure_logging",
    "get_logger",
    "current_logging_options",
]
