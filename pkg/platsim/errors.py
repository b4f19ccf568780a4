"""
异常定义

所有模块共用的异常层次结构。CLI 根据异常类型映射退出码。
"""

from typing import Optional


class PlatsimError(Exception):
    """PlatSim 错误基类"""

    def __init__(self, message: str, field: Optional[str] = None):
        self.message = message
        self.field = field
        super().__init__(self.message)

    def __str__(self) -> str:
        if self.field:
            return f"[{self.field}] {self.message}"
        return self.message


class ParameterError(PlatsimError, ValueError):
    """参数错误（分布参数、效应量等不合法）"""

    pass


class NoArmsError(PlatsimError):
    """没有活跃试验组时请求随机化"""

    pass


class PeriodError(PlatsimError):
    """时间段簿记的逻辑错误"""

    pass


class ArmStateError(PlatsimError):
    """非法的试验组状态转换"""

    pass


class AnalysisError(PlatsimError):
    """ANCOVA 拟合退化（秩亏、零方差等）"""

    def __init__(
        self,
        message: str,
        arm_id: Optional[int] = None,
        kind: Optional[str] = None,
    ):
        self.arm_id = arm_id
        self.kind = kind
        super().__init__(message)

    def __str__(self) -> str:
        if self.arm_id is not None:
            return f"[arm {self.arm_id}/{self.kind or '?'}] {self.message}"
        return self.message


class ConfigError(PlatsimError):
    """场景配置错误，带字段路径和（可选的）YAML 行号"""

    def __init__(
        self,
        message: str,
        field: Optional[str] = None,
        line: Optional[int] = None,
    ):
        self.line = line
        super().__init__(message, field=field)

    def __str__(self) -> str:
        location = []
        if self.line is not None:
            location.append(f"line {self.line}")
        if self.field:
            location.append(self.field)
        if location:
            return f"[{', '.join(location)}] {self.message}"
        return self.message


class OutputError(PlatsimError):
    """输出目录不可写或非空"""

    pass


class ReportError(PlatsimError):
    """report 命令的输入缺失或结构不一致"""

    pass


class FailureBudgetExceeded(PlatsimError):
    """失败重复次数超出预算"""

    def __init__(self, message: str, failed: int = 0, total: int = 0):
        self.failed = failed
        self.total = total
        super().__init__(message)


__all__ = [
    "PlatsimError",
    "ParameterError",
    "NoArmsError",
    "PeriodError",
    "ArmStateError",
    "AnalysisError",
    "ConfigError",
    "OutputError",
    "ReportError",
    "FailureBudgetExceeded",
]
