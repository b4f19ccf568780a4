"""
场景网格

YAML 场景文件有两种写法：

1. 只写一个场景（顶层即 ScenarioConfig 字段）::

       mode: platform
       target_n_per_arm: 100

2. 基础场景 + 扫描参数，按声明顺序做笛卡尔积（第一个扫描参数变化最慢）::

       name: futility
       base:
         interim_fraction: 0.5
       sweeps:
         futility_boundary: [null, 0.2, 0.3]
         effect_distribution: [equal, pessimistic]
         calibration.sd_week6: [null, 11.26]   # 点号指向嵌套字段

所有展开后的场景在解析时都会校验；错误信息带字段路径和 YAML 行号。
"""

import copy
import hashlib
import itertools
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from platsim.config.scenario import ScenarioConfig
from platsim.errors import ConfigError


class ExpandedScenario(BaseModel):
    """网格展开后的单个场景"""

    scenario_id: str
    config: ScenarioConfig
    sweep_values: Dict[str, Any] = Field(default_factory=dict)


class ScenarioGrid(BaseModel):
    """基础场景 + 扫描参数"""

    model_config = ConfigDict(extra="forbid")

    name: str = Field(default="scenario", min_length=1, description="网格名称，用作场景编号前缀")
    description: Optional[str] = Field(default=None, description="说明")
    base: ScenarioConfig = Field(default_factory=ScenarioConfig, description="基础场景")
    sweeps: Dict[str, List[Any]] = Field(default_factory=dict, description="扫描参数及取值")

    @field_validator("sweeps")
    @classmethod
    def check_sweeps(cls, v: Dict[str, List[Any]]) -> Dict[str, List[Any]]:
        for key, values in v.items():
            if not values:
                raise ValueError(f"扫描参数 {key} 没有取值")
            head = key.split(".")[0]
            if head not in ScenarioConfig.model_fields:
                raise ValueError(f"未知的扫描参数: {key}")
        return v

    def expand(self) -> List[ExpandedScenario]:
        """
        笛卡尔积展开

        Raises:
            ConfigError: 某个组合不是合法的场景
        """
        base_data = self.base.model_dump(mode="json")
        keys = list(self.sweeps)
        scenarios: List[ExpandedScenario] = []
        for index, combo in enumerate(itertools.product(*(self.sweeps[k] for k in keys))):
            data = copy.deepcopy(base_data)
            values = dict(zip(keys, combo))
            for key, value in values.items():
                _set_dotted(data, key, value)
            try:
                config = ScenarioConfig.model_validate(data)
            except ValidationError as e:
                first = e.errors()[0]
                field = ".".join(str(part) for part in first["loc"])
                raise ConfigError(
                    f"扫描组合 {values} 不合法: {first['msg']}", field=f"sweeps -> {field}"
                ) from e
            scenarios.append(
                ExpandedScenario(
                    scenario_id=f"{self.name}-{index:03d}",
                    config=config,
                    sweep_values=values,
                )
            )
        return scenarios

    def with_overrides(self, **overrides: Any) -> "ScenarioGrid":
        """覆盖基础场景的字段（例如命令行的 --seed、--replicates）"""
        updates = {k: v for k, v in overrides.items() if v is not None}
        if not updates:
            return self
        data = self.base.model_dump(mode="json")
        data.update(updates)
        try:
            base = ScenarioConfig.model_validate(data)
        except ValidationError as e:
            first = e.errors()[0]
            raise ConfigError(first["msg"], field=".".join(map(str, first["loc"]))) from e
        grid = self.model_copy(update={"base": base})
        grid.expand()
        return grid


def _set_dotted(data: Dict[str, Any], dotted: str, value: Any) -> None:
    parts = dotted.split(".")
    target = data
    for part in parts[:-1]:
        if not isinstance(target.get(part), dict):
            target[part] = {}
        target = target[part]
    target[parts[-1]] = value


def _node_line(root: Optional[yaml.Node], path: Sequence[Any]) -> Optional[int]:
    """沿路径查找 YAML 节点，返回尽可能深的节点所在行（从 1 开始）"""
    node = root
    line = node.start_mark.line + 1 if node is not None else None
    for part in path:
        if isinstance(node, yaml.MappingNode):
            match = None
            for key_node, value_node in node.value:
                if str(key_node.value) == str(part):
                    match = (key_node, value_node)
                    break
            if match is None:
                break
            line = match[0].start_mark.line + 1
            node = match[1]
        elif isinstance(node, yaml.SequenceNode) and isinstance(part, int):
            if part >= len(node.value):
                break
            node = node.value[part]
            line = node.start_mark.line + 1
        else:
            break
    return line


def parse_config(data: bytes, source: str = "<config>") -> ScenarioGrid:
    """
    解析场景文件

    Args:
        data: 文件内容（UTF-8）
        source: 来源名称，用于错误信息和默认网格名

    Returns:
        校验过的 ScenarioGrid（所有展开场景均合法）

    Raises:
        ConfigError: 编码、语法、未知字段或约束错误
    """
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as e:
        raise ConfigError(f"{source} 不是合法的 UTF-8: {e}") from e

    try:
        root = yaml.compose(text)
        document = yaml.safe_load(text)
    except yaml.YAMLError as e:
        mark = getattr(e, "problem_mark", None)
        line = mark.line + 1 if mark is not None else None
        raise ConfigError(f"{source} YAML 语法错误: {getattr(e, 'problem', e)}", line=line) from e

    if document is None:
        document = {}
    if not isinstance(document, dict):
        raise ConfigError(f"{source} 顶层必须是映射", line=1)

    flat = not ({"base", "sweeps"} & set(document))
    if flat:
        grid_data: Dict[str, Any] = {"name": Path(source).stem or "scenario", "base": document}
    else:
        grid_data = document

    try:
        grid = ScenarioGrid.model_validate(grid_data)
    except ValidationError as e:
        first = e.errors()[0]
        loc = list(first["loc"])
        yaml_path = loc[1:] if flat and loc[:1] == ["base"] else loc
        field = ".".join(str(part) for part in yaml_path) or None
        raise ConfigError(first["msg"], field=field, line=_node_line(root, yaml_path)) from e

    try:
        grid.expand()
    except ConfigError as e:
        sweeps_line = _node_line(root, ["sweeps"])
        raise ConfigError(e.message, field=e.field, line=sweeps_line) from e
    return grid


def config_digest(data: bytes) -> str:
    """配置文件的 SHA-256 摘要"""
    return hashlib.sha256(data).hexdigest()


def load_grid(path: Path) -> Tuple[ScenarioGrid, str]:
    """
    读取并解析场景文件

    Returns:
        (网格, 配置摘要)
    """
    try:
        data = Path(path).read_bytes()
    except OSError as e:
        raise ConfigError(f"无法读取场景文件: {e}", field=str(path)) from e
    return parse_config(data, source=Path(path).name), config_digest(data)


def to_yaml(grid: ScenarioGrid) -> str:
    """序列化网格；parse_config(to_yaml(g)) 与 g 等价"""
    document = {
        "name": grid.name,
        "base": grid.base.model_dump(mode="json"),
        "sweeps": grid.sweeps,
    }
    if grid.description is not None:
        document["description"] = grid.description
    return yaml.safe_dump(document, sort_keys=False, allow_unicode=True)
