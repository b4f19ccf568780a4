"""
PlatSim 命令行接口

使用示例:
    # 运行场景文件（单个场景或网格）
    platsim run scenarios/base.yaml --out results/base

    # 覆盖种子和重复次数，4 个进程并行
    platsim run scenarios/futility.yaml --seed 7 --replicates 2000 --threads 4 --out results/fut

    # 只校验场景文件
    platsim validate scenarios/allocation.yaml

    # 汇总多个输出目录
    platsim report results/allocation results/futility --out comparison.csv
"""

import functools
import sys
from datetime import datetime, timezone
from pathlib import Path
from typing import Callable, List, Optional, Tuple

import click
from rich.console import Console

from platsim import __version__
from platsim.config.grid import load_grid, to_yaml
from platsim.errors import ConfigError, FailureBudgetExceeded, PlatsimError
from platsim.ocs import aggregate
from platsim.runner.executor import run_scenario
from platsim.runner.output import atomic_write_text, prepare_output_dir, write_scenario_outputs
from platsim.runner.report import build_report
from platsim.utils.logging import configure_logging, get_logger

logger = get_logger(__name__)

EXIT_CONFIG = 2
EXIT_RUNTIME = 3


def handle_errors(func: Callable) -> Callable:
    """把异常映射成退出码：配置错误 2，其他运行错误 3"""

    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except ConfigError as e:
            click.echo(f"❌ 配置错误: {e}", err=True)
            sys.exit(EXIT_CONFIG)
        except PlatsimError as e:
            click.echo(f"❌ 运行失败: {e}", err=True)
            sys.exit(EXIT_RUNTIME)
        except KeyboardInterrupt:
            click.echo("\n❌ 操作已取消", err=True)
            sys.exit(130)

    return wrapper


def _load_settings(settings_file: Optional[str]):
    from platsim.config.settings import get_settings

    return get_settings(config_file=Path(settings_file) if settings_file else None)


@click.group()
@click.version_option(version=__version__, prog_name="platsim")
@click.option(
    "--log-level",
    type=click.Choice(["DEBUG", "INFO", "WARNING", "ERROR"], case_sensitive=False),
    default=None,
    help="日志级别（默认取自配置）",
)
@click.option(
    "--log-format",
    type=click.Choice(["text", "json"], case_sensitive=False),
    default=None,
    help="日志格式（默认取自配置）",
)
@click.option(
    "--settings",
    "settings_file",
    type=click.Path(exists=True, dir_okay=False),
    default=None,
    help="应用设置文件（默认查找 platsim.yaml）",
)
@click.pass_context
def cli(
    ctx: click.Context,
    log_level: Optional[str],
    log_format: Optional[str],
    settings_file: Optional[str],
):
    """
    PlatSim - 平台试验模拟引擎

    共享对照组的 II 期自适应平台试验的蒙特卡洛工作特征评估。
    """
    ctx.ensure_object(dict)
    ctx.obj["settings_file"] = settings_file
    try:
        settings = _load_settings(settings_file)
        configure_logging(
            level=log_level or settings.logging.level.value,
            format_type=log_format or settings.logging.format.value,
            log_file=settings.logging.file,
        )
    except ConfigError as e:
        click.echo(f"❌ 配置错误: {e}", err=True)
        sys.exit(EXIT_CONFIG)


@cli.command()
@click.argument("config", type=click.Path(exists=True, dir_okay=False))
@click.option("--seed", type=click.IntRange(min=0), default=None, help="覆盖 master_seed")
@click.option("--replicates", type=click.IntRange(min=1), default=None, help="覆盖重复次数")
@click.option(
    "--threads", "-j", type=click.IntRange(min=1), default=None, help="工作进程数（默认取自配置）"
)
@click.option(
    "--out",
    "-o",
    type=click.Path(file_okay=False),
    required=True,
    help="输出目录",
)
@click.option(
    "--force", is_flag=True, help="允许写入非空的输出目录，先删除上次运行的场景结果"
)
@click.option("--verbose-events", is_flag=True, help="记录每个重复的事件日志（events.csv）")
@click.pass_context
@handle_errors
def run(
    ctx: click.Context,
    config: str,
    seed: Optional[int],
    replicates: Optional[int],
    threads: Optional[int],
    out: str,
    force: bool,
    verbose_events: bool,
):
    """
    运行场景文件中的全部场景

    示例:
        platsim run scenarios/base.yaml --out results/base

        platsim run scenarios/allocation.yaml --threads 8 --out results/alloc --force
    """
    settings = _load_settings(ctx.obj.get("settings_file"))
    grid, digest = load_grid(Path(config))
    grid = grid.with_overrides(master_seed=seed, replicates=replicates)
    scenarios = grid.expand()

    out_dir = prepare_output_dir(Path(out), force=force)
    atomic_write_text(out_dir / "grid.yaml", to_yaml(grid))

    threads = threads or settings.performance.threads
    aborted: List[Tuple[str, FailureBudgetExceeded]] = []
    total_failed = 0

    click.echo(f"🚀 {grid.name}: {len(scenarios)} 个场景，{threads} 个进程", err=True)
    for scenario in scenarios:
        started_at = datetime.now(timezone.utc)
        try:
            result = run_scenario(
                scenario.config,
                threads=threads,
                chunk_size=settings.performance.chunk_size,
                failure_budget=settings.run.failure_budget,
                record_events=verbose_events,
                scenario_id=scenario.scenario_id,
            )
        except FailureBudgetExceeded as e:
            aborted.append((scenario.scenario_id, e))
            continue

        total_failed += len(result.failures)
        ocs = aggregate(result.results, scenario.config.effect_distribution.effects)
        write_scenario_outputs(
            out_dir / scenario.scenario_id,
            scenario,
            result,
            ocs,
            config_digest=digest,
            started_at=started_at,
            record_events=verbose_events,
        )
        click.echo(
            f"   ✓ {scenario.scenario_id}: {len(result.results)} 次重复，"
            f"{result.seconds:.1f} 秒",
            err=True,
        )

    if total_failed:
        click.echo(f"⚠️  共 {total_failed} 次重复因分析退化被排除（见 failures.csv）", err=True)
    if aborted:
        for scenario_id, error in aborted:
            click.echo(f"   ✗ {scenario_id}: {error.failed}/{error.total} 次重复失败", err=True)
        raise PlatsimError(f"{len(aborted)} 个场景因失败重复超出预算而中止")

    click.echo(f"✅ 结果已保存到: {out_dir}", err=True)


@cli.command()
@click.argument("dirs", nargs=-1, type=click.Path(exists=True), required=True)
@click.option("--out", "-o", type=click.Path(dir_okay=False), default=None, help="完整对比表 CSV")
@click.pass_context
@handle_errors
def report(ctx: click.Context, dirs: Tuple[str, ...], out: Optional[str]):
    """
    汇总一个或多个输出目录，输出场景对比表

    示例:
        platsim report results/allocation

        platsim report results/a results/b --out comparison.csv
    """
    settings = _load_settings(ctx.obj.get("settings_file"))
    build_report(
        [Path(d) for d in dirs],
        out=Path(out) if out else None,
        precision=settings.run.float_precision,
        console=Console(),
    )


@cli.command()
@click.argument("config", type=click.Path(exists=True, dir_okay=False))
@handle_errors
def validate(config: str):
    """
    校验场景文件（不运行模拟）

    示例:
        platsim validate scenarios/futility.yaml
    """
    grid, digest = load_grid(Path(config))
    scenarios = grid.expand()
    click.echo(f"✅ {config}: {len(scenarios)} 个场景")
    click.echo(f"   摘要: {digest}")
    for scenario in scenarios:
        values = ", ".join(f"{k}={v}" for k, v in scenario.sweep_values.items()) or "基础场景"
        click.echo(f"   {scenario.scenario_id}: {values}")


@cli.command()
@click.pass_context
@handle_errors
def info(ctx: click.Context):
    """显示生效的应用设置"""
    settings = _load_settings(ctx.obj.get("settings_file"))

    click.echo("=" * 60)
    click.echo(f"PlatSim v{__version__}")
    click.echo("=" * 60)

    click.echo("\n日志:")
    click.echo(f"  级别: {settings.logging.level.value}")
    click.echo(f"  格式: {settings.logging.format.value}")
    click.echo(f"  文件: {settings.logging.file or '无'}")

    click.echo("\n性能:")
    click.echo(f"  进程数: {settings.performance.threads}")
    click.echo(f"  分块大小: {settings.performance.chunk_size}")

    click.echo("\n运行:")
    click.echo(f"  失败预算: {settings.run.failure_budget:.4%}")
    click.echo(f"  报告小数位: {settings.run.float_precision}")
    click.echo("=" * 60)


def main():
    """主入口"""
    cli()


if __name__ == "__main__":
    main()
