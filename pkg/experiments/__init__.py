"""
实验模块
提供运行配置、报告编排与验收检查
"""
from .run_config import RunConfig, Session, build_session, combine, parse_q_grid
from .runner import (
    cmd_build, cmd_report, cmd_typgen, cmd_metric, compute_reports, generate, load_run,
)
from .acceptance import AcceptanceSuite, CheckResult, cmd_verify

__all__ = [
    'RunConfig',
    'Session',
    'build_session',
    'combine',
    'parse_q_grid',
    'cmd_build',
    'cmd_report',
    'cmd_typgen',
    'cmd_metric',
    'compute_reports',
    'generate',
    'load_run',
    'AcceptanceSuite',
    'CheckResult',
    'cmd_verify',
]
