"""
DimLab - 多重分形盒维数实验室

程序入口
"""
import argparse
import sys
from pathlib import Path

# 添加项目根目录到路径
project_root = Path(__file__).parent
if str(project_root) not in sys.path:
    sys.path.insert(0, str(project_root))

from config import config
from errors import DimLabError
from logger import get_logger, setup_logging


def build_parser() -> argparse.ArgumentParser:
    """命令行参数：五个子命令共用一组运行配置覆盖项"""
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="运行配置或 IFS 配置 JSON")
    common.add_argument("--out", help="输出目录")
    common.add_argument("--seed", type=int, help="随机种子")
    common.add_argument("--depth", type=int, help="IFS 构建深度")
    common.add_argument("--q-grid", dest="q_grid", help='q 网格，如 "-2,-1,0,1,2"')
    common.add_argument("--mode", choices=["covering", "packing"], help="求和方式")
    common.add_argument("--variant", choices=["centers", "intersecting"], help="D 指数局部化方式")
    common.add_argument("--verbose", action="store_true", help="控制台输出 DEBUG 日志")

    parser = argparse.ArgumentParser(prog="dimlab", description="DimLab - 多重分形盒维数实验室")
    sub = parser.add_subparsers(dest="command", required=True)

    from experiments import cmd_build, cmd_metric, cmd_report, cmd_typgen, cmd_verify

    p = sub.add_parser("build", parents=[common], help="构建自相似测度文件")
    p.set_defaults(func=cmd_build)
    p = sub.add_parser("report", parents=[common], help="计算维数报告")
    p.set_defaults(func=cmd_report)
    p = sub.add_parser("verify", parents=[common], help="运行验收检查")
    p.set_defaults(func=cmd_verify)
    p = sub.add_parser("typgen", parents=[common], help="构造典型测度")
    p.set_defaults(func=cmd_typgen)
    p = sub.add_parser("metric", parents=[common], help="Fortet-Mourier 距离")
    p.add_argument("--mu", required=True, help="测度文件 μ")
    p.add_argument("--nu", required=True, help="测度文件 ν")
    p.add_argument("--witness", help="见证函数 CSV 输出路径")
    p.set_defaults(func=cmd_metric)
    return parser


def main(argv=None) -> int:
    """主函数"""
    args = build_parser().parse_args(argv)

    # 初始化日志系统
    level = "DEBUG" if args.verbose else config.get("logging", "console_level", default="INFO")
    setup_logging(config.log_dir, console_level=level)
    logger = get_logger("main")

    try:
        return args.func(args)
    except DimLabError as e:
        logger.error(f"{args.command} 失败: {type(e).__name__}: {e}")
        return 2


if __name__ == "__main__":
    sys.exit(main())
