"""
DimLab - 多重分形盒维数实验室

实验编排 - build / report / typgen / metric 子命令
"""
import json
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Optional

import numpy as np

from config import config
from dims import DimReport, ReportBuilder
from errors import ConfigError, ResolutionGuardError
from export import CsvExporter
from ifs import IFSModel, build_measure, load_ifs
from logger import get_logger
from measure import DiscreteMeasure, Region, load_measure, save_measure
from metric import fortet_mourier
from typgen import finite_net_measure, localized_mixture, packing_mixture, weighted_packing_measure
from .run_config import RunConfig, Session, build_session, parse_q_grid

logger = get_logger("experiments")


def load_run(args) -> RunConfig:
    """读取 --config 并应用命令行覆盖"""
    if not getattr(args, "config", None):
        raise ConfigError("需要 --config")
    q_grid = parse_q_grid(args.q_grid) if getattr(args, "q_grid", None) else None
    return RunConfig.load(args.config).with_overrides(
        out=getattr(args, "out", None),
        seed=getattr(args, "seed", None),
        depth=getattr(args, "depth", None),
        q_grid=q_grid,
        mode=getattr(args, "mode", None),
        variant=getattr(args, "variant", None),
    )


def compute_reports(session: Session, threads: Optional[int] = None) -> list[DimReport]:
    """
    在 q 网格上并行计算报告

    KD 树与 q 无关的量在进入线程池前算好；结果按 q 网格顺序返回。
    """
    builder = ReportBuilder(session.report_inputs())
    session.pi.index
    builder.common()
    qs = session.run.qs
    workers = max(1, min(threads or config.threads, len(qs)))
    logger.info(f"计算 {len(qs)} 个 q 的报告，线程数 {workers}")
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(builder.for_q, qs))


# ----------------------------------------------------------------------
# build
# ----------------------------------------------------------------------

def _ifs_source(args) -> tuple[IFSModel, int, str]:
    path = Path(args.config)
    if not path.exists():
        raise ConfigError(f"配置不存在: {path}")
    with open(path, 'r', encoding='utf-8') as f:
        data = json.load(f)
    if "maps" in data:
        model, _ = load_ifs(path)
        if args.depth is None:
            raise ConfigError("IFS 文件需要配合 --depth 使用")
        return model, int(args.depth), path.name.split(".")[0]
    run = load_run(args)
    if run.input.get("kind") != "ifs":
        raise ConfigError("build 只适用于 IFS 输入")
    model, _ = load_ifs(run.resolve(run.input["path"]))
    return model, int(run.input["depth"]), run.name


def cmd_build(args) -> int:
    """构建自相似测度并写出带来源信息的测度文件"""
    model, depth, name = _ifs_source(args)
    measure = build_measure(model, depth)
    out_dir = Path(args.out) if args.out else Path.cwd() / "results"
    header = {
        "source": Path(args.config).name,
        "depth": depth,
        "ratios": " ".join(repr(float(r)) for r in model.ratios),
        "probs": " ".join(repr(p) for p in model.probs),
    }
    path = save_measure(out_dir / f"{name}_depth{depth}.txt", measure, header)
    print(path)
    return 0


# ----------------------------------------------------------------------
# report
# ----------------------------------------------------------------------

def cmd_report(args) -> int:
    """计算 q 网格上的全部指数，写出报告与尺度序列"""
    run = load_run(args)
    session = build_session(run)
    try:
        session.require_resolution()
    except ResolutionGuardError as e:
        logger.warning(f"{e}，继续计算")
    reports = compute_reports(session)
    path = CsvExporter(run.out_dir).write_report(reports)
    failed = sum(1 for r in reports for _, e in r.entries() if e.error)
    print(f"报告: {path}（失败项 {failed}）")
    return 0


# ----------------------------------------------------------------------
# typgen
# ----------------------------------------------------------------------

def _points(session: Session, spec: dict) -> np.ndarray:
    points = np.asarray(spec["points"], dtype=float).reshape(-1, session.pi.dim)
    return session.snap(points) if spec.get("snap", True) else points


def inner_radius(spec: dict, inner_header: dict) -> Optional[float]:
    """内层构造半径：显式 inner_radius，否则取内层的 r_xs（填充）或 r_A（混合）"""
    if spec.get("inner_radius") is not None:
        return float(spec["inner_radius"])
    for key in ("r_xs", "r_A"):
        if key in inner_header:
            return float(inner_header[key])
    return None


def generate(session: Session, spec: dict) -> tuple[DiscreteMeasure, dict]:
    """
    按 typgen 描述构造测度

    Returns:
        (测度, 来源信息)
    """
    kind = spec.get("kind")
    pi = session.pi
    base = session.cfg.base
    if kind == "packing":
        wpm = weighted_packing_measure(pi, spec["x"], float(spec["s"]), float(spec["q"]),
                                       float(spec["t"]), base=base, j_max=spec.get("j_max"))
        return wpm.measure, {"kind": kind, **wpm.header}
    if kind == "mixture":
        region = None
        if spec.get("region"):
            region = Region.ball(tuple(spec["region"]["center"]), float(spec["region"]["radius"]))
        points = _points(session, spec)
        probs = spec.get("probs") or [1.0 / len(points)] * len(points)
        measure, r_a = packing_mixture(pi, points, probs, float(spec["s"]), float(spec["q"]),
                                       float(spec["t"]), region=region, base=base)
        return measure, {"kind": kind, "s": repr(float(spec["s"])), "r_A": repr(r_a)}
    if kind == "finite_net":
        points = _points(session, spec)
        return finite_net_measure(points, len(points), spec.get("weights")), {"kind": kind}
    if kind == "localized":
        inner, inner_header = generate(session, spec["inner"])
        outer = generate(session, spec["outer"])[0]
        margin = spec.get("margin")
        radius = inner_radius(spec, inner_header)
        if margin is None and radius is None:
            raise ConfigError("localized 需要 margin，或由 packing/mixture 内层给出半径")
        measure = localized_mixture(pi, spec["z"], float(spec["kappa"]), float(spec["lambda"]),
                                    inner, outer,
                                    margin=float(margin) if margin is not None else None,
                                    inner_radius=radius)
        header = {"kind": kind, "kappa": repr(float(spec["kappa"])),
                  "lambda": repr(float(spec["lambda"]))}
        if radius is not None:
            header["r_n"] = repr(radius)
        return measure, header
    raise ConfigError(f"未知 typgen 类型: {kind}")


def cmd_typgen(args) -> int:
    """按运行配置的 typgen 段构造典型测度并写出"""
    run = load_run(args)
    if not run.typgen:
        raise ConfigError("运行配置缺少 typgen 段")
    session = build_session(run)
    measure, header = generate(session, run.typgen)
    path = save_measure(run.out_dir / f"{run.name}_typgen.txt", measure,
                        {"source": run.name, **header})
    print(path)
    return 0


# ----------------------------------------------------------------------
# metric
# ----------------------------------------------------------------------

def cmd_metric(args) -> int:
    """两个测度文件之间的 Fortet-Mourier 距离，可选写出见证函数"""
    mu = load_measure(args.mu)
    nu = load_measure(args.nu)
    distance, witness = fortet_mourier(mu, nu)
    print(f"L = {distance!r}")
    if args.witness:
        path = Path(args.witness)
        CsvExporter(path.parent).write_witness(witness.points, witness.values, path.name)
        print(f"见证函数: {path}")
    return 0
