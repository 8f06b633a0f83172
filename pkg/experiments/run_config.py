"""
DimLab - 多重分形盒维数实验室

实验运行配置 - RunConfig 的读取、命令行覆盖与输入构建
"""
import json
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable, Optional

import numpy as np

from config import config
from dims import (
    ReportInputs, SampleNet, ScaleConfig, atom_net, atom_net_builder, cylinder_net,
    cylinder_net_builder, cylinder_representatives, point_net,
)
from errors import ConfigError, ResolutionGuardError
from ifs import (
    IFSModel, OSCReport, build_measure, load_ifs, resolution_limit, s_extremes, verify_osc,
)
from logger import get_logger
from measure import (
    BoundingBox, DiscreteMeasure, dirac, load_measure, uniform_grid_measure,
)
from typgen import finite_net_measure, mix

logger = get_logger("experiments")

INPUT_KINDS = ("ifs", "measure", "composite")


@dataclass
class RunConfig:
    """
    一次实验的全部设置

    未设置的字段在构建时取全局配置的默认值；相对路径以配置文件所在目录为基准。
    """
    name: str = "run"
    base_dir: Path = field(default_factory=Path.cwd)
    input: dict = field(default_factory=dict)
    bounding_box: Optional[BoundingBox] = None
    grid_base: Optional[int] = None
    k_lo: Optional[int] = None
    k_hi: Optional[int] = None
    q_grid: Optional[list] = None
    mode: str = "covering"
    variant: str = "centers"
    dilation: float = 1.0
    order: Optional[str] = None
    nets: list = field(default_factory=list)
    outer_net: Optional[dict] = None
    inner_nets: list = field(default_factory=list)
    inner_net: Optional[dict] = None
    doubling_sample: Optional[dict] = None
    measure_dims: Optional[dict] = None
    typgen: Optional[dict] = None
    expect: dict = field(default_factory=dict)
    checks: Optional[list] = None
    out: Optional[Path] = None
    seed: int = 0

    @classmethod
    def load(cls, path) -> "RunConfig":
        """
        读取运行配置 JSON

        Raises:
            ConfigError: 文件不存在或字段非法
        """
        path = Path(path)
        if not path.exists():
            raise ConfigError(f"运行配置不存在: {path}")
        try:
            with open(path, 'r', encoding='utf-8') as f:
                data = json.load(f)
        except json.JSONDecodeError as e:
            raise ConfigError(f"运行配置解析失败 {path}: {e}") from e
        return cls.from_dict(data, path.parent)

    @classmethod
    def from_dict(cls, data: dict, base_dir=None) -> "RunConfig":
        base_dir = Path(base_dir) if base_dir is not None else Path.cwd()
        ladder = data.get("ladder", {})
        box = data.get("bounding_box")
        run = cls(
            name=data.get("name", "run"),
            base_dir=base_dir,
            input=data.get("input", {}),
            bounding_box=BoundingBox(tuple(box["lo"]), tuple(box["hi"])) if box else None,
            grid_base=data.get("grid_base"),
            k_lo=ladder.get("k_lo"),
            k_hi=ladder.get("k_hi"),
            q_grid=data.get("q_grid"),
            mode=data.get("mode", "covering"),
            variant=data.get("variant", "centers"),
            dilation=float(data.get("dilation", 1.0)),
            order=data.get("order"),
            nets=list(data.get("nets", [])),
            outer_net=data.get("outer_net"),
            inner_nets=list(data.get("inner_nets", [])),
            inner_net=data.get("inner_net"),
            doubling_sample=data.get("doubling_sample"),
            measure_dims=data.get("measure_dims"),
            typgen=data.get("typgen"),
            expect=data.get("expect", {}),
            checks=data.get("checks"),
            out=Path(data["out"]) if data.get("out") else None,
            seed=int(data.get("seed", 0)),
        )
        run.validate()
        return run

    def validate(self) -> None:
        kind = self.input.get("kind")
        if kind not in INPUT_KINDS:
            raise ConfigError(f"未知输入类型: {kind}，可选 {INPUT_KINDS}")
        if kind in ("ifs", "measure") and not self.resolve(self.input.get("path", "")).is_file():
            raise ConfigError(f"输入文件不存在: {self.input.get('path')}")
        if kind == "ifs" and int(self.input.get("depth", -1)) < 0:
            raise ConfigError("IFS 输入需要非负的 depth")

    def resolve(self, path) -> Path:
        path = Path(path)
        return path if path.is_absolute() else self.base_dir / path

    def with_overrides(self, out=None, seed=None, depth=None, q_grid=None,
                       mode=None, variant=None) -> "RunConfig":
        """命令行参数覆盖配置文件"""
        run = replace(self)
        if out is not None:
            run.out = Path(out)
        if seed is not None:
            run.seed = int(seed)
        if depth is not None:
            if run.input.get("kind") != "ifs":
                raise ConfigError("--depth 只适用于 IFS 输入")
            run.input = {**run.input, "depth": int(depth)}
        if q_grid is not None:
            run.q_grid = list(q_grid)
        if mode is not None:
            run.mode = mode
        if variant is not None:
            run.variant = variant
        return run

    @property
    def out_dir(self) -> Path:
        if self.out is None:
            return self.base_dir / "results" / self.name
        return self.out if self.out.is_absolute() else Path.cwd() / self.out

    @property
    def qs(self) -> list[float]:
        grid = self.q_grid if self.q_grid is not None else config.get("dims", "q_grid")
        return [float(q) for q in grid]

    def scale_config(self, frame: BoundingBox, **overrides) -> ScaleConfig:
        values = dict(base=self.grid_base, k_lo=self.k_lo, k_hi=self.k_hi, mode=self.mode,
                      dilation=self.dilation, order=self.order, variant=self.variant, frame=frame)
        values.update(overrides)
        return ScaleConfig.from_config(**values)


def parse_q_grid(text: str) -> list[float]:
    """解析 "a,b,c" 形式的 q 网格"""
    try:
        values = [float(tok) for tok in text.split(",") if tok.strip()]
    except ValueError as e:
        raise ConfigError(f"q 网格无法解析: {text}") from e
    if not values or not all(math.isfinite(v) for v in values):
        raise ConfigError(f"q 网格无效: {text}")
    return values


@dataclass
class Session:
    """由 RunConfig 构建出的参考测度、尺度配置与可选的 IFS 信息"""
    run: RunConfig
    pi: DiscreteMeasure
    frame: BoundingBox
    cfg: ScaleConfig
    ifs: Optional[IFSModel] = None
    depth: Optional[int] = None
    osc: Optional[OSCReport] = None

    @property
    def osc_holds(self) -> bool:
        if self.ifs is None:
            return False
        if self.run.input.get("assume_osc"):
            return True
        return self.osc is not None and self.osc.holds

    @property
    def s_extremes(self) -> Optional[tuple]:
        """OSC 成立（或声明成立）的自相似输入才给出 (s_min, s_max)"""
        return s_extremes(self.ifs) if self.osc_holds else None

    def resolution_issue(self) -> Optional[str]:
        """
        原子分辨率保护

        Returns:
            窗口超出构建深度能分辨的尺度时返回诊断文本，否则 None
        """
        if self.ifs is None:
            return None
        guard = config.get("ladder", "guard_steps", default=2)
        limit = resolution_limit(self.ifs, self.depth, self.cfg.base, guard)
        if self.cfg.k_hi <= limit:
            return None
        return (f"atom-resolution guard: 深度 {self.depth} 在 b={self.cfg.base} 下只支持 "
                f"k_hi ≤ {limit}（guard_steps={guard}），当前 k_hi={self.cfg.k_hi}")

    def require_resolution(self) -> None:
        """
        Raises:
            ResolutionGuardError: 窗口超出构建深度的分辨范围
        """
        issue = self.resolution_issue()
        if issue:
            raise ResolutionGuardError(issue)

    def with_cfg(self, **overrides) -> "Session":
        return replace(self, cfg=replace(self.cfg, **overrides))

    # ------------------------------------------------------------------
    # 采样网
    # ------------------------------------------------------------------

    def nets_from(self, spec: dict) -> list[SampleNet]:
        """一个网描述展开成若干采样网（柱集网按深度各一个）"""
        if "cylinders" in spec:
            opts = spec["cylinders"]
            self._need_ifs("cylinders")
            depths = opts.get("depths", [opts.get("depth", 1)])
            factor = float(opts.get("rho_factor", 0.6))
            return [cylinder_net(self.ifs, int(d), factor, self.frame) for d in depths]
        if "atoms" in spec:
            opts = spec["atoms"]
            return [atom_net(self.pi, int(opts.get("count", 8)), float(opts["rho"]))]
        if "points" in spec:
            opts = spec["points"]
            return [point_net(opts["centers"], float(opts["rho"]))]
        raise ConfigError(f"未知采样网描述: {sorted(spec)}")

    def builder_from(self, spec: dict) -> Callable:
        """tau_loc_max 的内层网构造器"""
        if "cylinders" in spec:
            opts = spec["cylinders"]
            self._need_ifs("cylinders")
            return cylinder_net_builder(self.ifs, int(opts.get("depth", 2)),
                                        float(opts.get("rho_factor", 0.6)), self.frame)
        if "atoms" in spec:
            opts = spec["atoms"]
            return atom_net_builder(self.pi, int(opts.get("count", 8)), float(opts["rho"]))
        raise ConfigError(f"未知内层网构造器: {sorted(spec)}")

    def doubling_points(self) -> Optional[np.ndarray]:
        spec = self.run.doubling_sample
        if not spec:
            return None
        if "cylinders" in spec:
            self._need_ifs("cylinders")
            return cylinder_representatives(self.ifs, int(spec["cylinders"].get("depth", self.depth)))
        if "atoms" in spec:
            return atom_net(self.pi, int(spec["atoms"].get("count", 64)), 1.0).centers
        if "points" in spec:
            return np.asarray(spec["points"], dtype=float).reshape(-1, self.pi.dim)
        raise ConfigError(f"未知倍增样本描述: {sorted(spec)}")

    def _need_ifs(self, what: str) -> None:
        if self.ifs is None:
            raise ConfigError(f"{what} 采样网需要 IFS 输入")

    # ------------------------------------------------------------------
    # 测度维数的 μ
    # ------------------------------------------------------------------

    def mu(self) -> Optional[DiscreteMeasure]:
        spec = (self.run.measure_dims or {}).get("mu")
        if spec is None:
            return None
        if spec == "same":
            return self.pi
        if "finite_net" in spec:
            opts = spec["finite_net"]
            points = np.asarray(opts["points"], dtype=float).reshape(-1, self.pi.dim)
            if opts.get("snap", True):
                points = self.snap(points)
            return finite_net_measure(points, len(points), opts.get("weights"))
        if "dirac" in spec:
            point = np.asarray(spec["dirac"]["point"], dtype=float).reshape(1, -1)
            if spec["dirac"].get("snap", True):
                point = self.snap(point)
            return dirac(point[0])
        raise ConfigError(f"未知 μ 描述: {spec}")

    def snap(self, points: np.ndarray) -> np.ndarray:
        """替换为 π 中最近的原子"""
        _, idx = self.pi.index.tree.query(points)
        return self.pi.atoms[np.atleast_1d(idx)]

    # ------------------------------------------------------------------

    def report_inputs(self) -> ReportInputs:
        run = self.run
        nets = [net for spec in run.nets for net in self.nets_from(spec)]
        outer = self.nets_from(run.outer_net)[0] if run.outer_net else None
        inner_nets = [net for spec in run.inner_nets for net in self.nets_from(spec)]
        builder = self.builder_from(run.inner_net) if run.inner_net else None
        dims_opts = run.measure_dims or {}
        return ReportInputs(
            pi=self.pi,
            cfg=self.cfg,
            nets=nets,
            outer_net=outer,
            inner_nets=inner_nets,
            inner_builder=builder,
            doubling_sample=self.doubling_points(),
            mu=self.mu(),
            selection_level=dims_opts.get("selection_level"),
            mass_threshold=dims_opts.get("mass_threshold"),
            eps_ladder=dims_opts.get("eps_ladder"),
            s_extremes=self.s_extremes,
        )


def _ifs_measure(run: RunConfig, opts: dict) -> tuple[IFSModel, int, DiscreteMeasure, Optional[BoundingBox]]:
    model, declared_box = load_ifs(run.resolve(opts["path"]))
    depth = int(opts["depth"])
    box = declared_box
    if opts.get("osc_box"):
        box = BoundingBox(tuple(opts["osc_box"]["lo"]), tuple(opts["osc_box"]["hi"]))
    return model, depth, build_measure(model, depth), box


def combine(run: RunConfig, components: list) -> DiscreteMeasure:
    """
    组合输入：各分量按权重混合

    分量形式：{"weight": w, "points": [...]}（等权点集）、
    {"weight": w, "uniform": {lo, hi, base, level}}、{"weight": w, "ifs": {path, depth}}
    """
    parts = []
    for comp in components:
        weight = float(comp["weight"])
        if "points" in comp:
            pts = np.asarray(comp["points"], dtype=float)
            pts = pts.reshape(len(pts), -1)
            parts.append((weight, finite_net_measure(pts, len(pts))))
        elif "uniform" in comp:
            u = comp["uniform"]
            parts.append((weight, uniform_grid_measure(u["lo"], u["hi"], int(u["base"]), int(u["level"]))))
        elif "ifs" in comp:
            parts.append((weight, _ifs_measure(run, comp["ifs"])[2]))
        else:
            raise ConfigError(f"未知组合分量: {sorted(comp)}")
    return mix(parts)


def build_session(run: RunConfig) -> Session:
    """
    构建参考测度与尺度配置

    IFS 输入在配置未给出包围盒时使用映射不动点几何得到的不变盒。
    """
    kind = run.input["kind"]
    ifs, depth, osc = None, None, None
    if kind == "ifs":
        ifs, depth, pi, osc_box = _ifs_measure(run, run.input)
        if osc_box is not None:
            osc = verify_osc(ifs, osc_box)
            if not osc.holds:
                level = "声明成立，继续" if run.input.get("assume_osc") else "s_min/s_max 比较将跳过"
                logger.warning(f"{osc.summary}（{level}）")
        frame = run.bounding_box or ifs.bounding_box()
    elif kind == "measure":
        pi = load_measure(run.resolve(run.input["path"]))
        frame = run.bounding_box or pi.bounding_box()
    else:
        pi = combine(run, run.input.get("components", []))
        frame = run.bounding_box or pi.bounding_box()

    cfg = run.scale_config(frame)
    logger.info(f"会话 {run.name}: 原子数={pi.size}, d={pi.dim}, 阶梯 b={cfg.base} k∈[{cfg.k_lo},{cfg.k_hi}]")
    return Session(run=run, pi=pi, frame=frame, cfg=cfg, ifs=ifs, depth=depth, osc=osc)
