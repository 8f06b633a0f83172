"""
DimLab - 多重分形盒维数实验室

配置管理模块
"""
import copy
import json
import os
import sys
from pathlib import Path


class Config:
    """应用程序配置管理"""

    # 默认配置
    DEFAULTS = {
        # 网格与半径阶梯
        "grid": {
            "base": 3
        },
        "ladder": {
            "k_lo": 3,
            "k_hi": 8,
            "guard_steps": 2       # 原子分辨率保护：k_hi 距离构建深度至少留出的阶数
        },
        # 自相似构建
        "ifs": {
            "atom_cap": 2_000_000,
            "osc_tolerance": 1e-12
        },
        # 覆盖/填充求和
        "counting": {
            "radius_rtol": 1e-9,   # 开球与分离判定的相对容差
            "order": "mass"        # mass=按球质量排序, lexicographic=只按坐标字典序
        },
        # 维数估计
        "dims": {
            "q_grid": [-2, -1, 0, 1, 2],
            "eps_ladder": [0.5, 0.2, 0.1, 0.05],
            "selection_level": 2,
            "mass_threshold": 0.01,
            "doubling_bound": 64.0
        },
        # 典型测度构造
        "typgen": {
            "j_max": 40,
            "margin_factor": 2.0
        },
        # Fortet-Mourier 距离
        "metric": {
            "atom_cap": 400,
            "lp_tolerance": 1e-8
        },
        # 验收容差
        "tolerances": {
            "tau_step": 0.05,
            "convexity": 0.1,
            "unif": 0.08,
            "variant": 0.05,
            "mode": 0.08,
            "sandwich": 0.1
        },
        # 运行时
        "runtime": {
            "threads": None        # None=使用 CPU 核数，可被环境变量 DIMLAB_THREADS 覆盖
        },
        "logging": {
            "dir": None,           # None=程序目录下的 data/
            "console_level": "INFO"
        }
    }

    def __init__(self, config_path: str = None):
        """
        初始化配置管理器

        Args:
            config_path: 配置文件路径，默认为程序目录下的 config.json
        """
        if getattr(sys, 'frozen', False):
            self.base_dir = Path(sys.executable).parent
        else:
            self.base_dir = Path(__file__).parent

        if config_path:
            self.config_path = Path(config_path)
        else:
            self.config_path = self.base_dir / "config.json"

        self._config = copy.deepcopy(self.DEFAULTS)
        self.load()

    def load(self) -> None:
        """从文件加载配置"""
        if self.config_path.exists():
            try:
                with open(self.config_path, 'r', encoding='utf-8') as f:
                    saved_config = json.load(f)
                    self._deep_update(self._config, saved_config)
            except (json.JSONDecodeError, IOError) as e:
                # 使用 print 而非 logger，因为 config.py 在 logger 之前加载
                print(f"加载配置失败: {e}，使用默认配置")

    def save(self) -> None:
        """保存配置到文件"""
        self.config_path.parent.mkdir(parents=True, exist_ok=True)
        with open(self.config_path, 'w', encoding='utf-8') as f:
            json.dump(self._config, f, indent=4, ensure_ascii=False)

    def get(self, *keys, default=None):
        """
        获取配置值

        Args:
            keys: 配置键路径，如 get("ladder", "k_lo")
            default: 默认值

        Returns:
            配置值或默认值
        """
        value = self._config
        for key in keys:
            if isinstance(value, dict) and key in value:
                value = value[key]
            else:
                return default
        return value

    def set(self, *keys, value) -> None:
        """
        设置配置值

        Args:
            keys: 配置键路径
            value: 要设置的值
        """
        if len(keys) < 1:
            return

        config = self._config
        for key in keys[:-1]:
            if key not in config:
                config[key] = {}
            config = config[key]
        config[keys[-1]] = value

    def _deep_update(self, base: dict, update: dict) -> None:
        """深度更新字典"""
        for key, value in update.items():
            if key in base and isinstance(base[key], dict) and isinstance(value, dict):
                self._deep_update(base[key], value)
            else:
                base[key] = value

    @property
    def threads(self) -> int:
        """并行线程数：环境变量 DIMLAB_THREADS 优先"""
        env = os.environ.get("DIMLAB_THREADS")
        if env:
            try:
                return max(1, int(env))
            except ValueError:
                print(f"DIMLAB_THREADS 无效: {env}，忽略")
        value = self.get("runtime", "threads")
        if value:
            return max(1, int(value))
        return os.cpu_count() or 1

    @property
    def log_dir(self) -> Path:
        """获取日志目录完整路径"""
        log_dir = self.get("logging", "dir")
        if not log_dir:
            return self.base_dir / "data"
        path = Path(log_dir)
        if not path.is_absolute():
            path = self.base_dir / path
        return path


# 全局配置实例
config = Config()
