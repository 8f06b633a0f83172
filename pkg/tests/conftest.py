"""
测试公共夹具
"""
import math
import sys
from pathlib import Path

import pytest

# 添加项目根目录到路径
project_root = Path(__file__).parent.parent
if str(project_root) not in sys.path:
    sys.path.insert(0, str(project_root))

from dims import ScaleConfig
from ifs import build_measure, load_ifs
from measure import BoundingBox, dirac, uniform_grid_measure
from typgen import mix

PRESETS = project_root / "presets"

LOG3_2 = math.log(2) / math.log(3)


@pytest.fixture(scope="session")
def presets_dir() -> Path:
    return PRESETS


@pytest.fixture(scope="session")
def cantor_ifs():
    model, _ = load_ifs(PRESETS / "cantor_uniform.ifs.json")
    return model


@pytest.fixture(scope="session")
def biased_ifs():
    model, _ = load_ifs(PRESETS / "cantor_biased.ifs.json")
    return model


@pytest.fixture(scope="session")
def cantor(cantor_ifs):
    """均匀 Cantor 测度，深度 10"""
    return build_measure(cantor_ifs, 10)


@pytest.fixture(scope="session")
def biased(biased_ifs):
    """偏置 Cantor 测度 (0.2, 0.8)，深度 10"""
    return build_measure(biased_ifs, 10)


@pytest.fixture(scope="session")
def cantor_cfg():
    return ScaleConfig(base=3, k_lo=3, k_hi=8, frame=BoundingBox.unit(1))


@pytest.fixture(scope="session")
def zero_interval():
    """½δ_0 + ½·[1,2] 上的均匀测度（2^12 个原子）"""
    return mix([(0.5, dirac([0.0])), (0.5, uniform_grid_measure([1.0], [2.0], 2, 12))])


@pytest.fixture(scope="session")
def zero_cfg():
    return ScaleConfig(base=2, k_lo=4, k_hi=8, frame=BoundingBox((0.0,), (2.0,)))
