"""
DimLab - 多重分形盒维数实验室

异常定义
"""


class DimLabError(Exception):
    """所有 DimLab 异常的基类"""


class ConfigError(DimLabError, ValueError):
    """运行配置无效"""


class MeasureError(DimLabError, ValueError):
    """测度无效（权重、原子、文件格式）"""


class OutOfBoxError(DimLabError, ValueError):
    """原子落在会话包围盒之外"""


class AtomCapError(DimLabError, ValueError):
    """构建深度超过原子数上限"""


class WordError(DimLabError, ValueError):
    """字母超出映射编号范围"""


class EmptyRegionError(DimLabError, ValueError):
    """区域内没有任何原子"""


class DomainError(DimLabError, ValueError):
    """零质量球的负幂次无定义"""


class TooFewScalesError(DimLabError, ValueError):
    """尺度窗口内的点数不足以估计斜率"""


class ResolutionGuardError(DimLabError, ValueError):
    """尺度窗口超出离散化分辨率 (atom-resolution guard)"""


class EmptyNetError(DimLabError, ValueError):
    """采样网为空，或某个网点的邻域内没有原子"""


class ThresholdError(DimLabError, ValueError):
    """没有网格单元达到质量阈值"""


class ScanExhaustedError(DimLabError):
    """半径扫描达到上限仍未满足条件"""


class SupportConditionError(DimLabError, ValueError):
    """支撑分离条件不满足"""

    def __init__(self, message: str, offending=None):
        super().__init__(message)
        self.offending = list(offending or [])


class MetricCapError(DimLabError, ValueError):
    """合并支撑超过线性规划的原子上限"""


class WitnessError(DimLabError):
    """线性规划见证函数未通过复核"""
