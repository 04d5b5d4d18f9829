"""
rootlevel: segmentación de raíces en volúmenes de TC por conjuntos de nivel
en banda estrecha.
"""

from rootlevel.engine import Label, SegmentationResult, run
from rootlevel.errors import ConfigError, DataError, RootLevelError
from rootlevel.models import EngineConfig, RunConfig
from rootlevel.volume import Volume, VoxelCoord

__version__ = "0.1.0"

__all__ = [
    "ConfigError",
    "DataError",
    "EngineConfig",
    "Label",
    "RootLevelError",
    "RunConfig",
    "SegmentationResult",
    "Volume",
    "VoxelCoord",
    "run",
]
