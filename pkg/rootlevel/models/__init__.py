from rootlevel.models.config import EngineConfig, RunConfig
from rootlevel.models.metrics import IterationMetrics
from rootlevel.models.phantom_spec import GranuleSpec, PhantomSpec, TubeSpec

__all__ = [
    "EngineConfig",
    "RunConfig",
    "IterationMetrics",
    "GranuleSpec",
    "PhantomSpec",
    "TubeSpec",
]
