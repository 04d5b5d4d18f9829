from pathlib import Path
from typing import Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from rootlevel.errors import ConfigError


class EngineConfig(BaseModel):
    """
    Parámetros del motor de conjuntos de nivel.

    Los valores por defecto son los de la tabla publicada (b=10, ν=1) con
    t=1 y k=100.
    """

    model_config = ConfigDict(extra="forbid", frozen=True)

    b: int = Field(10, description="Ancho de la banda estrecha (vóxeles)")
    nu: float = Field(1.0, ge=0.0, description="Peso del término de suavidad ν")
    s: int = Field(10, description="Arista de los cubos de la rejilla de ocupación")
    t: int = Field(1, ge=0, le=254, description="Máximo count(x) para pertenecer a C_a")
    k: int = Field(100, description="Terminación cuando |C_a| < k")
    dt_step: float = Field(1.0, description="Paso temporal Δt")
    g_min: int = Field(1, ge=0, description="Nivel de gris mínimo de Ω₁ y Ω₂")
    root_band: Optional[Tuple[int, int]] = Field(
        None, description="Intervalo [r_lo, r_hi] permitido para entrar en Ω₂; None = todo el rango"
    )
    explore_incrementally: bool = Field(True, description="Exploración incremental con G_h")
    max_iters: int = Field(5000, ge=1, description="Tope de seguridad de iteraciones")
    history_scale: int = Field(1, description="Arista de G_h como múltiplo de s")
    sigma_floor: float = Field(1.0, gt=0.0, description="Desviación típica mínima por clase")

    @model_validator(mode="after")
    def _check_relations(self) -> "EngineConfig":
        if self.b < 1:
            raise ValueError(f"b debe ser >= 1 (b={self.b})")
        if self.s < self.b:
            raise ValueError(f"s debe ser >= b (s={self.s}, b={self.b})")
        if self.k < 1:
            raise ValueError(f"k debe ser >= 1 (k={self.k})")
        if self.dt_step <= 0:
            raise ValueError(f"dt_step debe ser > 0 (dt_step={self.dt_step})")
        if self.history_scale < 1:
            raise ValueError(f"history_scale debe ser >= 1 (history_scale={self.history_scale})")
        if self.root_band is not None and self.root_band[0] > self.root_band[1]:
            raise ValueError(f"root_band invertida: {self.root_band}")
        return self

    def band_limits(self, depth: int) -> Tuple[int, int]:
        """Intervalo efectivo de Ω₂ para una profundidad de bits."""
        if self.root_band is None:
            return 0, (1 << depth) - 1
        return self.root_band


ENGINE_KEYS = frozenset(EngineConfig.model_fields)


class RunConfig(EngineConfig):
    """Configuración completa de una ejecución por lotes."""

    volume_dir: Optional[Path] = None
    raw: Optional[Path] = None
    dims: Optional[Tuple[int, int, int]] = None
    depth: Optional[int] = None
    pitch_um: float = Field(1.0, gt=0.0)
    init_dir: Optional[Path] = None
    out: Path = Path("out")
    workers: int = Field(1, ge=1)
    phantom: Optional[Path] = None
    strict: bool = False
    checkpoint: int = Field(0, ge=0, description="Volcar etiquetas cada N iteraciones; 0 = nunca")
    preset: Optional[str] = None
    plot: bool = False
    seed_stride: int = Field(1, ge=1, description="Marcar uno de cada N vóxeles en modo fantasma")
    seed_slices: int = Field(3, ge=1, description="Cortes Z marcados en modo fantasma")
    verbosity: int = 0

    @model_validator(mode="after")
    def _check_inputs(self) -> "RunConfig":
        sources = [self.volume_dir is not None, self.raw is not None, self.phantom is not None]
        if sum(sources) != 1:
            raise ValueError("se requiere exactamente una entrada: volume-dir, raw o phantom")
        if self.raw is not None:
            if self.dims is None or self.depth is None:
                raise ValueError("raw requiere dims y depth")
        if self.depth is not None and self.depth not in (8, 16):
            raise ValueError(f"depth debe ser 8 o 16 (depth={self.depth})")
        if self.phantom is None and self.init_dir is None:
            raise ValueError("init-dir required: --init-dir es obligatorio fuera del modo fantasma")
        return self

    def engine(self) -> EngineConfig:
        return EngineConfig(**self.model_dump(include=set(ENGINE_KEYS)))


def build(model, **values):
    """Construye ``model`` convirtiendo los errores de pydantic en ConfigError."""
    try:
        return model(**values)
    except ValidationError as exc:
        problems = []
        for err in exc.errors():
            loc = ".".join(str(p) for p in err["loc"]) or "config"
            problems.append(f"{loc}: {err['msg']}")
        raise ConfigError("configuración inválida: " + "; ".join(problems)) from exc
