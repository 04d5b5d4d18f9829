from typing import List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator

Point = Tuple[float, float, float]


class TubeSpec(BaseModel):
    """Polilínea de raíz: puntos de control (x, y, z) y radio en cada punto."""

    model_config = ConfigDict(extra="forbid")

    points: List[Point] = Field(..., min_length=1)
    radii: List[float] = Field(..., min_length=1)

    @model_validator(mode="after")
    def _check_radii(self) -> "TubeSpec":
        if len(self.radii) == 1 and len(self.points) > 1:
            self.radii = self.radii * len(self.points)
        if len(self.radii) != len(self.points):
            raise ValueError(f"{len(self.points)} puntos pero {len(self.radii)} radios")
        if min(self.radii) < 1:
            raise ValueError(f"los radios deben ser >= 1 (min={min(self.radii)})")
        return self


class GranuleSpec(BaseModel):
    """Gránulos esféricos (arcilla expandida), aleatorios o en posiciones dadas."""

    model_config = ConfigDict(extra="forbid")

    count: int = Field(0, ge=0)
    radius_range: Tuple[float, float] = (3.0, 6.0)
    centers: List[Point] = Field(default_factory=list)
    radii: List[float] = Field(default_factory=list)
    mu: float = 120.0
    sigma: float = Field(10.0, ge=0.0)
    rim: bool = False
    rim_mu: float = 200.0
    rim_width: int = Field(2, ge=1)

    @model_validator(mode="after")
    def _check(self) -> "GranuleSpec":
        if len(self.centers) != len(self.radii):
            raise ValueError("centers y radii de gránulos deben tener la misma longitud")
        lo, hi = self.radius_range
        if lo < 1 or lo > hi:
            raise ValueError(f"radius_range inválido: {self.radius_range}")
        return self


class PhantomSpec(BaseModel):
    """Volumen sintético: tubos de raíz en un medio granular ruidoso."""

    model_config = ConfigDict(extra="forbid")

    dims: Tuple[int, int, int]
    depth: int = 8
    tubes: List[TubeSpec] = Field(default_factory=list)
    mu1: float = 80.0
    sigma1: float = Field(10.0, ge=0.0)
    mu2: float = 160.0
    sigma2: float = Field(10.0, ge=0.0)
    granules: Optional[GranuleSpec] = None
    seed: int = 0

    @model_validator(mode="after")
    def _check(self) -> "PhantomSpec":
        if min(self.dims) < 1:
            raise ValueError(f"dims inválidas: {self.dims}")
        if self.depth not in (8, 16):
            raise ValueError(f"depth debe ser 8 o 16 (depth={self.depth})")
        return self
