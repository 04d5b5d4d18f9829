from pydantic import BaseModel, ConfigDict

METRICS_HEADER = ("iter", "c_active", "c_static", "ga_cubes", "gh_cubes", "energy")


class IterationMetrics(BaseModel):
    """Fila de métricas por iteración (curvas de ocupación de G_h y G_a)."""

    model_config = ConfigDict(frozen=True)

    iteration: int
    c_active: int
    c_static: int
    ga_cubes: int
    gh_cubes: int
    energy: float

    def csv_row(self) -> tuple:
        # repr() da la representación más corta que reproduce el float: estable entre ejecuciones
        return (
            self.iteration,
            self.c_active,
            self.c_static,
            self.ga_cubes,
            self.gh_cubes,
            repr(self.energy),
        )
