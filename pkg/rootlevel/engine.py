"""
Evolución del frente por conjuntos de nivel en banda estrecha.

Cada iteración:

    localizar C → separar C_a / C_s → marcar G_a → explorar Ω_U (G_h)
    → (terminar si |C_a| < k) → estimar θ₁, θ₂ → reconstruir φ con la TEDT
    → evolucionar la banda → incrementar count(x)

Convenios:
    * φ > 0 en Ω₁, φ <= 0 en Ω₂; los vóxeles de contorno guardan φ = 0 y
      pertenecen a Ω₂.
    * Ω_U (UNLABELED) guarda φ = b+1 y nunca evoluciona.
    * Las semillas Ω₂⁰ quedan fijadas en Ω₂ durante toda la ejecución.
"""

import logging
from enum import IntEnum
from typing import Callable, List, Optional, Tuple

import numpy as np
from numba import njit, prange
from pydantic import BaseModel, ConfigDict, Field

from rootlevel.curvature import GRADIENT_EPS, curvature_at
from rootlevel.distance import tedt_block_union
from rootlevel.errors import InsufficientSamplesError
from rootlevel.grid import OccupancyGrid, mark_active
from rootlevel.models.config import EngineConfig
from rootlevel.models.metrics import IterationMetrics
from rootlevel.parallel import worker_threads
from rootlevel.seeding import SeedSet
from rootlevel.stats import ClassHistogram, GaussianParams, data_term
from rootlevel.volume import Volume

logger = logging.getLogger(__name__)

VETO_PHI = 1e-3
COUNT_MAX = 255
# desplazamiento máximo de φ por el término de curvatura en un paso (vóxeles)
CURVATURE_STEP_MAX = 3.0

_TO_ROOT = 1
_TO_MEDIUM = 2
_VETOED = 3


class Label(IntEnum):
    UNLABELED = 0
    OMEGA1 = 1
    OMEGA2 = 2


class Phi(BaseModel):
    """φ con signo y truncada, etiqueta de clase y count(x) por vóxel."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    values: np.ndarray
    labels: np.ndarray
    counts: np.ndarray

    @classmethod
    def empty(cls, shape, b: int) -> "Phi":
        return cls(
            values=np.full(shape, float(b + 1), dtype=np.float64),
            labels=np.zeros(shape, dtype=np.uint8),
            counts=np.zeros(shape, dtype=np.uint8),
        )


class EngineState(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    volume: Volume
    cfg: EngineConfig
    phi: Phi
    pinned: np.ndarray
    active: OccupancyGrid
    history: OccupancyGrid
    hist1: ClassHistogram
    hist2: ClassHistogram
    scratch: np.ndarray
    iteration: int = 0
    theta: Optional[Tuple[GaussianParams, GaussianParams]] = None


class SegmentationResult(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    labels: np.ndarray
    metrics: List[IterationMetrics]
    iterations: int
    converged: bool
    state: EngineState = Field(repr=False)

    @property
    def foreground(self) -> np.ndarray:
        return self.labels == Label.OMEGA2


# ----------------------------------------------------------------------------
# Kernels
# ----------------------------------------------------------------------------
@njit(cache=True, parallel=True)
def _contour_kernel(labels, out):
    nz, ny, nx = labels.shape
    for z in prange(nz):
        for y in range(ny):
            for x in range(nx):
                if labels[z, y, x] != 2:
                    out[z, y, x] = False
                    continue
                edge = False
                if z > 0 and labels[z - 1, y, x] != 2:
                    edge = True
                elif z < nz - 1 and labels[z + 1, y, x] != 2:
                    edge = True
                elif y > 0 and labels[z, y - 1, x] != 2:
                    edge = True
                elif y < ny - 1 and labels[z, y + 1, x] != 2:
                    edge = True
                elif x > 0 and labels[z, y, x - 1] != 2:
                    edge = True
                elif x < nx - 1 and labels[z, y, x + 1] != 2:
                    edge = True
                out[z, y, x] = edge


@njit(cache=True, parallel=True)
def _signed_from_distance(values, labels, d2, cubes, s, b):
    nz, ny, nx = values.shape
    limit = b * b
    far = float(b + 1)
    for c in prange(cubes.shape[0]):
        z0 = cubes[c, 0] * s
        y0 = cubes[c, 1] * s
        x0 = cubes[c, 2] * s
        for z in range(z0, min(z0 + s, nz)):
            for y in range(y0, min(y0 + s, ny)):
                for x in range(x0, min(x0 + s, nx)):
                    d = d2[z, y, x]
                    dist = np.sqrt(d) if d <= limit else far
                    lab = labels[z, y, x]
                    if lab == 2:
                        values[z, y, x] = -dist if dist > 0.0 else 0.0
                    elif lab == 1:
                        values[z, y, x] = dist
                    else:
                        values[z, y, x] = far


@njit(cache=True, parallel=True)
def _band_updates(values, labels, counts, pinned, grey, cubes, s, b, t, g_min,
                  nu, dt_step, mu1, sigma1, mu2, sigma2, eps, upd):
    nz, ny, nx = values.shape
    far = float(b + 1)
    for c in prange(cubes.shape[0]):
        z0 = cubes[c, 0] * s
        y0 = cubes[c, 1] * s
        x0 = cubes[c, 2] * s
        for z in range(z0, min(z0 + s, nz)):
            for y in range(y0, min(y0 + s, ny)):
                for x in range(x0, min(x0 + s, nx)):
                    v = values[z, y, x]
                    if (
                        abs(v) > b
                        or labels[z, y, x] == 0
                        or counts[z, y, x] > t
                        or pinned[z, y, x]
                        or grey[z, y, x] < g_min
                    ):
                        continue
                    data = data_term(float(grey[z, y, x]), mu1, sigma1, mu2, sigma2)
                    smooth = dt_step * nu * curvature_at(values, z, y, x, eps)
                    smooth = min(max(smooth, -CURVATURE_STEP_MAX), CURVATURE_STEP_MAX)
                    new = v + smooth + dt_step * data
                    upd[c, z - z0, y - y0, x - x0] = min(max(new, -far), far)


@njit(cache=True, parallel=True)
def _apply_updates(values, labels, grey, cubes, s, upd, lo, hi, veto_phi, codes, greys):
    nz, ny, nx = values.shape
    for c in prange(cubes.shape[0]):
        z0 = cubes[c, 0] * s
        y0 = cubes[c, 1] * s
        x0 = cubes[c, 2] * s
        for z in range(z0, min(z0 + s, nz)):
            for y in range(y0, min(y0 + s, ny)):
                for x in range(x0, min(x0 + s, nx)):
                    new = upd[c, z - z0, y - y0, x - x0]
                    if np.isnan(new):
                        continue
                    g = grey[z, y, x]
                    lab = labels[z, y, x]
                    code = 0
                    if lab == 1 and new <= 0.0:
                        if g >= lo and g <= hi:
                            labels[z, y, x] = 2
                            code = 1
                        else:
                            new = veto_phi
                            code = 3
                    elif lab == 2 and new > 0.0:
                        labels[z, y, x] = 1
                        code = 2
                    values[z, y, x] = new
                    codes[c, z - z0, y - y0, x - x0] = code
                    greys[c, z - z0, y - y0, x - x0] = g


@njit(cache=True, parallel=True)
def _increment_counts(labels, counts, cap):
    nz, ny, nx = labels.shape
    for z in prange(nz):
        for y in range(ny):
            for x in range(nx):
                if labels[z, y, x] == 2 and counts[z, y, x] < cap:
                    counts[z, y, x] += 1


# ----------------------------------------------------------------------------
# Operaciones
# ----------------------------------------------------------------------------
def initialize(volume: Volume, seeds: SeedSet, cfg: EngineConfig) -> EngineState:
    """
    Estado inicial: semillas en Ω₂ con φ = −1 y count = 1; el resto en Ω_U.

    Con exploración desactivada G_h empieza lleno y Ω₁ contiene todos los
    vóxeles no semilla que pasan ``g_min``.

    Raises:
        InsufficientSamplesError: histograma de Ω₂ (o de Ω₁ sin exploración) con n < 2
    """
    shape = volume.shape
    phi = Phi.empty(shape, cfg.b)
    pinned = seeds.mask(shape)
    phi.labels[pinned] = Label.OMEGA2
    phi.values[pinned] = -1.0
    phi.counts[pinned] = 1

    hist2 = ClassHistogram.from_samples(volume.data[pinned], volume.levels, name="Ω₂")
    if hist2.n < 2:
        raise InsufficientSamplesError(f"muestras insuficientes para la clase Ω₂ (n={hist2.n})")
    hist1 = ClassHistogram(volume.levels, name="Ω₁")

    history = OccupancyGrid(shape, cfg.s * cfg.history_scale, fill=not cfg.explore_incrementally)
    if not cfg.explore_incrementally:
        medium = ~pinned & (volume.data >= cfg.g_min)
        phi.labels[medium] = Label.OMEGA1
        hist1.add_many(volume.data[medium])
        if hist1.n < 2:
            raise InsufficientSamplesError(
                f"muestras insuficientes para la clase Ω₁ tras el umbral g_min={cfg.g_min} (n={hist1.n})"
            )

    cap = (cfg.b + 1) * (cfg.b + 1)
    return EngineState(
        volume=volume,
        cfg=cfg,
        phi=phi,
        pinned=pinned,
        active=OccupancyGrid(shape, cfg.s),
        history=history,
        hist1=hist1,
        hist2=hist2,
        scratch=np.full(shape, cap, dtype=np.int32),
    )


def locate_contour(phi: Phi) -> np.ndarray:
    """C: vóxeles de Ω₂ con algún vecino 6-conexo (dentro del volumen) fuera de Ω₂."""
    out = np.empty(phi.labels.shape, dtype=np.bool_)
    _contour_kernel(phi.labels, out)
    return out


def split_contour(contour: np.ndarray, counts: np.ndarray, t: int) -> Tuple[np.ndarray, np.ndarray]:
    """C_a = {x ∈ C | count(x) <= t}, C_s = C \\ C_a."""
    active = contour & (counts <= t)
    return active, contour & ~active


def mark_active_grid(active_contour: np.ndarray, s: int, grid: Optional[OccupancyGrid] = None) -> OccupancyGrid:
    """G_a recalculada desde cero: cubo de cada vóxel de C_a y sus 26 vecinos."""
    if grid is None:
        grid = OccupancyGrid(active_contour.shape, s)
    return mark_active(active_contour, grid)


def explore(state: EngineState) -> int:
    """
    Añade a Ω₁ el contenido de los cubos activos aún no explorados.

    Los vóxeles por debajo de ``g_min`` quedan en Ω_U para siempre.

    Returns:
        int: cubos de G_h recién explorados
    """
    cfg = state.cfg
    if not cfg.explore_incrementally:
        return 0
    cubes = state.active.indices()
    if cubes.size == 0:
        return 0
    candidates = np.unique(cubes // cfg.history_scale, axis=0)
    fresh = candidates[~state.history.bits[tuple(candidates.T)]]
    labels, values, data = state.phi.labels, state.phi.values, state.volume.data
    far = float(cfg.b + 1)
    for index in fresh:
        box = state.history.cube_slices(index)
        grey = data[box]
        unlabeled = (labels[box] == Label.UNLABELED) & (grey >= cfg.g_min)
        labels[box][unlabeled] = Label.OMEGA1
        values[box][unlabeled] = far
        state.hist1.add_many(grey[unlabeled])
        state.history.bits[tuple(index)] = True
    return int(fresh.shape[0])


def estimate_parameters(state: EngineState) -> Tuple[GaussianParams, GaussianParams]:
    floor = state.cfg.sigma_floor
    state.theta = (state.hist1.estimate(floor), state.hist2.estimate(floor))
    return state.theta


def rebuild_phi(state: EngineState, contour: np.ndarray, workers: Optional[int] = None) -> None:
    """
    Recalcula φ en los cubos activos con la TEDT desde los vóxeles de contorno.

    φ = −TEDT en Ω₂, +TEDT en Ω₁ y b+1 en Ω_U; fuera de G_a φ no cambia.
    """
    b = state.cfg.b
    tedt_block_union(contour, state.active, b, out=state.scratch, workers=workers)
    cubes = state.active.indices().astype(np.int64)
    if cubes.size:
        _signed_from_distance(state.phi.values, state.phi.labels, state.scratch, cubes, state.active.s, b)


def evolve_band(state: EngineState, th1: GaussianParams, th2: GaussianParams) -> Tuple[int, int, int]:
    """
    Un paso explícito φ ← φ + Δt·(ν·κ + término de datos) en la banda de los cubos activos.

    El desplazamiento por curvatura Δt·ν·κ se recorta a ±CURVATURE_STEP_MAX.

    Quedan fuera Ω_U, los vóxeles bajo ``g_min``, los estáticos (count > t) y
    las semillas. Un paso de Ω₁ a Ω₂ con gris fuera de ``root_band`` se veta
    dejando φ = +1e-3.

    Returns:
        (a Ω₂, a Ω₁, vetados)
    """
    cfg = state.cfg
    cubes = state.active.indices().astype(np.int64)
    if cubes.size == 0:
        return 0, 0, 0
    s = state.active.s
    phi = state.phi
    grey = state.volume.data
    upd = np.full((cubes.shape[0], s, s, s), np.nan, dtype=np.float64)
    _band_updates(
        phi.values, phi.labels, phi.counts, state.pinned, grey, cubes, s, cfg.b, cfg.t, cfg.g_min,
        cfg.nu, cfg.dt_step, th1.mu, th1.sigma, th2.mu, th2.sigma, GRADIENT_EPS, upd,
    )
    lo, hi = cfg.band_limits(state.volume.depth)
    codes = np.zeros(upd.shape, dtype=np.int8)
    greys = np.zeros(upd.shape, dtype=np.int64)
    _apply_updates(phi.values, phi.labels, grey, cubes, s, upd, lo, hi, VETO_PHI, codes, greys)

    to_root = greys[codes == _TO_ROOT]
    to_medium = greys[codes == _TO_MEDIUM]
    state.hist1.remove_many(to_root)
    state.hist2.add_many(to_root)
    state.hist2.remove_many(to_medium)
    state.hist1.add_many(to_medium)
    return int(to_root.size), int(to_medium.size), int(np.count_nonzero(codes == _VETOED))


def increment_counts(phi: Phi) -> None:
    _increment_counts(phi.labels, phi.counts, COUNT_MAX)


def energy(phi: Phi, volume: Volume, th1: GaussianParams, th2: GaussianParams, nu: float) -> float:
    """
    E = −Σ log p_i(I(x) | θ_i) sobre los vóxeles etiquetados + ν·|C|.

    Recorre el volumen completo; el bucle principal usa ``_energy_from_histograms``.
    """
    h1 = ClassHistogram.from_samples(volume.data[phi.labels == Label.OMEGA1], volume.levels)
    h2 = ClassHistogram.from_samples(volume.data[phi.labels == Label.OMEGA2], volume.levels)
    contour = int(np.count_nonzero(locate_contour(phi)))
    return _energy_from_histograms(h1, h2, th1, th2, nu, contour)


def _energy_from_histograms(h1, h2, th1, th2, nu, contour_size) -> float:
    return h1.neg_log_likelihood(th1) + h2.neg_log_likelihood(th2) + nu * contour_size


def run(
    volume: Volume,
    seeds: SeedSet,
    cfg: EngineConfig,
    workers: Optional[int] = None,
    on_iteration: Optional[Callable[[EngineState, IterationMetrics], None]] = None,
) -> SegmentationResult:
    """
    Bucle completo hasta |C_a| < k o ``max_iters``.

    Args:
        volume: volumen de grises
        seeds: Ω₂⁰
        cfg: parámetros del motor
        workers: hilos numba (el resultado es idéntico para cualquier valor)
        on_iteration: llamada tras cada iteración con el estado y su fila de métricas

    Returns:
        SegmentationResult: etiquetas finales (sin filtrar componentes) y métricas
    """
    state = initialize(volume, seeds, cfg)
    metrics: List[IterationMetrics] = []
    converged = False
    last_energy = float("nan")

    with worker_threads(workers):
        for iteration in range(1, cfg.max_iters + 1):
            state.iteration = iteration
            contour = locate_contour(state.phi)
            active, static = split_contour(contour, state.phi.counts, cfg.t)
            c_active = int(np.count_nonzero(active))
            c_static = int(np.count_nonzero(static))
            mark_active_grid(active, cfg.s, grid=state.active)
            explored = explore(state)

            if c_active < cfg.k:
                row = _metrics_row(state, iteration, c_active, c_static, last_energy)
                metrics.append(row)
                if on_iteration is not None:
                    on_iteration(state, row)
                converged = True
                logger.info("Terminación en la iteración %d: |C_a| = %d < k = %d", iteration, c_active, cfg.k)
                break

            th1, th2 = estimate_parameters(state)
            last_energy = _energy_from_histograms(
                state.hist1, state.hist2, th1, th2, cfg.nu, c_active + c_static
            )
            row = _metrics_row(state, iteration, c_active, c_static, last_energy)
            metrics.append(row)

            rebuild_phi(state, contour)
            to_root, to_medium, vetoed = evolve_band(state, th1, th2)
            increment_counts(state.phi)
            logger.debug(
                "it %d: |C_a|=%d |C_s|=%d G_a=%d G_h=%d (+%d) flips +%d/-%d vetos %d",
                iteration, c_active, c_static, row.ga_cubes, row.gh_cubes, explored,
                to_root, to_medium, vetoed,
            )
            if on_iteration is not None:
                on_iteration(state, row)
        else:
            logger.warning("Se alcanzó max_iters=%d sin cumplir |C_a| < k", cfg.max_iters)

    return SegmentationResult(
        labels=state.phi.labels.copy(),
        metrics=metrics,
        iterations=state.iteration,
        converged=converged,
        state=state,
    )


def _metrics_row(state: EngineState, iteration, c_active, c_static, value) -> IterationMetrics:
    return IterationMetrics(
        iteration=iteration,
        c_active=c_active,
        c_static=c_static,
        ga_cubes=state.active.count(),
        gh_cubes=state.history.count(),
        energy=value,
    )
