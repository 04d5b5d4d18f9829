"""
Fantasmas sintéticos: tubos de raíz en un medio granular ruidoso, con su
máscara de verdad terreno.

Los vóxeles se evalúan en sus centros enteros (x, y, z). Un vóxel pertenece a
un tubo si su distancia a algún segmento de la polilínea es <= al radio
interpolado linealmente en el punto más cercano del segmento.
"""

import logging
from typing import List, Tuple

import numpy as np

from rootlevel.errors import DataError
from rootlevel.models.phantom_spec import GranuleSpec, PhantomSpec, TubeSpec
from rootlevel.seeding import Axis, MarkedSlice
from rootlevel.volume import Volume

logger = logging.getLogger(__name__)


def _box(lo, hi, shape_zyx) -> Tuple[slice, slice, slice]:
    """Caja de vóxeles (z, y, x) que cubre [lo, hi] en (x, y, z), recortada."""
    bounds = []
    for axis in (2, 1, 0):
        start = max(int(np.floor(lo[axis])), 0)
        stop = min(int(np.ceil(hi[axis])) + 1, shape_zyx[2 - axis])
        bounds.append(slice(start, max(start, stop)))
    return tuple(bounds)


def _grid(box) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    zz, yy, xx = np.meshgrid(
        np.arange(box[0].start, box[0].stop),
        np.arange(box[1].start, box[1].stop),
        np.arange(box[2].start, box[2].stop),
        indexing="ij",
    )
    return xx.astype(np.float64), yy.astype(np.float64), zz.astype(np.float64)


def _paint_segment(mask, p0, p1, r0, r1) -> None:
    p0 = np.asarray(p0, dtype=np.float64)
    p1 = np.asarray(p1, dtype=np.float64)
    reach = max(r0, r1)
    box = _box(np.minimum(p0, p1) - reach, np.maximum(p0, p1) + reach, mask.shape)
    if any(sl.stop <= sl.start for sl in box):
        return
    xx, yy, zz = _grid(box)
    d = p1 - p0
    length2 = float(d @ d)
    if length2 == 0.0:
        t = np.zeros_like(xx)
    else:
        t = ((xx - p0[0]) * d[0] + (yy - p0[1]) * d[1] + (zz - p0[2]) * d[2]) / length2
        t = np.clip(t, 0.0, 1.0)
    dx = xx - (p0[0] + t * d[0])
    dy = yy - (p0[1] + t * d[1])
    dz = zz - (p0[2] + t * d[2])
    radius = r0 + t * (r1 - r0)
    mask[box] |= dx * dx + dy * dy + dz * dz <= radius * radius


def tube_mask(shape_zyx, tube: TubeSpec) -> np.ndarray:
    """Máscara de un tubo; una polilínea de un solo punto da una esfera."""
    mask = np.zeros(shape_zyx, dtype=bool)
    points, radii = tube.points, tube.radii
    if len(points) == 1:
        _paint_segment(mask, points[0], points[0], radii[0], radii[0])
    for i in range(len(points) - 1):
        _paint_segment(mask, points[i], points[i + 1], radii[i], radii[i + 1])
    return mask


def _granule_layout(spec: GranuleSpec, dims, rng) -> Tuple[np.ndarray, np.ndarray]:
    centers = [tuple(c) for c in spec.centers]
    radii = list(spec.radii)
    if spec.count:
        lo, hi = spec.radius_range
        centers += [tuple(c) for c in rng.uniform(0.0, 1.0, size=(spec.count, 3)) * np.asarray(dims)]
        radii += rng.uniform(lo, hi, size=spec.count).tolist()
    return np.asarray(centers, dtype=np.float64).reshape(-1, 3), np.asarray(radii, dtype=np.float64)


def _granule_masks(shape_zyx, spec: GranuleSpec, centers, radii) -> Tuple[np.ndarray, np.ndarray]:
    body = np.zeros(shape_zyx, dtype=bool)
    rim = np.zeros(shape_zyx, dtype=bool)
    for center, r in zip(centers, radii):
        box = _box(center - r, center + r, shape_zyx)
        if any(sl.stop <= sl.start for sl in box):
            continue
        xx, yy, zz = _grid(box)
        dist = np.sqrt((xx - center[0]) ** 2 + (yy - center[1]) ** 2 + (zz - center[2]) ** 2)
        inside = dist <= r
        body[box] |= inside
        if spec.rim:
            rim[box] |= inside & (dist > r - spec.rim_width)
    return body, rim


def _fill(values, mask, mu, sigma, rng) -> None:
    n = int(np.count_nonzero(mask))
    if n:
        values[mask] = rng.normal(mu, sigma, size=n)


def generate(spec: PhantomSpec) -> Tuple[Volume, np.ndarray]:
    """
    Genera el volumen y su máscara de raíz.

    Los tubos tienen prioridad sobre los gránulos. Los valores se redondean y
    se recortan al rango de grises; la salida es determinista para una misma
    semilla.

    Returns:
        (Volume, np.ndarray): volumen y máscara booleana ``(nz, ny, nx)``
    """
    nx, ny, nz = spec.dims
    shape = (nz, ny, nx)
    rng = np.random.default_rng(spec.seed)

    truth = np.zeros(shape, dtype=bool)
    for tube in spec.tubes:
        truth |= tube_mask(shape, tube)

    values = np.empty(shape, dtype=np.float64)
    _fill(values, np.ones(shape, dtype=bool), spec.mu1, spec.sigma1, rng)
    if spec.granules is not None:
        centers, radii = _granule_layout(spec.granules, spec.dims, rng)
        body, rim = _granule_masks(shape, spec.granules, centers, radii)
        _fill(values, body & ~rim & ~truth, spec.granules.mu, spec.granules.sigma, rng)
        _fill(values, rim & ~truth, spec.granules.rim_mu, spec.granules.sigma, rng)
        logger.debug("Fantasma: %d gránulos", len(radii))
    _fill(values, truth, spec.mu2, spec.sigma2, rng)

    top = (1 << spec.depth) - 1
    data = np.clip(np.rint(values), 0, top).astype(np.uint8 if spec.depth == 8 else np.uint16)
    logger.info("Fantasma %dx%dx%d: %d vóxeles de raíz", nx, ny, nz, int(truth.sum()))
    return Volume(data=data, depth=spec.depth), truth


def dice(mask_a: np.ndarray, mask_b: np.ndarray) -> float:
    """
    Coeficiente de Dice 2|A∩B| / (|A|+|B|); 1.0 si ambas máscaras están vacías.

    Raises:
        DataError: si las dimensiones no coinciden
    """
    a = np.asarray(mask_a, dtype=bool)
    b = np.asarray(mask_b, dtype=bool)
    if a.shape != b.shape:
        raise DataError(f"dimensiones distintas en dice: {a.shape} y {b.shape}")
    total = int(a.sum()) + int(b.sum())
    if total == 0:
        return 1.0
    return 2.0 * int(np.count_nonzero(a & b)) / total


def sample_marks(truth: np.ndarray, n_slices: int = 3, stride: int = 1) -> List[MarkedSlice]:
    """
    Emula el marcado manual disperso: uno de cada ``stride`` vóxeles de raíz
    en ``n_slices`` cortes Z repartidos uniformemente entre los que cortan la raíz.
    """
    occupied = np.flatnonzero(truth.any(axis=(1, 2)))
    if occupied.size == 0:
        return []
    picks = np.linspace(0, occupied.size - 1, n_slices + 2)[1:-1]
    if occupied.size < n_slices + 2:
        picks = np.linspace(0, occupied.size - 1, min(n_slices, occupied.size))
    slices = []
    for z in np.unique(occupied[np.rint(picks).astype(int)]):
        plane = truth[z]
        flat = np.flatnonzero(plane)[::stride]
        mask = np.zeros(plane.shape, dtype=bool)
        mask.flat[flat] = True
        slices.append(MarkedSlice(axis=Axis.Z, index=int(z), mask=mask))
    return slices
