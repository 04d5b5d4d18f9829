"""
Transformada de distancia euclídea exacta y truncada sobre la unión de cubos activos.

Barridos separables de Meijster (filas x, columnas y, columnas z) con
distancias al cuadrado enteras. Un vóxel está en la banda si su distancia al
cuadrado a la fuente más cercana es <= b²; el resto guarda el tope (b+1)².

La unión de cubos activos se descompone en grupos 26-conexos. Dos grupos
distintos están separados por al menos un cubo inactivo (s >= b vóxeles), de
modo que ninguna distancia dentro de la banda cruza de un grupo a otro y cada
grupo se barre sobre su propia caja envolvente.
"""

import logging
from typing import Optional

import numpy as np
from numba import njit, prange
from scipy import ndimage

from rootlevel.errors import ConfigError
from rootlevel.grid import NEIGHBOURHOOD_26, OccupancyGrid
from rootlevel.parallel import worker_threads

logger = logging.getLogger(__name__)


@njit(cache=True)
def _separation(i, u, fi, fu):
    # primera abscisa a partir de la cual la parábola de u queda por debajo de la de i, menos uno
    return (u * u - i * i + fu - fi) // (2 * (u - i))


@njit(cache=True)
def _envelope_line(f, out, limit, cap, s_buf, t_buf):
    """min_q f[q] + (u - q)² para cada u, ignorando f[q] > limit."""
    n = f.shape[0]
    q = -1
    for u in range(n):
        fu = f[u]
        if fu > limit:
            continue
        if q < 0:
            q = 0
            s_buf[0] = u
            t_buf[0] = 0
            continue
        while q >= 0:
            sq = s_buf[q]
            tq = t_buf[q]
            if (tq - sq) * (tq - sq) + f[sq] > (tq - u) * (tq - u) + fu:
                q -= 1
            else:
                break
        if q < 0:
            q = 0
            s_buf[0] = u
            t_buf[0] = 0
        else:
            sq = s_buf[q]
            w = 1 + _separation(sq, u, f[sq], fu)
            if w < n:
                q += 1
                s_buf[q] = u
                t_buf[q] = w
    if q < 0:
        for u in range(n):
            out[u] = cap
        return
    for u in range(n - 1, -1, -1):
        sq = s_buf[q]
        d = (u - sq) * (u - sq) + f[sq]
        out[u] = d if d <= limit else cap
        if u == t_buf[q]:
            q -= 1


@njit(cache=True, parallel=True)
def _sweep_rows(src, b, cap, g):
    """Distancia 1D a lo largo de x, truncada en b."""
    nz, ny, nx = src.shape
    far = b + 1
    for idx in prange(nz * ny):
        z = idx // ny
        y = idx % ny
        last = -far - 1
        for x in range(nx):
            if src[z, y, x]:
                last = x
            d = x - last
            g[z, y, x] = d * d if d <= b else cap
        last = nx + far + 1
        for x in range(nx - 1, -1, -1):
            if src[z, y, x]:
                last = x
            d = last - x
            if d <= b and d * d < g[z, y, x]:
                g[z, y, x] = d * d


@njit(cache=True, parallel=True)
def _sweep_columns(g, limit, cap, h):
    """Envolvente inferior a lo largo de y."""
    nz, ny, nx = g.shape
    for idx in prange(nz * nx):
        z = idx // nx
        x = idx % nx
        f = np.empty(ny, dtype=np.int64)
        out = np.empty(ny, dtype=np.int64)
        s_buf = np.empty(ny, dtype=np.int64)
        t_buf = np.empty(ny, dtype=np.int64)
        for y in range(ny):
            f[y] = g[z, y, x]
        _envelope_line(f, out, limit, cap, s_buf, t_buf)
        for y in range(ny):
            h[z, y, x] = out[y]


@njit(cache=True, parallel=True)
def _sweep_slabs(h, line_active, limit, cap, d2):
    """Envolvente inferior a lo largo de z, solo en líneas que tocan la región."""
    nz, ny, nx = h.shape
    for idx in prange(ny * nx):
        y = idx // nx
        x = idx % nx
        if not line_active[y, x]:
            continue
        f = np.empty(nz, dtype=np.int64)
        out = np.empty(nz, dtype=np.int64)
        s_buf = np.empty(nz, dtype=np.int64)
        t_buf = np.empty(nz, dtype=np.int64)
        for z in range(nz):
            f[z] = h[z, y, x]
        _envelope_line(f, out, limit, cap, s_buf, t_buf)
        for z in range(nz):
            d2[z, y, x] = out[z]


def tedt_local(sources: np.ndarray, b: int, region: Optional[np.ndarray] = None) -> np.ndarray:
    """
    TEDT al cuadrado sobre un bloque denso.

    Args:
        sources: máscara booleana de fuentes ``(nz, ny, nx)``
        b: ancho de banda
        region: vóxeles cuyo resultado interesa; el resto puede quedar en el tope

    Returns:
        np.ndarray: int32, d² si d² <= b², si no (b+1)²
    """
    limit = b * b
    cap = (b + 1) * (b + 1)
    src = np.ascontiguousarray(sources, dtype=np.bool_)
    g = np.empty(src.shape, dtype=np.int32)
    _sweep_rows(src, b, cap, g)
    h = np.empty_like(g)
    _sweep_columns(g, limit, cap, h)
    if region is None:
        line_active = np.ones(src.shape[1:], dtype=np.bool_)
    else:
        line_active = np.ascontiguousarray(region.any(axis=0))
    d2 = np.full(src.shape, cap, dtype=np.int32)
    _sweep_slabs(h, line_active, limit, cap, d2)
    return d2


def tedt_block_union(
    sources: np.ndarray,
    region: OccupancyGrid,
    b: int,
    out: Optional[np.ndarray] = None,
    workers: Optional[int] = None,
) -> np.ndarray:
    """
    TEDT al cuadrado restringida a los cubos marcados de ``region``.

    Args:
        sources: máscara booleana de fuentes del tamaño del volumen; solo cuentan
            las que caen dentro de la región
        region: rejilla de cubos activos (con su dilatación 26-conexa ya aplicada)
        b: ancho de banda
        out: array int32 donde escribir; los vóxeles fuera de la región no se tocan
        workers: hilos numba; el resultado no depende de este valor

    Returns:
        np.ndarray: ``out`` con d² (<= b²) o (b+1)² en los vóxeles de la región

    Raises:
        ConfigError: si b <= 0 o la arista del cubo es menor que b
    """
    if b <= 0:
        raise ConfigError(f"el ancho de banda b debe ser positivo (b={b})")
    if region.s < b:
        raise ConfigError(f"la arista de cubo s={region.s} es menor que b={b}")
    if sources.shape != region.volume_shape:
        raise ConfigError(f"fuentes {sources.shape} y región {region.volume_shape} no coinciden")
    cap = (b + 1) * (b + 1)
    if out is None:
        out = np.full(sources.shape, cap, dtype=np.int32)

    clusters, n_clusters = ndimage.label(region.bits, structure=NEIGHBOURHOOD_26)
    s = region.s
    with worker_threads(workers):
        for label, cube_box in enumerate(ndimage.find_objects(clusters), start=1):
            origin = tuple(sl.start for sl in cube_box)
            voxel_box = tuple(
                slice(sl.start * s, min(sl.stop * s, n)) for sl, n in zip(cube_box, sources.shape)
            )
            shape = tuple(sl.stop - sl.start for sl in voxel_box)
            inside = region.voxel_mask(clusters[cube_box] == label, origin=origin, shape=shape)
            local_src = sources[voxel_box] & inside
            target = out[voxel_box]
            if not local_src.any():
                target[inside] = cap
                continue
            d2 = tedt_local(local_src, b, region=inside)
            target[inside] = d2[inside]
    logger.debug("TEDT: %d grupos de cubos, %d cubos activos", n_clusters, region.count())
    return out

