"""
Inicialización de Ω₂⁰ a partir de cortes marcados en rojo por el usuario.

Convención de los cortes (filas, columnas) respecto al volumen:

    Z: (y, x)      Y: (z, x)      X: (z, y)

Los archivos se llaman ``init_<eje>_<índice>.png``, p. ej. ``init_z_0120.png``.
"""

import logging
import re
from enum import Enum
from pathlib import Path
from typing import Iterable, List, NamedTuple

import numpy as np
from PIL import Image
from pydantic import BaseModel, ConfigDict

from rootlevel.errors import SeedError
from rootlevel.models.config import EngineConfig
from rootlevel.volume import Volume

logger = logging.getLogger(__name__)

INIT_PATTERN = re.compile(r"^init_([xyz])_(\d+)\.png$", re.IGNORECASE)
RED_MIN = 128


class Axis(str, Enum):
    X = "X"
    Y = "Y"
    Z = "Z"


class MarkedSlice(BaseModel):
    """Corte marcado: máscara 2D de vóxeles de raíz sobre el corte ``index`` del eje ``axis``."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    axis: Axis
    index: int
    mask: np.ndarray


class SeedSet(NamedTuple):
    """Ω₂⁰: coordenadas ``(K, 3)`` en orden (x, y, z) y número de marcas descartadas."""

    coords: np.ndarray
    dropped: int

    def __len__(self) -> int:
        return int(self.coords.shape[0])

    def mask(self, shape) -> np.ndarray:
        """Máscara booleana ``(nz, ny, nx)`` de las semillas."""
        out = np.zeros(shape, dtype=bool)
        out[self.coords[:, 2], self.coords[:, 1], self.coords[:, 0]] = True
        return out


def cross_section(volume: Volume, axis: Axis, index: int) -> np.ndarray:
    """Corte 2D del volumen perpendicular a ``axis``."""
    axis = Axis(axis)
    limit = volume.dims["XYZ".index(axis.value)]
    if not 0 <= index < limit:
        raise SeedError(f"corte {axis.value}={index} fuera del volumen (0..{limit - 1})")
    if axis is Axis.Z:
        return volume.data[index, :, :]
    if axis is Axis.Y:
        return volume.data[:, index, :]
    return volume.data[:, :, index]


def parse_marked_slice(image: np.ndarray, original: np.ndarray) -> np.ndarray:
    """
    Píxeles marcados de una imagen RGB: rojo dominante.

    Un píxel está marcado si R >= 128, R >= 2·G y R >= 2·B; la razón tolera los
    bordes suavizados de los editores.

    Args:
        image: imagen ``(H, W, 3)`` o ``(H, W, 4)``
        original: corte de grises ``(H, W)`` del volumen

    Returns:
        np.ndarray: máscara booleana ``(H, W)``
    """
    image = np.asarray(image)
    if image.ndim != 3 or image.shape[2] < 3:
        raise SeedError(f"se esperaba una imagen RGB, forma {image.shape}")
    if image.shape[:2] != np.shape(original):
        raise SeedError(
            f"dimensiones de la marca {image.shape[1]}x{image.shape[0]} distintas del corte "
            f"{np.shape(original)[1]}x{np.shape(original)[0]}"
        )
    rgb = image[..., :3].astype(np.int32)
    r, g, b = rgb[..., 0], rgb[..., 1], rgb[..., 2]
    return (r >= RED_MIN) & (r >= 2 * g) & (r >= 2 * b)


def embed_marks(slices: Iterable[MarkedSlice], volume: Volume, cfg: EngineConfig) -> SeedSet:
    """
    Une las marcas de todos los cortes en coordenadas de vóxel.

    Las marcas que no pasan ``g_min`` o quedan fuera de ``root_band`` se
    descartan con un aviso.

    Raises:
        SeedError: si la unión queda vacía
    """
    chunks = []
    for marked in slices:
        axis = Axis(marked.axis)
        original = cross_section(volume, axis, marked.index)
        if marked.mask.shape != original.shape:
            raise SeedError(f"máscara {axis.value}={marked.index} con forma {marked.mask.shape}, se esperaba {original.shape}")
        rows, cols = np.nonzero(marked.mask)
        fixed = np.full(rows.shape, marked.index, dtype=np.int64)
        if axis is Axis.Z:
            zyx = np.stack([fixed, rows, cols], axis=1)
        elif axis is Axis.Y:
            zyx = np.stack([rows, fixed, cols], axis=1)
        else:
            zyx = np.stack([rows, cols, fixed], axis=1)
        chunks.append(zyx.astype(np.int64))

    if chunks:
        zyx = np.unique(np.concatenate(chunks, axis=0), axis=0)
    else:
        zyx = np.empty((0, 3), dtype=np.int64)

    lo, hi = cfg.band_limits(volume.depth)
    grey = volume.data[zyx[:, 0], zyx[:, 1], zyx[:, 2]].astype(np.int64)
    keep = (grey >= cfg.g_min) & (grey >= lo) & (grey <= hi)
    dropped = int(zyx.shape[0] - np.count_nonzero(keep))
    if dropped:
        logger.warning("Se descartan %d marcas fuera de los umbrales de gris", dropped)
    zyx = zyx[keep]
    if zyx.shape[0] == 0:
        raise SeedError("no hay vóxeles de inicialización")
    logger.info("Ω₂⁰: %d vóxeles semilla", zyx.shape[0])
    return SeedSet(coords=np.ascontiguousarray(zyx[:, ::-1]), dropped=dropped)


def seeds_from_coords(coords, volume: Volume) -> SeedSet:
    """SeedSet a partir de coordenadas ``(x, y, z)`` sin aplicar umbrales."""
    coords = np.asarray(coords, dtype=np.int64).reshape(-1, 3)
    if coords.shape[0] == 0:
        raise SeedError("no hay vóxeles de inicialización")
    zyx = np.unique(coords[:, ::-1], axis=0)
    nx, ny, nz = volume.dims
    if (zyx < 0).any() or (zyx >= np.array([nz, ny, nx])).any():
        raise SeedError("semillas fuera del volumen")
    return SeedSet(coords=np.ascontiguousarray(zyx[:, ::-1]), dropped=0)


def load_marked_slices(init_dir, volume: Volume) -> List[MarkedSlice]:
    """
    Lee ``init_<eje>_<índice>.png`` de una carpeta.

    Raises:
        SeedError: carpeta inexistente o sin imágenes de inicialización
    """
    init_dir = Path(init_dir)
    if not init_dir.is_dir():
        raise SeedError(f"no existe la carpeta de inicialización: {init_dir}")
    slices = []
    for path in sorted(init_dir.iterdir()):
        match = INIT_PATTERN.match(path.name)
        if not match:
            if path.is_file():
                logger.debug("Ignorando %s: no sigue init_<eje>_<índice>.png", path.name)
            continue
        axis = Axis(match.group(1).upper())
        index = int(match.group(2))
        try:
            original = cross_section(volume, axis, index)
        except SeedError as exc:
            raise SeedError(f"{path.name}: {exc.detail}") from exc
        with Image.open(path) as img:
            rgb = np.asarray(img.convert("RGB"))
        try:
            mask = parse_marked_slice(rgb, original)
        except SeedError as exc:
            raise SeedError(f"{path.name}: {exc.detail}") from exc
        slices.append(MarkedSlice(axis=axis, index=index, mask=mask))
    if not slices:
        raise SeedError(f"{init_dir} no contiene imágenes init_<eje>_<índice>.png")
    logger.info("Cortes de inicialización: %d", len(slices))
    return slices
