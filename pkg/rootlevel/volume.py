"""
Volumen 3D de niveles de gris y su entrada/salida.

Convención de ejes: x es el índice más rápido, luego y, luego z (apilado de
cortes). En memoria el array tiene forma ``(nz, ny, nx)``, de modo que
``data[z, y, x]`` y el recorrido C coincide con x-fastest.
"""

import logging
import os
from pathlib import Path
from typing import Iterable, List, NamedTuple, Tuple

import numpy as np
import tifffile
from PIL import Image
from pydantic import BaseModel, ConfigDict, model_validator

from rootlevel.errors import DataError, VolumeLoadError

logger = logging.getLogger(__name__)

SLICE_SUFFIXES = (".png", ".tif", ".tiff")
MASK_PATTERN = "mask_{:05d}.png"

_DTYPES = {8: np.dtype("<u1"), 16: np.dtype("<u2")}
_NATIVE = {8: np.uint8, 16: np.uint16}


class VoxelCoord(NamedTuple):
    x: int
    y: int
    z: int


class Volume(BaseModel):
    """
    Campo escalar de niveles de gris, inmutable tras la carga.

    Attributes:
        data: array ``(nz, ny, nx)`` uint8/uint16, de solo lectura
        depth: profundidad de bits (8 o 16)
        pitch_um: arista física del vóxel en micrómetros (solo metadato)
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    data: np.ndarray
    depth: int
    pitch_um: float = 1.0

    @model_validator(mode="before")
    @classmethod
    def _check_data(cls, values):
        depth = values.get("depth")
        if depth not in _DTYPES:
            raise DataError(f"profundidad de bits no soportada: {depth}")
        data = np.asarray(values.get("data"))
        if data.ndim != 3:
            raise DataError(f"se esperaba un volumen 3D, forma {data.shape}")
        if data.dtype != _NATIVE[depth] and data.size:
            lo, hi = int(data.min()), int(data.max())
            if lo < 0 or hi >= (1 << depth):
                raise DataError(f"niveles de gris fuera de [0, {(1 << depth) - 1}]: [{lo}, {hi}]")
        data = np.ascontiguousarray(data, dtype=_NATIVE[depth])
        data.setflags(write=False)
        return {**values, "data": data}

    @property
    def dims(self) -> Tuple[int, int, int]:
        nz, ny, nx = self.data.shape
        return nx, ny, nz

    @property
    def shape(self) -> Tuple[int, int, int]:
        return self.data.shape

    @property
    def size(self) -> int:
        return self.data.size

    @property
    def levels(self) -> int:
        return 1 << self.depth

    def contains(self, coord: VoxelCoord) -> bool:
        nx, ny, nz = self.dims
        return 0 <= coord.x < nx and 0 <= coord.y < ny and 0 <= coord.z < nz

    def grey(self, coord: VoxelCoord) -> int:
        return int(self.data[coord.z, coord.y, coord.x])


def _sorted_slices(directory: Path) -> List[Path]:
    return sorted(
        p for p in directory.iterdir() if p.is_file() and p.suffix.lower() in SLICE_SUFFIXES
    )


def _read_slice(path: Path) -> np.ndarray:
    if path.suffix.lower() in (".tif", ".tiff"):
        return tifffile.imread(path)
    with Image.open(path) as img:
        return np.asarray(img)


def _depth_of(array: np.ndarray, path: Path) -> int:
    if array.dtype == np.uint8 or array.dtype == np.bool_:
        return 8
    if array.dtype == np.uint16:
        return 16
    # Pillow abre algunos PNG de 16 bits como int32 ("I")
    if array.dtype.kind in "iu" and array.min() >= 0 and array.max() <= 0xFFFF:
        return 16
    raise VolumeLoadError(f"{path.name}: tipo de píxel no soportado ({array.dtype})")


def load_slice_stack(directory, pitch_um: float = 1.0) -> Volume:
    """
    Carga una pila de cortes ordenada alfabéticamente; el corte i ocupa z = i.

    Args:
        directory: carpeta con imágenes PNG/TIFF de un canal, 8 o 16 bits
        pitch_um: arista del vóxel (metadato)

    Returns:
        Volume: volumen con nz = número de imágenes

    Raises:
        VolumeLoadError: carpeta vacía, imágenes multicanal o mezcla de
            dimensiones/profundidades (nombrando el archivo culpable)
    """
    directory = Path(directory)
    if not directory.is_dir():
        raise VolumeLoadError(f"no existe la carpeta de cortes: {directory}")
    paths = _sorted_slices(directory)
    if not paths:
        raise VolumeLoadError(f"carpeta de cortes vacía: {directory}")

    slices = []
    shape = depth = None
    for path in paths:
        array = _read_slice(path)
        if array.ndim != 2:
            raise VolumeLoadError(f"{path.name}: se esperaba una imagen de un canal, forma {array.shape}")
        this_depth = _depth_of(array, path)
        if shape is None:
            shape, depth = array.shape, this_depth
        elif array.shape != shape:
            raise VolumeLoadError(
                f"{path.name}: dimensiones {array.shape[1]}x{array.shape[0]} distintas de "
                f"{shape[1]}x{shape[0]}"
            )
        elif this_depth != depth:
            raise VolumeLoadError(f"{path.name}: {this_depth} bits, el resto de la pila tiene {depth}")
        slices.append(array)

    data = np.stack(slices, axis=0).astype(_DTYPES[depth], copy=False)
    logger.info("Pila cargada: %d cortes de %dx%d, %d bits", len(slices), shape[1], shape[0], depth)
    return Volume(data=data, depth=depth, pitch_um=pitch_um)


def load_raw(path, dims: Tuple[int, int, int], depth: int, pitch_um: float = 1.0) -> Volume:
    """
    Carga un volumen crudo little-endian sin cabecera.

    Raises:
        VolumeLoadError: si el tamaño del archivo no es nx·ny·nz·depth/8
    """
    path = Path(path)
    if depth not in _DTYPES:
        raise VolumeLoadError(f"profundidad de bits no soportada: {depth}")
    nx, ny, nz = dims
    expected = nx * ny * nz * (depth // 8)
    try:
        actual = os.path.getsize(path)
    except OSError as exc:
        raise VolumeLoadError(f"no se puede leer {path}: {exc}") from exc
    if actual != expected:
        raise VolumeLoadError(f"{path.name}: tamaño incorrecto, expected {expected}, got {actual} bytes")
    data = np.fromfile(path, dtype=_DTYPES[depth]).reshape(nz, ny, nx)
    return Volume(data=data, depth=depth, pitch_um=pitch_um)


def save_raw(volume: Volume, path) -> None:
    """Escribe el volumen como crudo little-endian (inverso de load_raw)."""
    Path(path).write_bytes(volume.data.astype(_DTYPES[volume.depth], copy=False).tobytes(order="C"))


def write_mask_stack(mask: np.ndarray, directory) -> List[Path]:
    """
    Exporta una máscara binaria como un PNG de 8 bits por corte z (0 / 255).

    Args:
        mask: array booleano ``(nz, ny, nx)``
        directory: carpeta de salida (se crea si no existe)

    Returns:
        List[Path]: rutas escritas, ``mask_%05d.png``
    """
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    written = []
    for z, plane in enumerate(_as_bool(mask)):
        path = directory / MASK_PATTERN.format(z)
        Image.fromarray(np.where(plane, 255, 0).astype(np.uint8), mode="L").save(path)
        written.append(path)
    logger.debug("Máscara exportada: %d cortes en %s", len(written), directory)
    return written


def _as_bool(mask: np.ndarray) -> Iterable[np.ndarray]:
    mask = np.asarray(mask)
    if mask.ndim != 3:
        raise DataError(f"la máscara debe ser 3D, forma {mask.shape}")
    return mask.astype(bool, copy=False)
