"""
Rejillas de ocupación sobre cubos de s×s×s vóxeles (G_a activa, G_h histórica).
"""

from typing import Tuple

import numpy as np
from scipy import ndimage

# Cubo y sus 26 vecinos
NEIGHBOURHOOD_26 = np.ones((3, 3, 3), dtype=bool)


class OccupancyGrid:
    """
    Un bit por cubo. Los índices de cubo siguen el orden del volumen: (gz, gy, gx).

    Args:
        volume_shape: forma ``(nz, ny, nx)`` del volumen
        s: arista del cubo en vóxeles
    """

    def __init__(self, volume_shape: Tuple[int, int, int], s: int, fill: bool = False):
        if s < 1:
            raise ValueError(f"arista de cubo inválida: {s}")
        self.s = s
        self.volume_shape = tuple(volume_shape)
        self.shape = tuple(-(-n // s) for n in self.volume_shape)
        self.bits = np.full(self.shape, fill, dtype=bool)

    def count(self) -> int:
        return int(np.count_nonzero(self.bits))

    def clear(self) -> None:
        self.bits[...] = False

    def indices(self) -> np.ndarray:
        """Índices ``(M, 3)`` de los cubos marcados, en orden lexicográfico."""
        return np.argwhere(self.bits)

    def cube_slices(self, index) -> Tuple[slice, slice, slice]:
        """Slices de vóxeles de un cubo, recortados al volumen."""
        return tuple(
            slice(i * self.s, min((i + 1) * self.s, n)) for i, n in zip(index, self.volume_shape)
        )

    def voxel_mask(self, bits: np.ndarray = None, origin=(0, 0, 0), shape=None) -> np.ndarray:
        """
        Expande bits de cubo a resolución de vóxel.

        ``origin`` es el índice del primer cubo de ``bits`` y ``shape`` la forma
        en vóxeles a devolver (por defecto, la del volumen desde ese origen).
        """
        if bits is None:
            bits = self.bits
        mask = bits
        for axis in range(3):
            mask = np.repeat(mask, self.s, axis=axis)
        start = [o * self.s for o in origin]
        if shape is None:
            shape = tuple(n - st for n, st in zip(self.volume_shape, start))
        return mask[: shape[0], : shape[1], : shape[2]]


def mark_active(active_voxels: np.ndarray, grid: OccupancyGrid) -> OccupancyGrid:
    """
    Marca G_a: el cubo de cada vóxel activo y sus 26 vecinos existentes.

    Args:
        active_voxels: máscara booleana ``(nz, ny, nx)`` de C_a
        grid: rejilla a rellenar; se pone a cero antes de marcar
    """
    grid.clear()
    zz, yy, xx = np.nonzero(active_voxels)
    if zz.size == 0:
        return grid
    s = grid.s
    grid.bits[zz // s, yy // s, xx // s] = True
    grid.bits = ndimage.binary_dilation(grid.bits, structure=NEIGHBOURHOOD_26)
    return grid
