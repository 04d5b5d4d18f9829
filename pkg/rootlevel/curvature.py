"""
Curvatura media div(∇φ/|∇φ|) por diferencia de normales.

Las normales se evalúan en las caras a medio vóxel: la componente normal a la
cara con una diferencia hacia delante y las tangenciales promediando las
diferencias centrales de los dos vóxeles que comparten la cara. En el borde
del volumen los índices se replican.
"""

import numpy as np
from numba import njit, prange

from rootlevel.volume import VoxelCoord

GRADIENT_EPS = 1e-8


@njit(cache=True, inline="always")
def _at(phi, z, y, x):
    nz, ny, nx = phi.shape
    z = min(max(z, 0), nz - 1)
    y = min(max(y, 0), ny - 1)
    x = min(max(x, 0), nx - 1)
    return phi[z, y, x]


@njit(cache=True)
def _face_normal(phi, z, y, x, axis, eps):
    """Componente ``axis`` de la normal en la cara entre p y p + e_axis."""
    dz0 = 1 if axis == 0 else 0
    dy0 = 1 if axis == 1 else 0
    dx0 = 1 if axis == 2 else 0
    p0 = _at(phi, z, y, x)
    p1 = _at(phi, z + dz0, y + dy0, x + dx0)
    normal = p1 - p0
    total = normal * normal
    for other in range(3):
        if other == axis:
            continue
        dz = 1 if other == 0 else 0
        dy = 1 if other == 1 else 0
        dx = 1 if other == 2 else 0
        tangent = (
            _at(phi, z + dz, y + dy, x + dx)
            - _at(phi, z - dz, y - dy, x - dx)
            + _at(phi, z + dz0 + dz, y + dy0 + dy, x + dx0 + dx)
            - _at(phi, z + dz0 - dz, y + dy0 - dy, x + dx0 - dx)
        ) * 0.25
        total += tangent * tangent
    return normal / np.sqrt(total + eps * eps)


@njit(cache=True)
def curvature_at(phi, z, y, x, eps):
    kappa = 0.0
    kappa += _face_normal(phi, z, y, x, 0, eps) - _face_normal(phi, z - 1, y, x, 0, eps)
    kappa += _face_normal(phi, z, y, x, 1, eps) - _face_normal(phi, z, y - 1, x, 1, eps)
    kappa += _face_normal(phi, z, y, x, 2, eps) - _face_normal(phi, z, y, x - 1, 2, eps)
    return kappa


@njit(cache=True, parallel=True)
def _curvature_points(phi, points, eps, out):
    for i in prange(points.shape[0]):
        out[i] = curvature_at(phi, points[i, 0], points[i, 1], points[i, 2], eps)


def curvature(phi: np.ndarray, coord: VoxelCoord, eps: float = GRADIENT_EPS) -> float:
    """Curvatura media de φ en un vóxel ``(x, y, z)``."""
    phi = np.ascontiguousarray(phi, dtype=np.float64)
    return float(curvature_at(phi, int(coord.z), int(coord.y), int(coord.x), eps))


def curvature_field(phi: np.ndarray, mask: np.ndarray, eps: float = GRADIENT_EPS) -> np.ndarray:
    """Curvatura en los vóxeles de ``mask``, en el orden de ``np.argwhere(mask)``."""
    phi = np.ascontiguousarray(phi, dtype=np.float64)
    points = np.argwhere(mask).astype(np.int64)
    out = np.empty(points.shape[0], dtype=np.float64)
    _curvature_points(phi, points, eps, out)
    return out
