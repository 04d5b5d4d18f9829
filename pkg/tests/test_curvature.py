import numpy as np
import pytest

from rootlevel.curvature import curvature, curvature_field
from rootlevel.volume import VoxelCoord


def _sphere_phi(n, radius):
    c = (n - 1) / 2.0
    zz, yy, xx = np.indices((n, n, n), dtype=np.float64)
    return np.sqrt((xx - c) ** 2 + (yy - c) ** 2 + (zz - c) ** 2) - radius


def _mean_band_curvature(phi, band=1.5):
    return curvature_field(phi, np.abs(phi) <= band).mean()


def test_planar_front_has_zero_curvature():
    zz, yy, xx = np.indices((12, 12, 12), dtype=np.float64)
    phi = xx - 5.5
    interior = np.zeros(phi.shape, dtype=bool)
    interior[2:-2, 2:-2, 2:-2] = True
    assert np.abs(curvature_field(phi, interior)).max() <= 1e-6


def test_sphere_curvature_is_two_over_radius():
    phi = _sphere_phi(36, 10.0)
    mean = _mean_band_curvature(phi)
    assert abs(mean - 0.2) / 0.2 <= 0.2


def test_larger_sphere_is_flatter():
    small = _mean_band_curvature(_sphere_phi(36, 10.0))
    large = _mean_band_curvature(_sphere_phi(56, 20.0))
    assert large < small
    assert abs(large - 0.1) / 0.1 <= 0.2


def test_cylinder_curvature_from_quadratic_field():
    n = 40
    c = (n - 1) / 2.0
    zz, yy, xx = np.indices((10, n, n), dtype=np.float64)
    rho2 = (xx - c) ** 2 + (yy - c) ** 2
    phi = rho2 / 20.0
    rho = np.sqrt(rho2)
    ring = (rho >= 8) & (rho <= 12)
    ring[:2] = False
    ring[-2:] = False
    kappa = curvature_field(phi, ring)
    assert np.all(np.abs(kappa - 1.0 / rho[ring]) <= 0.1 / rho[ring])


def test_point_and_field_agree():
    phi = _sphere_phi(20, 6.0)
    mask = np.zeros(phi.shape, dtype=bool)
    mask[10, 9, 3] = True
    value = curvature(phi, VoxelCoord(x=3, y=9, z=10))
    assert value == pytest.approx(curvature_field(phi, mask)[0])


@pytest.mark.slow
def test_sphere_radius_40():
    mean = _mean_band_curvature(_sphere_phi(100, 40.0))
    assert abs(mean - 0.05) / 0.05 <= 0.2
