import numpy as np
import pytest
from scipy import ndimage

from rootlevel.models.config import EngineConfig
from rootlevel.models.phantom_spec import PhantomSpec, TubeSpec
from rootlevel.phantom import generate, sample_marks
from rootlevel.seeding import embed_marks


def brute_force_tedt(sources: np.ndarray, b: int) -> np.ndarray:
    """min(b+1, EDT)² de referencia con scipy."""
    cap = (b + 1) * (b + 1)
    if not sources.any():
        return np.full(sources.shape, cap, dtype=np.int64)
    edt = ndimage.distance_transform_edt(~sources)
    d2 = np.rint(edt * edt).astype(np.int64)
    return np.where(d2 <= b * b, d2, cap)


def coherence_violations(phi, b: int) -> int:
    """Vóxeles cuya etiqueta no concuerda con el signo de φ."""
    values, labels = phi.values, phi.labels
    bad = (labels == 2) & (values > 0)
    bad |= (labels == 1) & (values <= 0)
    bad |= (labels == 0) & (values != b + 1)
    bad |= np.abs(values) > b + 1
    return int(np.count_nonzero(bad))


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def brute_tedt():
    return brute_force_tedt


@pytest.fixture
def check_coherence():
    return coherence_violations


@pytest.fixture
def tube_spec():
    """Tubo vertical de radio 4 con una rama oblicua en un cubo de 32³."""
    return PhantomSpec(
        dims=(32, 32, 32),
        tubes=[
            TubeSpec(points=[(16, 16, 0), (16, 16, 31)], radii=[4]),
            TubeSpec(points=[(16, 16, 12), (26, 22, 24)], radii=[3, 2]),
        ],
        mu1=80,
        sigma1=10,
        mu2=160,
        sigma2=10,
        seed=7,
    )


@pytest.fixture
def engine_cfg():
    return EngineConfig(b=5, s=5, k=10, nu=1.0, t=1)


@pytest.fixture
def tube_phantom(tube_spec, engine_cfg):
    """(volumen, verdad terreno, semillas) del fantasma de tubo."""
    volume, truth = generate(tube_spec)
    seeds = embed_marks(sample_marks(truth, n_slices=3, stride=1), volume, engine_cfg)
    return volume, truth, seeds
