"""
Posproceso de Ω₂: se conservan solo las componentes 26-conexas que contienen
alguna semilla; el resto de Ω₂ pasa a Ω₁.

Los identificadores de componente siguen el orden de barrido del volumen
(el primer vóxel en orden z, y, x de cada componente fija su id).
"""

import logging
from typing import List, NamedTuple, Tuple

import numpy as np
from scipy import ndimage

from rootlevel.grid import NEIGHBOURHOOD_26
from rootlevel.seeding import SeedSet

logger = logging.getLogger(__name__)

OMEGA1 = 1
OMEGA2 = 2


class FilterResult(NamedTuple):
    labels: np.ndarray
    components: int
    removed: List[Tuple[int, int]]

    @property
    def removed_voxels(self) -> int:
        return sum(size for _, size in self.removed)

    @property
    def foreground(self) -> np.ndarray:
        return self.labels == OMEGA2


def label_components(mask: np.ndarray) -> Tuple[np.ndarray, int]:
    """Etiqueta componentes 26-conexas (1..n); el fondo queda en 0."""
    ids, n = ndimage.label(np.asarray(mask, dtype=bool), structure=NEIGHBOURHOOD_26)
    return ids, int(n)


def component_sizes(ids: np.ndarray, n: int) -> np.ndarray:
    """Tamaño de cada componente; el índice 0 es el fondo."""
    return np.bincount(ids.ravel(), minlength=n + 1)


def filter_components(labels: np.ndarray, seeds: SeedSet) -> FilterResult:
    """
    Pasa a Ω₁ las componentes de Ω₂ que no contienen ninguna semilla.

    Args:
        labels: campo de etiquetas final del motor (0 = Ω_U, 1 = Ω₁, 2 = Ω₂)
        seeds: Ω₂⁰

    Returns:
        FilterResult: etiquetas filtradas (copia), número de componentes y
        lista ``(id, tamaño)`` de las eliminadas
    """
    labels = np.array(labels, dtype=np.uint8, copy=True)
    ids, n = label_components(labels == OMEGA2)
    if n == 0:
        return FilterResult(labels=labels, components=0, removed=[])

    coords = seeds.coords
    keep = np.zeros(n + 1, dtype=bool)
    keep[ids[coords[:, 2], coords[:, 1], coords[:, 0]]] = True
    keep[0] = True

    sizes = component_sizes(ids, n)
    removed = [(int(i), int(sizes[i])) for i in np.flatnonzero(~keep)]
    for cid, size in removed:
        logger.debug("Componente %d eliminada (%d vóxeles, sin semilla)", cid, size)
    if removed:
        labels[~keep[ids]] = OMEGA1
        logger.info("Posproceso: %d de %d componentes eliminadas", len(removed), n)
    return FilterResult(labels=labels, components=n, removed=removed)
