import logging
from contextlib import contextmanager
from typing import Optional

import numba

logger = logging.getLogger(__name__)


def available_threads() -> int:
    return numba.config.NUMBA_NUM_THREADS


@contextmanager
def worker_threads(workers: Optional[int]):
    """
    Fija el número de hilos de los kernels numba dentro del bloque.

    Los kernels reparten filas/cubos independientes, así que el resultado no
    depende de ``workers``.
    """
    if workers is None:
        yield numba.get_num_threads()
        return
    previous = numba.get_num_threads()
    wanted = max(1, min(int(workers), available_threads()))
    if wanted != workers:
        logger.warning("Se piden %d hilos pero numba admite %d; se usan %d", workers, available_threads(), wanted)
    numba.set_num_threads(wanted)
    try:
        yield wanted
    finally:
        numba.set_num_threads(previous)
